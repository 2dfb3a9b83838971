use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{SignalWindow, TaskEventLog};

/// One replay line: the window's fields at top level plus an optional
/// `events` object. Unknown fields are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayRecord {
    #[serde(flatten)]
    pub window: SignalWindow,
    #[serde(default)]
    pub events: Option<TaskEventLog>,
}

/// A line that failed to parse or validate. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

/// Streams [`ReplayRecord`]s from line-delimited JSON. Blank lines are skipped.
pub struct RecordReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(reader: R) -> Self {
        Self { lines: reader.lines(), line_no: 0 }
    }
}

impl<R: BufRead> Iterator for RecordReader<R> {
    type Item = Result<(usize, ReplayRecord), LineError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line_no += 1;
            let line = match line {
                Ok(l) => l,
                Err(e) => return Some(Err(LineError { line: self.line_no, message: e.to_string() })),
            };
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<ReplayRecord>(&line)
                .map_err(|e| e.to_string())
                .and_then(|r| r.window.validate().map(|_| r).map_err(|e| e.to_string()));
            return Some(
                parsed.map(|r| (self.line_no, r)).map_err(|message| LineError { line: self.line_no, message }),
            );
        }
    }
}

/// Parsed records with their 1-based line numbers, plus the lines skipped.
pub type ReadOutcome = (Vec<(usize, ReplayRecord)>, Vec<LineError>);

/// Reads every record. Lenient mode collects malformed lines and keeps going;
/// strict mode stops at the first one.
pub fn read_records<R: BufRead>(reader: R, strict: bool) -> Result<ReadOutcome, LineError> {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for item in RecordReader::new(reader) {
        match item {
            Ok(r) => records.push(r),
            Err(e) if strict => return Err(e),
            Err(e) => skipped.push(e),
        }
    }
    Ok((records, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"step":1,"rr_intervals_ms":[800,810,790,805],"eeg_load_ratio":1.5,"valence_score":0.5,"window_span_ms":5000,"events":{"successes":8,"failures":2,"errors_per_minute":1.0},"device":"x"}"#;

    #[test]
    fn parses_flat_window_with_events() {
        let (recs, skipped) = read_records(GOOD.as_bytes(), true).unwrap();
        assert!(skipped.is_empty());
        let (line, r) = &recs[0];
        assert_eq!(*line, 1);
        assert_eq!(r.window.eeg_load_ratio, Some(1.5));
        assert_eq!(r.window.gsr_tonic, None);
        assert_eq!(r.events.unwrap().successes, 8);
    }

    #[test]
    fn lenient_skips_and_reports_line_numbers() {
        let text = format!("{GOOD}\nnot json\n\n{}\n", GOOD.replace("\"step\":1", "\"step\":2"));
        let (recs, skipped) = read_records(text.as_bytes(), false).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].0, 4);
        assert_eq!(skipped.len(), 1);
        assert_eq!(skipped[0].line, 2);
    }

    #[test]
    fn strict_aborts_on_first_bad_line() {
        let text = format!("{GOOD}\n{{\"step\":2,\"window_span_ms\":-1}}\n{GOOD}\n");
        let err = read_records(text.as_bytes(), true).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.to_string().starts_with("line 2:"));
    }
}
