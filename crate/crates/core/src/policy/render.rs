use serde::{Deserialize, Serialize};

use super::{DeliveryMode, Duration, ExplanationDirective, Granularity, Tone, Transparency};

/// Word budget for `Duration::Short` messages (about 2–3 seconds of speech).
pub const SHORT_WORD_LIMIT: usize = 12;

const STEP_SEPARATOR: &str = " → ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Certainty {
    #[default]
    High,
    Moderate,
    Low,
}

impl Certainty {
    fn tag(self) -> &'static str {
        match self {
            Certainty::High => "High certainty:",
            Certainty::Moderate => "Moderate certainty:",
            Certainty::Low => "Low certainty:",
        }
    }
}

/// What the AI is doing, in the pieces the templates need.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActionDescription {
    /// One-clause summary, e.g. "clear path detected".
    pub summary: String,
    /// Sub-steps for step-by-step granularity.
    #[serde(default)]
    pub steps: Vec<String>,
    #[serde(default)]
    pub certainty: Certainty,
    /// How the decision was reached ("heatmap and terrain risk").
    #[serde(default)]
    pub method: Option<String>,
    /// What the action is for ("maximize coverage").
    #[serde(default)]
    pub intent: Option<String>,
}

impl ActionDescription {
    pub fn new(summary: impl Into<String>) -> Self {
        Self { summary: summary.into(), ..Default::default() }
    }

    pub fn with_steps<S: Into<String>>(mut self, steps: impl IntoIterator<Item = S>) -> Self {
        self.steps = steps.into_iter().map(Into::into).collect();
        self
    }
}

/// Which template the confidence-statement transparency uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderStyle {
    /// Certainty tag, e.g. "High certainty: ...".
    #[default]
    Confidence,
    /// Corrective/fallback framing after AI errors.
    Corrective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationMessage {
    pub text: String,
    /// Optional elaboration delivered after `text` for layered explanations.
    pub follow_up: Option<String>,
    pub mode: DeliveryMode,
    pub duration: Duration,
    pub tone: Tone,
}

pub fn render_directive(d: &ExplanationDirective, action: &ActionDescription) -> ExplanationMessage {
    render_directive_with(d, action, RenderStyle::Confidence)
}

/// Number of words, not counting step separators.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().filter(|w| *w != "→").count()
}

pub fn render_directive_with(
    d: &ExplanationDirective,
    action: &ActionDescription,
    style: RenderStyle,
) -> ExplanationMessage {
    let summary = action.summary.trim().trim_end_matches('.');
    let chain = d.granularity == Granularity::StepByStep && !action.steps.is_empty();
    let body = if chain { action.steps.join(STEP_SEPARATOR) } else { summary.to_string() };

    let mut head = match (d.transparency, style) {
        (Transparency::ConfidenceStatement, RenderStyle::Confidence) => format!("{} {body}", action.certainty.tag()),
        (Transparency::ConfidenceStatement, RenderStyle::Corrective) => format!("Correcting course: {body}"),
        _ => capitalize(&body),
    };
    if !chain {
        head.push('.');
    }

    let mut details = Vec::new();
    if matches!(d.transparency, Transparency::How | Transparency::Both) {
        if let Some(m) = &action.method {
            details.push(format!("Based on {}.", m.trim_end_matches('.')));
        }
    }
    if matches!(d.transparency, Transparency::Why | Transparency::Both) {
        if let Some(i) = &action.intent {
            details.push(format!("Goal: {}.", i.trim_end_matches('.')));
        }
    }

    let (text, follow_up) = match d.duration {
        Duration::Short => (truncate_words(&head, SHORT_WORD_LIMIT), None),
        Duration::Extended => {
            let mut t = head;
            for x in &details {
                t.push(' ');
                t.push_str(x);
            }
            (t, None)
        }
        Duration::Layered => (head, (!details.is_empty()).then(|| details.join(" "))),
    };
    ExplanationMessage { text, follow_up, mode: d.mode, duration: d.duration, tone: d.tone }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn truncate_words(text: &str, limit: usize) -> String {
    if word_count(text) <= limit {
        return text.to_string();
    }
    let mut kept = Vec::new();
    let mut words = 0;
    for tok in text.split_whitespace() {
        if tok != "→" {
            if words == limit {
                break;
            }
            words += 1;
        }
        kept.push(tok);
    }
    while kept.last() == Some(&"→") {
        kept.pop();
    }
    let mut out = kept.join(" ");
    out = out.trim_end_matches(['.', ',', ':', ';']).to_string();
    out.push('…');
    out
}
