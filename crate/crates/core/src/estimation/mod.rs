//! Feature records to normalized [`UserState`].
//!
//! Each channel has its own estimator (HRV → stress, EEG load ratio → workload,
//! affect score → valence, task events → performance). [`estimate_state`]
//! composes them, holds the previous value of any channel missing from a
//! window, and EMA-smooths the physiological channels.

mod replay;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trust::UserState;

pub use replay::{read_records, LineError, ReadOutcome, RecordReader, ReplayRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid normalization bounds: {0}")]
    InvalidBounds(String),
}

/// One analysis window of pre-extracted features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalWindow {
    pub step: u64,
    #[serde(default)]
    pub rr_intervals_ms: Option<Vec<f64>>,
    /// Theta/alpha-style workload proxy, dimensionless.
    #[serde(default)]
    pub eeg_load_ratio: Option<f64>,
    /// Tonic skin conductance in microsiemens.
    #[serde(default)]
    pub gsr_tonic: Option<f64>,
    #[serde(default)]
    pub valence_score: Option<f64>,
    pub window_span_ms: f64,
}

impl SignalWindow {
    pub fn empty(step: u64, window_span_ms: f64) -> Self {
        Self { step, rr_intervals_ms: None, eeg_load_ratio: None, gsr_tonic: None, valence_score: None, window_span_ms }
    }

    pub fn validate(&self) -> Result<(), EstimationError> {
        if !(self.window_span_ms.is_finite() && self.window_span_ms > 0.0) {
            return Err(EstimationError::InvalidWindow(format!(
                "window_span_ms must be positive, got {}",
                self.window_span_ms
            )));
        }
        if let Some(rr) = &self.rr_intervals_ms {
            if let Some(bad) = rr.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(EstimationError::InvalidWindow(format!("rr interval {bad} is not positive")));
            }
        }
        for (name, v) in [
            ("eeg_load_ratio", self.eeg_load_ratio),
            ("gsr_tonic", self.gsr_tonic),
            ("valence_score", self.valence_score),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(EstimationError::InvalidWindow(format!("{name} is not finite")));
                }
            }
        }
        Ok(())
    }

    pub fn has_any_channel(&self) -> bool {
        self.rr_intervals_ms.is_some()
            || self.eeg_load_ratio.is_some()
            || self.gsr_tonic.is_some()
            || self.valence_score.is_some()
    }
}

/// Task outcome counts aggregated over one window.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TaskEventLog {
    pub successes: u64,
    pub failures: u64,
    pub errors_per_minute: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationBounds {
    pub rmssd_min_ms: f64,
    pub rmssd_max_ms: f64,
    pub eeg_ratio_min: f64,
    pub eeg_ratio_max: f64,
    pub gsr_min_us: f64,
    pub gsr_max_us: f64,
    /// Share of stress taken from GSR; 0 leaves stress purely HRV-driven.
    pub gsr_weight: f64,
    /// Errors per minute at which the error term bottoms out.
    pub error_rate_cap: f64,
    pub ema_alpha: f64,
}

impl Default for NormalizationBounds {
    fn default() -> Self {
        Self {
            rmssd_min_ms: 10.0,
            rmssd_max_ms: 60.0,
            eeg_ratio_min: 0.5,
            eeg_ratio_max: 2.5,
            gsr_min_us: 1.0,
            gsr_max_us: 20.0,
            gsr_weight: 0.0,
            error_rate_cap: 5.0,
            ema_alpha: 0.4,
        }
    }
}

impl NormalizationBounds {
    pub fn validate(&self) -> Result<(), EstimationError> {
        for (name, lo, hi) in [
            ("rmssd", self.rmssd_min_ms, self.rmssd_max_ms),
            ("eeg_ratio", self.eeg_ratio_min, self.eeg_ratio_max),
            ("gsr", self.gsr_min_us, self.gsr_max_us),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(EstimationError::InvalidBounds(format!("{name}: need min < max, got {lo}..{hi}")));
            }
        }
        if !(0.0..=1.0).contains(&self.gsr_weight) {
            return Err(EstimationError::InvalidBounds("gsr_weight must be in [0, 1]".into()));
        }
        if !(self.error_rate_cap.is_finite() && self.error_rate_cap > 0.0) {
            return Err(EstimationError::InvalidBounds("error_rate_cap must be positive".into()));
        }
        if !(self.ema_alpha > 0.0 && self.ema_alpha <= 1.0) {
            return Err(EstimationError::InvalidBounds("ema_alpha must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Root mean square of successive RR differences, in ms.
pub fn rmssd(rr_intervals_ms: &[f64]) -> Result<f64, EstimationError> {
    if rr_intervals_ms.len() < 2 {
        return Err(EstimationError::InsufficientData(format!(
            "rmssd needs at least 2 intervals, got {}",
            rr_intervals_ms.len()
        )));
    }
    let sum_sq: f64 = rr_intervals_ms.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok((sum_sq / (rr_intervals_ms.len() - 1) as f64).sqrt())
}

fn unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Low HRV reads as high stress.
pub fn stress_from_hrv(rmssd_ms: f64, bounds: &NormalizationBounds) -> f64 {
    unit((bounds.rmssd_max_ms - rmssd_ms) / (bounds.rmssd_max_ms - bounds.rmssd_min_ms))
}

pub fn stress_from_gsr(gsr_us: f64, bounds: &NormalizationBounds) -> f64 {
    unit((gsr_us - bounds.gsr_min_us) / (bounds.gsr_max_us - bounds.gsr_min_us))
}

pub fn workload_from_eeg(eeg_load_ratio: f64, bounds: &NormalizationBounds) -> f64 {
    unit((eeg_load_ratio - bounds.eeg_ratio_min) / (bounds.eeg_ratio_max - bounds.eeg_ratio_min))
}

pub fn valence_passthrough(valence_score: f64) -> f64 {
    valence_score.clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceScore {
    pub value: f64,
    /// No successes or failures were logged; the success rate defaulted to 1.
    pub no_evidence: bool,
}

/// Equal blend of success rate and a capped error-rate penalty.
pub fn performance_score(log: &TaskEventLog, bounds: &NormalizationBounds) -> PerformanceScore {
    let total = log.successes + log.failures;
    let no_evidence = total == 0;
    let success_rate = if no_evidence { 1.0 } else { log.successes as f64 / total as f64 };
    let error_term = 1.0 - (log.errors_per_minute.max(0.0) / bounds.error_rate_cap).min(1.0);
    PerformanceScore { value: unit(0.5 * success_rate + 0.5 * error_term), no_evidence }
}

/// Exponential moving average step.
pub fn smooth(prev: f64, new: f64, alpha: f64) -> f64 {
    alpha * new + (1.0 - alpha) * prev
}

pub const DEFAULT_WORKLOAD: f64 = 0.5;
pub const DEFAULT_STRESS: f64 = 0.5;
pub const DEFAULT_VALENCE: f64 = 0.0;

/// Composes the channel estimators into one state.
///
/// Missing channels hold the previous value (or the neutral defaults when there
/// is no previous state). Present channels are EMA-smoothed against the previous
/// state. Performance comes straight from `events`; with no events it is held,
/// or takes the no-evidence prior.
pub fn estimate_state(
    window: &SignalWindow,
    events: Option<&TaskEventLog>,
    prev: Option<&UserState>,
    bounds: &NormalizationBounds,
) -> Result<UserState, EstimationError> {
    window.validate()?;
    bounds.validate()?;

    let hrv = match &window.rr_intervals_ms {
        Some(rr) if rr.len() >= 2 => Some(stress_from_hrv(rmssd(rr)?, bounds)),
        _ => None,
    };
    let gsr = window.gsr_tonic.filter(|_| bounds.gsr_weight > 0.0).map(|g| stress_from_gsr(g, bounds));
    let stress = match (hrv, gsr) {
        (Some(h), Some(g)) => Some((1.0 - bounds.gsr_weight) * h + bounds.gsr_weight * g),
        (h, g) => h.or(g),
    };
    let workload = window.eeg_load_ratio.map(|r| workload_from_eeg(r, bounds));
    let valence = window.valence_score.map(valence_passthrough);

    if prev.is_none() && stress.is_none() && workload.is_none() && valence.is_none() {
        return Err(EstimationError::InsufficientData(format!(
            "window {} has no usable channel and there is no previous state",
            window.step
        )));
    }

    let alpha = bounds.ema_alpha;
    let channel = |new: Option<f64>, prev: Option<f64>, default: f64| match (new, prev) {
        (Some(n), Some(p)) => smooth(p, n, alpha),
        (Some(n), None) => n,
        (None, Some(p)) => p,
        (None, None) => default,
    };
    let performance = match (events, prev) {
        (Some(log), _) => performance_score(log, bounds).value,
        (None, Some(p)) => p.performance,
        (None, None) => performance_score(&TaskEventLog::default(), bounds).value,
    };
    Ok(UserState {
        step: window.step,
        workload: unit(channel(workload, prev.map(|p| p.workload), DEFAULT_WORKLOAD)),
        stress: unit(channel(stress, prev.map(|p| p.stress), DEFAULT_STRESS)),
        valence: channel(valence, prev.map(|p| p.valence), DEFAULT_VALENCE).clamp(-1.0, 1.0),
        performance,
        out_of_range: false,
    })
}
