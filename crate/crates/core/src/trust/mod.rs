//! Trust inference over workload, stress, valence and performance.
//!
//! [`build_default_trust_system`] instantiates the stock variables and rule base;
//! [`infer_trust`] runs the Mamdani pipeline and returns a [`TrustEstimate`]
//! carrying a trace of every rule. When no rule fires the estimate falls back
//! according to [`FallbackPolicy`] and is flagged.

mod default;
mod document;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{CrispMode, FuzzyError, FuzzyRule, LinguisticVariable, MamdaniSystem};
use crate::scalar::{clamp, lit, to_f64, Scalar};

pub use default::{
    build_default_trust_system, default_rules, performance_variable, stress_variable, trust_variable, valence_variable,
    workload_variable,
};
pub use document::SystemDocument;

pub const WORKLOAD: &str = "workload";
pub const STRESS: &str = "stress";
pub const VALENCE: &str = "valence";
pub const PERFORMANCE: &str = "performance";
pub const TRUST: &str = "trust";

/// Input variable names in the order [`UserState::values`] yields them.
pub const INPUT_ORDER: [&str; 4] = [WORKLOAD, STRESS, VALENCE, PERFORMANCE];

#[derive(Debug, Error)]
pub enum TrustError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error("malformed system document: {0}")]
    Document(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrustLevel {
    Low,
    Medium,
    High,
}

impl TrustLevel {
    pub const ALL: [TrustLevel; 3] = [TrustLevel::Low, TrustLevel::Medium, TrustLevel::High];

    pub fn as_str(self) -> &'static str {
        match self {
            TrustLevel::Low => "Low",
            TrustLevel::Medium => "Medium",
            TrustLevel::High => "High",
        }
    }

    pub fn from_term(term: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str() == term)
    }
}

impl fmt::Display for TrustLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Normalized operator state at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct UserState<T = f64> {
    pub step: u64,
    /// W in [0, 1].
    pub workload: T,
    /// S in [0, 1].
    pub stress: T,
    /// E in [-1, 1].
    pub valence: T,
    /// P in [0, 1].
    pub performance: T,
    /// Set when construction had to clamp a field into range.
    #[serde(default)]
    pub out_of_range: bool,
}

impl<T: Scalar> UserState<T> {
    /// Clamps each field into its interval and flags the state if any clamping
    /// happened. NaN or infinite fields are rejected.
    pub fn new(step: u64, workload: T, stress: T, valence: T, performance: T) -> Result<Self, TrustError> {
        let raw = Self { step, workload, stress, valence, performance, out_of_range: false };
        raw.check_finite()?;
        Ok(raw.clamped())
    }

    pub fn check_finite(&self) -> Result<(), TrustError> {
        for (name, v) in INPUT_ORDER.iter().zip(self.values()) {
            if !v.is_finite() {
                return Err(TrustError::InvalidState(format!("{name} is {v}")));
            }
        }
        Ok(())
    }

    /// Copy with every field clamped; `out_of_range` is set if anything moved.
    pub fn clamped(&self) -> Self {
        let (zero, one) = (T::zero(), T::one());
        let out = Self {
            step: self.step,
            workload: clamp(self.workload, zero, one),
            stress: clamp(self.stress, zero, one),
            valence: clamp(self.valence, -one, one),
            performance: clamp(self.performance, zero, one),
            out_of_range: self.out_of_range,
        };
        let moved = out.values() != self.values();
        Self { out_of_range: out.out_of_range || moved, ..out }
    }

    pub fn values(&self) -> [T; 4] {
        [self.workload, self.stress, self.valence, self.performance]
    }

    pub fn in_range(&self) -> bool {
        let (zero, one) = (T::zero(), T::one());
        let unit = |v: T| v >= zero && v <= one;
        unit(self.workload)
            && unit(self.stress)
            && self.valence >= -one
            && self.valence <= one
            && unit(self.performance)
    }
}

/// Trace entry for one rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RuleFiring<T = f64> {
    pub rule_id: String,
    pub consequent: TrustLevel,
    pub activation: T,
    pub annotation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct TrustEstimate<T = f64> {
    pub score: T,
    pub label: TrustLevel,
    /// One entry per rule, in rule-base order.
    pub rule_trace: Vec<RuleFiring<T>>,
    pub fallback_used: bool,
    /// The input state had to be clamped into the variable domains.
    #[serde(default)]
    pub input_clamped: bool,
}

impl<T: Scalar> TrustEstimate<T> {
    pub fn neutral_fallback(rule_trace: Vec<RuleFiring<T>>) -> Self {
        Self { score: lit(0.5), label: TrustLevel::Medium, rule_trace, fallback_used: true, input_clamped: false }
    }

    /// Max activation per trust level over the trace, indexed Low/Medium/High.
    pub fn aggregated(&self) -> [T; 3] {
        let mut acc = [T::zero(); 3];
        for f in &self.rule_trace {
            let i = f.consequent as usize;
            acc[i] = acc[i].max(f.activation);
        }
        acc
    }

    pub fn fired(&self) -> impl Iterator<Item = &RuleFiring<T>> {
        self.rule_trace.iter().filter(|f| f.activation > T::zero())
    }

    pub fn activation(&self, rule_id: &str) -> Option<T> {
        self.rule_trace.iter().find(|f| f.rule_id == rule_id).map(|f| f.activation)
    }
}

/// What to report when no rule fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackPolicy {
    /// Medium at score 0.5.
    #[default]
    Neutral,
    /// Repeat the previous estimate's label and score; neutral if there is none.
    HoldPrevious,
}

/// Four input variables, the trust output, and the trust rule base.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustInferenceSystem<T = f64> {
    system: MamdaniSystem<T>,
    consequents: Vec<TrustLevel>,
    fallback: FallbackPolicy,
}

impl<T: Scalar> TrustInferenceSystem<T> {
    /// Inputs may come in any order but must be exactly workload, stress,
    /// valence and performance; the output terms must be Low, Medium, High.
    pub fn from_parts(
        mut inputs: Vec<LinguisticVariable<T>>,
        output: LinguisticVariable<T>,
        rules: Vec<FuzzyRule<T>>,
        crisp_mode: CrispMode,
        fallback: FallbackPolicy,
    ) -> Result<Self, TrustError> {
        if inputs.len() != INPUT_ORDER.len() {
            return Err(FuzzyError::Config(format!("expected inputs {INPUT_ORDER:?}")).into());
        }
        let mut ordered = Vec::with_capacity(4);
        for name in INPUT_ORDER {
            let i = inputs
                .iter()
                .position(|v| v.name() == name)
                .ok_or_else(|| FuzzyError::Config(format!("missing input variable {name}")))?;
            ordered.push(inputs.swap_remove(i));
        }
        let terms: Vec<&str> = output.terms().iter().map(|t| t.name.as_str()).collect();
        if terms != ["Low", "Medium", "High"] {
            return Err(FuzzyError::Config(format!("output terms must be [Low, Medium, High], got {terms:?}")).into());
        }
        let system = MamdaniSystem::new(ordered, output, rules, crisp_mode)?;
        let consequents = system.rules().iter().map(|r| TrustLevel::from_term(&r.consequent).unwrap()).collect();
        Ok(Self { system, consequents, fallback })
    }

    pub fn mamdani(&self) -> &MamdaniSystem<T> {
        &self.system
    }

    pub fn inputs(&self) -> &[LinguisticVariable<T>] {
        self.system.inputs()
    }

    pub fn input(&self, name: &str) -> Option<&LinguisticVariable<T>> {
        self.system.input(name)
    }

    pub fn output(&self) -> &LinguisticVariable<T> {
        self.system.output()
    }

    /// Any variable, input or output, by name.
    pub fn variable(&self, name: &str) -> Option<&LinguisticVariable<T>> {
        self.input(name).or_else(|| (self.output().name() == name).then(|| self.output()))
    }

    pub fn rules(&self) -> &[FuzzyRule<T>] {
        self.system.rules()
    }

    pub fn crisp_mode(&self) -> CrispMode {
        self.system.crisp_mode()
    }

    pub fn with_crisp_mode(mut self, mode: CrispMode) -> Self {
        self.system.set_crisp_mode(mode);
        self
    }

    pub fn fallback(&self) -> FallbackPolicy {
        self.fallback
    }

    pub fn with_fallback(mut self, fallback: FallbackPolicy) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn from_json(text: &str) -> Result<Self, TrustError> {
        let doc: SystemDocument<T> = serde_json::from_str(text)?;
        doc.into_system()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SystemDocument::from_system(self)).expect("system document serializes")
    }
}

/// Full inference with the neutral or configured fallback and no history.
pub fn infer_trust<T: Scalar>(
    sys: &TrustInferenceSystem<T>,
    state: &UserState<T>,
) -> Result<TrustEstimate<T>, TrustError> {
    infer_trust_with_previous(sys, state, None)
}

/// As [`infer_trust`], with the previous estimate available to
/// [`FallbackPolicy::HoldPrevious`].
pub fn infer_trust_with_previous<T: Scalar>(
    sys: &TrustInferenceSystem<T>,
    state: &UserState<T>,
    previous: Option<&TrustEstimate<T>>,
) -> Result<TrustEstimate<T>, TrustError> {
    state.check_finite()?;
    let raw = state.values();
    let mut values = raw;
    for (v, var) in values.iter_mut().zip(sys.inputs()) {
        *v = var.clamp(*v);
    }
    let input_clamped = state.out_of_range || values != raw;
    let out = sys.system.infer(&values)?;
    let rule_trace: Vec<RuleFiring<T>> = sys
        .rules()
        .iter()
        .zip(&sys.consequents)
        .zip(&out.rule_activations)
        .map(|((r, c), a)| RuleFiring {
            rule_id: r.id.clone(),
            consequent: *c,
            activation: *a,
            annotation: r.annotation.clone(),
        })
        .collect();
    let mut est = match out.score {
        Some(score) => {
            TrustEstimate { score, label: TrustLevel::ALL[out.label], rule_trace, fallback_used: false, input_clamped }
        }
        None => match (sys.fallback, previous) {
            (FallbackPolicy::HoldPrevious, Some(prev)) => {
                TrustEstimate { score: prev.score, label: prev.label, rule_trace, fallback_used: true, input_clamped }
            }
            _ => TrustEstimate::neutral_fallback(rule_trace),
        },
    };
    est.input_clamped = input_clamped;
    Ok(est)
}

/// Multi-line rendering of the fired rules (strongest first, ties by id)
/// ending with the label and score.
pub fn explain_inference<T: Scalar>(est: &TrustEstimate<T>) -> String {
    let mut fired: Vec<&RuleFiring<T>> = est.fired().collect();
    fired.sort_by(|a, b| {
        b.activation
            .partial_cmp(&a.activation)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.rule_id.cmp(&b.rule_id))
    });
    let mut out = String::new();
    if fired.is_empty() {
        out.push_str("no rule fired; using fallback estimate\n");
    }
    for f in fired {
        writeln!(out, "{} ({:.3}) -> trust {}: {}", f.rule_id, to_f64(f.activation), f.consequent, f.annotation)
            .unwrap();
    }
    write!(out, "trust: {} (score {:.3})", est.label, to_f64(est.score)).unwrap();
    out
}
