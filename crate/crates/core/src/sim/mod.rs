//! Deterministic closed-loop simulation.
//!
//! Each step: infer trust from the current state, pick a directive (adaptive or
//! a fixed baseline), let the synthetic operator respond, draw the operator's
//! next action, and log it all. The operator model is a transparent linear
//! system rewarding directives that match what the stock policy prescribes; it
//! exercises the loop's wiring and says nothing about real human behavior.

mod corpus;
mod metrics;
mod operator;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::ser_fixed6;
use crate::policy::{
    self, AdaptationPolicy, Content, Context, DeliveryMode, Duration, ExplanationDirective, Granularity, Timing, Tone,
    Transparency, Urgency,
};
use crate::trust::{self, TrustEstimate, TrustInferenceSystem, TrustLevel, UserState};

pub use corpus::{bundled_scenarios, BUNDLED_SCENARIO_FILES};
pub use metrics::{
    compare_policies, compare_policies_with, compute_metrics, ComparisonReport, ComparisonRow, Metrics, PairedDelta,
    METRICS_CSV_HEADER,
};
pub use operator::{choose_action, operator_update, OperatorAction, OutcomeTally};

/// Seeded generator for every random draw in a run (PCG XSL-RR 128/64).
pub type SimRng = rand_pcg::Pcg64;

pub fn sim_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("empty simulation log")]
    EmptyLog,
    #[error(transparent)]
    Trust(#[from] trust::TrustError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AiOutcome {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEvent {
    pub step: u64,
    /// In [0, 1].
    pub task_demand: f64,
    pub ai_outcome: AiOutcome,
    pub urgency: Urgency,
    /// Valence shock in [-0.2, 0.2].
    #[serde(default)]
    pub disturbance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorParams {
    /// Workload relief from a matched directive.
    pub relief_gain: f64,
    /// Workload added per unit of task demand.
    pub demand_gain: f64,
    pub stress_coupling: f64,
    pub valence_recovery: f64,
    pub noise_sd: f64,
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self { relief_gain: 0.15, demand_gain: 0.2, stress_coupling: 0.5, valence_recovery: 0.1, noise_sd: 0.02 }
    }
}

impl OperatorParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let all = [self.relief_gain, self.demand_gain, self.stress_coupling, self.valence_recovery, self.noise_sd];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SimError::InvalidScenario("operator parameters must be finite".into()));
        }
        if self.relief_gain < 0.0 || self.demand_gain < 0.0 || self.noise_sd < 0.0 {
            return Err(SimError::InvalidScenario("relief_gain, demand_gain and noise_sd must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub steps: Vec<ScenarioEvent>,
    #[serde(default)]
    pub operator_params: OperatorParams,
    pub seed: u64,
    /// Standing context; each event overrides its urgency.
    #[serde(default)]
    pub context: Context,
    /// Starting state; neutral (0.5, 0.5, 0.0, 0.5) when absent.
    #[serde(default)]
    pub initial_state: Option<UserState>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let scn: Scenario = serde_json::from_str(text)?;
        scn.validate()?;
        Ok(scn)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScenario(format!("{}: {m}", self.name)));
        if self.steps.is_empty() {
            return bad("needs at least one step".into());
        }
        if self.steps.windows(2).any(|w| w[1].step <= w[0].step) {
            return bad("step indices must be strictly increasing".into());
        }
        for e in &self.steps {
            if !(0.0..=1.0).contains(&e.task_demand) {
                return bad(format!("step {}: task_demand {} outside [0, 1]", e.step, e.task_demand));
            }
            if !(-0.2..=0.2).contains(&e.disturbance) {
                return bad(format!("step {}: disturbance {} outside [-0.2, 0.2]", e.step, e.disturbance));
            }
        }
        self.operator_params.validate()?;
        self.context.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        if let Some(s) = &self.initial_state {
            s.check_finite()?;
        }
        Ok(())
    }

    fn start_state(&self) -> UserState {
        let s = self.initial_state.unwrap_or(UserState {
            step: 0,
            workload: 0.5,
            stress: 0.5,
            valence: 0.0,
            performance: 0.5,
            out_of_range: false,
        });
        s.clamped()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyMode {
    Adaptive,
    StaticVerbose,
    StaticTerse,
}

impl PolicyMode {
    pub const ALL: [PolicyMode; 3] = [PolicyMode::Adaptive, PolicyMode::StaticVerbose, PolicyMode::StaticTerse];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyMode::Adaptive => "adaptive",
            PolicyMode::StaticVerbose => "static-verbose",
            PolicyMode::StaticTerse => "static-terse",
        }
    }

    /// Fixed directive for the static baselines.
    pub fn static_directive(self) -> Option<ExplanationDirective> {
        match self {
            PolicyMode::Adaptive => None,
            PolicyMode::StaticVerbose => Some(ExplanationDirective::fixed(
                Timing::Reactive,
                Duration::Layered,
                Granularity::StepByStep,
                Content::Hierarchical,
                Transparency::Both,
                DeliveryMode::Textual,
                Tone::Neutral,
            )),
            PolicyMode::StaticTerse => Some(ExplanationDirective::fixed(
                Timing::Reactive,
                Duration::Short,
                Granularity::HighLevel,
                Content::Local,
                Transparency::How,
                DeliveryMode::Textual,
                Tone::Neutral,
            )),
        }
    }
}

impl std::fmt::Display for PolicyMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub state: UserState,
    pub trust: TrustEstimate,
    pub directive: ExplanationDirective,
    /// The directive delivered every feature the stock policy prescribed.
    pub matched: bool,
    /// Operator's response to this step's explanation (a_{t+1}).
    pub action: OperatorAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimLog {
    pub scenario: String,
    pub seed: u64,
    pub policy: PolicyMode,
    pub records: Vec<StepRecord>,
}

#[derive(Serialize)]
struct JsonlRecord<'a> {
    step: u64,
    #[serde(serialize_with = "ser_fixed6")]
    workload: f64,
    #[serde(serialize_with = "ser_fixed6")]
    stress: f64,
    #[serde(serialize_with = "ser_fixed6")]
    valence: f64,
    #[serde(serialize_with = "ser_fixed6")]
    performance: f64,
    #[serde(serialize_with = "ser_fixed6")]
    trust_score: f64,
    trust_label: TrustLevel,
    fallback_used: bool,
    fired_rules: Vec<&'a str>,
    directive: &'a ExplanationDirective,
    matched: bool,
    action: OperatorAction,
}

impl SimLog {
    /// One JSON object per step, six-decimal reals, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let line = JsonlRecord {
                step: r.step,
                workload: r.state.workload,
                stress: r.state.stress,
                valence: r.state.valence,
                performance: r.state.performance,
                trust_score: r.trust.score,
                trust_label: r.trust.label,
                fallback_used: r.trust.fallback_used,
                fired_rules: r.trust.fired().map(|f| f.rule_id.as_str()).collect(),
                directive: &r.directive,
                matched: r.matched,
                action: r.action,
            };
            out.push_str(&serde_json::to_string(&line).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.records.last()
    }
}

/// Trust system and policy a run uses. Both default to the stock ones.
#[derive(Debug, Clone)]
pub struct SimEngine {
    pub trust: TrustInferenceSystem,
    pub policy: AdaptationPolicy,
}

impl Default for SimEngine {
    fn default() -> Self {
        Self { trust: trust::build_default_trust_system(), policy: policy::build_default_policy() }
    }
}

impl SimEngine {
    pub fn new(trust: TrustInferenceSystem, policy: AdaptationPolicy) -> Self {
        Self { trust, policy }
    }

    /// Runs with the scenario's own seed.
    pub fn run(&self, scn: &Scenario, mode: PolicyMode) -> Result<SimLog, SimError> {
        self.run_seeded(scn, scn.seed, mode)
    }

    pub fn run_seeded(&self, scn: &Scenario, seed: u64, mode: PolicyMode) -> Result<SimLog, SimError> {
        scn.validate()?;
        let mut rng = sim_rng(seed);
        let mut tally = OutcomeTally::default();
        let mut state = scn.start_state();
        let mut previous: Option<TrustEstimate> = None;
        let mut records = Vec::with_capacity(scn.steps.len());
        let fixed = mode.static_directive();
        for event in &scn.steps {
            state.step = event.step;
            let ctx = Context { urgency: event.urgency, ..scn.context };
            let estimate = trust::infer_trust_with_previous(&self.trust, &state, previous.as_ref())?;
            let prescription = self.policy.prescribe(&estimate, &state, &ctx);
            let directive = match &fixed {
                Some(d) => d.clone(),
                None => prescription.directive.clone(),
            };
            let matched = prescription.matches(&directive);
            let next = operator_update(&state, matched, event, &scn.operator_params, &mut tally, &mut rng);
            let action = choose_action(&estimate, &mut rng);
            records.push(StepRecord { step: event.step, state, trust: estimate.clone(), directive, matched, action });
            previous = Some(estimate);
            state = next;
        }
        Ok(SimLog { scenario: scn.name.clone(), seed, policy: mode, records })
    }
}

/// [`SimEngine::run`] with the stock engine.
pub fn run_scenario(scn: &Scenario, mode: PolicyMode) -> Result<SimLog, SimError> {
    SimEngine::default().run(scn, mode)
}

#[cfg(test)]
mod tests;
