use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{AiOutcome, OperatorParams, ScenarioEvent};
use crate::trust::{TrustEstimate, UserState};

/// Share of non-complying responses that are hesitations rather than overrides.
const HESITATE_SHARE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorAction {
    Comply,
    Hesitate,
    Override,
}

/// Running count of AI outcomes; performance is the success rate so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutcomeTally {
    pub successes: u64,
    pub failures: u64,
}

impl OutcomeTally {
    pub fn record(&mut self, outcome: AiOutcome) {
        match outcome {
            AiOutcome::Success => self.successes += 1,
            AiOutcome::Failure => self.failures += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.successes + self.failures
    }

    pub fn success_rate(&self) -> Option<f64> {
        (self.total() > 0).then(|| self.successes as f64 / self.total() as f64)
    }
}

/// One step of the synthetic operator.
///
/// A matched directive relieves workload by `relief_gain`; a mismatch adds
/// half that. Stress follows the workload change, valence drifts with the
/// event's disturbance and recovers with relief. Both noise terms are drawn
/// every call so the stream stays aligned across policies.
pub fn operator_update<R: Rng + ?Sized>(
    state: &UserState,
    matched: bool,
    event: &ScenarioEvent,
    params: &OperatorParams,
    tally: &mut OutcomeTally,
    rng: &mut R,
) -> UserState {
    let relief = if matched { params.relief_gain } else { -params.relief_gain / 2.0 };
    let nw: f64 = rng.sample::<f64, _>(StandardNormal) * params.noise_sd;
    let ns: f64 = rng.sample::<f64, _>(StandardNormal) * params.noise_sd;
    let workload = (state.workload + params.demand_gain * event.task_demand - relief + nw).clamp(0.0, 1.0);
    let stress =
        (state.stress + params.stress_coupling * (workload - state.workload) - relief / 2.0 + ns).clamp(0.0, 1.0);
    let valence = (state.valence + event.disturbance + params.valence_recovery * relief).clamp(-1.0, 1.0);
    tally.record(event.ai_outcome);
    let performance = tally.success_rate().unwrap_or(state.performance);
    UserState { step: state.step + 1, workload, stress, valence, performance, out_of_range: false }
}

/// Draws the operator's response: comply with probability equal to the trust
/// score, otherwise hesitate or override at 70/30.
pub fn choose_action<R: Rng + ?Sized>(trust: &TrustEstimate, rng: &mut R) -> OperatorAction {
    let score = trust.score.clamp(0.0, 1.0);
    let u: f64 = rng.random();
    if u < score {
        OperatorAction::Comply
    } else if u < score + (1.0 - score) * HESITATE_SHARE {
        OperatorAction::Hesitate
    } else {
        OperatorAction::Override
    }
}
