use rayon::prelude::*;
use serde::Serialize;

use super::{PolicyMode, Scenario, SimEngine, SimError, SimLog};
use crate::format::fixed6;
use crate::trust::TrustLevel;

/// Consecutive High steps needed before trust counts as established.
const HIGH_SUSTAIN: usize = 3;
const OVERLOAD_THRESHOLD: f64 = 0.8;
const FINAL_SHARE: f64 = 0.1;

pub const METRICS_CSV_HEADER: &str = "scenario,seed,policy,time_to_high_trust,mean_workload,overload_fraction,\
mean_final_trust_score,directive_mismatch_count,trust_variance";

const DISCLAIMER: &str = "NOTE: the operator is a synthetic linear model that rewards directives matching the \
stock policy. These figures check the loop's wiring only; they are not evidence about human trust or workload.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    /// 1-based step position where a run of High labels of at least three
    /// steps begins; `None` if it never happens (written as `inf`).
    pub time_to_high_trust: Option<u64>,
    pub mean_workload: f64,
    /// Share of steps with W > 0.8.
    pub overload_fraction: f64,
    /// Mean trust score over the last 10% of steps (at least one).
    pub mean_final_trust_score: f64,
    pub directive_mismatch_count: u64,
    /// Population variance of the trust score.
    pub trust_variance: f64,
}

impl Metrics {
    /// Metric columns in CSV order (everything after scenario/seed/policy).
    pub fn csv_fields(&self) -> String {
        let tth = self.time_to_high_trust.map_or_else(|| "inf".to_string(), |t| t.to_string());
        format!(
            "{tth},{},{},{},{},{}",
            fixed6(self.mean_workload),
            fixed6(self.overload_fraction),
            fixed6(self.mean_final_trust_score),
            self.directive_mismatch_count,
            fixed6(self.trust_variance)
        )
    }
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    xs.sum::<f64>() / n as f64
}

pub fn compute_metrics(log: &SimLog) -> Result<Metrics, SimError> {
    let recs = &log.records;
    if recs.is_empty() {
        return Err(SimError::EmptyLog);
    }
    let n = recs.len();

    let mut run = 0;
    let mut time_to_high_trust = None;
    for (i, r) in recs.iter().enumerate() {
        run = if r.trust.label == TrustLevel::High { run + 1 } else { 0 };
        if run == HIGH_SUSTAIN {
            time_to_high_trust = Some((i + 2 - HIGH_SUSTAIN) as u64);
            break;
        }
    }

    let scores: Vec<f64> = recs.iter().map(|r| r.trust.score).collect();
    let score_mean = mean(scores.iter().copied());
    let trust_variance = mean(scores.iter().map(|s| (s - score_mean).powi(2)));
    let tail = ((n as f64 * FINAL_SHARE).ceil() as usize).clamp(1, n);

    Ok(Metrics {
        time_to_high_trust,
        mean_workload: mean(recs.iter().map(|r| r.state.workload)),
        overload_fraction: recs.iter().filter(|r| r.state.workload > OVERLOAD_THRESHOLD).count() as f64 / n as f64,
        mean_final_trust_score: mean(scores[n - tail..].iter().copied()),
        directive_mismatch_count: recs.iter().filter(|r| !r.matched).count() as u64,
        trust_variance,
    })
}

/// One (scenario, seed, policy) cell of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scenario: String,
    pub seed: u64,
    pub policy: PolicyMode,
    pub metrics: Metrics,
}

/// Adaptive minus `baseline` for one (scenario, seed) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedDelta {
    pub scenario: String,
    pub seed: u64,
    pub baseline: PolicyMode,
    pub final_trust_delta: f64,
    pub mean_workload_delta: f64,
    pub overload_delta: f64,
}

impl PairedDelta {
    /// Adaptive ends with higher trust and carries lower workload.
    pub fn adaptive_wins(&self) -> bool {
        self.final_trust_delta > 0.0 && self.mean_workload_delta < 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// Ordered by (scenario, seed, policy) in input order.
    pub rows: Vec<ComparisonRow>,
    pub deltas: Vec<PairedDelta>,
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(METRICS_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.scenario, r.seed, r.policy, r.metrics.csv_fields()));
        }
        out
    }

    pub fn deltas_csv(&self) -> String {
        let mut out = String::from("scenario,seed,baseline,final_trust_delta,mean_workload_delta,overload_delta\n");
        for d in &self.deltas {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                d.scenario,
                d.seed,
                d.baseline,
                fixed6(d.final_trust_delta),
                fixed6(d.mean_workload_delta),
                fixed6(d.overload_delta)
            ));
        }
        out
    }

    pub fn deltas_against(&self, baseline: PolicyMode) -> impl Iterator<Item = &PairedDelta> {
        self.deltas.iter().filter(move |d| d.baseline == baseline)
    }

    /// Share of pairs where Adaptive beats `baseline` on both trust and workload.
    pub fn win_rate(&self, baseline: PolicyMode) -> f64 {
        let (wins, total) =
            self.deltas_against(baseline).fold((0, 0), |(w, t), d| (w + d.adaptive_wins() as usize, t + 1));
        if total == 0 {
            0.0
        } else {
            wins as f64 / total as f64
        }
    }

    pub fn summary(&self) -> String {
        let mut policies: Vec<PolicyMode> = Vec::new();
        for r in &self.rows {
            if !policies.contains(&r.policy) {
                policies.push(r.policy);
            }
        }
        let mut out = format!("{DISCLAIMER}\n\n{} runs\n", self.rows.len());
        out.push_str("policy,mean_final_trust_score,mean_workload,overload_fraction,directive_mismatch_count\n");
        for p in &policies {
            let rows: Vec<_> = self.rows.iter().filter(|r| r.policy == *p).map(|r| &r.metrics).collect();
            let k = rows.len() as f64;
            out.push_str(&format!(
                "{p},{},{},{},{}\n",
                fixed6(rows.iter().map(|m| m.mean_final_trust_score).sum::<f64>() / k),
                fixed6(rows.iter().map(|m| m.mean_workload).sum::<f64>() / k),
                fixed6(rows.iter().map(|m| m.overload_fraction).sum::<f64>() / k),
                fixed6(rows.iter().map(|m| m.directive_mismatch_count as f64).sum::<f64>() / k),
            ));
        }
        for p in policies.iter().filter(|p| **p != PolicyMode::Adaptive) {
            let ds: Vec<_> = self.deltas_against(*p).collect();
            let trust_wins = ds.iter().filter(|d| d.final_trust_delta > 0.0).count();
            let load_wins = ds.iter().filter(|d| d.mean_workload_delta < 0.0).count();
            let both = ds.iter().filter(|d| d.adaptive_wins()).count();
            out.push_str(&format!(
                "adaptive vs {p}: higher final trust {trust_wins}/{n}, lower workload {load_wins}/{n}, both {both}/{n}\n",
                n = ds.len()
            ));
        }
        out
    }
}

/// Every scenario × seed × mode in [`PolicyMode::ALL`] with the stock engine.
pub fn compare_policies(scenarios: &[Scenario], seeds: &[u64]) -> Result<ComparisonReport, SimError> {
    compare_policies_with(&SimEngine::default(), scenarios, seeds, &PolicyMode::ALL)
}

/// Runs cells in parallel; results keep input order. Deltas are reported for
/// every listed mode against Adaptive (which is run even if not listed).
pub fn compare_policies_with(
    engine: &SimEngine,
    scenarios: &[Scenario],
    seeds: &[u64],
    policies: &[PolicyMode],
) -> Result<ComparisonReport, SimError> {
    if scenarios.is_empty() || seeds.is_empty() || policies.is_empty() {
        return Err(SimError::InvalidScenario("comparison needs at least one scenario, seed and policy".into()));
    }
    let cells: Vec<(&Scenario, u64)> =
        scenarios.iter().flat_map(|s| seeds.iter().map(move |&seed| (s, seed))).collect();
    let results: Vec<(Vec<ComparisonRow>, Vec<PairedDelta>)> = cells
        .par_iter()
        .map(|&(scn, seed)| -> Result<_, SimError> {
            let adaptive = compute_metrics(&engine.run_seeded(scn, seed, PolicyMode::Adaptive)?)?;
            let mut rows = Vec::with_capacity(policies.len());
            let mut deltas = Vec::with_capacity(policies.len());
            for &p in policies {
                let m = if p == PolicyMode::Adaptive {
                    adaptive.clone()
                } else {
                    compute_metrics(&engine.run_seeded(scn, seed, p)?)?
                };
                deltas.push(PairedDelta {
                    scenario: scn.name.clone(),
                    seed,
                    baseline: p,
                    final_trust_delta: adaptive.mean_final_trust_score - m.mean_final_trust_score,
                    mean_workload_delta: adaptive.mean_workload - m.mean_workload,
                    overload_delta: adaptive.overload_fraction - m.overload_fraction,
                });
                rows.push(ComparisonRow { scenario: scn.name.clone(), seed, policy: p, metrics: m });
            }
            Ok((rows, deltas))
        })
        .collect::<Result<_, _>>()?;
    let (rows, deltas) = results.into_iter().fold((Vec::new(), Vec::new()), |(mut r, mut d), (rr, dd)| {
        r.extend(rr);
        d.extend(dd);
        (r, d)
    });
    Ok(ComparisonReport { rows, deltas })
}
