use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;
use crate::trust::RuleFiring;

fn quiet() -> OperatorParams {
    OperatorParams { noise_sd: 0.0, ..OperatorParams::default() }
}

fn event(step: u64, demand: f64) -> ScenarioEvent {
    ScenarioEvent {
        step,
        task_demand: demand,
        ai_outcome: AiOutcome::Success,
        urgency: Urgency::Medium,
        disturbance: 0.0,
    }
}

fn state(w: f64) -> UserState {
    UserState::new(0, w, 0.5, 0.0, 0.5).unwrap()
}

fn scenario(name: &str, n: u64, demand: f64, urgency: Urgency) -> Scenario {
    Scenario {
        name: name.into(),
        steps: (1..=n).map(|i| ScenarioEvent { urgency, ..event(i, demand) }).collect(),
        operator_params: OperatorParams::default(),
        seed: 7,
        context: Context::default(),
        initial_state: None,
    }
}

fn estimate(score: f64, label: TrustLevel) -> TrustEstimate {
    TrustEstimate { score, label, rule_trace: Vec::<RuleFiring>::new(), fallback_used: false, input_clamped: false }
}

#[test]
fn matched_relief_hand_value() {
    let mut tally = OutcomeTally::default();
    let next = operator_update(&state(0.6), true, &event(1, 0.0), &quiet(), &mut tally, &mut sim_rng(1));
    assert_abs_diff_eq!(next.workload, 0.45, epsilon = 1e-12);
    // S' = 0.5 + 0.5 * (-0.15) - 0.075
    assert_abs_diff_eq!(next.stress, 0.35, epsilon = 1e-12);
    assert_abs_diff_eq!(next.valence, 0.015, epsilon = 1e-12);
    assert_eq!(next.performance, 1.0);
}

#[test]
fn mismatch_adds_load() {
    let mut tally = OutcomeTally::default();
    let next = operator_update(&state(0.5), false, &event(1, 0.5), &quiet(), &mut tally, &mut sim_rng(1));
    assert_abs_diff_eq!(next.workload, 0.675, epsilon = 1e-12);
}

#[test]
fn calm_state_is_absorbing() {
    let mut tally = OutcomeTally::default();
    let next = operator_update(&state(0.0), true, &event(1, 0.0), &quiet(), &mut tally, &mut sim_rng(1));
    assert_eq!(next.workload, 0.0);
}

#[test]
fn performance_tracks_tally() {
    let mut tally = OutcomeTally::default();
    let mut rng = sim_rng(3);
    let mut s = state(0.5);
    for (i, o) in
        [AiOutcome::Success, AiOutcome::Failure, AiOutcome::Failure, AiOutcome::Success].into_iter().enumerate()
    {
        s = operator_update(
            &s,
            true,
            &ScenarioEvent { ai_outcome: o, ..event(i as u64 + 1, 0.2) },
            &quiet(),
            &mut tally,
            &mut rng,
        );
    }
    assert_eq!(tally, OutcomeTally { successes: 2, failures: 2 });
    assert_eq!(s.performance, 0.5);
}

#[test]
fn action_extremes() {
    let mut rng = sim_rng(5);
    for _ in 0..1000 {
        assert_eq!(choose_action(&estimate(1.0, TrustLevel::High), &mut rng), OperatorAction::Comply);
        assert_ne!(choose_action(&estimate(0.0, TrustLevel::Low), &mut rng), OperatorAction::Comply);
    }
}

#[test]
fn action_distribution_at_half() {
    let mut rng = sim_rng(2024);
    let est = estimate(0.5, TrustLevel::Medium);
    let mut counts = [0usize; 3];
    let n = 10_000;
    for _ in 0..n {
        counts[choose_action(&est, &mut rng) as usize] += 1;
    }
    let freq = counts.map(|c| c as f64 / n as f64);
    assert_abs_diff_eq!(freq[0], 0.5, epsilon = 0.02);
    assert_abs_diff_eq!(freq[1], 0.35, epsilon = 0.02);
    assert_abs_diff_eq!(freq[2], 0.15, epsilon = 0.02);
}

#[test]
fn one_step_run_is_reproducible() {
    let scn = scenario("one", 1, 0.3, Urgency::Medium);
    let a = run_scenario(&scn, PolicyMode::Adaptive).unwrap();
    let b = run_scenario(&scn, PolicyMode::Adaptive).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_jsonl(), b.to_jsonl());
    assert_eq!(a.records.len(), 1);
}

#[test]
fn seeds_change_trajectories() {
    let scn = scenario("s", 20, 0.5, Urgency::Medium);
    let e = SimEngine::default();
    let a = e.run_seeded(&scn, 1, PolicyMode::Adaptive).unwrap();
    let b = e.run_seeded(&scn, 2, PolicyMode::Adaptive).unwrap();
    assert_ne!(a.records, b.records);
}

#[test]
fn calm_success_reaches_high_trust() {
    let scn = scenario("calm", 30, 0.1, Urgency::Low);
    let log = run_scenario(&scn, PolicyMode::Adaptive).unwrap();
    assert_eq!(log.last().unwrap().trust.label, TrustLevel::High);
    let m = compute_metrics(&log).unwrap();
    assert!(m.time_to_high_trust.is_some_and(|t| t <= 30));
}

#[test]
fn verbose_overloads_under_sustained_demand() {
    let scn = scenario("surge", 40, 0.8, Urgency::High);
    let adaptive = compute_metrics(&run_scenario(&scn, PolicyMode::Adaptive).unwrap()).unwrap();
    let verbose = compute_metrics(&run_scenario(&scn, PolicyMode::StaticVerbose).unwrap()).unwrap();
    assert!(verbose.overload_fraction > adaptive.overload_fraction, "{verbose:?} vs {adaptive:?}");
}

#[test]
fn adaptive_always_matches_itself() {
    for scn in bundled_scenarios().unwrap() {
        let log = run_scenario(&scn, PolicyMode::Adaptive).unwrap();
        assert!(log.records.iter().all(|r| r.matched), "{}", scn.name);
        assert_eq!(compute_metrics(&log).unwrap().directive_mismatch_count, 0);
    }
}

fn log_with(labels: &[TrustLevel], workloads: &[f64]) -> SimLog {
    let records = labels
        .iter()
        .zip(workloads)
        .enumerate()
        .map(|(i, (&l, &w))| StepRecord {
            step: i as u64 + 1,
            state: state(w),
            trust: estimate(if l == TrustLevel::High { 0.8 } else { 0.2 }, l),
            directive: ExplanationDirective::BASELINE,
            matched: i % 2 == 0,
            action: OperatorAction::Comply,
        })
        .collect();
    SimLog { scenario: "t".into(), seed: 0, policy: PolicyMode::Adaptive, records }
}

#[test]
fn metrics_definitions() {
    use TrustLevel::*;
    let log = log_with(&[Low, High, High, High, Low], &[0.9; 5]);
    let m = compute_metrics(&log).unwrap();
    assert_eq!(m.time_to_high_trust, Some(2));
    assert_eq!(m.overload_fraction, 1.0);
    assert_eq!(m.directive_mismatch_count, 2);
    // last ceil(0.5) = 1 step
    assert_abs_diff_eq!(m.mean_final_trust_score, 0.2, epsilon = 1e-12);
    // scores 0.2,0.8,0.8,0.8,0.2: mean 0.56, variance 0.0864
    assert_abs_diff_eq!(m.trust_variance, 0.0864, epsilon = 1e-12);
    assert_abs_diff_eq!(m.mean_workload, 0.9, epsilon = 1e-12);

    let flicker = compute_metrics(&log_with(&[High, High, Low, High, High], &[0.1; 5])).unwrap();
    assert_eq!(flicker.time_to_high_trust, None);
    assert!(flicker.csv_fields().starts_with("inf,"));

    let single = compute_metrics(&log_with(&[Medium], &[0.4])).unwrap();
    assert_eq!(single.trust_variance, 0.0);
}

#[test]
fn empty_log_is_an_error() {
    let log = SimLog { scenario: "e".into(), seed: 0, policy: PolicyMode::Adaptive, records: vec![] };
    assert!(matches!(compute_metrics(&log), Err(SimError::EmptyLog)));
}

#[test]
fn scenario_validation() {
    let mut scn = scenario("v", 3, 0.5, Urgency::Low);
    assert!(scn.validate().is_ok());
    scn.steps[2].step = 2;
    assert!(scn.validate().is_err());
    let mut scn = scenario("v", 3, 0.5, Urgency::Low);
    scn.steps[0].disturbance = 0.3;
    assert!(scn.validate().is_err());
    let mut scn = scenario("v", 3, 0.5, Urgency::Low);
    scn.operator_params.noise_sd = -1.0;
    assert!(scn.validate().is_err());
    assert!(scenario("v", 0, 0.5, Urgency::Low).validate().is_err());
    assert!(Scenario::from_json("{\"name\": \"x\",\n \"steps\": [}").is_err());
}

#[test]
fn scenario_json_round_trip() {
    let scn = scenario("rt", 4, 0.25, Urgency::High);
    let text = serde_json::to_string(&scn).unwrap();
    assert_eq!(Scenario::from_json(&text).unwrap(), scn);
}

#[test]
fn bundled_corpus_loads() {
    let all = bundled_scenarios().unwrap();
    assert_eq!(all.len(), 5);
}

#[test]
fn self_comparison_has_zero_deltas() {
    let scns = vec![scenario("a", 10, 0.4, Urgency::Medium)];
    let report = compare_policies_with(&SimEngine::default(), &scns, &[1, 2], &[PolicyMode::Adaptive]).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert!(report.deltas.iter().all(|d| d.final_trust_delta == 0.0 && d.mean_workload_delta == 0.0));
}

#[test]
fn compare_row_count_and_order() {
    let scns = vec![scenario("a", 8, 0.4, Urgency::Medium), scenario("b", 8, 0.7, Urgency::High)];
    let seeds = [3, 1, 2];
    let report = compare_policies(&scns, &seeds).unwrap();
    assert_eq!(report.rows.len(), 2 * 3 * 3);
    let keys: Vec<_> = report.rows.iter().map(|r| (r.scenario.clone(), r.seed, r.policy)).collect();
    let mut expected = Vec::new();
    for s in ["a", "b"] {
        for seed in seeds {
            for p in PolicyMode::ALL {
                expected.push((s.to_string(), seed, p));
            }
        }
    }
    assert_eq!(keys, expected);
    assert_eq!(report.to_csv().lines().count(), 1 + 18);
    assert!(report.summary().starts_with("NOTE:"));
    assert_eq!(report.to_csv(), compare_policies(&scns, &seeds).unwrap().to_csv());
}

#[test]
fn jsonl_uses_fixed_point() {
    let log = run_scenario(&scenario("j", 2, 0.3, Urgency::Medium), PolicyMode::StaticTerse).unwrap();
    let text = log.to_jsonl();
    assert_eq!(text.lines().count(), 2);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["step"], 1);
    assert!(text.contains("\"workload\":0.500000"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn states_stay_bounded(seed in any::<u64>(), demands in prop::collection::vec(0.0..=1.0f64, 1..30),
                           dist in -0.2..=0.2f64, mode in prop::sample::select(PolicyMode::ALL.to_vec())) {
        let steps = demands.iter().enumerate().map(|(i, &d)| ScenarioEvent {
            step: i as u64 + 1,
            task_demand: d,
            ai_outcome: if i % 3 == 0 { AiOutcome::Failure } else { AiOutcome::Success },
            urgency: Urgency::High,
            disturbance: dist,
        }).collect();
        let scn = Scenario { steps, operator_params: OperatorParams { noise_sd: 0.2, ..OperatorParams::default() }, ..scenario("p", 0, 0.0, Urgency::Low) };
        let log = SimEngine::default().run_seeded(&scn, seed, mode).unwrap();
        prop_assert_eq!(log.records.len(), demands.len());
        for w in log.records.windows(2) {
            prop_assert!(w[1].step > w[0].step);
        }
        for r in &log.records {
            let s = r.state;
            prop_assert!((0.0..=1.0).contains(&s.workload) && (0.0..=1.0).contains(&s.stress));
            prop_assert!((-1.0..=1.0).contains(&s.valence) && (0.0..=1.0).contains(&s.performance));
        }
        let m = compute_metrics(&log).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.overload_fraction));
    }

    #[test]
    fn matched_relief_drains_workload(w in 0.0..=1.0f64, steps in 1usize..20) {
        let mut tally = OutcomeTally::default();
        let mut rng = sim_rng(0);
        let mut s = state(w);
        for i in 0..steps {
            let next = operator_update(&s, true, &event(i as u64 + 1, 0.0), &quiet(), &mut tally, &mut rng);
            prop_assert!(next.workload <= s.workload);
            s = next;
        }
        if steps >= 7 {
            prop_assert_eq!(s.workload, 0.0);
        }
    }
}
