//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//! Run with `cargo test --test acceptance`.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use trust_xai::estimation::rmssd;
use trust_xai::fuzzy::{defuzzify_centroid, AggregatedOutput, LinguisticVariable, PiecewiseLinearMf, Term};
use trust_xai::policy::{
    build_default_policy, decide, Content, Context, DeliveryMode, Duration, Engagement, Familiarity, Granularity,
    Predictability, Timing, Tone, Transparency, Urgency,
};
use trust_xai::sim::{bundled_scenarios, compare_policies, compute_metrics, run_scenario, PolicyMode};
use trust_xai::trust::{build_default_trust_system, infer_trust, TrustLevel};
use trust_xai::{TrustSystem, UserState};

type Check = Result<String, String>;
type Oracle = fn(f64) -> [f64; 3];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sys() -> TrustSystem {
    build_default_trust_system()
}

fn degrees(sys: &TrustSystem, var: &str, x: f64) -> Vec<f64> {
    sys.variable(var).unwrap().fuzzify(x).unwrap().degrees().to_vec()
}

fn c1_membership_fidelity() -> Check {
    let sys = sys();
    let mut worst: f64 = 0.0;
    let families: [(&str, f64, Oracle); 4] = [
        ("workload", 0.0, mu_wsr),
        ("stress", 0.0, mu_wsr),
        ("valence", -1.0, mu_valence),
        ("performance", 0.0, mu_performance),
    ];
    let mut points = 0;
    for (var, lo, oracle) in families {
        for x in grid(lo, 1.0, 0.001) {
            let got = degrees(&sys, var, x);
            for (g, o) in got.iter().zip(oracle(x)) {
                worst = worst.max((g - o).abs());
            }
            points += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("{points} grid points, max deviation {worst:.1e}"))
}

fn c2_partition_of_unity() -> Check {
    let sys = sys();
    let mut worst: f64 = 0.0;
    for var in ["workload", "stress"] {
        for x in grid(0.0, 1.0, 0.001) {
            worst = worst.max((degrees(&sys, var, x).iter().sum::<f64>() - 1.0).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max |sum - 1| = {worst:e}"))?;
    Ok(format!("max |sum - 1| = {worst:.1e}"))
}

fn coverage_floor(sys: &TrustSystem, var: &str, lo: f64) -> (f64, f64) {
    grid(lo, 1.0, 0.001)
        .into_iter()
        .map(|x| (x, degrees(sys, var, x).into_iter().fold(0.0, f64::max)))
        .fold((f64::NAN, f64::INFINITY), |best, (x, m)| if m < best.1 { (x, m) } else { best })
}

fn c3_coverage_floors() -> Check {
    let sys = sys();
    let (ex, em) = coverage_floor(&sys, "valence", -1.0);
    let (px, pm) = coverage_floor(&sys, "performance", 0.0);
    // Neutral meets Positive where (0.5 - e)/0.5 = (e - 0.1)/0.4, i.e. e = 0.25/0.9.
    let e_star = 0.25 / 0.9;
    ensure((em - 0.444).abs() <= 0.002 && (ex.abs() - e_star).abs() <= 0.002, || {
        format!("E floor {em:.4} at {ex:.4}")
    })?;
    ensure((pm - 0.400).abs() <= 0.002 && (px - 0.62).abs() <= 0.002, || format!("P floor {pm:.4} at {px:.4}"))?;
    Ok(format!("E {em:.4} at {ex:.3}, P {pm:.4} at {px:.3}"))
}

fn c4_rule_oracle() -> Check {
    let sys = sys();
    let mut worst: f64 = 0.0;
    for [w, s, e, p] in random_states(0x5eed, 10_000) {
        let est = infer_trust(&sys, &UserState::new(0, w, s, e, p).unwrap()).map_err(|e| e.to_string())?;
        for (id, want) in RULE_IDS.iter().zip(rule_activations(w, s, e, p)) {
            worst = worst.max((est.activation(id).unwrap_or(0.0) - want).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("10000 states x 7 rules, max deviation {worst:.1e}"))
}

fn c5_worked_traces() -> Check {
    let sys = sys();
    let run = |w, s, e, p| infer_trust(&sys, &UserState::new(0, w, s, e, p).unwrap()).unwrap();

    let a = run(0.9, 0.9, -0.6, 0.3);
    ensure(a.label == TrustLevel::Low, || format!("overload: {:?}", a.label))?;
    for id in ["R1", "R5", "R6"] {
        ensure(a.activation(id) == Some(1.0), || format!("overload: {id} = {:?}", a.activation(id)))?;
    }
    let b = run(0.1, 0.1, 0.0, 0.5);
    ensure(b.label == TrustLevel::High && b.activation("R3") == Some(1.0), || format!("calm: {b:?}"))?;
    let c = run(0.5, 0.1, 0.6, 0.5);
    ensure(c.fallback_used && c.label == TrustLevel::Medium, || format!("fallback: {c:?}"))?;
    let d = run(0.9, 0.1, 0.8, 0.9);
    let [lo, _, hi] = d.aggregated();
    ensure(lo == hi && lo > 0.0 && d.label == TrustLevel::Low, || format!("tie: {d:?}"))?;
    Ok(format!("overload Low ({:.3}), calm High ({:.3}), fallback flagged, tie -> Low", a.score, b.score))
}

fn c6_defuzzification() -> Check {
    let sys = sys();
    let out = sys.output();
    let centroid = |v: Vec<f64>| defuzzify_centroid(out, &AggregatedOutput::from_values(out, v).unwrap()).unwrap();
    let low = centroid(vec![1.0, 0.0, 0.0]);
    let high = centroid(vec![0.0, 0.0, 1.0]);
    let low_ref = centroid_simpson([1.0, 0.0, 0.0], 200_000);
    let high_ref = centroid_simpson([0.0, 0.0, 1.0], 200_000);
    ensure((low - 0.1857).abs() <= 1e-3 && (low - low_ref).abs() <= 1e-3, || {
        format!("sole Low {low} (ref {low_ref})")
    })?;
    ensure((high - 0.8143).abs() <= 1e-3 && (high - high_ref).abs() <= 1e-3, || {
        format!("sole High {high} (ref {high_ref})")
    })?;

    let mut rng = rand_pcg::Pcg64::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.random_range(0.01..=1.0);
        let apex: f64 = rng.random_range(0.2..=0.8);
        let half = rng.random_range(0.05..=0.2);
        let var = LinguisticVariable::new(
            "t",
            (0.0, 1.0),
            vec![
                Term::new("Tri", PiecewiseLinearMf::triangle(apex - half, apex, apex + half).unwrap()),
                Term::new("Off", PiecewiseLinearMf::left_shoulder(0.0, 0.01).unwrap()),
            ],
        )
        .unwrap();
        let c = defuzzify_centroid(&var, &AggregatedOutput::from_values(&var, vec![alpha, 0.0]).unwrap()).unwrap();
        worst = worst.max((c - apex).abs());
    }
    ensure(worst <= 1e-3, || format!("symmetric clipping drift {worst:e}"))?;
    Ok(format!("sole Low {low:.4}, sole High {high:.4}, max apex drift {worst:.1e} over 100 clips"))
}

fn c7_policy_conformance() -> Check {
    let sys = sys();
    let policy = build_default_policy();
    let state = UserState::new(0, 0.9, 0.9, -0.6, 0.3).unwrap();
    let est = infer_trust(&sys, &state).unwrap();
    let ctx = Context { urgency: Urgency::High, ..Context::default() };
    let d = decide(&est, &state, &ctx, &policy);
    let got = (d.timing, d.duration, d.granularity, d.content, d.transparency, d.mode, d.tone);
    let want = (
        Timing::Proactive,
        Duration::Short,
        Granularity::HighLevel,
        Content::Local,
        Transparency::ConfidenceStatement,
        DeliveryMode::Auditory,
        Tone::Calming,
    );
    ensure(est.label == TrustLevel::Low && got == want, || format!("vignette: {got:?}"))?;

    let calm = UserState::new(0, 0.1, 0.1, 0.0, 0.5).unwrap();
    let est = infer_trust(&sys, &calm).unwrap();
    let d = decide(&est, &calm, &Context::default(), &policy);
    ensure(
        est.label == TrustLevel::High
            && d.duration == Duration::Layered
            && d.granularity == Granularity::StepByStep
            && d.mode == DeliveryMode::Multimodal,
        || format!("calm: {d:?}"),
    )?;
    Ok("vignette and calm/high-trust directives as specified".into())
}

fn c8_channel_safety() -> Check {
    let sys = sys();
    let policy = build_default_policy();
    let mut rng = rand_pcg::Pcg64::seed_from_u64(8);
    let pick = |r: &mut rand_pcg::Pcg64| r.random_range(0..3);
    for (i, [w, s, e, p]) in random_states(88, 10_000).into_iter().enumerate() {
        let (auditory_available, visual_available) = match pick(&mut rng) {
            0 => (true, false),
            1 => (false, true),
            _ => (true, true),
        };
        let ctx = Context {
            urgency: [Urgency::Low, Urgency::Medium, Urgency::High][pick(&mut rng)],
            task_familiarity: if rng.random() { Familiarity::Familiar } else { Familiarity::Unfamiliar },
            engagement: if rng.random() { Engagement::Engaged } else { Engagement::Disengaged },
            predictability_flag: if rng.random() { Predictability::Predictable } else { Predictability::Unpredictable },
            auditory_available,
            visual_available,
        };
        let state = UserState::new(i as u64, w, s, e, p).unwrap();
        let est = infer_trust(&sys, &state).unwrap();
        let d = decide(&est, &state, &ctx, &policy);
        ensure(ctx.mode_available(d.mode), || format!("{:?} emitted for {ctx:?}", d.mode))?;
    }
    Ok("10000 (state, context) pairs, no unavailable mode".into())
}

fn c9_closed_loop() -> Check {
    let scns = bundled_scenarios().map_err(|e| e.to_string())?;
    let seeds: Vec<u64> = (1..=20).collect();
    let report = compare_policies(&scns, &seeds).map_err(|e| e.to_string())?;
    let rate = report.win_rate(PolicyMode::StaticVerbose);
    let pairs = report.deltas_against(PolicyMode::StaticVerbose).count();
    ensure(pairs == 100, || format!("{pairs} pairs"))?;
    ensure(rate >= 0.9, || format!("win rate {rate:.2}"))?;
    Ok(format!(
        "Adaptive beats StaticVerbose on final trust and workload in {:.0}% of {pairs} pairs (synthetic operator)",
        rate * 100.0
    ))
}

fn c10_determinism() -> Check {
    let scns = bundled_scenarios().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for scn in &scns {
        for mode in PolicyMode::ALL {
            let a = run_scenario(scn, mode).unwrap();
            let b = run_scenario(scn, mode).unwrap();
            let (ma, mb) = (compute_metrics(&a).unwrap(), compute_metrics(&b).unwrap());
            ensure(a.to_jsonl() == b.to_jsonl() && ma.csv_fields() == mb.csv_fields(), || {
                format!("{} / {mode} differs", scn.name)
            })?;
            runs += 1;
        }
    }

    let bin = env!("CARGO_BIN_EXE_trust-xai");
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/triage_surge.json");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = Command::new(bin)
            .args(["run", scenario, "--seed", "7", "--out"])
            .arg(d.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
    }
    for name in ["triage_surge_adaptive_seed7.jsonl", "triage_surge_adaptive_seed7_metrics.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name} differs between CLI runs"))?;
    }
    Ok(format!("{runs} library runs and 2 CLI runs byte-identical"))
}

fn c11_rmssd() -> Check {
    let v = rmssd(&[800.0, 810.0, 790.0, 805.0]).map_err(|e| e.to_string())?;
    // sqrt((100 + 400 + 225) / 3)
    ensure((v - 15.546).abs() <= 1e-3, || format!("rmssd {v}"))?;
    Ok(format!("rmssd {v:.4} ms"))
}

#[allow(clippy::type_complexity)]
fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("membership fidelity", c1_membership_fidelity),
        ("partition of unity (W, S)", c2_partition_of_unity),
        ("coverage floors (E, P)", c3_coverage_floors),
        ("rule-engine oracle equivalence", c4_rule_oracle),
        ("worked traces", c5_worked_traces),
        ("defuzzification", c6_defuzzification),
        ("policy conformance", c7_policy_conformance),
        ("channel-safety fuzz", c8_channel_safety),
        ("closed-loop wiring", c9_closed_loop),
        ("determinism", c10_determinism),
        ("RMSSD", c11_rmssd),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
