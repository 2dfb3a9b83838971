//! Independent reference implementations used as test oracles. Nothing here
//! calls into the engine: membership functions are written out case by case
//! and the rule base is evaluated by hand.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};

/// W, S and trust share this family. Returns (Low, Medium, High).
pub fn mu_wsr(x: f64) -> [f64; 3] {
    let low = if x <= 0.2 {
        1.0
    } else if x <= 0.5 {
        (0.5 - x) / 0.3
    } else {
        0.0
    };
    let medium = if x <= 0.2 || x >= 0.8 {
        0.0
    } else if x <= 0.5 {
        (x - 0.2) / 0.3
    } else {
        (0.8 - x) / 0.3
    };
    let high = if x <= 0.5 {
        0.0
    } else if x <= 0.8 {
        (x - 0.5) / 0.3
    } else {
        1.0
    };
    [low, medium, high]
}

/// (Negative, Neutral, Positive) on [-1, 1].
pub fn mu_valence(e: f64) -> [f64; 3] {
    let negative = if e <= -0.5 {
        1.0
    } else if e <= -0.1 {
        (-e - 0.1) / 0.4
    } else {
        0.0
    };
    let neutral = if e.abs() > 0.5 { 0.0 } else { (0.5 - e.abs()) / 0.5 };
    let positive = if e < 0.1 {
        0.0
    } else if e < 0.5 {
        (e - 0.1) / 0.4
    } else {
        1.0
    };
    [negative, neutral, positive]
}

/// (Low, Medium, High) for performance.
pub fn mu_performance(p: f64) -> [f64; 3] {
    let low = if p <= 0.3 {
        1.0
    } else if p <= 0.5 {
        (0.5 - p) / 0.2
    } else {
        0.0
    };
    let medium = if p <= 0.3 || p >= 0.7 {
        0.0
    } else if p <= 0.5 {
        (p - 0.3) / 0.2
    } else {
        (0.7 - p) / 0.2
    };
    let high = if p < 0.5 {
        0.0
    } else if p < 0.8 {
        (p - 0.5) / 0.3
    } else {
        1.0
    };
    [low, medium, high]
}

pub const RULE_IDS: [&str; 7] = ["R1", "R2", "R3", "R4", "R5", "R6", "R7"];

/// Firing strength of each rule, in id order, with crisp clauses as hard
/// strict comparisons.
pub fn rule_activations(w: f64, s: f64, e: f64, p: f64) -> [f64; 7] {
    let [wl, wm, wh] = mu_wsr(w);
    let [sl, sm, sh] = mu_wsr(s);
    let [en, e0, ep] = mu_valence(e);
    let gt = |x: f64, t: f64| if x > t { 1.0 } else { 0.0 };
    let lt = |x: f64, t: f64| if x < t { 1.0 } else { 0.0 };
    [
        wh.min(sh).min(en),
        sl.min(ep).min(gt(p, 0.8)),
        wl.min(sl).min(e0),
        wm.min(ep).min(gt(p, 0.6)),
        sh.min(lt(p, 0.4)),
        wh.max(en),
        wm.min(sm).min(ep),
    ]
}

/// Consequent index (0 Low, 1 Medium, 2 High) of each rule.
pub const RULE_OUTPUT: [usize; 7] = [0, 2, 2, 1, 0, 0, 2];

/// Centroid of the max-aggregated, min-clipped output sets by composite
/// Simpson integration on `n` (even) intervals.
pub fn centroid_simpson(act: [f64; 3], n: usize) -> f64 {
    let f = |x: f64| {
        let m = mu_wsr(x);
        (0..3).map(|i| m[i].min(act[i])).fold(0.0, f64::max)
    };
    let h = 1.0 / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=n {
        let x = i as f64 * h;
        let wgt = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        num += wgt * x * f(x);
        den += wgt * f(x);
    }
    num / den
}

/// Reproducible random states: W, S, P uniform on [0, 1], E on [-1, 1].
pub fn random_states(seed: u64, n: usize) -> Vec<[f64; 4]> {
    let mut rng = rand_pcg::Pcg64::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>(), rng.random_range(-1.0..=1.0), rng.random::<f64>()])
        .collect()
}

/// Points `lo, lo + step, ...` up to `hi` inclusive, built from integers to
/// avoid drift.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}
