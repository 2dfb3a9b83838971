//! The stock trust rule base and its membership functions.

use super::{FallbackPolicy, TrustInferenceSystem, PERFORMANCE, STRESS, TRUST, VALENCE, WORKLOAD};
use crate::fuzzy::{Clause, Connective, CrispMode, FuzzyRule, LinguisticVariable, PiecewiseLinearMf, Term};
use crate::scalar::{lit, Scalar};

fn mf<T: Scalar>(points: &[(f64, f64)]) -> PiecewiseLinearMf<T> {
    PiecewiseLinearMf::new(points.iter().map(|&(x, d)| (lit(x), lit(d))).collect())
        .expect("stock breakpoints are valid")
}

fn variable<T: Scalar>(name: &str, domain: (f64, f64), terms: &[(&str, &[(f64, f64)])]) -> LinguisticVariable<T> {
    LinguisticVariable::new(
        name,
        (lit(domain.0), lit(domain.1)),
        terms.iter().map(|(n, bp)| Term::new(*n, mf(bp))).collect(),
    )
    .expect("stock variable is valid")
}

/// Low/Medium/High partition shared by workload and stress (and reused for the
/// trust output).
fn low_medium_high<T: Scalar>(name: &str) -> LinguisticVariable<T> {
    variable(
        name,
        (0.0, 1.0),
        &[
            ("Low", &[(0.2, 1.0), (0.5, 0.0)]),
            ("Medium", &[(0.2, 0.0), (0.5, 1.0), (0.8, 0.0)]),
            ("High", &[(0.5, 0.0), (0.8, 1.0)]),
        ],
    )
}

pub fn workload_variable<T: Scalar>() -> LinguisticVariable<T> {
    low_medium_high(WORKLOAD)
}

pub fn stress_variable<T: Scalar>() -> LinguisticVariable<T> {
    low_medium_high(STRESS)
}

pub fn valence_variable<T: Scalar>() -> LinguisticVariable<T> {
    variable(
        VALENCE,
        (-1.0, 1.0),
        &[
            ("Negative", &[(-0.5, 1.0), (-0.1, 0.0)]),
            ("Neutral", &[(-0.5, 0.0), (0.0, 1.0), (0.5, 0.0)]),
            ("Positive", &[(0.1, 0.0), (0.5, 1.0)]),
        ],
    )
}

pub fn performance_variable<T: Scalar>() -> LinguisticVariable<T> {
    variable(
        PERFORMANCE,
        (0.0, 1.0),
        &[
            ("Low", &[(0.3, 1.0), (0.5, 0.0)]),
            ("Medium", &[(0.3, 0.0), (0.5, 1.0), (0.7, 0.0)]),
            ("High", &[(0.5, 0.0), (0.8, 1.0)]),
        ],
    )
}

pub fn trust_variable<T: Scalar>() -> LinguisticVariable<T> {
    low_medium_high(TRUST)
}

fn rule<T: Scalar>(
    id: &str,
    connective: Connective,
    clauses: Vec<Clause<T>>,
    consequent: &str,
    annotation: &str,
) -> FuzzyRule<T> {
    FuzzyRule::new(id, connective, clauses, consequent, annotation).expect("stock rule is valid")
}

/// The seven trust rules, in their canonical order R1..R7.
pub fn default_rules<T: Scalar>() -> Vec<FuzzyRule<T>> {
    use Connective::{And, Or};
    let f = |v: &str, t: &str| Clause::fuzzy(v, t);
    vec![
        rule(
            "R1",
            And,
            vec![f(WORKLOAD, "High"), f(STRESS, "High"), f(VALENCE, "Negative")],
            "Low",
            "low competence and predictability",
        ),
        rule(
            "R2",
            And,
            vec![f(STRESS, "Low"), f(VALENCE, "Positive"), Clause::gt(PERFORMANCE, lit(0.8))],
            "High",
            "reliability and transparency",
        ),
        rule(
            "R3",
            And,
            vec![f(WORKLOAD, "Low"), f(STRESS, "Low"), f(VALENCE, "Neutral")],
            "High",
            "competence and predictability",
        ),
        rule(
            "R4",
            And,
            vec![f(WORKLOAD, "Medium"), f(VALENCE, "Positive"), Clause::gt(PERFORMANCE, lit(0.6))],
            "Medium",
            "adaptability",
        ),
        rule(
            "R5",
            And,
            vec![f(STRESS, "High"), Clause::lt(PERFORMANCE, lit(0.4))],
            "Low",
            "reliability under pressure",
        ),
        rule(
            "R6",
            Or,
            vec![f(WORKLOAD, "High"), f(VALENCE, "Negative")],
            "Low",
            "transparency degradation due to overload/affect",
        ),
        rule(
            "R7",
            And,
            vec![f(WORKLOAD, "Medium"), f(STRESS, "Medium"), f(VALENCE, "Positive")],
            "High",
            "balanced state supporting trust",
        ),
    ]
}

/// Stock system: four inputs, trust output, seven rules, sharp crisp clauses,
/// neutral fallback.
pub fn build_default_trust_system<T: Scalar>() -> TrustInferenceSystem<T> {
    TrustInferenceSystem::from_parts(
        vec![workload_variable(), stress_variable(), valence_variable(), performance_variable()],
        trust_variable(),
        default_rules(),
        CrispMode::Sharp,
        FallbackPolicy::Neutral,
    )
    .expect("stock trust system is valid")
}
