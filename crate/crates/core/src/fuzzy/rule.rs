use serde::{Deserialize, Serialize};

use super::{Fuzzified, FuzzyError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Connective {
    And,
    Or,
}

/// One antecedent clause.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub enum Clause<T = f64> {
    /// `variable = term`, evaluated as the term's membership degree.
    Fuzzy { variable: String, term: String },
    /// `variable > threshold` on the raw input.
    CrispGt { variable: String, threshold: T },
    /// `variable < threshold` on the raw input.
    CrispLt { variable: String, threshold: T },
}

impl<T: Scalar> Clause<T> {
    pub fn fuzzy(variable: impl Into<String>, term: impl Into<String>) -> Self {
        Clause::Fuzzy { variable: variable.into(), term: term.into() }
    }

    pub fn gt(variable: impl Into<String>, threshold: T) -> Self {
        Clause::CrispGt { variable: variable.into(), threshold }
    }

    pub fn lt(variable: impl Into<String>, threshold: T) -> Self {
        Clause::CrispLt { variable: variable.into(), threshold }
    }

    pub fn variable(&self) -> &str {
        match self {
            Clause::Fuzzy { variable, .. } | Clause::CrispGt { variable, .. } | Clause::CrispLt { variable, .. } => {
                variable
            }
        }
    }
}

/// How crisp threshold clauses are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrispMode {
    /// 0/1 indicator of the predicate on the raw input.
    #[default]
    Sharp,
    /// `>` reads as the variable's last (highest) term, `<` as its first term.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct FuzzyRule<T = f64> {
    pub id: String,
    pub connective: Connective,
    pub clauses: Vec<Clause<T>>,
    pub consequent: String,
    #[serde(default)]
    pub annotation: String,
}

impl<T: Scalar> FuzzyRule<T> {
    pub fn new(
        id: impl Into<String>,
        connective: Connective,
        clauses: Vec<Clause<T>>,
        consequent: impl Into<String>,
        annotation: impl Into<String>,
    ) -> Result<Self> {
        let id = id.into();
        if clauses.is_empty() {
            return Err(FuzzyError::Config(format!("rule {id}: empty antecedent")));
        }
        Ok(Self { id, connective, clauses, consequent: consequent.into(), annotation: annotation.into() })
    }
}

/// Firing strength of `rule`: min over clauses for AND, max for OR.
pub fn eval_rule<T: Scalar>(rule: &FuzzyRule<T>, inputs: &[Fuzzified<'_, T>], mode: CrispMode) -> Result<T> {
    if rule.clauses.is_empty() {
        return Err(FuzzyError::Config(format!("rule {}: empty antecedent", rule.id)));
    }
    let mut acc = match rule.connective {
        Connective::And => T::one(),
        Connective::Or => T::zero(),
    };
    for clause in &rule.clauses {
        let input = inputs
            .iter()
            .find(|f| f.variable().name() == clause.variable())
            .ok_or_else(|| FuzzyError::Config(format!("rule {}: unknown variable {}", rule.id, clause.variable())))?;
        let degree = match (clause, mode) {
            (Clause::Fuzzy { term, .. }, _) => input
                .degree(term)
                .ok_or_else(|| FuzzyError::Config(format!("rule {}: unknown term {term}", rule.id)))?,
            (Clause::CrispGt { threshold, .. }, CrispMode::Sharp) => indicator(input.crisp() > *threshold),
            (Clause::CrispLt { threshold, .. }, CrispMode::Sharp) => indicator(input.crisp() < *threshold),
            (Clause::CrispGt { .. }, CrispMode::Soft) => *input.degrees().last().unwrap(),
            (Clause::CrispLt { .. }, CrispMode::Soft) => input.degrees()[0],
        };
        acc = match rule.connective {
            Connective::And => acc.min(degree),
            Connective::Or => acc.max(degree),
        };
    }
    Ok(acc)
}

fn indicator<T: Scalar>(holds: bool) -> T {
    if holds {
        T::one()
    } else {
        T::zero()
    }
}
