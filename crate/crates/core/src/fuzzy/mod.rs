//! Generic Mamdani fuzzy machinery: piecewise-linear membership functions,
//! linguistic variables, rules with mixed fuzzy/crisp clauses, max aggregation,
//! centroid defuzzification and label selection.
//!
//! Nothing in here knows about trust; see [`crate::trust`] for the instantiation.

mod inference;
mod membership;
mod rule;
mod variable;

use thiserror::Error;

pub use inference::{
    aggregate, defuzzify_centroid, defuzzify_centroid_with, label_from_activations, AggregatedOutput, MamdaniOutput,
    MamdaniSystem, DEFAULT_GRID_SAMPLES,
};
pub use membership::PiecewiseLinearMf;
pub use rule::{eval_rule, Clause, Connective, CrispMode, FuzzyRule};
pub use variable::{Fuzzified, LinguisticVariable, Term};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid membership function: {0}")]
    InvalidMembership(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no rule fired")]
    NoRuleFired,
}

pub type Result<T, E = FuzzyError> = std::result::Result<T, E>;
