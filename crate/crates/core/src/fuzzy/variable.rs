use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{FuzzyError, PiecewiseLinearMf, Result};
use crate::scalar::{to_f64, Scalar};

/// A named fuzzy set belonging to a [`LinguisticVariable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Term<T = f64> {
    pub name: String,
    #[serde(rename = "breakpoints")]
    pub mf: PiecewiseLinearMf<T>,
}

impl<T: Scalar> Term<T> {
    pub fn new(name: impl Into<String>, mf: PiecewiseLinearMf<T>) -> Self {
        Self { name: name.into(), mf }
    }
}

/// A numeric variable over a closed domain whose values are described by
/// ordered fuzzy terms. Term order is significant: label ties resolve toward
/// the earlier term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVariable<T>", into = "RawVariable<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct LinguisticVariable<T = f64> {
    name: String,
    domain: (T, T),
    terms: Vec<Term<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct RawVariable<T> {
    name: String,
    domain: (T, T),
    terms: Vec<Term<T>>,
}

impl<T: Scalar> TryFrom<RawVariable<T>> for LinguisticVariable<T> {
    type Error = FuzzyError;

    fn try_from(raw: RawVariable<T>) -> Result<Self> {
        Self::new(raw.name, raw.domain, raw.terms)
    }
}

impl<T: Scalar> From<LinguisticVariable<T>> for RawVariable<T> {
    fn from(v: LinguisticVariable<T>) -> Self {
        Self { name: v.name, domain: v.domain, terms: v.terms }
    }
}

impl<T: Scalar> LinguisticVariable<T> {
    pub fn new(name: impl Into<String>, domain: (T, T), terms: Vec<Term<T>>) -> Result<Self> {
        let name = name.into();
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FuzzyError::Config(format!("variable {name}: domain must be finite with lo < hi")));
        }
        if terms.len() < 2 {
            return Err(FuzzyError::Config(format!("variable {name}: needs at least 2 terms")));
        }
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].iter().any(|o| o.name == t.name) {
                return Err(FuzzyError::Config(format!("variable {name}: duplicate term {}", t.name)));
            }
            if t.mf.breakpoints().iter().any(|&(x, _)| x < lo || x > hi) {
                return Err(FuzzyError::Config(format!(
                    "variable {name}: term {} has breakpoints outside the domain",
                    t.name
                )));
            }
        }
        Ok(Self { name, domain, terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (T, T) {
        self.domain
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.name == term)
    }

    pub fn term(&self, term: &str) -> Option<&Term<T>> {
        self.terms.iter().find(|t| t.name == term)
    }

    pub fn clamp(&self, x: T) -> T {
        crate::scalar::clamp(x, self.domain.0, self.domain.1)
    }

    /// Degree of every term at `x`, in term order.
    pub fn fuzzify(&self, x: T) -> Result<Fuzzified<'_, T>> {
        if !x.is_finite() {
            return Err(FuzzyError::InvalidInput(format!("{}: value {x} is not finite", self.name)));
        }
        let degrees = self.terms.iter().map(|t| t.mf.degree_at(x)).collect();
        Ok(Fuzzified { variable: self, crisp: x, degrees })
    }

    /// `samples` uniformly spaced points over the domain, endpoints included.
    pub fn grid(&self, samples: usize) -> impl Iterator<Item = T> + '_ {
        let (lo, hi) = self.domain;
        let last = samples.saturating_sub(1).max(1);
        let span = hi - lo;
        (0..samples).map(move |i| {
            if i == last {
                hi
            } else {
                lo + span * T::from_usize(i).unwrap() / T::from_usize(last).unwrap()
            }
        })
    }

    /// CSV of the membership curves: `x` followed by one column per term,
    /// six-decimal fixed point, `samples` rows.
    pub fn to_csv(&self, samples: usize) -> Result<String> {
        if samples < 2 {
            return Err(FuzzyError::InvalidInput("need at least 2 samples".into()));
        }
        let mut out = String::from("x");
        for t in &self.terms {
            out.push(',');
            out.push_str(&t.name);
        }
        out.push('\n');
        for x in self.grid(samples) {
            write!(out, "{:.6}", to_f64(x)).unwrap();
            for t in &self.terms {
                write!(out, ",{:.6}", to_f64(t.mf.degree_at(x))).unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Term degrees of one crisp value, tied to the variable that produced them.
#[derive(Debug, Clone)]
pub struct Fuzzified<'a, T = f64> {
    variable: &'a LinguisticVariable<T>,
    crisp: T,
    degrees: Vec<T>,
}

impl<'a, T: Scalar> Fuzzified<'a, T> {
    pub fn variable(&self) -> &'a LinguisticVariable<T> {
        self.variable
    }

    pub fn crisp(&self) -> T {
        self.crisp
    }

    pub fn degrees(&self) -> &[T] {
        &self.degrees
    }

    pub fn degree(&self, term: &str) -> Option<T> {
        self.variable.term_index(term).map(|i| self.degrees[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a str, T)> + '_ {
        self.variable.terms.iter().map(|t| t.name.as_str()).zip(self.degrees.iter().copied())
    }
}
