use serde::{Deserialize, Serialize};

use super::{FuzzyError, Result};
use crate::scalar::Scalar;

/// Membership function given by breakpoints `(x, degree)`.
///
/// Values between breakpoints are linearly interpolated; outside the breakpoint
/// span the first/last degree is held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(T, T)>", into = "Vec<(T, T)>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct PiecewiseLinearMf<T = f64> {
    breakpoints: Vec<(T, T)>,
}

impl<T: Scalar> PiecewiseLinearMf<T> {
    pub fn new(breakpoints: Vec<(T, T)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(FuzzyError::InvalidMembership(format!(
                "need at least 2 breakpoints, got {}",
                breakpoints.len()
            )));
        }
        for &(x, d) in &breakpoints {
            if !x.is_finite() || !d.is_finite() {
                return Err(FuzzyError::InvalidMembership("non-finite breakpoint".into()));
            }
            if d < T::zero() || d > T::one() {
                return Err(FuzzyError::InvalidMembership(format!("degree {d} outside [0, 1]")));
            }
        }
        if breakpoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(FuzzyError::InvalidMembership("breakpoint x values must be strictly increasing".into()));
        }
        Ok(Self { breakpoints })
    }

    /// Symmetric or asymmetric triangle with feet at `a`, `c` and apex at `b`.
    pub fn triangle(a: T, b: T, c: T) -> Result<Self> {
        Self::new(vec![(a, T::zero()), (b, T::one()), (c, T::zero())])
    }

    /// 1 up to `a`, falling linearly to 0 at `b`.
    pub fn left_shoulder(a: T, b: T) -> Result<Self> {
        Self::new(vec![(a, T::one()), (b, T::zero())])
    }

    /// 0 up to `a`, rising linearly to 1 at `b`.
    pub fn right_shoulder(a: T, b: T) -> Result<Self> {
        Self::new(vec![(a, T::zero()), (b, T::one())])
    }

    pub fn breakpoints(&self) -> &[(T, T)] {
        &self.breakpoints
    }

    pub fn eval(&self, x: T) -> Result<T> {
        if !x.is_finite() {
            return Err(FuzzyError::InvalidInput(format!("membership argument {x} is not finite")));
        }
        Ok(self.degree_at(x))
    }

    /// Evaluation for arguments already known to be finite.
    pub(crate) fn degree_at(&self, x: T) -> T {
        let bp = &self.breakpoints;
        let (x_first, d_first) = bp[0];
        if x <= x_first {
            return d_first;
        }
        let (x_last, d_last) = bp[bp.len() - 1];
        if x >= x_last {
            return d_last;
        }
        // first breakpoint strictly right of x; in 1..len
        let i = bp.partition_point(|&(bx, _)| bx <= x);
        let (xa, da) = bp[i - 1];
        let (xb, db) = bp[i];
        let d = da + (db - da) * (x - xa) / (xb - xa);
        d.max(T::zero()).min(T::one())
    }

    /// Closure of `{x in [lo, hi] : degree(x) > 0}` as an interval, assuming the
    /// function is unimodal (true for shoulders and triangles).
    pub fn support_within(&self, lo: T, hi: T) -> Option<(T, T)> {
        let bp = &self.breakpoints;
        let mut left = None;
        let mut right = None;
        if bp[0].1 > T::zero() {
            left = Some(lo);
        }
        for w in bp.windows(2) {
            if left.is_none() && w[1].1 > T::zero() {
                left = Some(w[0].0);
            }
            if w[0].1 > T::zero() && w[1].1 == T::zero() {
                right = Some(w[1].0);
            }
        }
        if bp[bp.len() - 1].1 > T::zero() {
            right = Some(hi);
        }
        match (left, right) {
            (Some(l), Some(r)) => Some((l.max(lo), r.min(hi))),
            _ => None,
        }
    }

    /// Apex location when the function has a single breakpoint of degree 1.
    pub fn peak(&self) -> Option<T> {
        let mut peaks = self.breakpoints.iter().filter(|(_, d)| *d == T::one());
        match (peaks.next(), peaks.next()) {
            (Some(&(x, _)), None) => Some(x),
            _ => None,
        }
    }
}

impl<T: Scalar> TryFrom<Vec<(T, T)>> for PiecewiseLinearMf<T> {
    type Error = FuzzyError;

    fn try_from(bp: Vec<(T, T)>) -> Result<Self> {
        Self::new(bp)
    }
}

impl<T: Scalar> From<PiecewiseLinearMf<T>> for Vec<(T, T)> {
    fn from(mf: PiecewiseLinearMf<T>) -> Self {
        mf.breakpoints
    }
}
