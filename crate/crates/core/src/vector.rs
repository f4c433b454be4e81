//! Dense probability vectors.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// Absolute tolerance on the entry sum of a [`RankVector`].
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A dense vector on the unit simplex: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotOnSimplex("empty vector".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::NotOnSimplex(format!("entry {i} = {v}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotOnSimplex(format!("sum = {sum}")));
        }
        Ok(Self(values))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform vector of dimension 0");
        Self(vec![1.0 / n as f64; n])
    }

    /// `counts / total`, where `total` must equal the sum of `counts`.
    pub fn from_counts(counts: &[u64], total: u64) -> Result<Self> {
        let sum: u64 = counts.iter().sum();
        if total == 0 || sum != total {
            return Err(Error::NotOnSimplex(format!(
                "counts sum to {sum}, normalizer is {total}"
            )));
        }
        let t = total as f64;
        Ok(Self(counts.iter().map(|&c| c as f64 / t).collect()))
    }

    /// Scales a nonnegative vector with positive sum onto the simplex.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::NotOnSimplex(format!("cannot normalize, sum = {sum}")));
        }
        values.iter_mut().for_each(|v| *v /= sum);
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RankVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for RankVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Ceiling that ignores floating-point noise just above an integer, so that
/// `ceil(4.0000000000000001)` on a mathematically integral value yields 4.
pub(crate) fn robust_ceil(x: f64) -> u64 {
    if !(x > 0.0) {
        return 0;
    }
    let r = x.round();
    let v = if (x - r).abs() <= 1e-9 * x.max(1.0) { r } else { x.ceil() };
    v as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_off_simplex() {
        assert!(RankVector::new(vec![0.5, 0.4]).is_err());
        assert!(RankVector::new(vec![1.5, -0.5]).is_err());
        assert!(RankVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!(RankVector::new(vec![]).is_err());
        assert!(RankVector::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn counts_normalize_exactly() {
        let v = RankVector::from_counts(&[1, 3], 4).unwrap();
        assert_eq!(v.values(), &[0.25, 0.75]);
        assert!(RankVector::from_counts(&[1, 3], 5).is_err());
        assert!(RankVector::from_counts(&[0, 0], 0).is_err());
    }

    #[test]
    fn ceil_absorbs_representation_noise() {
        assert_eq!(robust_ceil(4.0 / (0.1 * 0.1)), 400);
        assert_eq!(robust_ceil(10.836), 11);
        assert_eq!(robust_ceil(0.0), 0);
        assert_eq!(robust_ceil(-3.0), 0);
        assert_eq!(robust_ceil(2.2), 3);
    }
}
