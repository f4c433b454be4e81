//! Residuals, distances and ranking comparison.

use crate::error::{Error, Result};
use crate::graph::StochasticMatrix;
use serde::{Deserialize, Serialize};

/// Absolute tolerance on the entry sum accepted by the metric functions.
pub const METRIC_SIMPLEX_TOL: f64 = 1e-6;
/// Most negative entry accepted by the metric functions.
pub const METRIC_ENTRY_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// Game objective `max_i ((Pᵀ - I)p)_i`.
    pub f: f64,
}

fn check_simplex(p: &[f64]) -> Result<()> {
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v >= METRIC_ENTRY_FLOOR) || !v.is_finite()) {
        return Err(Error::NotOnSimplex(format!("entry {i} = {v}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > METRIC_SIMPLEX_TOL {
        return Err(Error::NotOnSimplex(format!("sum = {sum}")));
    }
    Ok(())
}

fn residual_vector(matrix: &StochasticMatrix, p: &[f64]) -> Result<Vec<f64>> {
    check_simplex(p)?;
    let mut r = matrix.transpose_apply(p)?;
    r.iter_mut().zip(p).for_each(|(ri, pi)| *ri -= pi);
    Ok(r)
}

/// `f(p) = max_{u ∈ simplex} ⟨u, (Pᵀ - I)p⟩`, attained at a vertex.
pub fn game_objective(matrix: &StochasticMatrix, p: &[f64]) -> Result<f64> {
    let r = residual_vector(matrix, p)?;
    Ok(objective_of(&r))
}

fn objective_of(r: &[f64]) -> f64 {
    // the coordinates of (Pᵀ - I)p sum to zero, so the max is nonnegative up to rounding
    r.iter().copied().fold(0.0, f64::max)
}

pub fn residuals(matrix: &StochasticMatrix, p: &[f64]) -> Result<Residuals> {
    let r = residual_vector(matrix, p)?;
    Ok(Residuals { l1: norm(&r, Norm::L1), l2: norm(&r, Norm::L2), linf: norm(&r, Norm::Linf), f: objective_of(&r) })
}

pub fn norm(v: &[f64], which: Norm) -> f64 {
    match which {
        Norm::L1 => v.iter().map(|x| x.abs()).sum(),
        Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

pub fn distance(p: &[f64], q: &[f64], which: Norm) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    Ok(norm(&diff, which))
}

/// Indices of the `k` largest entries, descending, ties broken by ascending index.
pub fn topk(p: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > p.len() {
        return Err(Error::InvalidK { k, n: p.len() });
    }
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    idx.truncate(k);
    Ok(idx)
}

/// `|topk(p) ∩ topk(q)| / k`.
pub fn topk_overlap(p: &[f64], q: &[f64], k: usize) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    let a = topk(p, k)?;
    let mut b = topk(q, k)?;
    b.sort_unstable();
    let common = a.iter().filter(|i| b.binary_search(i).is_ok()).count();
    Ok(common as f64 / k as f64)
}
