//! Deterministic reference solvers.

use crate::error::{Error, Result};
use crate::graph::StochasticMatrix;
use crate::vector::RankVector;

/// Largest dimension accepted by [`dense_solve`].
pub const DENSE_LIMIT: usize = 2000;
/// Residual `‖Pᵀp - p‖∞` that a dense solution must meet.
pub const DENSE_RESIDUAL_TOL: f64 = 1e-10;
/// Relative pivot threshold below which the system is declared singular.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub rank: RankVector,
    pub iterations: usize,
    pub converged: bool,
    /// `‖p_{t+1} - p_t‖₁` per iteration.
    pub step_diffs: Vec<f64>,
}

/// Iterates `p ← Pᵀp` from the uniform vector until the ℓ₁ step falls to `tol`.
///
/// Each iterate is renormalized onto the simplex. When `max_iter` is reached
/// first, the last iterate is returned with `converged = false`.
pub fn power_iteration(matrix: &StochasticMatrix, tol: f64, max_iter: usize) -> Result<PowerResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    let n = matrix.n();
    let mut p = vec![1.0 / n as f64; n];
    let mut step_diffs = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let mut next = matrix.transpose_apply(&p)?;
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= sum);
        let diff: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        step_diffs.push(diff);
        p = next;
        if diff <= tol {
            converged = true;
            break;
        }
    }
    Ok(PowerResult { rank: RankVector::new(p)?, iterations: step_diffs.len(), converged, step_diffs })
}

/// Solves `Pᵀp = p, Σp = 1` by Gaussian elimination with partial pivoting.
///
/// The last equation of `(Pᵀ - I)p = 0` is replaced by the normalization row.
pub fn dense_solve(matrix: &StochasticMatrix) -> Result<RankVector> {
    let n = matrix.n();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { n, limit: DENSE_LIMIT });
    }
    let dense = matrix.to_dense();
    // a[i][j] = P[j][i] - [i = j]
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dense[j][i] - if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    a[n - 1].iter_mut().for_each(|v| *v = 1.0);
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;

    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = PIVOT_TOL * scale;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("non-empty pivot range");
        if !(a[pivot][col].abs() >= threshold) || a[pivot][col] == 0.0 {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let prow = &upper[col];
        for (r, row) in lower.iter_mut().enumerate() {
            let factor = row[col] / prow[col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                row[c] -= factor * prow[c];
            }
            b[col + 1 + r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    // round-off may leave entries like -1e-18
    for v in &mut x {
        if *v < 0.0 && *v > -1e-12 {
            *v = 0.0;
        }
    }
    let px = matrix.transpose_apply(&x)?;
    let residual = px.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if residual > DENSE_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge(residual));
    }
    RankVector::new(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AdjacencyGraph, Dangling, DampingMode, DampingSpec};

    fn two_state() -> StochasticMatrix {
        StochasticMatrix::from_dense(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap()
    }

    fn teleport_cycle3() -> StochasticMatrix {
        let g = AdjacencyGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        StochasticMatrix::from_edge_list(&g, Dangling::Uniform)
            .unwrap()
            .apply_damping(DampingSpec::new(0.85, DampingMode::Teleport).unwrap())
            .unwrap()
    }

    #[test]
    fn power_on_rank_one() {
        let p = StochasticMatrix::from_dense(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let r = power_iteration(&p, 1e-12, 100).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert_eq!(r.rank.values(), &[0.5, 0.5]);
    }

    #[test]
    fn power_on_two_state_chain() {
        // balance: 0.1 π₁ = 0.5 π₂
        let r = power_iteration(&two_state(), 1e-13, 10_000).unwrap();
        assert!(r.converged);
        assert!((r.rank[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((r.rank[1] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn power_on_symmetric_cycle() {
        let r = power_iteration(&teleport_cycle3(), 1e-14, 1000).unwrap();
        for v in r.rank.iter() {
            assert!((v - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn power_reports_non_convergence() {
        // a two-cycle started away from uniform never settles
        let g = AdjacencyGraph::new(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        let p = StochasticMatrix::from_edge_list(&g, Dangling::Uniform).unwrap();
        let r = power_iteration(&p, 1e-12, 50).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 50);
        assert!(power_iteration(&p, 0.0, 5).is_err());
    }

    #[test]
    fn power_steps_decrease_when_damped() {
        let g = AdjacencyGraph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let p = StochasticMatrix::from_edge_list(&g, Dangling::Uniform)
            .unwrap()
            .apply_damping(DampingSpec::new(0.85, DampingMode::Teleport).unwrap())
            .unwrap();
        let r = power_iteration(&p, 1e-12, 1000).unwrap();
        let tail = &r.step_diffs[r.step_diffs.len() / 2..];
        assert!(tail.windows(2).all(|w| w[1] <= w[0]), "{:?}", r.step_diffs);
    }

    #[test]
    fn dense_on_two_state_chain() {
        let p = dense_solve(&two_state()).unwrap();
        assert!((p[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!((p[1] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn dense_rejects_identity() {
        let p = StochasticMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(dense_solve(&p).unwrap_err(), Error::SingularSystem);
    }

    #[test]
    fn dense_rejects_large() {
        let g = AdjacencyGraph::new(DENSE_LIMIT + 1, [(0, 1)]).unwrap();
        let p = StochasticMatrix::from_edge_list(&g, Dangling::SelfLoop).unwrap();
        assert!(matches!(dense_solve(&p), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn dense_and_power_agree() {
        let g = crate::generate::generate(crate::generate::GraphModel::UniformSparse, 200, 4, 17).unwrap();
        let p = StochasticMatrix::from_edge_list(&g, Dangling::Uniform)
            .unwrap()
            .apply_damping(DampingSpec::new(0.85, DampingMode::Teleport).unwrap())
            .unwrap();
        let d = dense_solve(&p).unwrap();
        let w = power_iteration(&p, 1e-12, 10_000).unwrap();
        let gap = d.iter().zip(w.rank.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(gap <= 1e-9, "{gap}");
    }
}
