use super::RngStream;
use crate::error::{Error, Result};
use crate::graph::StochasticMatrix;

/// Inverse-CDF sampler over the rows of a [`StochasticMatrix`].
///
/// A single uniform draw decides each transition: draws below the implicit
/// uniform mass select a node uniformly, the rest are located by binary search
/// in the row's cumulative sums.
#[derive(Debug, Clone)]
pub struct RowSampler<'a> {
    matrix: &'a StochasticMatrix,
    cumulative: Vec<Vec<f64>>,
}

impl<'a> RowSampler<'a> {
    pub fn new(matrix: &'a StochasticMatrix) -> Self {
        let cumulative = (0..matrix.n())
            .map(|i| {
                let (_, vals) = matrix.row(i);
                let mut acc = 0.0;
                vals.iter()
                    .map(|&v| {
                        acc += v;
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { matrix, cumulative }
    }

    pub fn matrix(&self) -> &'a StochasticMatrix {
        self.matrix
    }

    pub fn cumulative(&self, row: usize) -> &[f64] {
        &self.cumulative[row]
    }

    #[inline]
    pub fn sample(&self, row: usize, rng: &mut RngStream) -> Result<usize> {
        self.sample_with(row, rng.uniform())
    }

    /// Deterministic transition for a given `u ∈ [0, 1)`.
    pub fn sample_with(&self, row: usize, u: f64) -> Result<usize> {
        let n = self.matrix.n();
        if row >= n {
            return Err(Error::IndexOutOfRange { index: row, len: n });
        }
        let teleport = self.matrix.uniform_mass();
        if u < teleport {
            return Ok(((u / teleport * n as f64) as usize).min(n - 1));
        }
        let threshold = u - teleport;
        let cum = &self.cumulative[row];
        let (cols, _) = self.matrix.row(row);
        if cols.is_empty() {
            // the row is purely uniform (teleport mass of one)
            return Ok(((u * n as f64) as usize).min(n - 1));
        }
        let k = cum.partition_point(|&c| c <= threshold).min(cols.len() - 1);
        Ok(cols[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AdjacencyGraph, Dangling, DampingMode, DampingSpec};

    fn freq(sampler: &RowSampler, row: usize, draws: usize) -> Vec<f64> {
        let mut rng = RngStream::new(9, 0);
        let mut hits = vec![0usize; sampler.matrix().n()];
        for _ in 0..draws {
            hits[sampler.sample(row, &mut rng).unwrap()] += 1;
        }
        hits.iter().map(|&h| h as f64 / draws as f64).collect()
    }

    #[test]
    fn deterministic_row() {
        let p = StochasticMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = RowSampler::new(&p);
        let mut rng = RngStream::new(0, 0);
        for _ in 0..1000 {
            assert_eq!(s.sample(0, &mut rng).unwrap(), 1);
        }
        assert!(matches!(s.sample(2, &mut rng), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn cumulative_ends_at_row_sum() {
        let g = AdjacencyGraph::new(5, [(0, 1), (0, 2), (0, 3), (1, 0), (2, 4), (3, 4), (4, 0), (4, 1)]).unwrap();
        let p = StochasticMatrix::from_edge_list(&g, Dangling::Uniform).unwrap();
        let s = RowSampler::new(&p);
        for i in 0..5 {
            let c = s.cumulative(i);
            assert!(c.windows(2).all(|w| w[0] <= w[1]));
            assert!((c.last().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn half_half_row() {
        let p = StochasticMatrix::from_dense(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let f = freq(&RowSampler::new(&p), 0, 100_000);
        assert!((f[0] - 0.5).abs() < 0.01, "{f:?}");
    }

    #[test]
    fn teleport_three_cycle() {
        let g = AdjacencyGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let p = StochasticMatrix::from_edge_list(&g, Dangling::Uniform)
            .unwrap()
            .apply_damping(DampingSpec::new(0.85, DampingMode::Teleport).unwrap())
            .unwrap();
        // dense row oracle (1-δ)/n + δP̃
        let oracle = [0.15 / 3.0, 0.15 / 3.0 + 0.85, 0.15 / 3.0];
        let f = freq(&RowSampler::new(&p), 0, 100_000);
        for (x, y) in f.iter().zip(oracle) {
            assert!((x - y).abs() < 0.01, "{f:?}");
        }
    }

    #[test]
    fn grid_reproduces_teleport_row() {
        let g = AdjacencyGraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 0)]).unwrap();
        let p = StochasticMatrix::from_edge_list(&g, Dangling::Uniform)
            .unwrap()
            .apply_damping(DampingSpec::new(0.6, DampingMode::Teleport).unwrap())
            .unwrap();
        let s = RowSampler::new(&p);
        let grid = 200_000;
        let mut hits = [0usize; 4];
        for k in 0..grid {
            hits[s.sample_with(0, (k as f64 + 0.5) / grid as f64).unwrap()] += 1;
        }
        for (j, &h) in hits.iter().enumerate() {
            assert!((h as f64 / grid as f64 - p.entry(0, j)).abs() < 1e-4);
        }
    }
}
