use super::RngStream;
use crate::error::{Error, Result};

/// Balanced binary tree of nonnegative leaf weights.
///
/// Leaves are padded with zero-weight phantoms up to a power of two. Node `1`
/// is the root; node `v` has children `2v` and `2v + 1`, and leaf `i` lives at
/// `capacity + i`. Every internal node is recomputed as the sum of its two
/// stored children, so the tree after any sequence of updates is bit-identical
/// to a tree built from scratch on the final leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTree {
    len: usize,
    capacity: usize,
    nodes: Vec<f64>,
    writes: u64,
}

impl WeightTree {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::AllZeroWeights);
        }
        for (i, &w) in weights.iter().enumerate() {
            check_weight(i, w)?;
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::AllZeroWeights);
        }
        let capacity = weights.len().next_power_of_two().max(2);
        let mut nodes = vec![0.0; 2 * capacity];
        nodes[capacity..capacity + weights.len()].copy_from_slice(weights);
        let mut tree = Self { len: weights.len(), capacity, nodes, writes: 0 };
        tree.rebuild_internal();
        Ok(tree)
    }

    fn rebuild_internal(&mut self) {
        for v in (1..self.capacity).rev() {
            self.nodes[v] = self.nodes[2 * v] + self.nodes[2 * v + 1];
        }
    }

    /// Number of real (non-phantom) leaves.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Tree height, `log₂ capacity`.
    pub fn depth(&self) -> usize {
        self.capacity.trailing_zeros() as usize
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn leaf(&self, i: usize) -> f64 {
        self.nodes[self.capacity + i]
    }

    pub fn leaves(&self) -> &[f64] {
        &self.nodes[self.capacity..self.capacity + self.len]
    }

    /// Raw node storage, index 0 unused.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cumulative count of node writes performed by [`update`](Self::update).
    pub fn writes(&self) -> u64 {
        self.writes
    }

    /// Sets leaf `i` to `w`, touching only the leaf and its ancestors.
    pub fn update(&mut self, i: usize, w: f64) -> Result<()> {
        if i >= self.capacity {
            return Err(Error::IndexOutOfRange { index: i, len: self.capacity });
        }
        check_weight(i, w)?;
        let mut v = self.capacity + i;
        self.nodes[v] = w;
        self.writes += 1;
        while v > 1 {
            v >>= 1;
            self.nodes[v] = self.nodes[2 * v] + self.nodes[2 * v + 1];
            self.writes += 1;
        }
        Ok(())
    }

    /// Replaces every leaf at once in O(capacity).
    pub fn rebuild(&mut self, weights: impl IntoIterator<Item = f64>) -> Result<()> {
        let mut count = 0;
        for (i, w) in weights.into_iter().enumerate() {
            if i >= self.len {
                return Err(Error::IndexOutOfRange { index: i, len: self.len });
            }
            check_weight(i, w)?;
            self.nodes[self.capacity + i] = w;
            count += 1;
        }
        if count != self.len {
            return Err(Error::DimensionMismatch { expected: self.len, got: count });
        }
        self.rebuild_internal();
        Ok(())
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<usize> {
        self.sample_with(rng.uniform())
    }

    /// Maps `u ∈ [0, 1)` to a leaf by walking the threshold `u · total` down the tree.
    pub fn sample_with(&self, u: f64) -> Result<usize> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::ZeroTotalWeight);
        }
        let mut threshold = u * total;
        let mut v = 1;
        while v < self.capacity {
            let left = self.nodes[2 * v];
            let right = self.nodes[2 * v + 1];
            // never step into a massless subtree, even when rounding pushes
            // the threshold past the last positive child
            if (threshold < left && left > 0.0) || !(right > 0.0) {
                v *= 2;
            } else {
                threshold -= left;
                v = 2 * v + 1;
            }
        }
        Ok(v - self.capacity)
    }
}

fn check_weight(i: usize, w: f64) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::NonFiniteWeight { context: format!("leaf {i}") });
    }
    if w < 0.0 {
        return Err(Error::NegativeWeight { weight: w, context: format!("leaf {i}") });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frequencies(tree: &WeightTree, draws: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        let mut hits = vec![0usize; tree.len()];
        for _ in 0..draws {
            hits[tree.sample(&mut rng).unwrap()] += 1;
        }
        hits.iter().map(|&h| h as f64 / draws as f64).collect()
    }

    #[test]
    fn uniform_leaves() {
        let t = WeightTree::new(&[1.0; 4]).unwrap();
        assert_eq!(t.total(), 4.0);
        for (i, u) in [0.1, 0.3, 0.6, 0.9].into_iter().enumerate() {
            assert_eq!(t.sample_with(u).unwrap(), i);
        }
    }

    #[test]
    fn single_leaf_pads_with_phantom() {
        let t = WeightTree::new(&[5.0]).unwrap();
        assert_eq!(t.capacity(), 2);
        assert_eq!(t.total(), 5.0);
        for k in 0..100 {
            assert_eq!(t.sample_with(k as f64 / 100.0).unwrap(), 0);
        }
        assert_eq!(t.sample_with(1.0 - f64::EPSILON).unwrap(), 0);
    }

    #[test]
    fn build_errors() {
        assert_eq!(WeightTree::new(&[0.0, 0.0]).unwrap_err(), Error::AllZeroWeights);
        assert!(matches!(WeightTree::new(&[1.0, -1.0]), Err(Error::NegativeWeight { .. })));
        assert!(matches!(WeightTree::new(&[1.0, f64::INFINITY]), Err(Error::NonFiniteWeight { .. })));
    }

    #[test]
    fn update_moves_mass() {
        let mut t = WeightTree::new(&[1.0; 4]).unwrap();
        t.update(1, 3.0).unwrap();
        assert_eq!(t.total(), 6.0);
        // leaf 1 owns [1/6, 4/6)
        assert_eq!(t.sample_with(0.1).unwrap(), 0);
        assert_eq!(t.sample_with(0.2).unwrap(), 1);
        assert_eq!(t.sample_with(0.6).unwrap(), 1);
        assert_eq!(t.sample_with(0.7).unwrap(), 2);
        assert!(matches!(t.update(4, 1.0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(t.update(0, f64::NAN), Err(Error::NonFiniteWeight { .. })));
    }

    #[test]
    fn update_to_current_value_is_noop() {
        let mut t = WeightTree::new(&[0.3, 1.7, 2.9, 0.01, 5.5]).unwrap();
        let before = t.nodes().to_vec();
        for i in 0..5 {
            t.update(i, t.leaf(i)).unwrap();
        }
        assert_eq!(t.nodes().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                   before.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn random_updates_match_rebuild() {
        let mut rng = RngStream::new(11, 0);
        let init: Vec<f64> = (0..64).map(|_| rng.uniform()).collect();
        let mut t = WeightTree::new(&init).unwrap();
        for _ in 0..1000 {
            let i = rng.index(64);
            let w = rng.uniform() * 10.0;
            t.update(i, w).unwrap();
        }
        let fresh = WeightTree::new(t.leaves()).unwrap();
        assert_eq!(t.nodes(), fresh.nodes());
    }

    #[test]
    fn update_touches_one_path() {
        let mut t = WeightTree::new(&[1.0; 101]).unwrap();
        assert_eq!(t.capacity(), 128);
        t.update(57, 2.0).unwrap();
        assert_eq!(t.writes(), t.depth() as u64 + 1);
        assert_eq!(t.writes(), 8);
    }

    #[test]
    fn degenerate_mass() {
        let t = WeightTree::new(&[0.0, 7.0, 0.0, 0.0]).unwrap();
        for k in 0..1000 {
            assert_eq!(t.sample_with(k as f64 / 1000.0).unwrap(), 1);
        }
        assert_eq!(t.sample_with(1.0 - f64::EPSILON).unwrap(), 1);
    }

    #[test]
    fn zero_total_after_updates() {
        let mut t = WeightTree::new(&[1.0, 0.0]).unwrap();
        t.update(0, 0.0).unwrap();
        assert_eq!(t.sample_with(0.5).unwrap_err(), Error::ZeroTotalWeight);
    }

    #[test]
    fn monte_carlo_frequencies() {
        let t = WeightTree::new(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let freq = frequencies(&t, 1_000_000, 5);
        for (f, p) in freq.iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((f - p).abs() < 0.005, "{freq:?}");
        }
    }

    #[test]
    fn grid_enumeration_of_the_draw() {
        let t = WeightTree::new(&[1.0, 1.0]).unwrap();
        let grid = 100_000;
        let zeros = (0..grid).filter(|&k| t.sample_with(k as f64 / grid as f64).unwrap() == 0).count();
        assert!((zeros as f64 / grid as f64 - 0.5).abs() <= 1.0 / grid as f64);
    }

    proptest! {
        /// Each positive leaf owns exactly the interval [prefix, prefix + w) / total of [0, 1).
        #[test]
        fn descent_partitions_unit_interval(weights in prop::collection::vec(0.0f64..10.0, 1..=16)) {
            prop_assume!(weights.iter().any(|&w| w > 1e-6));
            let t = WeightTree::new(&weights).unwrap();
            let total = t.total();
            let mut prefix = 0.0;
            for (i, &w) in weights.iter().enumerate() {
                if w > 1e-6 {
                    let lo = prefix / total;
                    let hi = (prefix + w) / total;
                    let margin = 1e-9;
                    prop_assert_eq!(t.sample_with((lo + hi) / 2.0).unwrap(), i);
                    prop_assert_eq!(t.sample_with(lo + margin).unwrap(), i);
                    prop_assert_eq!(t.sample_with(hi - margin).unwrap(), i);
                }
                prefix += w;
            }
        }

        #[test]
        fn internal_nodes_are_child_sums(
            weights in prop::collection::vec(0.0f64..5.0, 1..=40),
            ops in prop::collection::vec((0usize..40, 0.0f64..5.0), 0..200),
        ) {
            prop_assume!(weights.iter().any(|&w| w > 0.0));
            let mut t = WeightTree::new(&weights).unwrap();
            for (i, w) in ops {
                let i = i % weights.len();
                let before = t.writes();
                t.update(i, w).unwrap();
                prop_assert!(t.writes() - before <= t.depth() as u64 + 1);
            }
            let nodes = t.nodes();
            for v in 1..t.capacity() {
                prop_assert_eq!(nodes[v], nodes[2 * v] + nodes[2 * v + 1]);
            }
            prop_assert!(nodes.iter().all(|&x| x >= 0.0));
            let leaf_sum: f64 = t.leaves().iter().sum();
            prop_assert!((t.total() - leaf_sum).abs() <= 1e-12 * leaf_sum.max(1.0));
        }
    }
}
