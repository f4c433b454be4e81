//! Synthetic graph models.

use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;
use crate::sampling::{RngStream, WeightTree};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModel {
    /// Directed cycle `i → i+1 mod n`.
    Cycle,
    /// Every node links to node 0, node 0 links to every other node.
    Star,
    /// Each node links to `s` distinct uniform targets other than itself.
    UniformSparse,
    /// Node `i` links to `min(s, i)` distinct earlier nodes chosen with
    /// probability proportional to in-degree + 1.
    Preferential,
}

pub fn generate(model: GraphModel, n: usize, s: usize, seed: u64) -> Result<AdjacencyGraph> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let mut rng = RngStream::new(seed, 0);
    let edges: Vec<(usize, usize)> = match model {
        GraphModel::Cycle => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        GraphModel::Star => (1..n).map(|i| (i, 0)).chain((1..n).map(|i| (0, i))).collect(),
        GraphModel::UniformSparse => {
            check_sparse(n, s)?;
            let mut edges = Vec::with_capacity(n * s);
            let mut picked = Vec::with_capacity(s);
            for i in 0..n {
                picked.clear();
                while picked.len() < s {
                    // draw from 0..n-1 and skip over i to exclude self-loops
                    let mut j = rng.index(n - 1);
                    if j >= i {
                        j += 1;
                    }
                    if !picked.contains(&j) {
                        picked.push(j);
                    }
                }
                edges.extend(picked.iter().map(|&j| (i, j)));
            }
            edges
        }
        GraphModel::Preferential => {
            check_sparse(n, s)?;
            let mut weights = vec![0.0; n];
            weights[0] = 1.0;
            let mut tree = WeightTree::new(&weights)?;
            let mut edges = Vec::with_capacity(n * s);
            let mut picked = Vec::with_capacity(s);
            for i in 1..n {
                picked.clear();
                if i <= s {
                    picked.extend(0..i);
                } else {
                    while picked.len() < s {
                        let j = tree.sample(&mut rng)?;
                        if !picked.contains(&j) {
                            picked.push(j);
                        }
                    }
                }
                for &j in &picked {
                    edges.push((i, j));
                    tree.update(j, tree.leaf(j) + 1.0)?;
                }
                tree.update(i, 1.0)?;
            }
            edges
        }
    };
    AdjacencyGraph::new(n, edges)
}

fn check_sparse(n: usize, s: usize) -> Result<()> {
    if s == 0 || s >= n {
        return Err(Error::InvalidParams(format!("need 1 <= s < n, got s = {s}, n = {n}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_and_star() {
        let g = generate(GraphModel::Cycle, 3, 0, 0).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
        let g = generate(GraphModel::Star, 3, 0, 0).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0), (0, 2, 1.0), (1, 0, 1.0), (2, 0, 1.0)]);
    }

    #[test]
    fn uniform_sparse_degrees() {
        let g = generate(GraphModel::UniformSparse, 100, 5, 3).unwrap();
        assert!(g.out_degrees().iter().all(|&d| d == 5));
        assert!(g.edges().iter().all(|&(s, d, _)| s != d));
        assert_eq!(g, generate(GraphModel::UniformSparse, 100, 5, 3).unwrap());
        assert_ne!(g, generate(GraphModel::UniformSparse, 100, 5, 4).unwrap());
    }

    #[test]
    fn preferential_attachment_shape() {
        let g = generate(GraphModel::Preferential, 2000, 3, 9).unwrap();
        let deg = g.out_degrees();
        assert_eq!(deg[0], 0);
        assert_eq!(deg[1], 1);
        assert!(deg[3..].iter().all(|&d| d == 3));
        let mut indeg = vec![0usize; 2000];
        for &(_, d, _) in g.edges() {
            indeg[d] += 1;
        }
        // early nodes accumulate far more links than late ones
        let early: usize = indeg[..20].iter().sum();
        let late: usize = indeg[1980..].iter().sum();
        assert!(early > 10 * late.max(1), "early {early}, late {late}");
    }

    #[test]
    fn sparse_params_validated() {
        assert!(matches!(generate(GraphModel::UniformSparse, 5, 5, 0), Err(Error::InvalidParams(_))));
        assert!(matches!(generate(GraphModel::Preferential, 5, 0, 0), Err(Error::InvalidParams(_))));
        assert!(matches!(generate(GraphModel::Cycle, 0, 1, 0), Err(Error::InvalidParams(_))));
    }
}
