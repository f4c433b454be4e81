//! Shared fixtures for the criterion benches.

use rankwalk_core::generate::{generate, GraphModel};
use rankwalk_core::{Dangling, DampingMode, DampingSpec, StochasticMatrix};

/// Uniform sparse graph with out-degree `s`, optionally teleport-damped at 0.85.
pub fn sparse_matrix(n: usize, s: usize, seed: u64, teleport: bool) -> StochasticMatrix {
    let g = generate(GraphModel::UniformSparse, n, s, seed).expect("valid generator parameters");
    let p = StochasticMatrix::from_edge_list(&g, Dangling::Uniform).expect("generated graph is valid");
    if teleport {
        p.apply_damping(DampingSpec::new(0.85, DampingMode::Teleport).expect("valid delta"))
            .expect("damping preserves stochasticity")
    } else {
        p
    }
}
