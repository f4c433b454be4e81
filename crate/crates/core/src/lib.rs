//! Randomized PageRank solvers.
//!
//! The crate computes the stationary vector `p = Pᵀp` of a row-stochastic
//! matrix with two randomized methods and checks them against deterministic
//! baselines:
//!
//! * [`mcmc`]: random-walk frequency estimators (one long walk, many short
//!   walks, or a self-stopping walk);
//! * [`gk`]: Grigoriadis–Khachiyan mirror descent on the symmetrized matrix
//!   game `min_p max_u ⟨u, (Pᵀ - I)p⟩`, with a weight tree for `O(s log n)`
//!   iterations;
//! * [`baseline`]: power iteration and a dense direct solve.

pub mod baseline;
pub mod error;
pub mod generate;
pub mod gk;
pub mod graph;
pub mod io;
pub mod mcmc;
pub mod metrics;
pub mod report;
pub mod sampling;
mod vector;

pub use error::{Error, Result};
pub use graph::{AdjacencyGraph, DampingMode, DampingSpec, Dangling, StochasticMatrix};
pub use sampling::{RngStream, RowSampler, WeightTree};
pub use vector::{RankVector, SIMPLEX_TOL};
