//! Seeded randomness and the discrete samplers used by the solvers.

mod row;
mod rng;
mod tree;

pub use row::RowSampler;
pub use rng::RngStream;
pub use tree::WeightTree;
