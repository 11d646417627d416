//! Coupled sampling of inhomogeneous random graphs (IRG) together with
//! Erdős–Rényi lower and upper bounding graphs, plus the graph properties
//! used to compare them.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs: randomness comes from a counter-based
//! [`UniformStream`] whose variates are addressed by index, so sampling
//! is reproducible no matter how the work is scheduled.
//!
//! Vertex indices are 0-based throughout the API. Labels in the external
//! text formats (and [`Graph::new`]) are 1-based.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bitset;
pub mod budget;
pub mod graph;
pub mod kernels;
pub mod math;
pub mod properties;
pub mod rng;
pub mod samplers;

pub use budget::{Deadline, NoDeadline, Outcome, SolveBudget};
pub use graph::{Graph, GraphError, VertexSubset};
pub use kernels::{Kernel, KernelError, KernelFamily, Region, ScalingSequence, ValidationReport};
pub use properties::{
    chromatic_lower_clique, chromatic_number_exact, chromatic_upper_greedy,
    kl_divergence_bernoulli, predict_chromatic_dense_d, predict_chromatic_sparse_ell,
    predict_quasi_clique, quasi_clique_number_exact, PredictError, PredictionWindow, SolveResult,
};
pub use rng::UniformStream;
pub use samplers::{
    expected_heavy_count, lower_bound_core, sample_coupled_triple, sample_er, sample_irg,
    CoupledTriple, RateFunction, SampleError,
};
