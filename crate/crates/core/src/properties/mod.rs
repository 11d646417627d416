//! Graph properties studied through the coupling: chromatic number and
//! γ-quasi-clique number (exact solvers with budgets), the Bernoulli KL
//! divergence, and the closed-form window predictors.

mod chromatic;
mod clique;
mod predict;
mod quasi_clique;

use alloc::vec::Vec;

pub use chromatic::{
    chromatic_lower_clique, chromatic_number_exact, chromatic_number_exact_with,
    chromatic_upper_greedy, dsatur_coloring, is_proper_coloring,
};
pub use clique::{max_clique, max_clique_with, CliqueSearch};
pub use predict::{
    kl_divergence_bernoulli, predict_chromatic_dense_d, predict_chromatic_sparse_ell,
    predict_chromatic_sparse_from_product, predict_quasi_clique, predict_quasi_clique_with,
    PredictError, PredictionWindow, DEFAULT_REFINEMENT_EPSILON,
};
pub use quasi_clique::{
    is_quasi_clique, meets_density, quasi_clique_number_exact, quasi_clique_number_exact_with,
    quasi_clique_upper_bound,
};

use crate::budget::Outcome;

/// Certificate that lets a result be re-verified independently.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// Color of every vertex (0-based colors) for a coloring with `upper` colors.
    Coloring(Vec<usize>),
    /// Vertex set (0-based, sorted) of size `lower`.
    Witness(Vec<usize>),
}

/// Value or certified bracket from an exact solver.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolveResult {
    pub lower: usize,
    pub upper: usize,
    pub outcome: Outcome,
    pub nodes: u64,
    pub certificate: Certificate,
}

impl SolveResult {
    pub fn value(&self) -> Option<usize> {
        (self.outcome == Outcome::Exact).then_some(self.lower)
    }

    pub fn is_exact(&self) -> bool {
        self.outcome == Outcome::Exact
    }
}
