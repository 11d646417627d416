//! Seeded samplers for ER graphs, IRGs and the coupled triple
//! `(G'_n, G_n, G''_n)` driven by one [`UniformStream`].
//!
//! Edge `{i,j}` of a graph with threshold `q` is present iff `U_ij < q`.
//! All three graphs of a triple read the same `U_ij`, so
//! `lower ≼ middle ≼ upper` holds for every sample.

use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexSubset};
use crate::kernels::{Kernel, KernelError, Region, ScalingSequence};
use crate::math;
use crate::rng::UniformStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("rate r(n) must be positive, got {value} at n = {n}")]
    NonPositiveRate { value: f64, n: usize },
    #[error("no rate table entry for n = {0}")]
    MissingRate(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The half-width `r(n)` of the heavy-weight window.
#[derive(Debug, Clone, PartialEq)]
pub enum RateFunction {
    /// `1 / log n`
    InverseLog,
    /// `1 / (log n)^α`
    InverseLogPower(f64),
    /// Constant half-width.
    Fixed(f64),
    /// Explicit `(n, r)` table.
    Table(Vec<(usize, f64)>),
}

impl RateFunction {
    pub fn value(&self, n: usize) -> Result<f64, SampleError> {
        let v = match self {
            RateFunction::InverseLog => 1.0 / math::ln(n as f64),
            RateFunction::InverseLogPower(a) => 1.0 / math::powf(math::ln(n as f64), *a),
            RateFunction::Fixed(r) => *r,
            RateFunction::Table(t) => t
                .iter()
                .find(|(k, _)| *k == n)
                .map(|(_, r)| *r)
                .ok_or(SampleError::MissingRate(n))?,
        };
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(SampleError::NonPositiveRate { value: v, n })
        }
    }

    /// Checks `r(n)` non-increasing and `n·r(n)` non-decreasing over an
    /// ascending list of sizes.
    pub fn diagnostics(&self, ns: &[usize]) -> Result<RateDiagnostics, SampleError> {
        let mut values = Vec::with_capacity(ns.len());
        for &n in ns {
            values.push((n, self.value(n)?));
        }
        let r_decreasing = values.windows(2).all(|w| w[1].1 <= w[0].1);
        let nr_increasing = values
            .windows(2)
            .all(|w| w[1].0 as f64 * w[1].1 >= w[0].0 as f64 * w[0].1);
        Ok(RateDiagnostics {
            values,
            r_decreasing,
            nr_increasing,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateDiagnostics {
    pub values: Vec<(usize, f64)>,
    pub r_decreasing: bool,
    pub nr_increasing: bool,
}

fn check_probability(p: f64) -> Result<(), SampleError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(SampleError::InvalidProbability(p))
    }
}

/// Vertex weights `W_1..W_n` from the stream.
pub fn sample_weights(n: usize, stream: &UniformStream) -> Vec<f64> {
    (0..n).map(|i| stream.weight(i)).collect()
}

/// Edges of row `i` (pairs `(i, j)`, `j > i`) that pass `accept(j, U_ij)`.
/// Rows can be generated independently and concatenated in order.
fn row_edges<F>(
    n: usize,
    i: usize,
    stream: &UniformStream,
    mut accept: F,
    out: &mut Vec<(u32, u32)>,
) where
    F: FnMut(usize, f64) -> bool,
{
    if i + 1 >= n {
        return;
    }
    let mut reader = stream.reader(n as u64 + crate::rng::pair_index(n, i, i + 1));
    for j in i + 1..n {
        let u = reader.next_f64();
        if accept(j, u) {
            out.push((i as u32, j as u32));
        }
    }
}

/// `G(n, p)`: edge iff `U_ij < p`.
pub fn sample_er(n: usize, p: f64, stream: &UniformStream) -> Result<Graph, SampleError> {
    check_probability(p)?;
    let mut edges = Vec::new();
    for i in 0..n {
        row_edges(n, i, stream, |_, u| u < p, &mut edges);
    }
    Ok(Graph::from_sorted_unique(n, edges))
}

/// The IRG: edge iff `U_ij < k(W_i, W_j) / λ_n`. Returns the graph and the weights.
pub fn sample_irg(
    n: usize,
    k: &Kernel,
    lambda: &ScalingSequence,
    stream: &UniformStream,
) -> Result<(Graph, Vec<f64>), SampleError> {
    let l = lambda.checked_value(n)?;
    crate::kernels::p_max(k, lambda, n)?;
    let weights = sample_weights(n, stream);
    let mut edges = Vec::new();
    let mut err = None;
    for i in 0..n {
        let wi = weights[i];
        row_edges(
            n,
            i,
            stream,
            |j, u| {
                let kv = k.eval(wi, weights[j]);
                let p = kv / l;
                if p > 1.0 && err.is_none() {
                    err = Some(KernelError::ProbabilityExceedsOne {
                        value: p,
                        kernel_value: kv,
                        lambda: l,
                    });
                }
                u < p
            },
            &mut edges,
        );
        if let Some(e) = err.take() {
            return Err(e.into());
        }
    }
    Ok((Graph::from_sorted_unique(n, edges), weights))
}

/// Jointly sampled `(G'_n, G_n, G''_n)` with the coupling metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTriple {
    pub lower: Graph,
    pub middle: Graph,
    pub upper: Graph,
    pub weights: Vec<f64>,
    pub heavy_set: VertexSubset,
    pub region: Region,
    pub rate: f64,
    /// `R_n` was cut by the boundary of `[0,1]`.
    pub clipped: bool,
    pub p_inf: f64,
    /// `p_inf` is exact (closed form) rather than a grid estimate.
    pub p_inf_analytic: bool,
    pub p_max: f64,
    pub lambda: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl CoupledTriple {
    pub fn n(&self) -> usize {
        self.middle.n()
    }

    pub fn sandwich_holds(&self) -> bool {
        self.lower.is_edge_subgraph_of(&self.middle) && self.middle.is_edge_subgraph_of(&self.upper)
    }
}

/// One pass over the pairs builds all three graphs from the shared `U_ij`.
pub fn sample_coupled_triple(
    n: usize,
    k: &Kernel,
    lambda: &ScalingSequence,
    rate: &RateFunction,
    stream: &UniformStream,
) -> Result<CoupledTriple, SampleError> {
    let l = lambda.checked_value(n)?;
    let p_max = crate::kernels::p_max(k, lambda, n)?;
    let r = rate.value(n)?;
    let (m, _) = k.declared_max();
    let region = Region::around(m, r)?;
    let clipped = m - r < 0.0 || m + r > 1.0;
    let inf = k.infimum_over(&region);
    let p_inf = inf.value / l;

    let weights = sample_weights(n, stream);
    let heavy: Vec<bool> = weights.iter().map(|&w| region.contains(w)).collect();
    let mut lower = Vec::new();
    let mut middle = Vec::new();
    let mut upper = Vec::new();
    let base = n as u64;
    for i in 0..n {
        if i + 1 >= n {
            break;
        }
        let wi = weights[i];
        let mut reader = stream.reader(base + crate::rng::pair_index(n, i, i + 1));
        for j in i + 1..n {
            let u = reader.next_f64();
            if u >= p_max {
                continue;
            }
            let e = (i as u32, j as u32);
            upper.push(e);
            let kv = k.eval(wi, weights[j]);
            let p = kv / l;
            if p > 1.0 {
                return Err(KernelError::ProbabilityExceedsOne {
                    value: p,
                    kernel_value: kv,
                    lambda: l,
                }
                .into());
            }
            if u < p {
                middle.push(e);
            }
            if heavy[i] && heavy[j] && u < p_inf {
                lower.push(e);
            }
        }
    }
    let heavy_set = VertexSubset::new(
        heavy
            .iter()
            .enumerate()
            .filter_map(|(i, &h)| h.then_some(i))
            .collect(),
    );
    Ok(CoupledTriple {
        lower: Graph::from_sorted_unique(n, lower),
        middle: Graph::from_sorted_unique(n, middle),
        upper: Graph::from_sorted_unique(n, upper),
        weights,
        heavy_set,
        region,
        rate: r,
        clipped,
        p_inf,
        p_inf_analytic: inf.analytic,
        p_max,
        lambda: l,
        seed: stream.seed(),
        stream_id: stream.stream_id(),
    })
}

/// `G̃_n = G'_n[V']`, distributed as `G(|V'|, p_inf)` given the weights.
pub fn lower_bound_core(t: &CoupledTriple) -> Graph {
    t.lower
        .induced_subgraph(&t.heavy_set)
        .expect("heavy set lies inside the vertex set")
}

/// `E|V'| = n · |R_n|`, which is `2n·r(n)` when `R_n` is not clipped.
pub fn expected_heavy_count(n: usize, r: f64, m: f64) -> f64 {
    let lo = (m - r).max(0.0);
    let hi = (m + r).min(1.0);
    n as f64 * (hi - lo).max(0.0)
}

/// `|V'|` for a stream, reading only the weights.
pub fn heavy_count(n: usize, region: &Region, stream: &UniformStream) -> usize {
    (0..n)
        .filter(|&i| region.contains(stream.weight(i)))
        .count()
}
