//! γ-quasi-cliques: vertex sets `Q` whose induced subgraph has at least
//! `γ·C(|Q|,2)` edges (real-valued threshold, no rounding).
//!
//! Feasibility is monotone in the size: dropping a minimum-degree vertex
//! from a γ-quasi-clique leaves one. The exact solver therefore tests
//! sizes upward from a greedy value and stops at the first infeasible one.

use alloc::vec;
use alloc::vec::Vec;

use super::clique::max_clique_with;
use super::{Certificate, SolveResult};
use crate::bitset::BitSet;
use crate::budget::{Deadline, Meter, NoDeadline, Outcome, SolveBudget};
use crate::graph::Graph;

/// `edges ≥ γ · size(size−1)/2`.
#[inline]
pub fn meets_density(edges: usize, size: usize, gamma: f64) -> bool {
    let pairs = (size * size.saturating_sub(1) / 2) as f64;
    edges as f64 >= gamma * pairs
}

pub fn is_quasi_clique(g: &Graph, vertices: &[usize], gamma: f64) -> bool {
    meets_density(g.edges_within(vertices), vertices.len(), gamma)
}

/// Largest `s` such that the `s` largest values `min(deg, s−1)` could
/// supply `γ·C(s,2)` edges.
pub fn quasi_clique_upper_bound(g: &Graph, gamma: f64) -> usize {
    let mut deg = g.degree_sequence();
    deg.sort_unstable_by(|a, b| b.cmp(a));
    let mut best = g.n().min(1);
    for s in 2..=g.n() {
        let total: usize = deg[..s].iter().map(|&d| d.min(s - 1)).sum();
        if meets_density(total / 2, s, gamma) {
            best = s;
        }
    }
    best
}

pub fn quasi_clique_number_exact(g: &Graph, gamma: f64, budget: &SolveBudget) -> SolveResult {
    quasi_clique_number_exact_with(g, gamma, budget, &NoDeadline)
}

pub fn quasi_clique_number_exact_with(
    g: &Graph,
    gamma: f64,
    budget: &SolveBudget,
    deadline: &dyn Deadline,
) -> SolveResult {
    assert!(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
    if gamma >= 1.0 {
        let r = max_clique_with(g, budget, deadline);
        return SolveResult {
            lower: r.clique.len(),
            upper: r.upper,
            outcome: if r.complete {
                Outcome::Exact
            } else {
                Outcome::LowerUpperOnly
            },
            nodes: r.nodes,
            certificate: Certificate::Witness(r.clique),
        };
    }
    let n = g.n();
    let mut witness = greedy_peel(g, gamma);
    let upper = quasi_clique_upper_bound(g, gamma);
    let mut meter = Meter::new(budget, deadline);
    let order = {
        let mut o: Vec<usize> = (0..n).collect();
        o.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
        o
    };
    let adj: Vec<BitSet> = (0..n)
        .map(|v| {
            let mut s = BitSet::new(n);
            for &w in g.neighbors(v) {
                s.insert(w as usize);
            }
            s
        })
        .collect();
    let mut outcome = Outcome::Exact;
    let mut bracket_upper = witness.len();
    let mut size = witness.len() + 1;
    while size <= upper {
        let mut search = SizeSearch {
            adj: &adj,
            gamma,
            size,
            chosen: Vec::new(),
            meter: &mut meter,
        };
        let mut cand = BitSet::new(n);
        for &v in &order {
            cand.insert(v);
        }
        match search.run(&order, cand) {
            Some(Some(found)) => {
                witness = found;
                bracket_upper = size;
                size += 1;
            }
            Some(None) => break,
            None => {
                outcome = Outcome::LowerUpperOnly;
                bracket_upper = upper;
                break;
            }
        }
    }
    witness.sort_unstable();
    debug_assert!(is_quasi_clique(g, &witness, gamma));
    SolveResult {
        lower: witness.len(),
        upper: bracket_upper.max(witness.len()),
        outcome,
        nodes: meter.nodes,
        certificate: Certificate::Witness(witness),
    }
}

/// Repeatedly drop a minimum-degree vertex; keep the largest feasible stage.
fn greedy_peel(g: &Graph, gamma: f64) -> Vec<usize> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg = g.degree_sequence();
    let mut edges = g.edge_count();
    let mut removed = Vec::with_capacity(n);
    let mut best_stage = None;
    for remaining in (1..=n).rev() {
        if best_stage.is_none() && meets_density(edges, remaining, gamma) {
            best_stage = Some(removed.len());
            break;
        }
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("vertices remain");
        alive[v] = false;
        removed.push(v);
        edges -= deg[v];
        for &w in g.neighbors(v) {
            if alive[w as usize] {
                deg[w as usize] -= 1;
            }
        }
    }
    match best_stage {
        Some(_) => (0..n).filter(|&v| alive[v]).collect(),
        None => Vec::new(),
    }
}

struct SizeSearch<'a, 'm, 'd> {
    adj: &'a [BitSet],
    gamma: f64,
    size: usize,
    chosen: Vec<usize>,
    meter: &'m mut Meter<'d>,
}

impl SizeSearch<'_, '_, '_> {
    /// `Some(Some(set))` found, `Some(None)` none exists, `None` out of budget.
    fn run(&mut self, order: &[usize], cand: BitSet) -> Option<Option<Vec<usize>>> {
        let mut chosen_edges = 0;
        let mut in_chosen = BitSet::new(cand.capacity());
        self.branch(order, cand, &mut in_chosen, &mut chosen_edges)
    }

    fn branch(
        &mut self,
        order: &[usize],
        mut cand: BitSet,
        in_chosen: &mut BitSet,
        chosen_edges: &mut usize,
    ) -> Option<Option<Vec<usize>>> {
        if !self.meter.tick() {
            return None;
        }
        let need = self.gamma * (self.size * (self.size - 1)) as f64;
        let t = self.size - self.chosen.len();
        if t == 0 {
            return Some((2 * *chosen_edges) as f64 >= need)
                .map(|ok| ok.then(|| self.chosen.clone()));
        }
        if cand.len() < t {
            return Some(None);
        }
        // Optimistic gain per candidate (doubled): edges into the chosen
        // set counted twice, edges among the added set once per endpoint.
        let mut gains: Vec<(usize, usize)> = order
            .iter()
            .copied()
            .filter(|&v| cand.contains(v))
            .map(|v| {
                let to_chosen = self.adj[v].intersection_len(in_chosen);
                let to_cand = self.adj[v].intersection_len(&cand);
                (2 * to_chosen + to_cand.min(t - 1), v)
            })
            .collect();
        gains.sort_by_key(|g| core::cmp::Reverse(g.0));
        let bound: usize = 2 * *chosen_edges + gains[..t].iter().map(|g| g.0).sum::<usize>();
        if (bound as f64) < need {
            return Some(None);
        }
        let v = gains[0].1;
        cand.remove(v);

        // Include v.
        let added = self.adj[v].intersection_len(in_chosen);
        self.chosen.push(v);
        in_chosen.insert(v);
        *chosen_edges += added;
        let r = self.branch(order, cand.clone(), in_chosen, chosen_edges);
        *chosen_edges -= added;
        in_chosen.remove(v);
        self.chosen.pop();
        match r {
            Some(None) => {}
            other => return other,
        }
        // Exclude v.
        self.branch(order, cand, in_chosen, chosen_edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::UniformStream;
    use crate::samplers::sample_er;

    fn brute(g: &Graph, gamma: f64) -> usize {
        let n = g.n();
        let mut best = 0;
        for mask in 0u32..1 << n {
            let vs: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            if vs.len() > best && meets_density(g.edges_within(&vs), vs.len(), gamma) {
                best = vs.len();
            }
        }
        best
    }

    fn exact(g: &Graph, gamma: f64) -> usize {
        let r = quasi_clique_number_exact(g, gamma, &SolveBudget::unlimited());
        assert!(r.is_exact());
        let Certificate::Witness(w) = &r.certificate else {
            panic!()
        };
        assert_eq!(w.len(), r.lower);
        assert!(is_quasi_clique(g, w, gamma));
        r.lower
    }

    #[test]
    fn named_cases() {
        assert_eq!(exact(&Graph::complete(6), 1.0), 6);
        assert_eq!(exact(&Graph::empty(1), 0.5), 1);
        assert_eq!(exact(&Graph::empty(1), 1.0), 1);
        let tri_plus = Graph::new(4, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(exact(&tri_plus, 0.5), 4);
        assert_eq!(exact(&Graph::complete(3), 0.5), 3);
    }

    #[test]
    fn matches_brute_force() {
        for t in 0..150 {
            let s = UniformStream::with_stream(99, t);
            let n = 1 + (t as usize % 12);
            let p = s.uniform_at(1 << 40);
            let g = sample_er(n, p, &s).unwrap();
            for gamma in [0.5, 0.75, 1.0] {
                assert_eq!(
                    exact(&g, gamma),
                    brute(&g, gamma),
                    "trial {t} gamma {gamma}"
                );
            }
        }
    }

    #[test]
    fn upper_bound_is_sound() {
        for t in 0..40 {
            let s = UniformStream::with_stream(3, t);
            let g = sample_er(11, 0.4, &s).unwrap();
            for gamma in [0.3, 0.6, 0.9] {
                assert!(quasi_clique_upper_bound(&g, gamma) >= brute(&g, gamma));
            }
        }
    }

    #[test]
    fn medium_instance_solves() {
        let g = sample_er(40, 0.3, &UniformStream::new(5)).unwrap();
        let r = quasi_clique_number_exact(&g, 0.75, &SolveBudget::default());
        assert!(r.is_exact(), "{r:?}");
    }

    #[test]
    fn budget_exhaustion_gives_bracket() {
        let g = sample_er(40, 0.5, &UniformStream::new(6)).unwrap();
        let r = quasi_clique_number_exact(&g, 0.75, &SolveBudget::nodes(10));
        assert_eq!(r.outcome, Outcome::LowerUpperOnly);
        assert!(r.lower <= r.upper);
    }
}
