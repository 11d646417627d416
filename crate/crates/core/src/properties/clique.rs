//! Maximum clique by branch and bound over bit sets with a greedy
//! coloring bound (the MCQ/BBMC family).

use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::budget::{Deadline, Meter, NoDeadline, SolveBudget};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSearch {
    /// Best clique found (0-based, sorted).
    pub clique: Vec<usize>,
    /// Upper bound on the clique number; equals `clique.len()` when complete.
    pub upper: usize,
    pub complete: bool,
    pub nodes: u64,
}

pub fn max_clique(g: &Graph, budget: &SolveBudget) -> CliqueSearch {
    max_clique_with(g, budget, &NoDeadline)
}

pub fn max_clique_with(g: &Graph, budget: &SolveBudget, deadline: &dyn Deadline) -> CliqueSearch {
    let n = g.n();
    if n == 0 {
        return CliqueSearch {
            clique: Vec::new(),
            upper: 0,
            complete: true,
            nodes: 0,
        };
    }
    // Relabel by non-increasing degree (ties by index) so high-degree
    // vertices get low bit positions.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut pos = alloc::vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let adj: Vec<BitSet> = order
        .iter()
        .map(|&v| {
            let mut s = BitSet::new(n);
            for &w in g.neighbors(v) {
                s.insert(pos[w as usize]);
            }
            s
        })
        .collect();

    let mut search = Search {
        adj: &adj,
        best: greedy_clique(&adj, n),
        current: Vec::new(),
        meter: Meter::new(budget, deadline),
    };
    let all = BitSet::full(n);
    let root_colors = color_classes(&adj, &all).1.last().copied().unwrap_or(0);
    search.expand(all);
    let complete = !search.meter.stopped();
    let mut clique: Vec<usize> = search.best.iter().map(|&p| order[p]).collect();
    clique.sort_unstable();
    let upper = if complete {
        clique.len()
    } else {
        root_colors.max(clique.len())
    };
    CliqueSearch {
        clique,
        upper,
        complete,
        nodes: search.meter.nodes,
    }
}

fn greedy_clique(adj: &[BitSet], n: usize) -> Vec<usize> {
    let mut best = Vec::new();
    // A few greedy starts from the highest-degree vertices.
    for start in 0..n.min(16) {
        let mut clique = alloc::vec![start];
        let mut cand = adj[start].clone();
        while let Some(v) = cand
            .iter()
            .max_by_key(|&v| (adj[v].intersection_len(&cand), core::cmp::Reverse(v)))
        {
            clique.push(v);
            cand.intersect_with(&adj[v]);
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Sequential greedy coloring of `p` in index order. Returns vertices and
/// their (1-based) colors, grouped by color in ascending order.
fn color_classes(adj: &[BitSet], p: &BitSet) -> (Vec<usize>, Vec<usize>) {
    let mut verts = Vec::with_capacity(p.len());
    let mut colors = Vec::with_capacity(p.len());
    let mut uncolored = p.clone();
    let mut color = 0;
    while !uncolored.is_empty() {
        color += 1;
        let mut q = uncolored.clone();
        while let Some(v) = q.first() {
            q.remove(v);
            q.difference_with(&adj[v]);
            uncolored.remove(v);
            verts.push(v);
            colors.push(color);
        }
    }
    (verts, colors)
}

struct Search<'a> {
    adj: &'a [BitSet],
    best: Vec<usize>,
    current: Vec<usize>,
    meter: Meter<'a>,
}

impl Search<'_> {
    fn expand(&mut self, mut p: BitSet) {
        if !self.meter.tick() {
            return;
        }
        let (verts, colors) = color_classes(self.adj, &p);
        for idx in (0..verts.len()).rev() {
            if self.current.len() + colors[idx] <= self.best.len() {
                return;
            }
            let v = verts[idx];
            self.current.push(v);
            let next = p.intersection(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            p.remove(v);
            if self.meter.stopped() {
                return;
            }
        }
    }
}
