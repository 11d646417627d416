//! Chromatic number: DSATUR greedy upper bound, clique lower bound, and
//! an exact solver that tests k-colorability for increasing k.
//!
//! Each k-colorability test first peels vertices of degree < k (they can
//! always be colored last), then runs DSATUR backtracking on every
//! component of what is left, with a maximum clique precolored.

use alloc::vec;
use alloc::vec::Vec;

use super::clique::max_clique_with;
use super::{Certificate, SolveResult};
use crate::budget::{Deadline, Meter, NoDeadline, Outcome, SolveBudget};
use crate::graph::Graph;

pub fn is_proper_coloring(g: &Graph, colors: &[usize]) -> bool {
    colors.len() == g.n()
        && g.edges()
            .iter()
            .all(|&(i, j)| colors[i as usize] != colors[j as usize])
}

/// DSATUR greedy coloring. Next vertex: highest saturation, then highest
/// degree, then lowest index; it gets the smallest free color.
pub fn dsatur_coloring(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut colors = vec![usize::MAX; n];
    // Per-vertex sorted list of neighbour colors would be costly; keep a
    // small bit vector of seen colors per vertex instead.
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut sat = vec![0usize; n];
    for _ in 0..n {
        let mut pick = usize::MAX;
        for v in 0..n {
            if colors[v] != usize::MAX {
                continue;
            }
            if pick == usize::MAX || (sat[v], g.degree(v)) > (sat[pick], g.degree(pick)) {
                pick = v;
            }
        }
        let c = (0..)
            .find(|&c| !seen[pick].get(c).copied().unwrap_or(false))
            .unwrap();
        colors[pick] = c;
        for &w in g.neighbors(pick) {
            let w = w as usize;
            if colors[w] != usize::MAX {
                continue;
            }
            let s = &mut seen[w];
            if s.len() <= c {
                s.resize(c + 1, false);
            }
            if !s[c] {
                s[c] = true;
                sat[w] += 1;
            }
        }
    }
    colors
}

pub fn chromatic_upper_greedy(g: &Graph) -> usize {
    dsatur_coloring(g).iter().map(|c| c + 1).max().unwrap_or(0)
}

/// Size of the best clique found within the budget.
pub fn chromatic_lower_clique(g: &Graph, budget: &SolveBudget) -> usize {
    max_clique_with(g, budget, &NoDeadline).clique.len()
}

pub fn chromatic_number_exact(g: &Graph, budget: &SolveBudget) -> SolveResult {
    chromatic_number_exact_with(g, budget, &NoDeadline)
}

pub fn chromatic_number_exact_with(
    g: &Graph,
    budget: &SolveBudget,
    deadline: &dyn Deadline,
) -> SolveResult {
    let n = g.n();
    let greedy = dsatur_coloring(g);
    let upper = greedy.iter().map(|c| c + 1).max().unwrap_or(0);
    if g.edge_count() == 0 {
        return SolveResult {
            lower: upper,
            upper,
            outcome: Outcome::Exact,
            nodes: 0,
            certificate: Certificate::Coloring(greedy),
        };
    }
    let clique_budget = SolveBudget {
        node_limit: budget.node_limit / 4 + 1,
        ..*budget
    };
    let clique = max_clique_with(g, &clique_budget, deadline);
    let mut nodes = clique.nodes;
    let mut best = greedy;
    let mut best_colors = upper;
    let mut meter = Meter::new(
        &SolveBudget {
            node_limit: budget.node_limit.saturating_sub(nodes),
            ..*budget
        },
        deadline,
    );
    let mut k = clique.clique.len().max(1);
    let outcome = loop {
        if k >= best_colors {
            break Outcome::Exact;
        }
        match k_colorable(g, k, &clique.clique, &mut meter) {
            Search::Found(colors) => {
                best = colors;
                best_colors = k;
                break Outcome::Exact;
            }
            Search::Refuted => k += 1,
            Search::Stopped => break Outcome::LowerUpperOnly,
        }
    };
    nodes += meter.nodes;
    debug_assert!(n == 0 || is_proper_coloring(g, &best));
    SolveResult {
        lower: if outcome == Outcome::Exact {
            best_colors
        } else {
            k
        },
        upper: best_colors,
        outcome,
        nodes,
        certificate: Certificate::Coloring(best),
    }
}

enum Search {
    Found(Vec<usize>),
    Refuted,
    Stopped,
}

fn k_colorable(g: &Graph, k: usize, clique: &[usize], meter: &mut Meter<'_>) -> Search {
    let n = g.n();
    if clique.len() > k {
        return Search::Refuted;
    }
    // Peel vertices of degree < k.
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut peeled = Vec::new();
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < k).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        peeled.push(v);
        for &w in g.neighbors(v) {
            let w = w as usize;
            if alive[w] {
                deg[w] -= 1;
                if deg[w] < k {
                    stack.push(w);
                }
            }
        }
    }

    let mut colors = vec![usize::MAX; n];
    // Components of the remaining kernel.
    let mut comp = vec![usize::MAX; n];
    for start in 0..n {
        if !alive[start] || comp[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        comp[start] = start;
        let mut head = 0;
        while head < members.len() {
            let u = members[head];
            head += 1;
            for &w in g.neighbors(u) {
                let w = w as usize;
                if alive[w] && comp[w] == usize::MAX {
                    comp[w] = start;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        let pre: Vec<usize> = clique
            .iter()
            .copied()
            .filter(|&v| alive[v] && comp[v] == start)
            .collect();
        match color_component(g, &members, &alive, k, &pre, meter) {
            Search::Found(local) => {
                for (idx, &v) in members.iter().enumerate() {
                    colors[v] = local[idx];
                }
            }
            other => return other,
        }
    }

    // Peeled vertices go back in reverse order; each sees fewer than k
    // colored neighbours at that point.
    let mut used = vec![false; k];
    for &v in peeled.iter().rev() {
        used.iter_mut().for_each(|u| *u = false);
        for &w in g.neighbors(v) {
            let c = colors[w as usize];
            if c != usize::MAX {
                used[c] = true;
            }
        }
        colors[v] = used
            .iter()
            .position(|&u| !u)
            .expect("peeled vertex has a free color");
    }
    Search::Found(colors)
}

struct ComponentSearch<'a, 'd> {
    adj: Vec<Vec<usize>>,
    k: usize,
    colors: Vec<usize>,
    forbid: Vec<u32>,
    sat: Vec<usize>,
    uncolored: usize,
    meter: &'a mut Meter<'d>,
}

fn color_component(
    g: &Graph,
    members: &[usize],
    alive: &[bool],
    k: usize,
    precolor: &[usize],
    meter: &mut Meter<'_>,
) -> Search {
    let local = |v: usize| members.binary_search(&v).ok();
    let adj: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|&&w| alive[w as usize])
                .filter_map(|&w| local(w as usize))
                .collect()
        })
        .collect();
    let size = members.len();
    let mut s = ComponentSearch {
        adj,
        k,
        colors: vec![usize::MAX; size],
        forbid: vec![0; size * k],
        sat: vec![0; size],
        uncolored: size,
        meter,
    };
    let mut max_used = 0;
    for (c, &v) in precolor.iter().enumerate() {
        let lv = local(v).expect("precolored vertex is in the component");
        s.assign(lv, c);
        max_used = max_used.max(c + 1);
    }
    match s.search(max_used) {
        Some(true) => Search::Found(s.colors),
        Some(false) => Search::Refuted,
        None => Search::Stopped,
    }
}

impl ComponentSearch<'_, '_> {
    fn assign(&mut self, v: usize, c: usize) {
        self.colors[v] = c;
        self.uncolored -= 1;
        for idx in 0..self.adj[v].len() {
            let w = self.adj[v][idx];
            let f = &mut self.forbid[w * self.k + c];
            if *f == 0 {
                self.sat[w] += 1;
            }
            *f += 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.colors[v] = usize::MAX;
        self.uncolored += 1;
        for idx in 0..self.adj[v].len() {
            let w = self.adj[v][idx];
            let f = &mut self.forbid[w * self.k + c];
            *f -= 1;
            if *f == 0 {
                self.sat[w] -= 1;
            }
        }
    }

    /// `Some(true)` colored, `Some(false)` refuted, `None` out of budget.
    fn search(&mut self, max_used: usize) -> Option<bool> {
        if self.uncolored == 0 {
            return Some(true);
        }
        if !self.meter.tick() {
            return None;
        }
        let mut pick = usize::MAX;
        for v in 0..self.colors.len() {
            if self.colors[v] != usize::MAX {
                continue;
            }
            if pick == usize::MAX
                || (self.sat[v], self.adj[v].len()) > (self.sat[pick], self.adj[pick].len())
            {
                pick = v;
            }
        }
        if self.sat[pick] >= self.k {
            return Some(false);
        }
        // A fresh color is interchangeable with any other fresh color.
        let limit = (max_used + 1).min(self.k);
        for c in 0..limit {
            if self.forbid[pick * self.k + c] != 0 {
                continue;
            }
            self.assign(pick, c);
            let r = self.search(max_used.max(c + 1));
            if r != Some(false) {
                if r.is_none() {
                    self.unassign(pick, c);
                }
                return r;
            }
            self.unassign(pick, c);
        }
        Some(false)
    }
}
