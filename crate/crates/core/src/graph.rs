//! Undirected simple graphs on the vertex set `[n]`.
//!
//! A [`Graph`] keeps a sorted edge list (for subset tests between coupled
//! graphs) and sorted neighbour lists (for the solvers). Both are built
//! once; graphs are immutable afterwards.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} outside 1..={n}")]
    OutOfRangeVertex { vertex: usize, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("no pair of distinct vertices shares a component")]
    EmptyAverage,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from 1-based vertex labels. Pairs are normalized to
    /// `i < j` and deduplicated.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(GraphError::OutOfRangeVertex { vertex: v, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop { vertex: i });
            }
            edges.push((i - 1, j - 1));
        }
        Ok(Self::from_checked(n, edges))
    }

    /// Builds a graph from 0-based vertex indices. Errors report 1-based labels.
    pub fn from_index_edges<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges = Vec::new();
        for (i, j) in pairs {
            for v in [i, j] {
                if v >= n {
                    return Err(GraphError::OutOfRangeVertex { vertex: v + 1, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop { vertex: i + 1 });
            }
            edges.push((i, j));
        }
        Ok(Self::from_checked(n, edges))
    }

    fn from_checked(n: usize, pairs: Vec<(usize, usize)>) -> Self {
        let mut edges: Vec<(u32, u32)> = pairs
            .into_iter()
            .map(|(i, j)| {
                if i < j {
                    (i as u32, j as u32)
                } else {
                    (j as u32, i as u32)
                }
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Self::from_sorted_unique(n, edges)
    }

    /// `edges` must be sorted, deduplicated, 0-based with `i < j < n`.
    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<(u32, u32)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(i, j)| i < j && (j as usize) < n));
        let mut deg = vec![0usize; n];
        for &(i, j) in &edges {
            deg[i as usize] += 1;
            deg[j as usize] += 1;
        }
        let mut adj: Vec<Vec<u32>> = deg.iter().map(|&d| Vec::with_capacity(d)).collect();
        for &(i, j) in &edges {
            adj[i as usize].push(j);
            adj[j as usize].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                edges.push((i, j));
            }
        }
        Self::from_sorted_unique(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_unique(n, (1..n as u32).map(|j| (j - 1, j)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|j| (j - 1, j)).collect();
        edges.push((0, n as u32 - 1));
        edges.sort_unstable();
        Self::from_sorted_unique(n, edges)
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (i + 5, (i + 2) % 5 + 5));
        Self::from_index_edges(10, outer.chain(spokes).chain(inner)).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted 0-based edges with `i < j`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Edges as 1-based labels, in the canonical order.
    pub fn labeled_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .map(|&(i, j)| (i as usize + 1, j as usize + 1))
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n && v < self.n && self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn density(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.edges.len() as f64 / (self.n * (self.n - 1) / 2) as f64
        }
    }

    /// `self ≼ other`: same vertex set and a subset of its edges.
    pub fn is_edge_subgraph_of(&self, other: &Graph) -> bool {
        is_edge_subgraph(self, other)
    }

    pub fn add_isolated_vertices(&self, k: usize) -> Graph {
        Self::from_sorted_unique(self.n + k, self.edges.clone())
    }

    /// Copy with one extra edge (0-based endpoints).
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph, GraphError> {
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(i, j)| (i as usize, j as usize))
            .collect();
        pairs.push((u, v));
        Self::from_index_edges(self.n, pairs)
    }

    /// Subgraph induced by `s`, relabeled `0..|s|` in increasing order.
    pub fn induced_subgraph(&self, s: &VertexSubset) -> Result<Graph, GraphError> {
        if let Some(&v) = s.members().last() {
            if v >= self.n {
                return Err(GraphError::OutOfRangeVertex {
                    vertex: v + 1,
                    n: self.n,
                });
            }
        }
        let mut relabel = vec![u32::MAX; self.n];
        for (new, &old) in s.members().iter().enumerate() {
            relabel[old] = new as u32;
        }
        let edges: Vec<(u32, u32)> = self
            .edges
            .iter()
            .filter_map(|&(i, j)| {
                let (a, b) = (relabel[i as usize], relabel[j as usize]);
                (a != u32::MAX && b != u32::MAX).then_some((a, b))
            })
            .collect();
        // Relabeling is order preserving, so the list stays sorted.
        Ok(Self::from_sorted_unique(s.len(), edges))
    }

    /// Number of edges with both endpoints in `vertices` (0-based, distinct).
    pub fn edges_within(&self, vertices: &[usize]) -> usize {
        let mut count = 0;
        for (a, &u) in vertices.iter().enumerate() {
            for &v in &vertices[a + 1..] {
                if self.has_edge(u, v) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Components in order of their smallest vertex.
    pub fn connected_components(&self) -> Vec<VertexSubset> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    let w = w as usize;
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(VertexSubset { members });
        }
        out
    }

    /// BFS distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                let w = w as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Mean shortest-path distance over unordered pairs of distinct vertices
    /// lying in a common component.
    pub fn average_distance(&self) -> Result<f64, GraphError> {
        let mut total: u64 = 0;
        let mut pairs: u64 = 0;
        for u in 0..self.n {
            let dist = self.bfs_distances(u);
            for &d in &dist[u + 1..] {
                if d != usize::MAX {
                    total += d as u64;
                    pairs += 1;
                }
            }
        }
        if pairs == 0 {
            Err(GraphError::EmptyAverage)
        } else {
            Ok(total as f64 / pairs as f64)
        }
    }
}

/// The partial order `g1 ≼ g2`: equal vertex counts and `E(g1) ⊆ E(g2)`.
pub fn is_edge_subgraph(g1: &Graph, g2: &Graph) -> bool {
    if g1.n != g2.n || g1.edges.len() > g2.edges.len() {
        return false;
    }
    let mut it = g2.edges.iter();
    'outer: for e in &g1.edges {
        for f in it.by_ref() {
            if f == e {
                continue 'outer;
            }
            if f > e {
                return false;
            }
        }
        return false;
    }
    true
}

/// Sorted set of distinct 0-based vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSubset {
    members: Vec<usize>,
}

impl VertexSubset {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    /// From 1-based labels, checked against `n`.
    pub fn from_labels(n: usize, labels: &[usize]) -> Result<Self, GraphError> {
        let mut members = Vec::with_capacity(labels.len());
        for &l in labels {
            if l == 0 || l > n {
                return Err(GraphError::OutOfRangeVertex { vertex: l, n });
            }
            members.push(l - 1);
        }
        Ok(Self::new(members))
    }

    pub fn all(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn labels(&self) -> Vec<usize> {
        self.members.iter().map(|v| v + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p3() -> Graph {
        Graph::new(3, &[(1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn construction_normalizes() {
        let g = p3();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        let g = Graph::new(3, &[(2, 1), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(
            Graph::new(2, &[(1, 1)]),
            Err(GraphError::SelfLoop { vertex: 1 })
        );
        assert_eq!(
            Graph::new(2, &[(1, 3)]),
            Err(GraphError::OutOfRangeVertex { vertex: 3, n: 2 })
        );
        assert_eq!(
            Graph::new(2, &[(0, 1)]),
            Err(GraphError::OutOfRangeVertex { vertex: 0, n: 2 })
        );
    }

    #[test]
    fn partial_order_examples() {
        let k3 = Graph::complete(3);
        assert!(is_edge_subgraph(&p3(), &k3));
        assert!(!is_edge_subgraph(&k3, &p3()));
        assert!(is_edge_subgraph(&k3, &k3));
        assert!(!is_edge_subgraph(&Graph::empty(3), &Graph::empty(4)));
    }

    #[test]
    fn isolated_vertices() {
        let g = Graph::complete(3).add_isolated_vertices(2);
        assert_eq!((g.n(), g.edge_count()), (5, 3));
        assert_eq!(p3().add_isolated_vertices(0), p3());
        let g = Graph::empty(0).add_isolated_vertices(3);
        assert_eq!((g.n(), g.edge_count()), (3, 0));
    }

    #[test]
    fn induced_examples() {
        let k4 = Graph::complete(4);
        let s = VertexSubset::from_labels(4, &[1, 2, 3]).unwrap();
        assert_eq!(k4.induced_subgraph(&s).unwrap(), Graph::complete(3));
        let s = VertexSubset::from_labels(3, &[1, 3]).unwrap();
        let h = p3().induced_subgraph(&s).unwrap();
        assert_eq!((h.n(), h.edge_count()), (2, 0));
        let bad = VertexSubset::new(std::vec![0, 7]);
        assert!(matches!(
            p3().induced_subgraph(&bad),
            Err(GraphError::OutOfRangeVertex { vertex: 8, .. })
        ));
    }

    #[test]
    fn average_distance_examples() {
        let g = Graph::new(3, &[(1, 2)]).unwrap();
        assert_eq!(g.average_distance(), Ok(1.0));
        let g2 = g.with_edge(1, 2).unwrap();
        assert!((g2.average_distance().unwrap() - 4.0 / 3.0).abs() < 1e-15);
        for n in 2..8 {
            assert_eq!(Graph::complete(n).average_distance(), Ok(1.0));
        }
        assert_eq!(
            Graph::empty(4).average_distance(),
            Err(GraphError::EmptyAverage)
        );
        assert_eq!(
            Graph::empty(0).average_distance(),
            Err(GraphError::EmptyAverage)
        );
    }

    #[test]
    fn path_average_distance_closed_form() {
        for k in 2..=20usize {
            let got = Graph::path(k).average_distance().unwrap();
            let want = (k as f64 + 1.0) / 3.0;
            assert!((got - want).abs() < 1e-12, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn degrees_and_components() {
        let k3 = Graph::complete(3);
        assert_eq!(k3.degree_sequence(), [2, 2, 2]);
        assert_eq!(k3.connected_components().len(), 1);
        let e = Graph::empty(3);
        assert_eq!(e.degree_sequence(), [0, 0, 0]);
        assert_eq!(e.connected_components().len(), 3);
        assert_eq!(p3().degree_sequence(), [1, 2, 1]);
        assert_eq!(p3().connected_components(), [VertexSubset::all(3)]);
    }

    #[test]
    fn petersen_shape() {
        let p = Graph::petersen();
        assert_eq!(p.edge_count(), 15);
        assert!(p.degree_sequence().iter().all(|&d| d == 3));
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
                let mut edges = std::vec::Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k] {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                Graph::from_index_edges(n, edges).unwrap()
            })
        })
    }

    fn arb_mask_triple(n: usize) -> impl Strategy<Value = (Graph, Graph, Graph)> {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(0u8..8, pairs).prop_map(move |m| {
            let mk = |bit: u8| {
                let mut edges = std::vec::Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if m[k] & bit != 0 {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                Graph::from_index_edges(n, edges).unwrap()
            };
            (mk(1), mk(2), mk(4))
        })
    }

    proptest! {
        #[test]
        fn partial_order_laws((a, b, c) in arb_mask_triple(6)) {
            prop_assert!(is_edge_subgraph(&a, &a));
            if is_edge_subgraph(&a, &b) && is_edge_subgraph(&b, &a) {
                prop_assert_eq!(&a, &b);
            }
            if is_edge_subgraph(&a, &b) && is_edge_subgraph(&b, &c) {
                prop_assert!(is_edge_subgraph(&a, &c));
            }
        }

        #[test]
        fn induced_on_all_vertices_is_identity(g in arb_graph(9)) {
            prop_assert_eq!(g.induced_subgraph(&VertexSubset::all(g.n())).unwrap(), g);
        }

        #[test]
        fn degree_sum_is_twice_edges(g in arb_graph(12)) {
            prop_assert_eq!(g.degree_sequence().iter().sum::<usize>(), 2 * g.edge_count());
            let total: usize = g.connected_components().iter().map(VertexSubset::len).sum();
            prop_assert_eq!(total, g.n());
        }

        #[test]
        fn induced_edge_count_matches_pair_scan(g in arb_graph(8), mask in any::<u8>()) {
            let members: std::vec::Vec<usize> = (0..g.n()).filter(|v| mask >> v & 1 == 1).collect();
            let s = VertexSubset::new(members.clone());
            let h = g.induced_subgraph(&s).unwrap();
            let mut brute = 0;
            for a in 0..members.len() {
                for b in a + 1..members.len() {
                    if g.edges().contains(&(members[a] as u32, members[b] as u32)) {
                        brute += 1;
                    }
                }
            }
            prop_assert_eq!(h.edge_count(), brute);
        }
    }
}
