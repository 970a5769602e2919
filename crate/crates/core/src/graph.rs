//! Undirected simple graphs on vertices `0..n`, with the set-algebra
//! operations (symmetric difference, Hamming distance), connectivity and
//! diameter used by every other module.
//!
//! Graphs are immutable once handed to the engine; mutation happens only
//! on trial-local working copies. Adjacency is kept as per-vertex ordered
//! sets so that deltas of `O(1)`..`O(n)` edges apply in `O(|delta| log n)`
//! and all iteration orders are deterministic.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::{Error, Result};

/// Vertex index in `[0, n)`.
pub type VertexId = u32;

/// Undirected edge stored in canonical order `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: VertexId,
    v: VertexId,
}

impl Edge {
    /// Canonicalizes the endpoint order. Panics on self-loops, which are
    /// never legal in this crate.
    pub fn new(a: VertexId, b: VertexId) -> Self {
        assert!(a != b, "self-loop ({a},{a}) is not a valid edge");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn u(&self) -> VertexId {
        self.u
    }

    pub fn v(&self) -> VertexId {
        self.v
    }
}

/// Number of potential edge slots on `n` vertices, `C(n, 2)`.
pub fn slot_count(n: usize) -> u64 {
    let n = n as u64;
    n * (n - 1) / 2
}

/// Linear index of an edge in the canonical row-major slot order:
/// `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
pub fn slot_index(n: usize, e: Edge) -> u64 {
    let n = n as u64;
    let u = e.u as u64;
    let v = e.v as u64;
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Inverse of [`slot_index`]: the edge occupying slot `idx`.
pub fn slot_edge(n: usize, idx: u64) -> Edge {
    debug_assert!(idx < slot_count(n));
    let nn = n as u64;
    // Binary search for the row u with start(u) <= idx < start(u+1),
    // where start(u) = u*n - u*(u+1)/2.
    let start = |u: u64| u * nn - u * (u + 1) / 2;
    let (mut lo, mut hi) = (0u64, nn - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if start(mid) <= idx {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = if start(hi) <= idx { hi } else { lo };
    let v = u + 1 + (idx - start(u));
    Edge::new(u as VertexId, v as VertexId)
}

/// Undirected simple graph on a fixed vertex set `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BTreeSet<VertexId>>,
    m: usize,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "graph needs at least one vertex");
        Graph {
            n,
            adj: vec![BTreeSet::new(); n],
            m: 0,
        }
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Self {
        let mut g = Graph::empty(n);
        for e in edges {
            g.add_edge(e);
        }
        g
    }

    /// Builds from `(u, v)` pairs; convenient in tests and constructions.
    pub fn from_pairs<I: IntoIterator<Item = (VertexId, VertexId)>>(n: usize, pairs: I) -> Self {
        Graph::from_edges(n, pairs.into_iter().map(|(a, b)| Edge::new(a, b)))
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n as VertexId {
            for v in (u + 1)..n as VertexId {
                g.add_edge(Edge::new(u, v));
            }
        }
        g
    }

    /// The path `0 - 1 - ... - n-1`.
    pub fn path(n: usize) -> Self {
        Graph::from_pairs(n, (0..n.saturating_sub(1)).map(|i| (i as u32, i as u32 + 1)))
    }

    /// A star with every other vertex attached to `center`.
    pub fn star(n: usize, center: VertexId) -> Self {
        assert!((center as usize) < n);
        Graph::from_pairs(
            n,
            (0..n as VertexId).filter(|&v| v != center).map(|v| (center, v)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.adj[e.u as usize].contains(&e.v)
    }

    /// Inserts an edge; returns false if it was already present.
    pub fn add_edge(&mut self, e: Edge) -> bool {
        assert!((e.v as usize) < self.n, "endpoint {} out of range", e.v);
        if self.adj[e.u as usize].insert(e.v) {
            self.adj[e.v as usize].insert(e.u);
            self.m += 1;
            true
        } else {
            false
        }
    }

    /// Removes an edge; returns false if it was absent.
    pub fn remove_edge(&mut self, e: Edge) -> bool {
        if self.adj[e.u as usize].remove(&e.v) {
            self.adj[e.v as usize].remove(&e.u);
            self.m -= 1;
            true
        } else {
            false
        }
    }

    /// Flips membership of an edge slot.
    pub fn toggle_edge(&mut self, e: Edge) {
        if !self.add_edge(e) {
            self.remove_edge(e);
        }
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v as usize].iter().copied()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    /// All edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| {
            nb.iter()
                .filter(move |&&v| (u as VertexId) < v)
                .map(move |&v| Edge::new(u as VertexId, v))
        })
    }

    /// Edges appearing in exactly one of the two graphs.
    pub fn symmetric_difference(&self, other: &Graph) -> Result<Vec<Edge>> {
        if self.n != other.n {
            return Err(Error::MismatchedVertexCount {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = Vec::new();
        for e in self.edges() {
            if !other.has_edge(e) {
                out.push(e);
            }
        }
        for e in other.edges() {
            if !self.has_edge(e) {
                out.push(e);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// `|G ⊕ G'|`, the number of differing edge slots.
    pub fn hamming_distance(&self, other: &Graph) -> Result<usize> {
        Ok(self.symmetric_difference(other)?.len())
    }

    /// BFS hop distances from `src`; `u32::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, src: VertexId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        dist[src as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in &self.adj[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// True iff every vertex is reachable from vertex 0. A single vertex
    /// is connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 64 {
            return self.is_connected_small();
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut count = 1usize;
        let mut stack = vec![0 as VertexId];
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Allocation-free connectivity for n <= 64 via bitset BFS; this sits
    /// on the rejection sampler's hot path.
    fn is_connected_small(&self) -> bool {
        let mut masks = [0u64; 64];
        for (u, nb) in self.adj.iter().enumerate() {
            let mut m = 0u64;
            for &v in nb {
                m |= 1 << v;
            }
            masks[u] = m;
        }
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                next |= masks[f.trailing_zeros() as usize];
                f &= f - 1;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == self.n
    }

    /// Largest hop distance between any pair; `None` when disconnected.
    /// BFS from every vertex; meant for validation paths, not inner loops.
    pub fn diameter(&self) -> Option<u32> {
        let mut best = 0u32;
        for src in 0..self.n as VertexId {
            let dist = self.bfs_distances(src);
            for &d in &dist {
                if d == u32::MAX {
                    return None;
                }
                best = best.max(d);
            }
        }
        Some(best)
    }

    /// Applies a delta after checking its invariants against this graph.
    pub fn apply_delta(&self, delta: &EdgeDelta) -> Result<Graph> {
        delta.validate_against(self)?;
        let mut g = self.clone();
        for &e in &delta.removed {
            g.remove_edge(e);
        }
        for &e in &delta.added {
            g.add_edge(e);
        }
        Ok(g)
    }

    /// Edge-list text form: header line `n m`, then one `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m);
        for e in self.edges() {
            let _ = writeln!(s, "{} {}", e.u, e.v);
        }
        s
    }
}

/// A sparse description of the change between two graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeDelta {
    pub added: BTreeSet<Edge>,
    pub removed: BTreeSet<Edge>,
}

impl EdgeDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    /// The delta turning `from` into `to`.
    pub fn between(from: &Graph, to: &Graph) -> Result<EdgeDelta> {
        let mut delta = EdgeDelta::default();
        for e in from.symmetric_difference(to)? {
            if from.has_edge(e) {
                delta.removed.insert(e);
            } else {
                delta.added.insert(e);
            }
        }
        Ok(delta)
    }

    fn validate_against(&self, g: &Graph) -> Result<()> {
        if let Some(e) = self.added.intersection(&self.removed).next() {
            return Err(Error::InvalidDelta(format!(
                "edge ({},{}) both added and removed",
                e.u, e.v
            )));
        }
        for &e in &self.removed {
            if !g.has_edge(e) {
                return Err(Error::InvalidDelta(format!(
                    "removed edge ({},{}) not present",
                    e.u, e.v
                )));
            }
        }
        for &e in &self.added {
            if (e.v as usize) >= g.n() {
                return Err(Error::InvalidDelta(format!(
                    "added edge ({},{}) out of range",
                    e.u, e.v
                )));
            }
            if g.has_edge(e) {
                return Err(Error::InvalidDelta(format!(
                    "added edge ({},{}) already present",
                    e.u, e.v
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_pairs(3, [(0, 1), (0, 2), (1, 2)])
    }

    #[test]
    fn symmetric_difference_identity() {
        let g = triangle();
        assert!(g.symmetric_difference(&g).unwrap().is_empty());
        assert_eq!(g.hamming_distance(&g).unwrap(), 0);
    }

    #[test]
    fn symmetric_difference_triangle_vs_path() {
        let g = triangle();
        let p = Graph::from_pairs(3, [(0, 1), (1, 2)]);
        let diff = g.symmetric_difference(&p).unwrap();
        assert_eq!(diff, vec![Edge::new(0, 2)]);
        assert_eq!(g.hamming_distance(&p).unwrap(), 1);
    }

    #[test]
    fn symmetric_difference_empty_vs_complete() {
        let e = Graph::empty(4);
        let k = Graph::complete(4);
        assert_eq!(e.hamming_distance(&k).unwrap(), 6);
    }

    #[test]
    fn symmetric_difference_rejects_mismatched_n() {
        let a = Graph::empty(3);
        let b = Graph::empty(4);
        assert!(matches!(
            a.symmetric_difference(&b),
            Err(Error::MismatchedVertexCount { .. })
        ));
    }

    #[test]
    fn connectivity_basics() {
        assert!(Graph::path(5).is_connected());
        assert!(Graph::empty(1).is_connected());
        assert!(Graph::star(100, 0).is_connected());
        let two_triangles = Graph::from_pairs(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]);
        assert!(!two_triangles.is_connected());
    }

    #[test]
    fn diameter_basics() {
        assert_eq!(Graph::complete(5).diameter(), Some(1));
        assert_eq!(Graph::path(6).diameter(), Some(5));
        assert_eq!(Graph::empty(2).diameter(), None);
        assert_eq!(Graph::empty(1).diameter(), Some(0));
    }

    #[test]
    fn diameter_cassette_small_instance() {
        // Path 0..8 plus shortcut edges (4,8) and (6,8). The farthest
        // pair is (0,6): six hops along the path, and six via 4-8-6.
        let g = Graph::from_pairs(
            9,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (4, 8), (6, 8)],
        );
        assert_eq!(g.diameter(), Some(6));
    }

    #[test]
    fn apply_delta_basics() {
        let p = Graph::from_pairs(3, [(0, 1), (1, 2)]);
        assert_eq!(p.apply_delta(&EdgeDelta::default()).unwrap(), p);

        let mut d = EdgeDelta::default();
        d.added.insert(Edge::new(0, 2));
        assert_eq!(p.apply_delta(&d).unwrap(), triangle());

        let mut d = EdgeDelta::default();
        d.removed.insert(Edge::new(0, 1));
        d.removed.insert(Edge::new(0, 2));
        let g = triangle().apply_delta(&d).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(Edge::new(1, 2)));
        assert!(!g.is_connected());
    }

    #[test]
    fn apply_delta_rejects_violations() {
        let p = Graph::path(3);
        let mut d = EdgeDelta::default();
        d.removed.insert(Edge::new(0, 2)); // not present
        assert!(matches!(p.apply_delta(&d), Err(Error::InvalidDelta(_))));

        let mut d = EdgeDelta::default();
        d.added.insert(Edge::new(0, 1)); // already present
        assert!(matches!(p.apply_delta(&d), Err(Error::InvalidDelta(_))));
    }

    #[test]
    fn slot_index_roundtrip() {
        for n in 2..=9usize {
            for idx in 0..slot_count(n) {
                let e = slot_edge(n, idx);
                assert_eq!(slot_index(n, e), idx);
            }
        }
    }

    #[test]
    fn edge_list_format() {
        let p = Graph::path(3);
        assert_eq!(p.to_edge_list(), "3 2\n0 1\n1 2\n");
    }
}
