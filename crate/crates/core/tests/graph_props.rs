//! Property and exhaustive checks for the graph layer.

use proptest::prelude::*;
use smoothflood_core::graph::{slot_count, slot_edge, EdgeDelta, Graph};

/// Random graph on `n` vertices as an edge-slot bitmask.
fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut g = Graph::empty(n);
    for s in 0..slot_count(n) {
        if mask >> s & 1 == 1 {
            g.add_edge(slot_edge(n, s));
        }
    }
    g
}

/// Reachability closure by repeated matrix squaring; independent of the
/// BFS used by `is_connected`.
fn closure_connected(g: &Graph) -> bool {
    let n = g.n();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in g.edges() {
        reach[e.u() as usize][e.v() as usize] = true;
        reach[e.v() as usize][e.u() as usize] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    reach.iter().all(|row| row.iter().all(|&b| b))
}

#[test]
fn connectivity_and_diameter_agree_with_closure_oracle_exhaustively() {
    for n in 1..=5usize {
        for mask in 0..(1u64 << slot_count(n)) {
            let g = graph_from_mask(n, mask);
            let connected = g.is_connected();
            assert_eq!(connected, closure_connected(&g), "n={n} mask={mask}");
            assert_eq!(connected, g.diameter().is_some(), "n={n} mask={mask}");
        }
    }
}

proptest! {
    #[test]
    fn hamming_distance_triangle_inequality(
        n in 2usize..8,
        m1 in 0u64..(1 << 21),
        m2 in 0u64..(1 << 21),
        m3 in 0u64..(1 << 21),
    ) {
        let slots = slot_count(n);
        let cut = |m: u64| m & ((1u64 << slots) - 1);
        let g1 = graph_from_mask(n, cut(m1));
        let g2 = graph_from_mask(n, cut(m2));
        let g3 = graph_from_mask(n, cut(m3));
        let d13 = g1.hamming_distance(&g3).unwrap();
        let d12 = g1.hamming_distance(&g2).unwrap();
        let d23 = g2.hamming_distance(&g3).unwrap();
        prop_assert!(d13 <= d12 + d23);
    }

    #[test]
    fn delta_between_roundtrips(
        n in 2usize..8,
        m1 in 0u64..(1 << 21),
        m2 in 0u64..(1 << 21),
    ) {
        let slots = slot_count(n);
        let cut = |m: u64| m & ((1u64 << slots) - 1);
        let g = graph_from_mask(n, cut(m1));
        let h = graph_from_mask(n, cut(m2));
        let delta = EdgeDelta::between(&g, &h).unwrap();
        prop_assert_eq!(g.apply_delta(&delta).unwrap(), h);
    }
}
