//! Statistical trend checks on the single-round hit probabilities: the
//! chance that noise lands an edge inside a target slot set grows with
//! both the noise magnitude and the set size, and scales roughly
//! linearly in their product. The universal constants themselves are not
//! estimated; only the shape is checked.

use smoothflood_core::graph::{Edge, Graph};
use smoothflood_core::smoothing::{sample_t_smoothing, RoundRng, STREAM_NOISE};

/// P[smoothed graph contains at least one edge of `targets`].
fn hit_probability(g: &Graph, t: u64, targets: &[Edge], draws: u64, seed: u64) -> f64 {
    let mut rng = RoundRng::new(seed, 0, 0, STREAM_NOISE);
    let mut hits = 0u64;
    for _ in 0..draws {
        let out = sample_t_smoothing(g, t, &mut rng).unwrap();
        if targets.iter().any(|&e| out.smoothed.has_edge(e)) {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

/// Target slots touching neither the path edges nor each other's rows in
/// confusing ways: edges (u, u+32) for consecutive u.
fn far_targets(count: usize) -> Vec<Edge> {
    (0..count as u32).map(|u| Edge::new(2 * u + 1, 2 * u + 32)).collect()
}

#[test]
fn hit_probability_monotone_in_set_size() {
    let g = Graph::path(64);
    let draws = 60_000;
    let small = far_targets(3);
    let large = far_targets(12); // superset of `small`
    let p_small = hit_probability(&g, 2, &small, draws, 41);
    let p_large = hit_probability(&g, 2, &large, draws, 42);
    assert!(
        p_small < p_large,
        "p_small = {p_small}, p_large = {p_large}"
    );
}

#[test]
fn hit_probability_monotone_in_noise_magnitude() {
    let g = Graph::path(64);
    let draws = 60_000;
    let targets = far_targets(8);
    let p1 = hit_probability(&g, 1, &targets, draws, 43);
    let p4 = hit_probability(&g, 4, &targets, draws, 44);
    assert!(p1 < p4, "p1 = {p1}, p4 = {p4}");
}

#[test]
fn hit_probability_scales_linearly_in_t_times_s() {
    // For target sets disjoint from the graph's edges, the hit
    // probability should track t*|S|/n^2 within a constant; check a 16x
    // range of t*|S| at n = 64 and require the normalized rates to agree
    // within a factor of 4.
    let g = Graph::path(64);
    let draws = 120_000;
    let cells: [(u64, usize); 4] = [(1, 4), (2, 8), (4, 8), (4, 16)];
    let mut normalized = Vec::new();
    for (i, &(t, s)) in cells.iter().enumerate() {
        let targets = far_targets(s);
        let p = hit_probability(&g, t, &targets, draws, 50 + i as u64);
        assert!(p > 0.0, "no hits at t={t}, |S|={s}");
        normalized.push(p / (t as f64 * s as f64));
    }
    let max = normalized.iter().cloned().fold(f64::MIN, f64::max);
    let min = normalized.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        max / min < 4.0,
        "normalized rates spread too wide: {normalized:?}"
    );
}
