//! The samplers against their exact enumeration references, and the
//! engine against the exhaustive flooding tree, on instances small
//! enough to enumerate completely.

use std::collections::BTreeMap;

use smoothflood_core::adversary::{Oblivious, StaticAdversary};
use smoothflood_core::engine::run_trial;
use smoothflood_core::graph::{Edge, Graph};
use smoothflood_core::oracle::{
    enumerate_t_smoothing, exact_targeted_distribution, exhaustive_flooding_time, graph_key,
};
use smoothflood_core::smoothing::{
    sample_t_smoothing, sample_targeted_smoothing, RoundRng, SmoothingModel, STREAM_NOISE,
};

const DRAWS: u64 = 100_000;

fn empirical_t_smoothing(g: &Graph, t: u64, seed: u64) -> BTreeMap<Vec<Edge>, u64> {
    let mut counts = BTreeMap::new();
    let mut rng = RoundRng::new(seed, 0, 0, STREAM_NOISE);
    for _ in 0..DRAWS {
        let out = sample_t_smoothing(g, t, &mut rng).unwrap();
        *counts.entry(graph_key(&out.smoothed)).or_insert(0) += 1;
    }
    counts
}

#[test]
fn t_smoothing_matches_enumeration_on_triangle() {
    let g = Graph::from_pairs(3, [(0, 1), (0, 2), (1, 2)]);
    let table = enumerate_t_smoothing(&g, 1).unwrap();
    assert_eq!(table.len(), 4);
    let counts = empirical_t_smoothing(&g, 1, 11);
    let tv = table.tv_distance(&counts, DRAWS);
    assert!(tv < 0.01, "tv = {tv}");
    // Each of the four survivors near 0.25.
    for (_, &c) in &counts {
        let f = c as f64 / DRAWS as f64;
        assert!((f - 0.25).abs() < 0.01, "f = {f}");
    }
}

#[test]
fn t_smoothing_matches_enumeration_on_path4() {
    let g = Graph::path(4);
    let table = enumerate_t_smoothing(&g, 1).unwrap();
    let counts = empirical_t_smoothing(&g, 1, 12);
    let tv = table.tv_distance(&counts, DRAWS);
    assert!(tv < 0.01, "tv = {tv}");
}

#[test]
fn t_smoothing_matches_enumeration_t2() {
    let g = Graph::from_pairs(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
    let table = enumerate_t_smoothing(&g, 2).unwrap();
    let counts = empirical_t_smoothing(&g, 2, 13);
    let tv = table.tv_distance(&counts, DRAWS);
    assert!(tv < 0.02, "tv = {tv}");
}

#[test]
fn targeted_sampler_matches_exact_distribution() {
    // Two adversary changes, one of whose reversions can disconnect.
    let g_old = Graph::from_pairs(5, [(0, 1), (1, 2), (2, 3), (3, 4)]);
    let mut g_adv = g_old.clone();
    g_adv.remove_edge(Edge::new(2, 3));
    g_adv.add_edge(Edge::new(1, 3));
    g_adv.add_edge(Edge::new(0, 4));
    let table = exact_targeted_distribution(&g_old, &g_adv, 0.4).unwrap();
    assert!((table.total_mass() - 1.0).abs() < 1e-12);

    let mut counts = BTreeMap::new();
    let mut rng = RoundRng::new(21, 0, 0, STREAM_NOISE);
    for _ in 0..DRAWS {
        let out = sample_targeted_smoothing(&g_adv, &g_old, 0.4, &mut rng).unwrap();
        *counts.entry(graph_key(&out.smoothed)).or_insert(0) += 1;
    }
    let tv = table.tv_distance(&counts, DRAWS);
    assert!(tv < 0.02, "tv = {tv}");
}

#[test]
fn targeted_four_outcomes_quarter_each() {
    // epsilon = 0.5, one added and one removed adversary edge, all four
    // revert patterns connected.
    let g_old = Graph::from_pairs(4, [(0, 1), (1, 2), (2, 3), (0, 2)]);
    let mut g_adv = g_old.clone();
    g_adv.remove_edge(Edge::new(0, 2));
    g_adv.add_edge(Edge::new(0, 3));
    let table = exact_targeted_distribution(&g_old, &g_adv, 0.5).unwrap();
    assert_eq!(table.len(), 4);
    for (_, p) in &table.candidates {
        assert!((p - 0.25).abs() < 1e-12);
    }

    let mut counts = BTreeMap::new();
    let mut rng = RoundRng::new(22, 0, 0, STREAM_NOISE);
    for _ in 0..DRAWS {
        let out = sample_targeted_smoothing(&g_adv, &g_old, 0.5, &mut rng).unwrap();
        *counts.entry(graph_key(&out.smoothed)).or_insert(0) += 1;
    }
    for (_, &c) in &counts {
        let f = c as f64 / DRAWS as f64;
        assert!((f - 0.25).abs() < 0.01, "f = {f}");
    }
}

#[test]
fn engine_matches_flooding_tree_on_tiny_instance() {
    // Static path n=3 under k = 3/16 background noise (the largest k the
    // premises allow at n = 3): the exact tree walk versus 100k engine
    // trials, total variation below 0.02.
    let model = SmoothingModel::KSmooth { k: 3.0 / 16.0 };
    let max_rounds = 12;
    let dist = exhaustive_flooding_time(&[Graph::path(3)], &model, max_rounds).unwrap();
    assert!((dist.total_mass() - 1.0).abs() < 1e-9);
    assert!(dist.mean() >= 1.0 && dist.mean() <= 2.0);

    let trials = 100_000u64;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for trial in 0..trials {
        let mut adv = Oblivious(StaticAdversary::new(Graph::path(3)).unwrap());
        let rec = run_trial(&mut adv, &model, max_rounds, 31, trial).unwrap();
        *counts.entry(rec.flooding_time.expect("n=3 floods quickly")).or_insert(0) += 1;
    }
    let mut tv = 0.0;
    for round in 1..=max_rounds {
        let exact = dist.probs.get(&round).copied().unwrap_or(0.0);
        let emp = counts.get(&round).copied().unwrap_or(0) as f64 / trials as f64;
        tv += (exact - emp).abs();
    }
    tv /= 2.0;
    assert!(tv < 0.02, "tv = {tv}");
}
