//! Brute-force references for tests: exact smoothing distributions by
//! enumeration and exhaustive flooding-time distributions on tiny
//! instances. These run at desk scale before any statistical suite, so
//! sampler bugs surface on instances small enough to inspect by hand.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::engine::{flood_step, InformedSet};
use crate::graph::{slot_count, slot_edge, Edge, Graph};
use crate::smoothing::SmoothingModel;
use crate::{Error, Result};

/// Canonical key for comparing graphs across samplers and oracles.
pub fn graph_key(g: &Graph) -> Vec<Edge> {
    g.edges().collect()
}

/// Exact distribution over a finite support of graphs.
#[derive(Debug, Clone)]
pub struct SupportTable {
    /// Candidate graphs with their exact probabilities; mass sums to 1
    /// within 1e-12.
    pub candidates: Vec<(Graph, f64)>,
}

impl SupportTable {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.candidates.iter().map(|(_, p)| p).sum()
    }

    pub fn probability_of(&self, g: &Graph) -> f64 {
        self.candidates
            .iter()
            .find(|(c, _)| c == g)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    /// Total-variation distance to an empirical sample, counting mass on
    /// graphs outside the support as pure discrepancy.
    pub fn tv_distance(&self, empirical: &BTreeMap<Vec<Edge>, u64>, total: u64) -> f64 {
        let mut tv = 0.0;
        let mut seen_mass = 0.0;
        for (g, p) in &self.candidates {
            let freq = empirical.get(&graph_key(g)).copied().unwrap_or(0) as f64 / total as f64;
            tv += (p - freq).abs();
            seen_mass += freq;
        }
        tv += 1.0 - seen_mass; // samples landing outside the support
        tv / 2.0
    }
}

fn push_connected(out: &mut Vec<Graph>, g_adv: &Graph, toggles: &[u64]) {
    let mut g = g_adv.clone();
    for &s in toggles {
        g.toggle_edge(slot_edge(g.n(), s));
    }
    if g.is_connected() {
        out.push(g);
    }
}

/// All connected graphs at Hamming distance at most `t` from `g_adv`,
/// each with the uniform probability the `t`-smoothing definition
/// assigns. Toggle sets biject with graphs in the ball.
pub fn enumerate_t_smoothing(g_adv: &Graph, t: u64) -> Result<SupportTable> {
    let n = g_adv.n();
    if n > 6 || t > 3 {
        return Err(Error::BudgetExceeded(format!(
            "t-smoothing enumeration supports n <= 6 and t <= 3; got n = {n}, t = {t}"
        )));
    }
    let m = slot_count(n);
    let mut survivors = Vec::new();
    push_connected(&mut survivors, g_adv, &[]);
    if t >= 1 {
        for a in 0..m {
            push_connected(&mut survivors, g_adv, &[a]);
        }
    }
    if t >= 2 {
        for a in 0..m {
            for b in (a + 1)..m {
                push_connected(&mut survivors, g_adv, &[a, b]);
            }
        }
    }
    if t >= 3 {
        for a in 0..m {
            for b in (a + 1)..m {
                for c in (b + 1)..m {
                    push_connected(&mut survivors, g_adv, &[a, b, c]);
                }
            }
        }
    }
    let p = 1.0 / survivors.len() as f64;
    Ok(SupportTable {
        candidates: survivors.into_iter().map(|g| (g, p)).collect(),
    })
}

/// Exact distribution of the targeted smoothing of `g_adv` w.r.t.
/// `g_old`: all `2^{|⊕|}` revert patterns, conditioned on connectivity.
/// The conditioning realizes the repeat-until-allowed loop exactly.
pub fn exact_targeted_distribution(
    g_old: &Graph,
    g_adv: &Graph,
    epsilon: f64,
) -> Result<SupportTable> {
    let diff = g_old.symmetric_difference(g_adv)?;
    if diff.len() > 12 {
        return Err(Error::BudgetExceeded(format!(
            "targeted enumeration supports |diff| <= 12; got {}",
            diff.len()
        )));
    }
    let mut candidates = Vec::new();
    let mut connected_mass = 0.0;
    for pattern in 0u32..(1 << diff.len()) {
        let mut g = g_adv.clone();
        let mut mass = 1.0;
        for (bit, &e) in diff.iter().enumerate() {
            if pattern >> bit & 1 == 1 {
                g.toggle_edge(e);
                mass *= epsilon;
            } else {
                mass *= 1.0 - epsilon;
            }
        }
        if mass > 0.0 && g.is_connected() {
            connected_mass += mass;
            candidates.push((g, mass));
        }
    }
    for (_, p) in &mut candidates {
        *p /= connected_mass;
    }
    Ok(SupportTable { candidates })
}

/// Exact flooding-time distribution: probability of finishing at each
/// round, plus the mass still unfinished at the cap.
#[derive(Debug, Clone)]
pub struct FloodingDistribution {
    pub probs: BTreeMap<u64, f64>,
    pub capped: f64,
}

impl FloodingDistribution {
    pub fn mean(&self) -> f64 {
        self.probs.iter().map(|(&r, &p)| r as f64 * p).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.capped + self.probs.values().sum::<f64>()
    }
}

const FLOODING_TREE_BUDGET: u64 = 100_000;

/// Walks the full probability tree of a short dynamic sequence under a
/// noise model: every noise outcome at every round, exactly. The sequence
/// repeats its last graph once exhausted.
pub fn exhaustive_flooding_time(
    sequence: &[Graph],
    model: &SmoothingModel,
    max_rounds: u64,
) -> Result<FloodingDistribution> {
    if sequence.is_empty() || sequence.len() > 4 {
        return Err(Error::BudgetExceeded(
            "flooding tree walk takes 1..=4 graphs".into(),
        ));
    }
    let n = sequence[0].n();
    if n > 5 {
        return Err(Error::BudgetExceeded(format!(
            "flooding tree walk supports n <= 5; got {n}"
        )));
    }
    let mut dist = FloodingDistribution {
        probs: BTreeMap::new(),
        capped: 0.0,
    };
    let mut leaves = 0u64;
    let informed = InformedSet::new(n, 0);
    walk(
        sequence, model, max_rounds, 1, None, &informed, 1.0, &mut dist, &mut leaves,
    )?;
    Ok(dist)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    sequence: &[Graph],
    model: &SmoothingModel,
    max_rounds: u64,
    round: u64,
    prev: Option<&Graph>,
    informed: &InformedSet,
    prob: f64,
    dist: &mut FloodingDistribution,
    leaves: &mut u64,
) -> Result<()> {
    let proposal = &sequence[(round as usize - 1).min(sequence.len() - 1)];
    let reference = prev.unwrap_or(proposal);

    // Noise magnitudes and their probabilities for this round.
    let support: Vec<(SupportTable, f64)> = match *model {
        SmoothingModel::KSmooth { k } => roundp_branches(k)?
            .into_iter()
            .map(|(t, p)| Ok((enumerate_t_smoothing(proposal, t)?, p)))
            .collect::<Result<_>>()?,
        SmoothingModel::Proportional { epsilon, cap } => {
            let churn = reference.hamming_distance(proposal)? as f64;
            roundp_branches(epsilon * churn)?
                .into_iter()
                .map(|(t, p)| Ok((enumerate_t_smoothing(proposal, t.min(cap))?, p)))
                .collect::<Result<_>>()?
        }
        SmoothingModel::Targeted { epsilon } => {
            let table = exact_targeted_distribution(reference, proposal, epsilon)?;
            alloc::vec![(table, 1.0)]
        }
    };

    for (table, t_prob) in &support {
        for (smoothed, g_prob) in &table.candidates {
            let p = prob * t_prob * g_prob;
            if p == 0.0 {
                continue;
            }
            let next = flood_step(smoothed, informed);
            if next.is_full() {
                *leaves += 1;
                *dist.probs.entry(round).or_insert(0.0) += p;
            } else if round == max_rounds {
                *leaves += 1;
                dist.capped += p;
            } else {
                walk(
                    sequence,
                    model,
                    max_rounds,
                    round + 1,
                    Some(smoothed),
                    &next,
                    p,
                    dist,
                    leaves,
                )?;
            }
            if *leaves > FLOODING_TREE_BUDGET {
                return Err(Error::BudgetExceeded(
                    "flooding tree walk exceeded its leaf budget".into(),
                ));
            }
        }
    }
    Ok(())
}

/// The two-point support of `roundp(x)`.
fn roundp_branches(x: f64) -> Result<Vec<(u64, f64)>> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "roundp requires a non-negative input, got {x}"
        )));
    }
    let floor = libm::floor(x);
    let frac = x - floor;
    let mut branches = Vec::new();
    if frac < 1.0 {
        branches.push((floor as u64, 1.0 - frac));
    }
    if frac > 0.0 {
        branches.push((floor as u64 + 1, frac));
    }
    Ok(branches)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_t1_has_four_uniform_survivors() {
        let g = Graph::from_pairs(3, [(0, 1), (0, 2), (1, 2)]);
        let table = enumerate_t_smoothing(&g, 1).unwrap();
        assert_eq!(table.len(), 4);
        for (_, p) in &table.candidates {
            assert!((p - 0.25).abs() < 1e-12);
        }
        assert!((table.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_edge_t1_has_single_survivor() {
        // n=2: removing the only edge disconnects, nothing can be added.
        let g = Graph::path(2);
        let table = enumerate_t_smoothing(&g, 1).unwrap();
        assert_eq!(table.len(), 1);
        assert!((table.probability_of(&g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path4_t1_support() {
        // Path + 6 single-toggle graphs; removing an interior edge
        // disconnects, removing an end edge disconnects, adding any of
        // the 3 absent slots stays connected.
        let g = Graph::path(4);
        let table = enumerate_t_smoothing(&g, 1).unwrap();
        assert_eq!(table.len(), 4);
    }

    #[test]
    fn complete4_t2_survivor_count_regression() {
        // Frozen at first run of the enumeration itself: all 22 toggle
        // sets of size <= 2 leave K4 connected (no single or double edge
        // removal disconnects it, and nothing can be added).
        let g = Graph::complete(4);
        let table = enumerate_t_smoothing(&g, 2).unwrap();
        assert_eq!(table.len(), 22);
    }

    #[test]
    fn targeted_empty_diff_is_point_mass() {
        let g = Graph::path(4);
        let table = exact_targeted_distribution(&g, &g, 0.4).unwrap();
        assert_eq!(table.len(), 1);
        assert!((table.probability_of(&g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn targeted_single_change_is_bernoulli() {
        let g_old = Graph::path(4);
        let mut g_adv = g_old.clone();
        g_adv.add_edge(Edge::new(0, 3));
        let table = exact_targeted_distribution(&g_old, &g_adv, 0.3).unwrap();
        assert_eq!(table.len(), 2);
        assert!((table.probability_of(&g_adv) - 0.7).abs() < 1e-12);
        assert!((table.probability_of(&g_old) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn targeted_disconnecting_reversion_collapses() {
        // The adversary added the only bridge; reverting disconnects, so
        // the conditioned distribution is a point mass on g_adv.
        let g_old = Graph::from_pairs(4, [(0, 1), (2, 3), (0, 2)]);
        let mut g_adv = g_old.clone();
        g_adv.remove_edge(Edge::new(0, 2));
        g_adv.add_edge(Edge::new(1, 3));
        // diff = {(0,2) removed, (1,3) added}; reverting only (1,3)
        // disconnects, the other three patterns stay connected.
        let table = exact_targeted_distribution(&g_old, &g_adv, 0.5).unwrap();
        assert_eq!(table.len(), 3);
        assert!((table.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flooding_tree_static_path_zero_noise() {
        let dist = exhaustive_flooding_time(
            &[Graph::path(4)],
            &SmoothingModel::KSmooth { k: 0.0 },
            10,
        )
        .unwrap();
        assert_eq!(dist.probs.len(), 1);
        assert!((dist.probs[&3] - 1.0).abs() < 1e-12);
        assert_eq!(dist.capped, 0.0);
    }

    #[test]
    fn flooding_tree_mass_and_bounds() {
        let dist = exhaustive_flooding_time(
            &[Graph::path(4)],
            &SmoothingModel::KSmooth { k: 1.0 },
            6,
        )
        .unwrap();
        assert!((dist.total_mass() - 1.0).abs() < 1e-9);
        for (&r, _) in &dist.probs {
            assert!(r >= 1 && r <= 3, "flooding of n=4 ends within n-1 rounds");
        }
        assert!(dist.mean() >= 1.0);
    }

    #[test]
    fn budget_errors() {
        assert!(enumerate_t_smoothing(&Graph::path(7), 1).is_err());
        assert!(enumerate_t_smoothing(&Graph::path(4), 4).is_err());
        let a = Graph::empty(6);
        let b = Graph::complete(6);
        assert!(exact_targeted_distribution(&a, &b, 0.5).is_err());
        assert!(exhaustive_flooding_time(&[Graph::path(6)], &SmoothingModel::KSmooth { k: 0.0 }, 5)
            .is_err());
    }
}
