//! The round loop of one trial: adversary proposal, smoothing, flooding
//! step, repeated until full coverage or the round cap. Single-threaded
//! and self-contained; a harness runs many trials concurrently, each with
//! its own adversary instance and RNG lineage.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::adversary::{Adversary, AdversaryView};
use crate::graph::{Graph, VertexId};
use crate::smoothing::{NoiseOutcome, RoundRng, SmoothingModel, STREAM_NOISE};
use crate::Result;

/// The set of informed vertices. Grows monotonically; the source is a
/// member from the start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformedSet {
    mask: Vec<bool>,
    members: Vec<VertexId>,
}

impl InformedSet {
    pub fn new(n: usize, source: VertexId) -> Self {
        let mut mask = vec![false; n];
        mask[source as usize] = true;
        InformedSet {
            mask,
            members: vec![source],
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.mask[v as usize]
    }

    pub fn insert(&mut self, v: VertexId) {
        if !self.mask[v as usize] {
            self.mask[v as usize] = true;
            self.members.push(v);
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the source is always informed
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.mask.len()
    }

    /// Members in the order they became informed.
    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn min_uninformed(&self) -> Option<VertexId> {
        self.mask.iter().position(|&b| !b).map(|i| i as VertexId)
    }
}

/// One frontier expansion: every informed vertex informs all of its
/// neighbors in `g`. A vertex informed this round relays only from the
/// next round on.
pub fn flood_step(g: &Graph, informed: &InformedSet) -> InformedSet {
    let mut next = informed.clone();
    flood_step_into(g, &mut next);
    next
}

fn flood_step_into(g: &Graph, informed: &mut InformedSet) {
    let frontier_end = informed.members.len();
    let mut new_vertices = Vec::new();
    for i in 0..frontier_end {
        let u = informed.members[i];
        for v in g.neighbors(u) {
            if !informed.mask[v as usize] {
                informed.mask[v as usize] = true;
                new_vertices.push(v);
            }
        }
    }
    new_vertices.sort_unstable();
    informed.members.extend(new_vertices);
}

/// Per-round trace entry of one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: u64,
    /// `|G'_{i-1} ⊕ G_i|`, the churn the adversary proposed. Zero in
    /// round 1 by the `G'_0 = G_1` convention.
    pub proposed_churn: u64,
    pub noise_magnitude: u64,
    pub toggled_count: u64,
    pub rejections: u64,
    pub informed_count: u64,
    pub cap_bound: bool,
}

/// Everything recorded about one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment_seed: u64,
    pub trial: u64,
    /// First round with full coverage; `None` when the round cap hit.
    pub flooding_time: Option<u64>,
    pub rounds: Vec<RoundTrace>,
}

/// Mutable state of a flooding execution.
#[derive(Debug, Clone)]
pub struct FloodingState {
    pub round: u64,
    pub current_smoothed: Option<Graph>,
    pub informed: InformedSet,
    pub done: bool,
}

impl FloodingState {
    pub fn new(n: usize) -> Self {
        FloodingState {
            round: 0,
            current_smoothed: None,
            informed: InformedSet::new(n, 0),
            done: n == 1,
        }
    }
}

/// Runs one trial with the model's round step.
pub fn run_trial(
    adversary: &mut dyn Adversary,
    model: &SmoothingModel,
    max_rounds: u64,
    experiment_seed: u64,
    trial: u64,
) -> Result<TrialRecord> {
    model.validate(adversary.n())?;
    run_trial_with(
        adversary,
        |prev, proposal, rng| model.step(prev, proposal, rng),
        max_rounds,
        experiment_seed,
        trial,
    )
}

/// Runs one trial with an arbitrary noise step. Exposed so tests can
/// substitute a deterministic noise process and observe that the flooding
/// step communicates over the smoothed graph.
pub fn run_trial_with<F>(
    adversary: &mut dyn Adversary,
    mut noise_step: F,
    max_rounds: u64,
    experiment_seed: u64,
    trial: u64,
) -> Result<TrialRecord>
where
    F: FnMut(&Graph, &Graph, &mut RoundRng) -> Result<NoiseOutcome>,
{
    let n = adversary.n();
    let mut state = FloodingState::new(n);
    let mut record = TrialRecord {
        experiment_seed,
        trial,
        flooding_time: if state.done { Some(0) } else { None },
        rounds: Vec::new(),
    };

    // Placeholder previous graph for the round-1 view; every adaptive
    // construction decides round 1 from the informed set alone.
    let seed_graph = Graph::empty(n);

    for round in 1..=max_rounds {
        if state.done {
            break;
        }
        state.round = round;
        let proposal = adversary.propose(AdversaryView {
            round,
            prev_smoothed: state.current_smoothed.as_ref().unwrap_or(&seed_graph),
            informed: &state.informed,
        });
        debug_assert!(proposal.is_connected(), "adversary proposed a disconnected graph");

        // Round 1 smooths against the proposal itself: G'_0 = G_1.
        let reference = state.current_smoothed.as_ref().unwrap_or(&proposal);
        let proposed_churn = reference.hamming_distance(&proposal)? as u64;

        let mut rng = RoundRng::new(experiment_seed, trial, round, STREAM_NOISE);
        let outcome = noise_step(reference, &proposal, &mut rng)?;

        let before = state.informed.len();
        flood_step_into(&outcome.smoothed, &mut state.informed);
        debug_assert!(
            state.informed.len() > before || state.informed.is_full(),
            "informed set must grow every round on a connected graph"
        );

        record.rounds.push(RoundTrace {
            round,
            proposed_churn,
            noise_magnitude: outcome.noise_magnitude,
            toggled_count: outcome.toggled.len() as u64,
            rejections: outcome.rejections,
            informed_count: state.informed.len() as u64,
            cap_bound: outcome.cap_bound,
        });

        state.current_smoothed = Some(outcome.smoothed);
        if state.informed.is_full() {
            state.done = true;
            record.flooding_time = Some(round);
        }
    }

    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{
        AdversaryKind, BaseGraph, Oblivious, SpoolingAdversary, StaticAdversary,
    };
    use crate::graph::Edge;

    #[test]
    fn flood_step_basics() {
        let star = Graph::star(7, 0);
        let informed = InformedSet::new(7, 0);
        assert!(flood_step(&star, &informed).is_full());

        let path = Graph::path(4);
        let informed = InformedSet::new(4, 0);
        let next = flood_step(&path, &informed);
        assert_eq!(next.members(), &[0, 1]);

        // Fixed point on the full set.
        let mut full = InformedSet::new(4, 0);
        for v in 1..4 {
            full.insert(v);
        }
        assert_eq!(flood_step(&path, &full), full);
    }

    #[test]
    fn static_path_zero_noise_floods_in_n_minus_1() {
        for n in [2usize, 5, 17] {
            let mut adv =
                Oblivious(StaticAdversary::new(Graph::path(n)).unwrap());
            let model = SmoothingModel::KSmooth { k: 0.0 };
            let rec = run_trial(&mut adv, &model, 4 * n as u64, 1, 0).unwrap();
            assert_eq!(rec.flooding_time, Some(n as u64 - 1));
        }
    }

    #[test]
    fn spooling_zero_noise_floods_in_n_minus_1() {
        for n in [5usize, 12] {
            let mut adv = Oblivious(SpoolingAdversary::new(n).unwrap());
            let model = SmoothingModel::KSmooth { k: 0.0 };
            let rec = run_trial(&mut adv, &model, 4 * n as u64, 1, 0).unwrap();
            assert_eq!(rec.flooding_time, Some(n as u64 - 1));
        }
    }

    #[test]
    fn flooding_time_at_most_n_minus_1() {
        // Connectivity alone bounds flooding by n-1 for every pairing.
        let n = 24;
        let cases: [(AdversaryKind, SmoothingModel); 3] = [
            (AdversaryKind::Spooling, SmoothingModel::KSmooth { k: 1.0 }),
            (
                AdversaryKind::LowChurnSpooling,
                SmoothingModel::Proportional { epsilon: 0.2, cap: 1 },
            ),
            (
                AdversaryKind::StarRecenter { period: 1 },
                SmoothingModel::Targeted { epsilon: 0.5 },
            ),
        ];
        for (kind, model) in cases {
            for trial in 0..5 {
                let mut adv = kind.build(n, &model).unwrap();
                let rec = run_trial(adv.as_mut(), &model, n as u64 - 1, 3, trial).unwrap();
                let ft = rec.flooding_time.expect("must finish within n-1 rounds");
                assert!(ft <= n as u64 - 1);
            }
        }
    }

    #[test]
    fn informed_count_is_monotone() {
        let model = SmoothingModel::KSmooth { k: 2.0 };
        let mut adv = AdversaryKind::Spooling.build(40, &model).unwrap();
        let rec = run_trial(adv.as_mut(), &model, 200, 9, 4).unwrap();
        for w in rec.rounds.windows(2) {
            assert!(w[1].informed_count > w[0].informed_count);
        }
    }

    #[test]
    fn identical_lineage_gives_identical_record() {
        let model = SmoothingModel::KSmooth { k: 1.5 };
        let run = |trial| {
            let mut adv = AdversaryKind::Spooling.build(32, &model).unwrap();
            run_trial(adv.as_mut(), &model, 200, 42, trial).unwrap()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn communication_happens_on_the_smoothed_graph() {
        // The adversary proposes a path; a tracer noise step wires the
        // source straight to the far end. Flooding finishing in two
        // rounds proves the engine floods on G'_i, never on G_i.
        let n = 16;
        let mut adv = Oblivious(StaticAdversary::new(Graph::path(n)).unwrap());
        let rec = run_trial_with(
            &mut adv,
            |_prev, proposal, _rng| {
                let mut g = proposal.clone();
                g.add_edge(Edge::new(0, n as u32 - 1));
                Ok(NoiseOutcome {
                    smoothed: g,
                    noise_magnitude: 1,
                    toggled: vec![Edge::new(0, n as u32 - 1)],
                    rejections: 0,
                    cap_bound: false,
                })
            },
            100,
            0,
            0,
        )
        .unwrap();
        // Round 1 informs 1 and n-1; round 2 informs 2 and n-2; the two
        // fronts meet after about n/2 rounds instead of n-1.
        assert_eq!(rec.rounds[0].informed_count, 3);
        assert!(rec.flooding_time.unwrap() <= n as u64 / 2 + 1);
    }

    #[test]
    fn round_cap_yields_sentinel() {
        let model = SmoothingModel::KSmooth { k: 0.0 };
        let mut adv = AdversaryKind::Static { graph: BaseGraph::Path }
            .build(30, &model)
            .unwrap();
        let rec = run_trial(adv.as_mut(), &model, 10, 0, 0).unwrap();
        assert_eq!(rec.flooding_time, None);
        assert_eq!(rec.rounds.len(), 10);
    }
}
