//! Adversary strategies: each produces the next proposed graph of the
//! dynamic network. Oblivious kinds are pure functions of the round
//! number, enforced by a separate trait that never sees the smoothed
//! history; adaptive kinds receive the previous smoothed graph and the
//! informed set.
//!
//! All constructions place the flooding source at index 0 and use
//! zero-based vertex ids throughout.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::engine::InformedSet;
use crate::graph::{Edge, Graph, VertexId};
use crate::smoothing::SmoothingModel;
use crate::{Error, Result};

/// What an adaptive adversary is allowed to observe before choosing the
/// round-`round` proposal.
#[derive(Debug)]
pub struct AdversaryView<'a> {
    /// Round being proposed for, starting at 1.
    pub round: u64,
    /// The previous smoothed graph `G'_{i-1}`.
    pub prev_smoothed: &'a Graph,
    /// Vertices informed by the end of the previous round.
    pub informed: &'a InformedSet,
}

/// An adversary strategy. Instances are stateful and owned by a single
/// trial; they must not be shared across trials.
pub trait Adversary {
    fn n(&self) -> usize;

    /// The proposal `G_i`. Must be connected.
    fn propose(&mut self, view: AdversaryView<'_>) -> Graph;
}

/// An adversary that fixes its whole sequence in advance. The interface
/// split is what enforces obliviousness: implementations only ever see
/// the round number.
pub trait ObliviousAdversary {
    fn n(&self) -> usize;

    fn propose_at(&self, round: u64) -> Graph;
}

/// Adapter running an oblivious strategy under the [`Adversary`] interface.
#[derive(Debug, Clone)]
pub struct Oblivious<T: ObliviousAdversary>(pub T);

impl<T: ObliviousAdversary> Adversary for Oblivious<T> {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn propose(&mut self, view: AdversaryView<'_>) -> Graph {
        self.0.propose_at(view.round)
    }
}

/// Proposes the same connected graph every round. Doubles as the
/// waiting-game baseline: under responsive noise it forces change-free
/// rounds.
#[derive(Debug, Clone)]
pub struct StaticAdversary {
    g0: Graph,
}

impl StaticAdversary {
    pub fn new(g0: Graph) -> Result<Self> {
        if !g0.is_connected() {
            return Err(Error::Config(
                "static adversary requires a connected base graph".into(),
            ));
        }
        Ok(StaticAdversary { g0 })
    }
}

impl ObliviousAdversary for StaticAdversary {
    fn n(&self) -> usize {
        self.g0.n()
    }

    fn propose_at(&self, _round: u64) -> Graph {
        self.g0.clone()
    }
}

/// The spooling graph: an informed spool absorbing one vertex per round,
/// bridged to an uninformed spool whose head rotates. Rounds beyond n-1
/// repeat the final graph.
#[derive(Debug, Clone)]
pub struct SpoolingAdversary {
    n: usize,
}

impl SpoolingAdversary {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("spooling graph needs n >= 2".into()));
        }
        Ok(SpoolingAdversary { n })
    }
}

impl ObliviousAdversary for SpoolingAdversary {
    fn n(&self) -> usize {
        self.n
    }

    fn propose_at(&self, round: u64) -> Graph {
        let n = self.n;
        let r = round.clamp(1, n as u64 - 1) as usize;
        // Informed spool around c = r-1, head at c+1 absorbing the rest.
        let c = (r - 1) as VertexId;
        let mut g = Graph::empty(n);
        for j in 0..c {
            g.add_edge(Edge::new(j, c));
        }
        g.add_edge(Edge::new(c, c + 1));
        for j in (c as usize + 2)..n {
            g.add_edge(Edge::new(c + 1, j as VertexId));
        }
        g
    }
}

/// Adaptive spooling: the source keeps a star over the informed set and
/// hands the rumor to a freshly chosen uninformed head each round, so no
/// head is ever informed ahead of schedule. Static diameter 3.
#[derive(Debug, Clone)]
pub struct AdaptiveSpoolingAdversary {
    n: usize,
}

impl AdaptiveSpoolingAdversary {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config("adaptive spooling needs n >= 3".into()));
        }
        Ok(AdaptiveSpoolingAdversary { n })
    }
}

impl Adversary for AdaptiveSpoolingAdversary {
    fn n(&self) -> usize {
        self.n
    }

    fn propose(&mut self, view: AdversaryView<'_>) -> Graph {
        let n = self.n;
        if view.round == 1 {
            // Star around vertex 1 over everyone else.
            return Graph::star(n, 1);
        }
        let informed = view.informed;
        let head = match informed.min_uninformed() {
            Some(u) => u,
            // Everyone informed; the engine stops before asking, but keep
            // a connected answer for robustness.
            None => return Graph::star(n, 0),
        };
        let mut g = Graph::empty(n);
        for &v in informed.members() {
            if v != 0 {
                g.add_edge(Edge::new(0, v));
            }
        }
        g.add_edge(Edge::new(0, head));
        for v in 0..n as VertexId {
            if v != head && !informed.contains(v) {
                g.add_edge(Edge::new(head, v));
            }
        }
        g
    }
}

/// The low-churn variant for the proportional model: informed star around
/// the source, uninformed star around vertex n-1, bridged by the minimal
/// uninformed connector. Re-proposing the canonical graph for the current
/// informed set realizes the repair rules (cut off noisily informed
/// vertices from the uninformed spool, drop noisy uninformed-uninformed
/// edges, revert everything else) plus the connector swap; with at most
/// one noisy edge per round the proposed churn stays in [2, 5].
#[derive(Debug, Clone)]
pub struct LowChurnSpoolingAdversary {
    n: usize,
}

impl LowChurnSpoolingAdversary {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config("low-churn spooling needs n >= 3".into()));
        }
        Ok(LowChurnSpoolingAdversary { n })
    }
}

impl Adversary for LowChurnSpoolingAdversary {
    fn n(&self) -> usize {
        self.n
    }

    fn propose(&mut self, view: AdversaryView<'_>) -> Graph {
        let n = self.n;
        let last = (n - 1) as VertexId;
        let informed = view.informed;
        let mut g = Graph::empty(n);
        for &v in informed.members() {
            if v != 0 {
                g.add_edge(Edge::new(0, v));
            }
        }
        for v in 0..last {
            if !informed.contains(v) {
                g.add_edge(Edge::new(v, last));
            }
        }
        if let Some(u) = informed.min_uninformed() {
            if u != last {
                g.add_edge(Edge::new(0, u));
            } else if !informed.contains(0) || n == 1 {
                // unreachable: source is always informed
            } else {
                g.add_edge(Edge::new(0, last));
            }
        }
        g
    }
}

/// The dynamic cassette graph: the path on n vertices plus rotating
/// shortcut edges from the endpoints to the evenly spaced shortcut
/// vertices. Rounds beyond n repeat the final graph.
#[derive(Debug, Clone)]
pub struct CassetteAdversary {
    n: usize,
    t: u64,
}

impl CassetteAdversary {
    /// The shortcut rotation interval is `t = ⌊c · log_{1/ε} n⌋`.
    pub fn new(n: usize, c: f64, epsilon: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config("cassette graph needs n >= 3".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!(
                "cassette graph requires targeted epsilon in (0, 1); got {epsilon}"
            )));
        }
        let t = libm::floor(c * libm::log(n as f64) / libm::log(1.0 / epsilon)) as i64;
        if t < 1 {
            return Err(Error::Config(format!(
                "cassette interval t = floor(c log_(1/eps) n) = {t} < 1; \
                 increase n or c, or decrease epsilon"
            )));
        }
        Ok(CassetteAdversary { n, t: t as u64 })
    }

    pub fn interval(&self) -> u64 {
        self.t
    }
}

impl ObliviousAdversary for CassetteAdversary {
    fn n(&self) -> usize {
        self.n
    }

    fn propose_at(&self, round: u64) -> Graph {
        let n = self.n as u64;
        let t = self.t;
        let i = round.clamp(1, n);
        let mut g = Graph::path(self.n);
        let left_max = (i - 1) / t; // shortcut vertices already claimed by 0
        let short_max = (n - 2) / t; // largest shortcut index
        for j in 1..=left_max.min(short_max) {
            g.add_edge(Edge::new(0, (j * t) as VertexId));
        }
        for j in (left_max + 2)..=short_max {
            g.add_edge(Edge::new((j * t) as VertexId, (n - 1) as VertexId));
        }
        g
    }
}

/// Diameter-2 probe for the targeted model: the star keeps recentering,
/// so the adversary keeps changing edges and the targeted noise keeps
/// firing, but every proposal still has a fully attached center.
///
/// The handover to the next center is spread over `period` rounds
/// (phases). During phase `p` the anchor center `c_p` keeps its complete
/// star while leaves detach from `c_{p-1}` and attach to `c_{p+1}` in
/// ascending vertex order, about `n / period` per round. Spreading the
/// churn matters under targeted noise: a whole-star jump changes about
/// `2n` edges at once, and the probability that an independent reversion
/// pattern leaves the graph connected vanishes exponentially in `n`,
/// which would starve the rejection loop rather than sample anything.
/// With a gradual handover an edge that keeps getting reverted is
/// re-proposed every round for a whole phase, so it heals with
/// probability `1 - eps^period` before the graph ever depends on it.
#[derive(Debug, Clone)]
pub struct StarRecenterAdversary {
    n: usize,
    period: u64,
}

impl StarRecenterAdversary {
    pub fn new(n: usize, period: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config("star recentering needs n >= 3".into()));
        }
        if period == 0 {
            return Err(Error::Config("star recentering period must be >= 1".into()));
        }
        Ok(StarRecenterAdversary { n, period })
    }

    /// Centers cycle over 1..n-1, never the source.
    fn center(&self, phase: u64) -> VertexId {
        (phase % (self.n as u64 - 1)) as VertexId + 1
    }
}

impl ObliviousAdversary for StarRecenterAdversary {
    fn n(&self) -> usize {
        self.n
    }

    fn propose_at(&self, round: u64) -> Graph {
        let n = self.n as u64;
        let phase = (round - 1) / self.period;
        let step = (round - 1) % self.period + 1;
        let per_round = n.div_ceil(self.period);
        // Vertices 0..moved have switched from the previous center to the
        // next one; the rest still hang off the previous center.
        let moved = (step * per_round).min(n);

        let anchor = self.center(phase);
        let next = self.center(phase + 1);
        let mut g = Graph::star(self.n, anchor);
        for v in 0..moved as VertexId {
            if v != next && v != anchor {
                g.add_edge(Edge::new(v.min(next), v.max(next)));
            }
        }
        if phase > 0 {
            let prev = self.center(phase - 1);
            for v in moved as VertexId..n as VertexId {
                if v != prev && v != anchor {
                    g.add_edge(Edge::new(v.min(prev), v.max(prev)));
                }
            }
        }
        g
    }
}

/// A small, serializable description of a static base graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseGraph {
    Path,
    Star { center: VertexId },
    Complete,
    Edges(Vec<(VertexId, VertexId)>),
}

impl BaseGraph {
    pub fn build(&self, n: usize) -> Graph {
        match self {
            BaseGraph::Path => Graph::path(n),
            BaseGraph::Star { center } => Graph::star(n, *center),
            BaseGraph::Complete => Graph::complete(n),
            BaseGraph::Edges(pairs) => Graph::from_pairs(n, pairs.iter().copied()),
        }
    }
}

/// Which adversary to run; parsed from experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    Static { graph: BaseGraph },
    Spooling,
    AdaptiveSpooling,
    LowChurnSpooling,
    Cassette { c: f64 },
    StarRecenter { period: u64 },
}

impl AdversaryKind {
    pub fn name(&self) -> &'static str {
        match self {
            AdversaryKind::Static { .. } => "static",
            AdversaryKind::Spooling => "spooling",
            AdversaryKind::AdaptiveSpooling => "adaptive_spooling",
            AdversaryKind::LowChurnSpooling => "low_churn_spooling",
            AdversaryKind::Cassette { .. } => "cassette",
            AdversaryKind::StarRecenter { .. } => "star_recenter",
        }
    }

    /// Checks adversary-model pairing premises without building anything.
    pub fn validate(&self, n: usize, model: &SmoothingModel) -> Result<()> {
        model.validate(n)?;
        match self {
            AdversaryKind::LowChurnSpooling => match *model {
                SmoothingModel::Proportional { epsilon, .. } if epsilon <= 0.2 => {}
                SmoothingModel::Proportional { epsilon, .. } => {
                    // roundp(5 * 0.2) = 1 deterministically, so the boundary
                    // is allowed; anything above can produce two noisy edges.
                    return Err(Error::Config(format!(
                        "low-churn spooling requires proportional epsilon <= 1/5; got {epsilon}"
                    )));
                }
                _ => {
                    return Err(Error::Config(
                        "low-churn spooling must be paired with the proportional model".into(),
                    ));
                }
            },
            AdversaryKind::Cassette { c } => match *model {
                SmoothingModel::Targeted { epsilon } => {
                    CassetteAdversary::new(n, *c, epsilon)?;
                }
                _ => {
                    return Err(Error::Config(
                        "the cassette graph must be paired with the targeted model".into(),
                    ));
                }
            },
            AdversaryKind::Static { graph } => {
                StaticAdversary::new(graph.build(n))?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Builds a trial-local adversary instance.
    pub fn build(&self, n: usize, model: &SmoothingModel) -> Result<Box<dyn Adversary>> {
        self.validate(n, model)?;
        Ok(match self {
            AdversaryKind::Static { graph } => {
                Box::new(Oblivious(StaticAdversary::new(graph.build(n))?))
            }
            AdversaryKind::Spooling => Box::new(Oblivious(SpoolingAdversary::new(n)?)),
            AdversaryKind::AdaptiveSpooling => Box::new(AdaptiveSpoolingAdversary::new(n)?),
            AdversaryKind::LowChurnSpooling => Box::new(LowChurnSpoolingAdversary::new(n)?),
            AdversaryKind::Cassette { c } => {
                let epsilon = match *model {
                    SmoothingModel::Targeted { epsilon } => epsilon,
                    _ => unreachable!("validated above"),
                };
                Box::new(Oblivious(CassetteAdversary::new(n, *c, epsilon)?))
            }
            AdversaryKind::StarRecenter { period } => {
                Box::new(Oblivious(StarRecenterAdversary::new(n, *period)?))
            }
        })
    }
}
