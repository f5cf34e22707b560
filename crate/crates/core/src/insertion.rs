//! Resilience of core numbers against single edge insertions.
//!
//! The space of possible insertions is every non-edge, so each node instead
//! gets `b` candidate partners: distance-2 neighbors first, random
//! non-neighbors to fill up. The insertion dependency graph is then built over
//! those candidates. Most candidates are resolved by three local rules that
//! only read core numbers and `|Δ>|` counts; the rest fall back to an
//! incremental insertion.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cores::{gt_count, Core, CoreState, SubcoreIndex};
use crate::dependency::{reciprocal, DependencyGraph};
use crate::error::{Error, Result};
use crate::graph::{canonical, distance2_neighbors, Edge, Graph, NodeId};
use crate::incremental::{insertion_affected, insertion_endpoints_rise};

/// Why an edge is in the candidate graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateOrigin {
    Distance2,
    Random,
}

impl CandidateOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateOrigin::Distance2 => "distance2",
            CandidateOrigin::Random => "random",
        }
    }
}

/// Candidate non-edges for insertion, ascending by edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionCandidateGraph {
    pub b: usize,
    pub seed: u64,
    pub edges: Vec<(Edge, CandidateOrigin)>,
    /// Nodes that could not be given `b` partners of their own.
    pub short: Vec<NodeId>,
}

impl InsertionCandidateGraph {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Candidate degree of every node.
    pub fn degrees(&self, node_count: usize) -> Vec<usize> {
        let mut deg = vec![0; node_count];
        for &((u, v), _) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }
}

/// Samples `b` candidate partners per node.
///
/// If `|Γ(u)| > b`, `b` distance-2 neighbors are drawn without replacement;
/// otherwise all of `Γ(u)` is taken plus `b - |Γ(u)|` distinct random nodes
/// that are neither `u`, its neighbors, nor in `Γ(u)`. Candidates are unioned
/// over all nodes, so a node can end up with more than `b`. Nodes are visited
/// in id order from one seeded stream, which makes the result a pure function
/// of `(g, b, seed)`.
pub fn build_candidate_graph(g: &Graph, b: usize, seed: u64) -> Result<InsertionCandidateGraph> {
    let n = g.node_count();
    if b == 0 {
        return Err(Error::Parameter("b must be at least 1".into()));
    }
    if b >= n {
        return Err(Error::Parameter(format!("b = {b} must be smaller than the node count {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: BTreeMap<Edge, CandidateOrigin> = BTreeMap::new();
    let mut short = Vec::new();

    for u in 0..n {
        let gamma = distance2_neighbors(g, u)?;
        if gamma.len() > b {
            for i in sample(&mut rng, gamma.len(), b).into_iter() {
                edges.entry(canonical(u, gamma[i])).or_insert(CandidateOrigin::Distance2);
            }
            continue;
        }
        for &w in &gamma {
            edges.entry(canonical(u, w)).or_insert(CandidateOrigin::Distance2);
        }
        let need = b - gamma.len();
        if need == 0 {
            continue;
        }
        let excluded = |w: NodeId| w == u || g.has_edge(u, w) || gamma.binary_search(&w).is_ok();
        let eligible = n - 1 - g.degree(u) - gamma.len();
        let picks: Vec<NodeId> = if eligible <= need {
            (0..n).filter(|&w| !excluded(w)).collect()
        } else if eligible * 2 >= n {
            let mut picks: Vec<NodeId> = Vec::with_capacity(need);
            while picks.len() < need {
                let w = rng.gen_range(0..n);
                if !excluded(w) && !picks.contains(&w) {
                    picks.push(w);
                }
            }
            picks
        } else {
            let pool: Vec<NodeId> = (0..n).filter(|&w| !excluded(w)).collect();
            sample(&mut rng, pool.len(), need).into_iter().map(|i| pool[i]).collect()
        };
        if picks.len() < need {
            short.push(u);
        }
        for w in picks {
            edges.entry(canonical(u, w)).or_insert(CandidateOrigin::Random);
        }
    }
    if !short.is_empty() {
        log::warn!("{} node(s) received fewer than b = {b} candidate partners", short.len());
    }
    Ok(InsertionCandidateGraph { b, seed, edges: edges.into_iter().collect(), short })
}

/// How a candidate insertion was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IscCase {
    /// `K(u) = |Δ>(u)|` and `K(v) > K(u)`: `K(u)` rises.
    LowSaturated,
    /// Equal cores and both saturated (`|Δ>| = K`): both rise.
    BothSaturated,
    /// `K(v) > K(u)`, `|Δ>(u)| = K(u) - 1` and `u` has a saturated equal-core
    /// neighbor: `K(u)` rises (that neighbor rises too).
    SaturatedPeer,
    /// Resolved by an incremental insertion.
    Fallback,
}

impl IscCase {
    pub fn as_str(self) -> &'static str {
        match self {
            IscCase::LowSaturated => "low_saturated",
            IscCase::BothSaturated => "both_saturated",
            IscCase::SaturatedPeer => "saturated_peer",
            IscCase::Fallback => "fallback",
        }
    }
}

/// A candidate edge oriented so that `K(low) <= K(high)`, with its case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub low: NodeId,
    pub high: NodeId,
    pub case: IscCase,
}

impl Classification {
    /// Endpoints the matched rule says will rise; `None` for the fallback.
    pub fn predicted(&self) -> Option<Vec<NodeId>> {
        match self.case {
            IscCase::LowSaturated | IscCase::SaturatedPeer => Some(vec![self.low]),
            IscCase::BothSaturated => Some(vec![self.low, self.high]),
            IscCase::Fallback => None,
        }
    }
}

/// Per-graph data the insertion rules read: `|Δ>|` per node, and whether a
/// node has an equal-core neighbor `w` with `|Δ>(w)| = K(w)`.
#[derive(Debug, Clone)]
pub struct IscContext {
    gt: Vec<usize>,
    saturated_peer: Vec<bool>,
}

impl IscContext {
    pub fn new(g: &Graph, core: &[Core]) -> Self {
        let n = g.node_count();
        let gt: Vec<usize> = (0..n).map(|u| gt_count(g, core, u)).collect();
        let saturated_peer =
            (0..n).map(|u| g.neighbors(u).iter().any(|&w| core[w] == core[u] && gt[w] == core[w] as usize)).collect();
        Self { gt, saturated_peer }
    }

    /// Classifies the absent edge `(u, v)`. Equal cores try the both-saturated
    /// rule; unequal cores try the single-saturated rule, then the
    /// one-short-with-saturated-peer rule. Anything else falls back.
    pub fn classify(&self, core: &[Core], u: NodeId, v: NodeId) -> Classification {
        let (low, high) = if core[u] <= core[v] { (u, v) } else { (v, u) };
        let k = core[low] as usize;
        let case = if core[low] == core[high] {
            if self.gt[low] == k && self.gt[high] == k {
                IscCase::BothSaturated
            } else {
                IscCase::Fallback
            }
        } else if self.gt[low] == k {
            IscCase::LowSaturated
        } else if k >= 1 && self.gt[low] == k - 1 && self.saturated_peer[low] {
            IscCase::SaturatedPeer
        } else {
            IscCase::Fallback
        };
        Classification { low, high, case }
    }
}

/// Classifies a single candidate edge.
pub fn isc_classify(g: &Graph, cs: &CoreState, u: NodeId, v: NodeId) -> Result<Classification> {
    g.check_node(u)?;
    g.check_node(v)?;
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    if g.has_edge(u, v) {
        return Err(Error::EdgeExists(u, v));
    }
    Ok(IscContext::new(g, cs.cores()).classify(cs.cores(), u, v))
}

/// How many candidates each rule resolved.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IscCounts {
    pub low_saturated: usize,
    pub both_saturated: usize,
    pub saturated_peer: usize,
    pub fallback: usize,
}

impl IscCounts {
    pub fn total(&self) -> usize {
        self.low_saturated + self.both_saturated + self.saturated_peer + self.fallback
    }

    pub fn resolved_by_rules(&self) -> usize {
        self.low_saturated + self.both_saturated + self.saturated_peer
    }

    /// Share of candidates that needed an incremental insertion.
    pub fn fallback_rate(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.fallback as f64 / t as f64,
        }
    }

    fn add(&mut self, case: IscCase) {
        match case {
            IscCase::LowSaturated => self.low_saturated += 1,
            IscCase::BothSaturated => self.both_saturated += 1,
            IscCase::SaturatedPeer => self.saturated_peer += 1,
            IscCase::Fallback => self.fallback += 1,
        }
    }
}

/// Insertion dependency graph with the case that produced each edge.
#[derive(Debug, Clone)]
pub struct IscOutput {
    pub dependency: DependencyGraph,
    /// `(src, dst, case)` in candidate order.
    pub tagged: Vec<(NodeId, NodeId, IscCase)>,
    pub counts: IscCounts,
}

/// Insertion Strength Computation over a candidate graph.
pub fn build_insertion_dependency_graph(
    g: &Graph,
    cs: &CoreState,
    ic: &InsertionCandidateGraph,
    subcores: Option<&SubcoreIndex>,
) -> IscOutput {
    let core = cs.cores();
    let ctx = IscContext::new(g, core);
    let resolved: Vec<(IscCase, Vec<(NodeId, NodeId)>)> = ic
        .edges
        .par_iter()
        .map(|&((u, v), _)| {
            let cls = ctx.classify(core, u, v);
            let risen = match cls.predicted() {
                Some(nodes) => nodes,
                None => {
                    let rise = match subcores {
                        Some(idx) => {
                            let hit = insertion_affected(g, cs, u, v, Some(idx));
                            [hit.binary_search(&u).is_ok(), hit.binary_search(&v).is_ok()]
                        }
                        None => insertion_endpoints_rise(g, cs, u, v),
                    };
                    [u, v].into_iter().zip(rise).filter(|&(_, r)| r).map(|(x, _)| x).collect()
                }
            };
            let edges = risen.into_iter().map(|x| (if x == u { v } else { u }, x)).collect();
            (cls.case, edges)
        })
        .collect();

    let mut counts = IscCounts::default();
    let mut tagged = Vec::new();
    for (case, edges) in resolved {
        counts.add(case);
        tagged.extend(edges.into_iter().map(|(s, d)| (s, d, case)));
    }
    let dependency = DependencyGraph::from_edges(g.node_count(), tagged.iter().map(|&(s, d, _)| (s, d)).collect());
    IscOutput { dependency, tagged, counts }
}

/// Naive construction: one incremental insertion per candidate.
pub fn naive_insertion_dependency_graph(
    g: &Graph,
    cs: &CoreState,
    ic: &InsertionCandidateGraph,
    subcores: Option<&SubcoreIndex>,
) -> DependencyGraph {
    let edges: Vec<(NodeId, NodeId)> = ic
        .edges
        .par_iter()
        .flat_map_iter(|&((u, v), _)| {
            let hit = insertion_affected(g, cs, u, v, subcores);
            let mut out = Vec::with_capacity(2);
            if hit.binary_search(&u).is_ok() {
                out.push((v, u));
            }
            if hit.binary_search(&v).is_ok() {
                out.push((u, v));
            }
            out
        })
        .collect();
    DependencyGraph::from_edges(g.node_count(), edges)
}

/// One trial: a candidate graph and the dependency graph built over it.
#[derive(Debug, Clone)]
pub struct InsertionTrial {
    pub candidates: InsertionCandidateGraph,
    pub isc: IscOutput,
}

/// Seed of trial `t`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    seed ^ t as u64
}

/// Runs `trials` independent trials, each with a freshly sampled candidate
/// graph.
pub fn run_insertion_trials(
    g: &Graph,
    cs: &CoreState,
    b: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<InsertionTrial>> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let candidates = build_candidate_graph(g, b, trial_seed(seed, t))?;
            let isc = build_insertion_dependency_graph(g, cs, &candidates, None);
            Ok(InsertionTrial { candidates, isc })
        })
        .collect()
}

/// Trial-averaged insertion strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionStrengths {
    pub trials: usize,
    /// Mean of `1 / deg⁻` over trials; infinite if any trial is infinite.
    pub is_id: Vec<f64>,
    /// Mean of `deg⁺` over trials.
    pub is_od: Vec<f64>,
    pub is_id_star: Vec<f64>,
    pub is_od_star: Vec<f64>,
    /// Population standard deviation of `is_id` across trials. Zero when
    /// every trial is infinite, infinite when only some are.
    pub stddev_is_id: Vec<f64>,
    pub trial_is_id: Vec<Vec<f64>>,
    pub trial_is_od: Vec<Vec<usize>>,
}

impl InsertionStrengths {
    pub fn from_trials(g: &Graph, trials: &[InsertionTrial]) -> Self {
        let n = g.node_count();
        let t = trials.len() as f64;
        let trial_is_id: Vec<Vec<f64>> = trials.iter().map(|tr| tr.isc.dependency.in_strengths()).collect();
        let trial_is_od: Vec<Vec<usize>> = trials.iter().map(|tr| tr.isc.dependency.out_degrees().to_vec()).collect();

        let mut is_id = vec![0.0; n];
        let mut is_od = vec![0.0; n];
        let mut stddev_is_id = vec![0.0; n];
        for u in 0..n {
            let ids: Vec<f64> = trial_is_id.iter().map(|row| row[u]).collect();
            let infinite = ids.iter().filter(|x| x.is_infinite()).count();
            is_id[u] = ids.iter().sum::<f64>() / t;
            is_od[u] = trial_is_od.iter().map(|row| row[u] as f64).sum::<f64>() / t;
            stddev_is_id[u] = if infinite == ids.len() {
                0.0
            } else if infinite > 0 {
                f64::INFINITY
            } else {
                let mean = is_id[u];
                (ids.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t).sqrt()
            };
        }
        let is_id_star = neighbor_sum(g, &is_id);
        let is_od_star = neighbor_sum(g, &is_od);
        Self { trials: trials.len(), is_id, is_od, is_id_star, is_od_star, stddev_is_id, trial_is_id, trial_is_od }
    }
}

/// `x*(u) = x(u) + Σ_{v ∈ N(u)} x(v)`.
pub fn neighbor_sum(g: &Graph, values: &[f64]) -> Vec<f64> {
    (0..g.node_count()).map(|u| values[u] + g.neighbors(u).iter().map(|&v| values[v]).sum::<f64>()).collect()
}

/// Insertion strengths averaged over `trials` candidate graphs.
pub fn insertion_strengths(
    g: &Graph,
    cs: &CoreState,
    b: usize,
    trials: usize,
    seed: u64,
) -> Result<InsertionStrengths> {
    let runs = run_insertion_trials(g, cs, b, trials, seed)?;
    Ok(InsertionStrengths::from_trials(g, &runs))
}

/// `IS_ID` of a single dependency graph, for callers that build their own.
pub fn in_strength_of(dg: &DependencyGraph, u: NodeId) -> f64 {
    reciprocal(dg.in_degree(u))
}
