//! Resilience of core numbers against single edge removals.
//!
//! A node `u` is *vulnerable* when `K(u) = |Δ≥(u)|`: it has exactly as many
//! neighbors with core `>= K(u)` as it needs, so losing any of those edges
//! (its *sensitive* edges) drops `K(u)`. Connected vulnerable nodes of equal
//! core form a *k-corona*; the union of their sensitive edges (the corona's
//! KAES) are the only edges whose removal changes any core number, and every
//! edge in one KAES produces the same post-removal core vector. So one
//! incremental removal per corona (its CCN, the set of core-changed nodes)
//! is enough to assemble the whole removal dependency graph.

use std::collections::{BTreeMap, HashMap, VecDeque};

use itertools::Itertools;
use rayon::prelude::*;

use crate::cores::{core_numbers, geq_count, CoreState};
use crate::dependency::DependencyGraph;
use crate::error::{Error, Result};
use crate::graph::{canonical, Edge, Graph, NodeId};
use crate::incremental::removal_affected;

/// `CS(u) = |Δ≥(u)| - K(u) + 1`. Always at least 1.
pub fn core_strength(g: &Graph, cs: &CoreState) -> Vec<usize> {
    (0..g.node_count()).map(|u| geq_count(g, cs.cores(), u) + 1 - cs.core(u) as usize).collect()
}

/// Vulnerable nodes and their sensitive edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vulnerability {
    pub vulnerable: Vec<bool>,
    /// For each vulnerable node, its `Δ≥` neighbors (ascending). Empty for
    /// every other node.
    pub sensitive: Vec<Vec<NodeId>>,
}

impl Vulnerability {
    pub fn is_vulnerable(&self, u: NodeId) -> bool {
        self.vulnerable[u]
    }

    pub fn vulnerable_nodes(&self) -> Vec<NodeId> {
        (0..self.vulnerable.len()).filter(|&u| self.vulnerable[u]).collect()
    }

    pub fn sensitive_edges(&self, u: NodeId) -> impl Iterator<Item = Edge> + '_ {
        self.sensitive[u].iter().map(move |&v| canonical(u, v))
    }
}

/// Isolated nodes (core 0) satisfy `K = |Δ≥|` trivially but have no edges to
/// lose; they are not reported as vulnerable.
pub fn find_vulnerable_and_sensitive(g: &Graph, cs: &CoreState) -> Vulnerability {
    let core = cs.cores();
    let n = g.node_count();
    let mut vulnerable = vec![false; n];
    let mut sensitive = vec![Vec::new(); n];
    for u in 0..n {
        if core[u] > 0 && geq_count(g, core, u) == core[u] as usize {
            vulnerable[u] = true;
            sensitive[u] = g.neighbors(u).iter().copied().filter(|&v| core[v] >= core[u]).collect();
        }
    }
    Vulnerability { vulnerable, sensitive }
}

/// One k-corona with its adjacent edge set and core-changed nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corona {
    pub k: u32,
    /// Ascending.
    pub members: Vec<NodeId>,
    /// Canonical edges, ascending.
    pub kaes: Vec<Edge>,
    /// Nodes whose core drops after removing any KAES edge, ascending.
    pub ccn: Vec<NodeId>,
}

impl Corona {
    pub fn ccn_contains(&self, u: NodeId) -> bool {
        self.ccn.binary_search(&u).is_ok()
    }

    /// The edge removed to compute the CCN.
    pub fn representative(&self) -> Edge {
        self.kaes[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoronaSet {
    pub coronas: Vec<Corona>,
    /// Index into `coronas` for every vulnerable node.
    pub corona_of: Vec<Option<usize>>,
    pub vulnerability: Vulnerability,
}

impl CoronaSet {
    pub fn len(&self) -> usize {
        self.coronas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coronas.is_empty()
    }

    /// Maps each KAES edge to its corona. An edge belongs to at most one
    /// KAES: it is sensitive only for an endpoint of minimal core, and two
    /// vulnerable endpoints of equal core share a corona.
    pub fn kaes_index(&self) -> HashMap<Edge, usize> {
        self.coronas.iter().enumerate().flat_map(|(i, c)| c.kaes.iter().map(move |&e| (e, i))).collect()
    }
}

/// Finds every k-corona by BFS over vulnerable nodes of equal core, attaches
/// its KAES, and computes its CCN with one incremental removal.
pub fn find_k_coronas(g: &Graph, cs: &CoreState) -> CoronaSet {
    let core = cs.cores();
    let vulnerability = find_vulnerable_and_sensitive(g, cs);
    let n = g.node_count();
    let mut corona_of: Vec<Option<usize>> = vec![None; n];
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if !vulnerability.vulnerable[start] || corona_of[start].is_some() {
            continue;
        }
        let id = groups.len();
        let k = core[start];
        let mut members = Vec::new();
        corona_of[start] = Some(id);
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            members.push(x);
            for &y in g.neighbors(x) {
                if vulnerability.vulnerable[y] && core[y] == k && corona_of[y].is_none() {
                    corona_of[y] = Some(id);
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }

    let coronas: Vec<Corona> = groups
        .into_par_iter()
        .map(|members| {
            let mut kaes: Vec<Edge> = members.iter().flat_map(|&u| vulnerability.sensitive_edges(u)).collect();
            kaes.sort_unstable();
            kaes.dedup();
            let (a, b) = kaes[0];
            let ccn = removal_affected(g, core, a, b);
            Corona { k: core[members[0]], members, kaes, ccn }
        })
        .collect();

    CoronaSet { coronas, corona_of, vulnerability }
}

/// Assembles the removal dependency graph from corona data.
///
/// * vulnerable `u`: every `v ∈ Δ≥(u)` gets `v -> u`;
/// * otherwise `u` depends on a vulnerable equal-core neighbor `v` exactly
///   when `u` is in the CCN of `v`'s corona.
pub fn build_removal_dependency_graph(g: &Graph, cs: &CoreState, coronas: &CoronaSet) -> DependencyGraph {
    let core = cs.cores();
    let vuln = &coronas.vulnerability;
    let mut edges = Vec::new();
    for u in 0..g.node_count() {
        if vuln.vulnerable[u] {
            edges.extend(vuln.sensitive[u].iter().map(|&v| (v, u)));
        } else {
            for &v in g.neighbors(u) {
                if core[v] != core[u] || !vuln.vulnerable[v] {
                    continue;
                }
                let corona = coronas.corona_of[v].expect("vulnerable node has a corona");
                if coronas.coronas[corona].ccn_contains(u) {
                    edges.push((v, u));
                }
            }
        }
    }
    DependencyGraph::from_edges(g.node_count(), edges)
}

/// Per-node removal strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalStrengths {
    /// `1 / deg⁻(u)`; infinite when `u` depends on no neighbor.
    pub rs_id: Vec<f64>,
    /// `deg⁺(u)`.
    pub rs_od: Vec<usize>,
}

pub fn removal_strengths(rd: &DependencyGraph) -> RemovalStrengths {
    RemovalStrengths { rs_id: rd.in_strengths(), rs_od: rd.out_degrees().to_vec() }
}

/// Everything RSC produces for one graph.
#[derive(Debug, Clone)]
pub struct RscOutput {
    pub coronas: CoronaSet,
    pub dependency: DependencyGraph,
    pub strengths: RemovalStrengths,
}

impl RscOutput {
    /// Incremental removals performed (one per corona).
    pub fn evaluations(&self) -> usize {
        self.coronas.len()
    }
}

/// Removal Strength Computation.
pub fn rsc(g: &Graph, cs: &CoreState) -> RscOutput {
    let coronas = find_k_coronas(g, cs);
    let dependency = build_removal_dependency_graph(g, cs, &coronas);
    let strengths = removal_strengths(&dependency);
    RscOutput { coronas, dependency, strengths }
}

/// Naive construction: one incremental removal per edge of `g`.
pub fn naive_removal_dependency_graph(g: &Graph, cs: &CoreState) -> DependencyGraph {
    let core = cs.cores();
    let all: Vec<Edge> = g.edges().collect();
    let edges: Vec<(NodeId, NodeId)> = all
        .par_iter()
        .flat_map_iter(|&(u, v)| {
            let hit = removal_affected(g, core, u, v);
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

/// Percentage of per-edge evaluations RSC avoids: `100 * (1 - coronas/|E|)`.
pub fn percent_gain(corona_count: usize, edge_count: usize) -> f64 {
    if edge_count == 0 {
        return 0.0;
    }
    100.0 * (1.0 - corona_count as f64 / edge_count as f64)
}

/// Which nodes a falsification scan examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanScope {
    /// Only nodes in the maximum k-core.
    #[default]
    MaxCore,
    AllNodes,
}

/// A node whose core number dropped after removing fewer than `CS(u)` of its
/// edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub node: NodeId,
    pub core_strength: usize,
    pub removed: Vec<Edge>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FalsificationReport {
    pub witnesses: Vec<Witness>,
    /// Per core-strength value: (edge subsets tried, subsets that dropped the node).
    pub by_core_strength: BTreeMap<usize, (usize, usize)>,
}

impl FalsificationReport {
    pub fn trials(&self) -> usize {
        self.by_core_strength.values().map(|t| t.0).sum()
    }

    pub fn decreases(&self) -> usize {
        self.by_core_strength.values().map(|t| t.1).sum()
    }

    /// Fraction of tried subsets that dropped the node's core number.
    pub fn witness_rate(&self) -> f64 {
        match self.trials() {
            0 => 0.0,
            t => self.decreases() as f64 / t as f64,
        }
    }
}

/// Empirically tests the claim that at least `CS(u)` incident edges must go
/// before `K(u)` drops. For every in-scope node with `CS(u) >= 2`, every
/// subset of its incident edges of size `1..=min(max_remove, CS(u) - 1)` is
/// removed and the core numbers recomputed from scratch. A node becomes a
/// witness at its first (smallest, then lexicographic) dropping subset.
pub fn cs_falsification_scan(
    g: &Graph,
    cs: &CoreState,
    max_remove: usize,
    scope: ScanScope,
) -> Result<FalsificationReport> {
    if max_remove == 0 {
        return Err(Error::Parameter("max_remove must be at least 1".into()));
    }
    let strength = core_strength(g, cs);
    let max_k = cs.max_core();
    let nodes: Vec<NodeId> = (0..g.node_count())
        .filter(|&u| strength[u] >= 2)
        .filter(|&u| scope == ScanScope::AllNodes || cs.core(u) == max_k)
        .collect();

    let per_node: Vec<(NodeId, Option<Vec<Edge>>, usize, usize)> = nodes
        .par_iter()
        .map(|&u| {
            let incident: Vec<Edge> = g.neighbors(u).iter().map(|&v| canonical(u, v)).collect();
            let limit = max_remove.min(strength[u] - 1);
            let (mut trials, mut drops) = (0, 0);
            let mut first: Option<Vec<Edge>> = None;
            for size in 1..=limit {
                for subset in incident.iter().copied().combinations(size) {
                    trials += 1;
                    let mut h = g.clone();
                    for &(a, b) in &subset {
                        h.remove_edge(a, b).expect("incident edge exists");
                    }
                    if core_numbers(&h)[u] < cs.core(u) {
                        drops += 1;
                        if first.is_none() {
                            first = Some(subset);
                        }
                    }
                }
            }
            (u, first, trials, drops)
        })
        .collect();

    let mut report = FalsificationReport::default();
    for (u, first, trials, drops) in per_node {
        let entry = report.by_core_strength.entry(strength[u]).or_insert((0, 0));
        entry.0 += trials;
        entry.1 += drops;
        if let Some(removed) = first {
            report.witnesses.push(Witness { node: u, core_strength: strength[u], removed });
        }
    }
    Ok(report)
}
