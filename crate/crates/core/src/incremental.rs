//! Core maintenance under a single edge removal or insertion.
//!
//! After one edge change only nodes whose core number equals
//! `K = min(K(u), K(v))` and which are reachable from an endpoint through
//! core-`K` nodes can move, and they move by exactly one. Both update paths
//! below restrict their work to that region:
//!
//! * removal walks outward from the endpoints, lazily counting each visited
//!   node's support among neighbors with core `>= K` and evicting nodes whose
//!   support drops below `K`;
//! * insertion collects the subcore(s) of the endpoints (from a precomputed
//!   [`SubcoreIndex`] when one is supplied) and peels the candidates that
//!   cannot reach `K + 1` supporting neighbors.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::cores::{core_decompose, Core, CoreChange, CoreState, SubcoreIndex};
use crate::error::{Error, Result};
use crate::graph::{canonical, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChangeKind {
    Insert,
    Remove,
}

/// A single edge insertion or removal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeChange {
    pub kind: ChangeKind,
    pub u: NodeId,
    pub v: NodeId,
}

impl EdgeChange {
    pub fn insert(u: NodeId, v: NodeId) -> Self {
        Self { kind: ChangeKind::Insert, u, v }
    }

    pub fn remove(u: NodeId, v: NodeId) -> Self {
        Self { kind: ChangeKind::Remove, u, v }
    }

    /// Checks the change against `g`: distinct valid endpoints, and the edge
    /// present for a removal or absent for an insertion.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        g.check_node(self.u)?;
        g.check_node(self.v)?;
        if self.u == self.v {
            return Err(Error::SelfLoop(self.u));
        }
        match (self.kind, g.has_edge(self.u, self.v)) {
            (ChangeKind::Remove, false) => Err(Error::EdgeMissing(self.u, self.v)),
            (ChangeKind::Insert, true) => Err(Error::EdgeExists(self.u, self.v)),
            _ => Ok(()),
        }
    }

    pub fn apply_to(&self, g: &mut Graph) -> Result<()> {
        match self.kind {
            ChangeKind::Insert => g.insert_edge(self.u, self.v),
            ChangeKind::Remove => g.remove_edge(self.u, self.v),
        }
    }
}

/// Result of one edge change: the core changes (ascending by node) and the
/// full post-change core state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeReport {
    pub change: EdgeChange,
    pub changed: Vec<CoreChange>,
    pub updated_core: CoreState,
}

impl ChangeReport {
    pub fn changed_nodes(&self) -> Vec<NodeId> {
        self.changed.iter().map(|c| c.node).collect()
    }
}

/// Ground truth: apply the change to a copy and decompose from scratch.
pub fn recompute_oracle(g: &Graph, change: EdgeChange) -> Result<ChangeReport> {
    change.validate(g)?;
    let before = core_decompose(g);
    let mut after_graph = g.clone();
    change.apply_to(&mut after_graph)?;
    let after = core_decompose(&after_graph);
    let changed = (0..g.node_count())
        .filter(|&x| before.core(x) != after.core(x))
        .map(|x| CoreChange { node: x, old: before.core(x), new: after.core(x) })
        .collect();
    Ok(ChangeReport { change, changed, updated_core: after })
}

/// Core update for removing the existing edge `(u, v)`.
pub fn remove_edge_update(g: &Graph, cs: &CoreState, u: NodeId, v: NodeId) -> Result<ChangeReport> {
    let change = EdgeChange::remove(u, v);
    change.validate(g)?;
    let nodes = removal_affected(g, cs.cores(), u, v);
    Ok(build_report(g, cs, change, &nodes))
}

/// Core update for inserting the absent edge `(u, v)`. When `subcores` is
/// given (and its shell is fresh) the candidate region is read from it
/// instead of being rediscovered by BFS.
pub fn insert_edge_update(
    g: &Graph,
    cs: &CoreState,
    u: NodeId,
    v: NodeId,
    subcores: Option<&SubcoreIndex>,
) -> Result<ChangeReport> {
    let change = EdgeChange::insert(u, v);
    change.validate(g)?;
    let nodes = insertion_affected(g, cs, u, v, subcores);
    Ok(build_report(g, cs, change, &nodes))
}

fn build_report(g: &Graph, cs: &CoreState, change: EdgeChange, nodes: &[NodeId]) -> ChangeReport {
    let delta: i64 = match change.kind {
        ChangeKind::Insert => 1,
        ChangeKind::Remove => -1,
    };
    let changed: Vec<CoreChange> = nodes
        .iter()
        .map(|&x| {
            let old = cs.core(x);
            CoreChange { node: x, old, new: (old as i64 + delta) as Core }
        })
        .collect();
    let mut after_graph = g.clone();
    change.apply_to(&mut after_graph).expect("change validated");
    let mut updated_core = cs.clone();
    updated_core.apply_changes(&after_graph, &changed, &[cs.core(change.u), cs.core(change.v)]);
    ChangeReport { change, changed, updated_core }
}

/// Nodes whose core number drops by one when the existing edge `(u, v)` is
/// removed. `g` still contains the edge; it is skipped during traversal.
/// Returned ascending.
pub fn removal_affected(g: &Graph, core: &[Core], u: NodeId, v: NodeId) -> Vec<NodeId> {
    let k = core[u].min(core[v]);
    if k == 0 {
        return Vec::new();
    }
    let removed = canonical(u, v);
    let is_removed = |x: NodeId, y: NodeId| canonical(x, y) == removed;

    // Support = neighbors with core >= k over the post-removal edge set.
    let support = |x: NodeId| g.neighbors(x).iter().filter(|&&y| core[y] >= k && !is_removed(x, y)).count();

    let mut cd: HashMap<NodeId, usize> = HashMap::new();
    let mut evicted: HashSet<NodeId> = HashSet::new();
    let mut stack: Vec<NodeId> = Vec::new();

    for root in [u, v] {
        if core[root] == k && !cd.contains_key(&root) {
            let s = support(root);
            cd.insert(root, s);
            if s < k as usize {
                evicted.insert(root);
                stack.push(root);
            }
        }
    }

    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if core[y] != k || is_removed(x, y) || evicted.contains(&y) {
                continue;
            }
            // First touch counts every supporting neighbor, including x;
            // every processed eviction then subtracts one.
            let c = cd.entry(y).or_insert_with(|| support(y));
            *c -= 1;
            if *c < k as usize {
                evicted.insert(y);
                stack.push(y);
            }
        }
    }

    let mut out: Vec<NodeId> = evicted.into_iter().collect();
    out.sort_unstable();
    out
}

/// Nodes whose core number rises by one when the absent edge `(u, v)` is
/// inserted. Returned ascending.
///
/// With a subcore index the candidates are the whole subcore(s) of the
/// lower-core endpoint(s), peeled down to the nodes that rise. Without one a
/// traversal from the lower-core endpoint visits far fewer nodes.
pub fn insertion_affected(
    g: &Graph,
    cs: &CoreState,
    u: NodeId,
    v: NodeId,
    subcores: Option<&SubcoreIndex>,
) -> Vec<NodeId> {
    match subcores {
        Some(_) => insertion_peel(g, cs, u, v, subcores),
        None => insertion_traversal(g, cs.cores(), u, v, false),
    }
}

/// Whether `u` and `v` themselves rise when `(u, v)` is inserted. Stops as
/// soon as every lower-core endpoint has been evicted.
pub fn insertion_endpoints_rise(g: &Graph, cs: &CoreState, u: NodeId, v: NodeId) -> [bool; 2] {
    let risen = insertion_traversal(g, cs.cores(), u, v, true);
    [risen.binary_search(&u).is_ok(), risen.binary_search(&v).is_ok()]
}

/// Depth-first search from the lower-core endpoint(s) over equal-core nodes
/// with `mcd > k`, where `mcd(x)` counts neighbors of core `>= k`. A visited
/// node's candidate degree starts at its `pcd`: neighbors of higher core plus
/// equal-core neighbors with `mcd > k`. Nodes whose candidate degree falls to
/// `k` are evicted and decrement their equal-core neighbors; counts of nodes
/// not yet visited go negative and are topped up on first visit. Survivors
/// rise.
fn insertion_traversal(g: &Graph, core: &[Core], u: NodeId, v: NodeId, endpoints_only: bool) -> Vec<NodeId> {
    let k = core[u].min(core[v]);
    let kk = k as usize;
    let extra = |x: NodeId| -> Option<NodeId> {
        if x == u {
            Some(v)
        } else if x == v {
            Some(u)
        } else {
            None
        }
    };
    let nbrs = |x: NodeId| g.neighbors(x).iter().copied().chain(extra(x));
    let mut mcd_memo: HashMap<NodeId, usize> = HashMap::new();
    let mut mcd =
        |x: NodeId| -> usize { *mcd_memo.entry(x).or_insert_with(|| nbrs(x).filter(|&y| core[y] >= k).count()) };
    // With equal cores the other endpoint is reached over the new edge.
    let root = if core[u] <= core[v] { u } else { v };
    let watched: Vec<NodeId> = [u, v].into_iter().filter(|&x| core[x] == k).collect();

    let mut cd: HashMap<NodeId, isize> = HashMap::new();
    let mut visited: HashSet<NodeId> = HashSet::new();
    let mut evicted: HashSet<NodeId> = HashSet::new();
    let mut stack: Vec<NodeId> = Vec::new();

    let pcd = |x: NodeId, mcd: &mut dyn FnMut(NodeId) -> usize| -> isize {
        nbrs(x).filter(|&y| core[y] > k || (core[y] == k && mcd(y) > kk)).count() as isize
    };

    visited.insert(root);
    let p = pcd(root, &mut mcd);
    cd.insert(root, p);
    stack.push(root);
    while let Some(x) = stack.pop() {
        if evicted.contains(&x) {
            continue;
        }
        if cd[&x] > kk as isize {
            for y in nbrs(x) {
                if core[y] == k && !visited.contains(&y) && mcd(y) > kk {
                    visited.insert(y);
                    let p = pcd(y, &mut mcd);
                    *cd.entry(y).or_insert(0) += p;
                    stack.push(y);
                }
            }
        } else {
            // Evict x and everything that falls with it.
            let mut pending = vec![x];
            evicted.insert(x);
            while let Some(z) = pending.pop() {
                if mcd(z) <= kk {
                    // Never counted by any neighbor's pcd.
                    continue;
                }
                for y in nbrs(z) {
                    if core[y] != k || evicted.contains(&y) {
                        continue;
                    }
                    let c = cd.entry(y).or_insert(0);
                    *c -= 1;
                    if visited.contains(&y) && *c <= kk as isize {
                        evicted.insert(y);
                        pending.push(y);
                    }
                }
            }
            if endpoints_only && watched.iter().all(|w| evicted.contains(w)) {
                return Vec::new();
            }
        }
    }
    let mut out: Vec<NodeId> = visited.into_iter().filter(|x| !evicted.contains(x)).collect();
    out.sort_unstable();
    out
}

/// Subcore-based insertion: every node of the lower-core endpoints'
/// subcore(s) is a candidate, then candidates are peeled until each has more
/// than `k` supporting neighbors.
fn insertion_peel(g: &Graph, cs: &CoreState, u: NodeId, v: NodeId, subcores: Option<&SubcoreIndex>) -> Vec<NodeId> {
    let core = cs.cores();
    let k = core[u].min(core[v]);
    let roots: Vec<NodeId> = [u, v].into_iter().filter(|&r| core[r] == k).collect();
    let extra = |x: NodeId| -> Option<NodeId> {
        if x == u {
            Some(v)
        } else if x == v {
            Some(u)
        } else {
            None
        }
    };

    let from_index = subcores.and_then(|idx| {
        let mut out: Vec<NodeId> = Vec::new();
        let mut seen_ids = Vec::with_capacity(2);
        for &r in &roots {
            let id = cs.subcore_id(r);
            if seen_ids.contains(&id) {
                continue;
            }
            seen_ids.push(id);
            out.extend_from_slice(idx.subcore_of(cs, r)?);
        }
        Some(out)
    });
    let candidates = from_index.unwrap_or_else(|| {
        let mut seen: HashSet<NodeId> = roots.iter().copied().collect();
        let mut queue: VecDeque<NodeId> = roots.iter().copied().collect();
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            out.push(x);
            for &y in g.neighbors(x) {
                if core[y] == k && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        out
    });

    let in_cand: HashSet<NodeId> = candidates.iter().copied().collect();
    let supports = |y: NodeId| core[y] > k || in_cand.contains(&y);

    let mut cd: HashMap<NodeId, usize> = HashMap::with_capacity(candidates.len());
    let mut removed: HashSet<NodeId> = HashSet::new();
    let mut stack: Vec<NodeId> = Vec::new();
    for &x in &candidates {
        let c = g.neighbors(x).iter().filter(|&&y| supports(y)).count() + extra(x).map_or(0, |y| supports(y) as usize);
        cd.insert(x, c);
        if c <= k as usize {
            removed.insert(x);
            stack.push(x);
        }
    }
    while let Some(x) = stack.pop() {
        let nbrs = g.neighbors(x).iter().copied().chain(extra(x));
        for y in nbrs {
            if !in_cand.contains(&y) || removed.contains(&y) {
                continue;
            }
            let c = cd.get_mut(&y).expect("candidate has a count");
            *c -= 1;
            if *c <= k as usize {
                removed.insert(y);
                stack.push(y);
            }
        }
    }

    let mut out: Vec<NodeId> = candidates.into_iter().filter(|x| !removed.contains(x)).collect();
    out.sort_unstable();
    out
}

/// A graph with its core state kept current under a sequence of edge
/// changes. Optionally maintains a [`SubcoreIndex`] for insertions, with the
/// touched shells invalidated and rebuilt after every change.
#[derive(Debug, Clone)]
pub struct DynamicCores {
    graph: Graph,
    state: CoreState,
    initial: Vec<Core>,
    subcores: Option<SubcoreIndex>,
}

impl DynamicCores {
    pub fn new(graph: Graph, use_subcore_index: bool) -> Self {
        let state = core_decompose(&graph);
        Self::with_state(graph, state, use_subcore_index)
    }

    pub fn with_state(graph: Graph, state: CoreState, use_subcore_index: bool) -> Self {
        let initial = state.cores().to_vec();
        let subcores = use_subcore_index.then(|| SubcoreIndex::build(&state));
        Self { graph, state, initial, subcores }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn state(&self) -> &CoreState {
        &self.state
    }

    pub fn initial_cores(&self) -> &[Core] {
        &self.initial
    }

    /// Applies one change and returns the core changes it caused.
    pub fn apply(&mut self, change: EdgeChange) -> Result<Vec<CoreChange>> {
        change.validate(&self.graph)?;
        let (u, v) = (change.u, change.v);
        let nodes = match change.kind {
            ChangeKind::Remove => removal_affected(&self.graph, self.state.cores(), u, v),
            ChangeKind::Insert => insertion_affected(&self.graph, &self.state, u, v, self.subcores.as_ref()),
        };
        let changed: Vec<CoreChange> = nodes
            .iter()
            .map(|&x| {
                let old = self.state.core(x);
                let new = match change.kind {
                    ChangeKind::Insert => old + 1,
                    ChangeKind::Remove => old - 1,
                };
                CoreChange { node: x, old, new }
            })
            .collect();
        let touched = [self.state.core(u), self.state.core(v)];
        change.apply_to(&mut self.graph)?;
        self.state.apply_changes(&self.graph, &changed, &touched);
        if let Some(idx) = self.subcores.as_mut() {
            for k in touched {
                idx.invalidate(k);
            }
            for c in &changed {
                idx.invalidate(c.old);
                idx.invalidate(c.new);
            }
            idx.refresh(&self.state);
        }
        Ok(changed)
    }

    /// Number of nodes whose core differs from the initial state.
    pub fn changed_from_initial(&self) -> usize {
        self.initial.iter().zip(self.state.cores()).filter(|(a, b)| a != b).count()
    }
}
