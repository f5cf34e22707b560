//! Core decomposition and the static per-node queries built on it.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::graph::{Graph, NodeId};

pub type Core = u32;

/// Core numbers of a graph with their shell and subcore indices.
///
/// A subcore is a connected component of the subgraph induced by one shell.
/// Its id is the smallest node id it contains, which keeps ids canonical
/// across recomputation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreState {
    core: Vec<Core>,
    shells: BTreeMap<Core, Vec<NodeId>>,
    subcore: Vec<NodeId>,
}

impl CoreState {
    /// Builds shells and subcores for a given core vector.
    pub fn from_cores(g: &Graph, core: Vec<Core>) -> Self {
        assert_eq!(core.len(), g.node_count(), "core vector length mismatch");
        let mut shells: BTreeMap<Core, Vec<NodeId>> = BTreeMap::new();
        for (u, &k) in core.iter().enumerate() {
            shells.entry(k).or_default().push(u);
        }
        let mut subcore = vec![0; core.len()];
        label_subcores(g, &core, 0..core.len(), &mut subcore);
        Self { core, shells, subcore }
    }

    #[inline]
    pub fn core(&self, u: NodeId) -> Core {
        self.core[u]
    }

    #[inline]
    pub fn cores(&self) -> &[Core] {
        &self.core
    }

    pub fn node_count(&self) -> usize {
        self.core.len()
    }

    pub fn max_core(&self) -> Core {
        self.shells.keys().next_back().copied().unwrap_or(0)
    }

    /// Members of the `k`-shell, ascending.
    pub fn shell(&self, k: Core) -> &[NodeId] {
        self.shells.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Non-empty shells in ascending order of `k`.
    pub fn shells(&self) -> impl DoubleEndedIterator<Item = (Core, &[NodeId])> {
        self.shells.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    #[inline]
    pub fn subcore_id(&self, u: NodeId) -> NodeId {
        self.subcore[u]
    }

    /// Applies a set of core changes computed against `g_after` (the graph
    /// with the edge change already applied) and re-labels the subcores of
    /// every shell that gained or lost nodes. The two endpoint shells of the
    /// edge change should be passed in `touched` so subcore merges/splits
    /// caused by the edge itself are also picked up.
    pub fn apply_changes(&mut self, g_after: &Graph, changes: &[CoreChange], touched: &[Core]) {
        let mut affected: BTreeSet<Core> = touched.iter().copied().collect();
        for c in changes {
            debug_assert_eq!(self.core[c.node], c.old);
            self.core[c.node] = c.new;
            affected.insert(c.old);
            affected.insert(c.new);
        }
        for c in changes {
            if let Some(list) = self.shells.get_mut(&c.old) {
                if let Ok(pos) = list.binary_search(&c.node) {
                    list.remove(pos);
                }
            }
            let list = self.shells.entry(c.new).or_default();
            if let Err(pos) = list.binary_search(&c.node) {
                list.insert(pos, c.node);
            }
        }
        self.shells.retain(|_, v| !v.is_empty());

        let mut nodes: Vec<NodeId> = affected.iter().flat_map(|k| self.shell(*k).iter().copied()).collect();
        nodes.sort_unstable();
        label_subcores(g_after, &self.core, nodes.into_iter(), &mut self.subcore);
    }
}

/// One node whose core number moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoreChange {
    pub node: NodeId,
    pub old: Core,
    pub new: Core,
}

/// BFS over same-core neighbors. `nodes` must be ascending so the first node
/// reached in each component is its minimum.
fn label_subcores<I>(g: &Graph, core: &[Core], nodes: I, subcore: &mut [NodeId])
where
    I: Iterator<Item = NodeId>,
{
    let nodes: Vec<NodeId> = nodes.collect();
    let mut seen: HashSet<NodeId> = HashSet::with_capacity(nodes.len());
    let mut queue = VecDeque::new();
    for &start in &nodes {
        if !seen.insert(start) {
            continue;
        }
        let k = core[start];
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            subcore[x] = start;
            for &y in g.neighbors(x) {
                if core[y] == k && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
}

/// Bucket-based peeling (Batagelj–Zaversnik), `O(|V| + |E|)`.
pub fn core_numbers(g: &Graph) -> Vec<Core> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = start offset of degree-d nodes in `vert`.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for u in 0..n {
        pos[u] = bin[deg[u]];
        vert[pos[u]] = u;
        bin[deg[u]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg.into_iter().map(|d| d as Core).collect()
}

/// Full core decomposition: core numbers, shells and subcores.
pub fn core_decompose(g: &Graph) -> CoreState {
    CoreState::from_cores(g, core_numbers(g))
}

/// Largest `h` such that at least `h` of the values are `>= h`.
pub fn h_index(values: &mut [Core]) -> Core {
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.iter().enumerate().take_while(|&(i, &v)| v as usize > i).count() as Core
}

/// Checks that every core number equals the h-index of its neighbors' core
/// numbers. Meant as a self-test of a `CoreState`, not for hot paths.
pub fn h_index_check(g: &Graph, cs: &CoreState) -> bool {
    if cs.node_count() != g.node_count() {
        return false;
    }
    let mut buf = Vec::new();
    (0..g.node_count()).all(|u| {
        buf.clear();
        buf.extend(g.neighbors(u).iter().map(|&v| cs.core(v)));
        h_index(&mut buf) == cs.core(u)
    })
}

/// Number of neighbors of `u` with core number `>= core[u]`.
#[inline]
pub fn geq_count(g: &Graph, core: &[Core], u: NodeId) -> usize {
    let k = core[u];
    g.neighbors(u).iter().filter(|&&v| core[v] >= k).count()
}

/// Number of neighbors of `u` with core number `> core[u]`.
#[inline]
pub fn gt_count(g: &Graph, core: &[Core], u: NodeId) -> usize {
    let k = core[u];
    g.neighbors(u).iter().filter(|&&v| core[v] > k).count()
}

/// Neighbors of every node split by relative core number.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeltaPartition {
    pub lt: Vec<Vec<NodeId>>,
    pub eq: Vec<Vec<NodeId>>,
    pub gt: Vec<Vec<NodeId>>,
}

impl DeltaPartition {
    pub fn lt_count(&self, u: NodeId) -> usize {
        self.lt[u].len()
    }

    pub fn eq_count(&self, u: NodeId) -> usize {
        self.eq[u].len()
    }

    pub fn gt_count(&self, u: NodeId) -> usize {
        self.gt[u].len()
    }

    pub fn geq_count(&self, u: NodeId) -> usize {
        self.eq[u].len() + self.gt[u].len()
    }

    /// Neighbors with core number `>= K(u)`, ascending.
    pub fn geq(&self, u: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.eq[u].iter().chain(&self.gt[u]).copied().collect();
        out.sort_unstable();
        out
    }
}

pub fn delta_partition(g: &Graph, cs: &CoreState) -> DeltaPartition {
    let n = g.node_count();
    let mut part = DeltaPartition { lt: vec![Vec::new(); n], eq: vec![Vec::new(); n], gt: vec![Vec::new(); n] };
    for u in 0..n {
        let k = cs.core(u);
        for &v in g.neighbors(u) {
            match cs.core(v).cmp(&k) {
                std::cmp::Ordering::Less => part.lt[u].push(v),
                std::cmp::Ordering::Equal => part.eq[u].push(v),
                std::cmp::Ordering::Greater => part.gt[u].push(v),
            }
        }
    }
    part
}

/// Member lists of every subcore, keyed by subcore id, with per-shell
/// staleness tracking for callers that apply sequences of edge changes.
#[derive(Debug, Clone, Default)]
pub struct SubcoreIndex {
    members: HashMap<NodeId, Vec<NodeId>>,
    stale: BTreeSet<Core>,
}

impl SubcoreIndex {
    pub fn build(cs: &CoreState) -> Self {
        let mut members: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for u in 0..cs.node_count() {
            members.entry(cs.subcore_id(u)).or_default().push(u);
        }
        Self { members, stale: BTreeSet::new() }
    }

    /// Members of the subcore containing `u`, or `None` if that shell has been
    /// invalidated and not refreshed.
    pub fn subcore_of(&self, cs: &CoreState, u: NodeId) -> Option<&[NodeId]> {
        if self.stale.contains(&cs.core(u)) {
            return None;
        }
        self.members.get(&cs.subcore_id(u)).map(Vec::as_slice)
    }

    pub fn invalidate(&mut self, k: Core) {
        self.stale.insert(k);
    }

    pub fn is_stale(&self, k: Core) -> bool {
        self.stale.contains(&k)
    }

    /// Rebuilds the member lists of every stale shell from `cs`. Both the old
    /// and the new shell of every moved node must have been invalidated.
    pub fn refresh(&mut self, cs: &CoreState) {
        if self.stale.is_empty() {
            return;
        }
        let stale = std::mem::take(&mut self.stale);
        self.members.retain(|_, list| list.iter().all(|&x| !stale.contains(&cs.core(x))));
        for &k in &stale {
            for &u in cs.shell(k) {
                self.members.entry(cs.subcore_id(u)).or_default().push(u);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Definition-level oracle: for each k, delete nodes of degree < k until
    /// none remain; K(u) is the largest k whose survivor set contains u.
    fn naive_cores(g: &Graph) -> Vec<Core> {
        let n = g.node_count();
        let mut core = vec![0; n];
        for k in 1..=n as Core {
            let mut alive = vec![true; n];
            loop {
                let drop: Vec<NodeId> = (0..n)
                    .filter(|&u| alive[u] && (g.neighbors(u).iter().filter(|&&v| alive[v]).count() as Core) < k)
                    .collect();
                if drop.is_empty() {
                    break;
                }
                for u in drop {
                    alive[u] = false;
                }
            }
            if !alive.iter().any(|&a| a) {
                break;
            }
            for u in 0..n {
                if alive[u] {
                    core[u] = k;
                }
            }
        }
        core
    }

    fn clique(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    // u=0, a=1, b=2, c=3, d=4
    fn csx() -> Graph {
        Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)]).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(core_numbers(&clique(4)), vec![3; 4]);
        assert_eq!(core_numbers(&star(5)), vec![1; 6]);
        assert_eq!(core_numbers(&csx()), vec![2; 5]);
        assert!(core_numbers(&Graph::new(0)).is_empty());
        assert_eq!(core_numbers(&Graph::new(3)), vec![0; 3]);
    }

    #[test]
    fn h_index_examples() {
        assert_eq!(h_index(&mut [2, 2]), 2);
        assert_eq!(h_index(&mut [1, 1, 1, 1, 1]), 1);
        assert_eq!(h_index(&mut []), 0);
        assert_eq!(h_index(&mut [5, 3, 3, 1]), 3);
    }

    #[test]
    fn h_index_check_detects_perturbation() {
        let tri = clique(3);
        let cs = core_decompose(&tri);
        assert!(h_index_check(&tri, &cs));
        let s = star(5);
        assert!(h_index_check(&s, &core_decompose(&s)));

        let g = csx();
        let mut core = core_numbers(&g);
        core[2] += 1;
        assert!(!h_index_check(&g, &CoreState::from_cores(&g, core)));
    }

    #[test]
    fn delta_partition_examples() {
        let g = csx();
        let part = delta_partition(&g, &core_decompose(&g));
        assert_eq!(part.geq_count(0), 4);
        assert_eq!(part.gt_count(0), 0);

        // Pendant p=3 hanging off triangle 0,1,2.
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 0)]).unwrap();
        let part = delta_partition(&g, &core_decompose(&g));
        assert_eq!(part.gt_count(3), 1);
        assert_eq!(part.eq_count(3), 0);
        // Node 4 is isolated.
        assert_eq!(part.lt_count(4) + part.eq_count(4) + part.gt_count(4), 0);
    }

    #[test]
    fn subcores_split_by_connectivity() {
        // Triangles 0-1-2 and 4-5-6 with pendants 3 (on 2) and 7 (on 4).
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (0, 2), (2, 3), (4, 7), (4, 5), (5, 6), (4, 6)]).unwrap();
        let cs = core_decompose(&g);
        assert_eq!(cs.shell(2), &[0, 1, 2, 4, 5, 6]);
        assert_eq!(cs.shell(1), &[3, 7]);
        assert_eq!(cs.subcore_id(2), 0);
        assert_eq!(cs.subcore_id(6), 4);
        assert_eq!(cs.subcore_id(3), 3);
        assert_eq!(cs.subcore_id(7), 7);
        let idx = SubcoreIndex::build(&cs);
        assert_eq!(idx.subcore_of(&cs, 5).unwrap(), &[4, 5, 6]);
    }

    #[test]
    fn matches_naive_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..25);
            let p: f64 = rng.gen_range(0.05..0.6);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let cs = core_decompose(&g);
            assert_eq!(cs.cores(), naive_cores(&g).as_slice());
            assert!(h_index_check(&g, &cs));
        }
    }
}
