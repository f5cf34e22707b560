//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's core or incremental algorithms.
#![allow(dead_code)]

use coreres::dependency::DependencyGraph;
use coreres::generate::erdos_renyi;
use coreres::{Edge, Graph, NodeId};

/// Core numbers straight from the definition: for k = 1, 2, … peel every
/// node of degree < k until none is left, and record the largest k each node
/// survives.
pub fn naive_cores(g: &Graph) -> Vec<u32> {
    let n = g.node_count();
    let mut core = vec![0u32; n];
    let mut k = 1u32;
    loop {
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for u in 0..n {
                if alive[u] {
                    let d = g.neighbors(u).iter().filter(|&&v| alive[v]).count();
                    if d < k as usize {
                        alive[u] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if !alive.iter().any(|&a| a) {
            return core;
        }
        for u in 0..n {
            if alive[u] {
                core[u] = k;
            }
        }
        k += 1;
    }
}

fn without(g: &Graph, (u, v): Edge) -> Graph {
    Graph::from_edges(g.node_count(), g.edges().filter(|&e| e != (u.min(v), u.max(v)))).unwrap()
}

fn with(g: &Graph, (u, v): Edge) -> Graph {
    Graph::from_edges(g.node_count(), g.edges().chain([(u, v)])).unwrap()
}

/// Nodes whose core differs after removing `e`.
pub fn changed_after_removal(g: &Graph, before: &[u32], e: Edge) -> Vec<NodeId> {
    let after = naive_cores(&without(g, e));
    (0..g.node_count()).filter(|&x| after[x] != before[x]).collect()
}

pub fn changed_after_insertion(g: &Graph, before: &[u32], e: Edge) -> Vec<NodeId> {
    let after = naive_cores(&with(g, e));
    (0..g.node_count()).filter(|&x| after[x] != before[x]).collect()
}

fn endpoint_edges(changed: &[NodeId], (u, v): Edge) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::new();
    if changed.contains(&u) {
        out.push((v, u));
    }
    if changed.contains(&v) {
        out.push((u, v));
    }
    out
}

/// Removal dependency graph by removing every edge in turn.
pub fn oracle_removal_dependency(g: &Graph) -> DependencyGraph {
    let before = naive_cores(g);
    let edges = g.edges().flat_map(|e| endpoint_edges(&changed_after_removal(g, &before, e), e)).collect();
    DependencyGraph::from_edges(g.node_count(), edges)
}

/// Insertion dependency graph by inserting every candidate in turn.
pub fn oracle_insertion_dependency(g: &Graph, candidates: &[Edge]) -> DependencyGraph {
    let before = naive_cores(g);
    let edges = candidates.iter().flat_map(|&e| endpoint_edges(&changed_after_insertion(g, &before, e), e)).collect();
    DependencyGraph::from_edges(g.node_count(), edges)
}

/// The 50-graph ER suite: n cycles through 10..=100, p through
/// {0.05, 0.1, 0.3}.
pub fn er_suite() -> Vec<(usize, f64, u64, Graph)> {
    let ps = [0.05, 0.1, 0.3];
    (0..50u64)
        .map(|i| {
            let n = 10 + (i as usize * 37) % 91;
            let p = ps[i as usize % 3];
            let seed = 1000 + i;
            (n, p, seed, erdos_renyi(n, p, seed))
        })
        .collect()
}
