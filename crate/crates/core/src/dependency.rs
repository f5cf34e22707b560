//! Directed dependency graphs shared by the removal and insertion measures.

use crate::graph::NodeId;

/// Directed graph over the node set of an undirected base graph.
///
/// An edge `(src, dst)` means changing the base edge `{src, dst}` moves the
/// core number of `dst`: down for the removal graph, up for the insertion
/// graph. Edges are kept sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    in_degree: Vec<usize>,
    out_degree: Vec<usize>,
}

impl DependencyGraph {
    pub fn from_edges(node_count: usize, mut edges: Vec<(NodeId, NodeId)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut in_degree = vec![0; node_count];
        let mut out_degree = vec![0; node_count];
        for &(s, d) in &edges {
            out_degree[s] += 1;
            in_degree[d] += 1;
        }
        Self { node_count, edges, in_degree, out_degree }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Directed edges in lexicographic order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn contains(&self, src: NodeId, dst: NodeId) -> bool {
        self.edges.binary_search(&(src, dst)).is_ok()
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.in_degree[u]
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_degree[u]
    }

    /// `1 / in_degree(u)`, with `f64::INFINITY` standing in for a node nothing
    /// depends on.
    pub fn in_strength(&self, u: NodeId) -> f64 {
        reciprocal(self.in_degree[u])
    }

    pub fn in_strengths(&self) -> Vec<f64> {
        (0..self.node_count).map(|u| self.in_strength(u)).collect()
    }

    pub fn out_degrees(&self) -> &[usize] {
        &self.out_degree
    }
}

/// `1 / d`, or infinity when `d == 0`.
#[inline]
pub fn reciprocal(d: usize) -> f64 {
    if d == 0 {
        f64::INFINITY
    } else {
        1.0 / d as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_and_strengths() {
        let dg = DependencyGraph::from_edges(3, vec![(1, 0), (2, 0), (1, 0), (0, 2)]);
        assert_eq!(dg.edge_count(), 3);
        assert_eq!(dg.in_degree(0), 2);
        assert_eq!(dg.out_degree(1), 1);
        assert_eq!(dg.in_strength(0), 0.5);
        assert_eq!(dg.in_strength(1), f64::INFINITY);
        assert!(dg.contains(0, 2));
        assert!(!dg.contains(2, 1));
    }
}
