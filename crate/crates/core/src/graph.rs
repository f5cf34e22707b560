//! Undirected simple graph with dense node ids, plus edge-list ingestion and
//! a few static neighborhood queries.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Undirected edge stored with the smaller endpoint first.
pub type Edge = (NodeId, NodeId);

/// Returns `(min(u, v), max(u, v))`.
#[inline]
pub fn canonical(u: NodeId, v: NodeId) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Undirected simple graph.
///
/// Node ids are dense (`0..node_count`). Each node keeps the integer label it
/// had in the input so results can be reported against the original ids.
/// Adjacency lists are kept sorted, which makes membership a binary search
/// and iteration order deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    labels: Vec<u64>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `n` isolated nodes labelled `0..n`.
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], labels: (0..n as u64).collect(), edge_count: 0 }
    }

    /// Builds a graph over `n` nodes, dropping self-loops and duplicates.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.check_node(u)?;
            g.check_node(v)?;
            if u != v {
                g.adj[u].push(v);
                g.adj[v].push(u);
            }
        }
        g.normalize();
        Ok(g)
    }

    fn normalize(&mut self) {
        let mut twice = 0;
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        self.edge_count = twice / 2;
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Sorted neighbor list of `u`.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, u: NodeId) -> u64 {
        self.labels[u]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Map from original label back to dense id.
    pub fn label_index(&self) -> HashMap<u64, NodeId> {
        self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    /// Iterates each undirected edge once, as `(u, v)` with `u < v`, in
    /// lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_node(&self, u: NodeId) -> Result<()> {
        if u < self.adj.len() {
            Ok(())
        } else {
            Err(Error::InvalidNode(u))
        }
    }

    /// Inserts the undirected edge `(u, v)`.
    pub fn insert_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(Error::EdgeExists(u, v)),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    /// Removes the undirected edge `(u, v)`.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        match self.adj[u].binary_search(&v) {
            Err(_) => Err(Error::EdgeMissing(u, v)),
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("adjacency is symmetric");
                self.adj[v].remove(pos);
                self.edge_count -= 1;
                Ok(())
            }
        }
    }

    /// Number of common neighbors of `u` and `v` (merge of sorted lists).
    pub fn common_neighbor_count(&self, u: NodeId, v: NodeId) -> usize {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// How `load_edge_list` treats lines it cannot read as an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Skip malformed lines and count them.
    #[default]
    Lenient,
    /// Fail on the first malformed line.
    Strict,
}

/// Bookkeeping from edge-list ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub lines: usize,
    pub skipped_lines: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

/// Reads a whitespace-separated edge list.
///
/// Blank lines and lines starting with `#` or `%` are ignored. Only the first
/// two tokens of a line are read, so weighted or timestamped SNAP files load
/// as their underlying simple graph. Labels are mapped to dense ids in order
/// of first appearance; a self-loop still registers its node.
pub fn load_edge_list<R: BufRead>(reader: R, mode: ParseMode) -> Result<(Graph, LoadStats)> {
    let mut ids: HashMap<u64, NodeId> = HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut raw: Vec<Edge> = Vec::new();
    let mut stats = LoadStats::default();

    let mut intern = |label: u64| -> NodeId {
        *ids.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() - 1
        })
    };

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        stats.lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parsed = match (tokens.next(), tokens.next()) {
            (Some(a), Some(b)) => match (a.parse::<u64>(), b.parse::<u64>()) {
                (Ok(a), Ok(b)) => Ok((a, b)),
                _ => Err(format!("expected two integer node labels, found `{trimmed}`")),
            },
            _ => Err(format!("expected two node labels, found `{trimmed}`")),
        };
        let (a, b) = match parsed {
            Ok(pair) => pair,
            Err(reason) => match mode {
                ParseMode::Strict => return Err(Error::Parse { line: lineno, reason }),
                ParseMode::Lenient => {
                    stats.skipped_lines += 1;
                    continue;
                }
            },
        };
        let u = intern(a);
        let v = intern(b);
        if u == v {
            stats.self_loops += 1;
        } else {
            raw.push(canonical(u, v));
        }
    }

    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if stats.skipped_lines > 0 {
        log::warn!("skipped {} malformed line(s)", stats.skipped_lines);
    }

    let before = raw.len();
    raw.sort_unstable();
    raw.dedup();
    stats.duplicate_edges = before - raw.len();

    let mut g = Graph::from_edges(labels.len(), raw)?;
    g.labels = labels;
    Ok((g, stats))
}

/// Nodes at distance exactly two from `u`: not adjacent to `u`, not `u`, and
/// sharing at least one neighbor with it. Sorted ascending.
pub fn distance2_neighbors(g: &Graph, u: NodeId) -> Result<Vec<NodeId>> {
    g.check_node(u)?;
    let mut out: Vec<NodeId> =
        g.neighbors(u).iter().flat_map(|&w| g.neighbors(w).iter().copied()).filter(|&x| x != u).collect();
    out.sort_unstable();
    out.dedup();
    let direct = g.neighbors(u);
    out.retain(|x| direct.binary_search(x).is_err());
    Ok(out)
}

/// First and second moments of the degree distribution and the epidemic
/// threshold `<k> / <k^2>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeMoments {
    pub mean_degree: f64,
    pub mean_square_degree: f64,
    pub beta_min: f64,
}

pub fn degree_moments(g: &Graph) -> Result<DegreeMoments> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let n = g.node_count() as f64;
    let (sum, sum_sq) = (0..g.node_count()).fold((0.0, 0.0), |(s, sq), u| {
        let d = g.degree(u) as f64;
        (s + d, sq + d * d)
    });
    let mean_degree = sum / n;
    let mean_square_degree = sum_sq / n;
    Ok(DegreeMoments { mean_degree, mean_square_degree, beta_min: mean_degree / mean_square_degree })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<(Graph, LoadStats)> {
        load_edge_list(text.as_bytes(), ParseMode::Lenient)
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn triangle_loads() {
        let (g, stats) = load("1 2\n2 3\n3 1\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.labels(), &[1, 2, 3]);
        assert_eq!(stats.skipped_lines, 0);
    }

    #[test]
    fn self_loops_and_duplicates_are_cleaned() {
        let (g, stats) = load("1 1\n1 2\n1 2\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
        assert_eq!(stats.self_loops, 1);
        assert_eq!(stats.duplicate_edges, 1);
    }

    #[test]
    fn labels_follow_first_appearance() {
        let (g, _) = load("# header\n30 10\n10 20\n").unwrap();
        assert_eq!(g.labels(), &[30, 10, 20]);
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(1, 2));
    }

    #[test]
    fn strict_mode_reports_line_number() {
        let err = load_edge_list("1 2\nfoo bar\n".as_bytes(), ParseMode::Strict).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let (g, stats) = load("1 2\nfoo bar\n2 3\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(stats.skipped_lines, 1);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(load(""), Err(Error::EmptyGraph)));
        assert!(matches!(load("# only a comment\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn extra_columns_are_ignored() {
        let (g, _) = load("1 2 0.5\n2 3 7 9\n").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn insert_and_remove_keep_symmetry() {
        let mut g = Graph::new(3);
        g.insert_edge(0, 2).unwrap();
        assert!(g.has_edge(2, 0));
        assert!(matches!(g.insert_edge(2, 0), Err(Error::EdgeExists(..))));
        assert!(matches!(g.insert_edge(1, 1), Err(Error::SelfLoop(1))));
        g.remove_edge(2, 0).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(matches!(g.remove_edge(0, 2), Err(Error::EdgeMissing(..))));
    }

    #[test]
    fn distance2_examples() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(distance2_neighbors(&path, 0).unwrap(), vec![2]);
        let s = star(5);
        assert!(distance2_neighbors(&s, 0).unwrap().is_empty());
        assert_eq!(distance2_neighbors(&s, 1).unwrap(), vec![2, 3, 4, 5]);
        assert!(matches!(distance2_neighbors(&s, 9), Err(Error::InvalidNode(9))));
    }

    #[test]
    fn degree_moment_examples() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let m = degree_moments(&tri).unwrap();
        assert_eq!(m.mean_degree, 2.0);
        assert_eq!(m.mean_square_degree, 4.0);
        assert_eq!(m.beta_min, 0.5);

        // Direct summation: degrees 5,1,1,1,1,1 -> sum 10, squares 30.
        let m = degree_moments(&star(5)).unwrap();
        assert!((m.mean_degree - 10.0 / 6.0).abs() < 1e-12);
        assert!((m.mean_square_degree - 30.0 / 6.0).abs() < 1e-12);
        assert!((m.beta_min - 1.0 / 3.0).abs() < 1e-12);

        assert!(matches!(degree_moments(&Graph::new(0)), Err(Error::EmptyGraph)));
        assert!(matches!(degree_moments(&Graph::new(2)), Err(Error::NoEdges)));
    }
}
