//! Seeded random graphs for tests, benchmarks and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// G(n, p): every pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let p = p.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("generated edges are in range")
}

/// Preferential attachment: each new node links to `m` distinct earlier nodes
/// chosen with probability proportional to degree. Starts from a clique on
/// `m + 1` nodes.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Graph {
    let m = m.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = (m + 1).min(n);
    let mut edges = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    for u in 0..start {
        for v in u + 1..start {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    for u in start..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m.min(u) {
            let t = if ends.is_empty() { rng.gen_range(0..u) } else { ends[rng.gen_range(0..ends.len())] };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t, u));
            ends.extend([t, u]);
        }
    }
    Graph::from_edges(n, edges).expect("generated edges are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_is_seeded() {
        let a = erdos_renyi(50, 0.1, 4);
        assert_eq!(a.edges().collect::<Vec<_>>(), erdos_renyi(50, 0.1, 4).edges().collect::<Vec<_>>());
        assert_eq!(erdos_renyi(10, 1.0, 0).edge_count(), 45);
        assert_eq!(erdos_renyi(10, 0.0, 0).edge_count(), 0);
    }

    #[test]
    fn ba_edge_count() {
        let g = barabasi_albert(100, 3, 1);
        assert_eq!(g.edge_count(), 6 + 96 * 3);
        assert!((0..100).all(|u| g.degree(u) >= 3));
    }
}
