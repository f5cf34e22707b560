//! Discrete-time SIR epidemics on a static graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{degree_moments, Graph, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct SirConfig {
    /// Chance that an infected node infects one susceptible neighbor per step.
    pub infect_prob: f64,
    /// Chance that an infected node recovers per step.
    pub recover_prob: f64,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
}

impl SirConfig {
    pub const DEFAULT_RECOVER_PROB: f64 = 0.01;
    pub const DEFAULT_STEPS: usize = 15;
    pub const DEFAULT_RUNS: usize = 50;

    pub fn new(infect_prob: f64) -> Self {
        Self {
            infect_prob,
            recover_prob: Self::DEFAULT_RECOVER_PROB,
            steps: Self::DEFAULT_STEPS,
            runs: Self::DEFAULT_RUNS,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("infect_prob", self.infect_prob), ("recover_prob", self.recover_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if self.steps == 0 {
            return Err(Error::Parameter("steps must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Parameter("runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Compartment sizes of one run at `t = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub susceptible: Vec<usize>,
    pub infected: Vec<usize>,
    pub recovered: Vec<usize>,
}

impl RunTrace {
    /// `(I + R) / n` at every step.
    pub fn affected(&self, n: usize) -> Vec<f64> {
        self.infected.iter().zip(&self.recovered).map(|(i, r)| (i + r) as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SirTrace {
    pub node_count: usize,
    /// Mean affected fraction over runs, `t = 0..=steps`.
    pub mean: Vec<f64>,
    /// Population standard deviation over runs.
    pub std: Vec<f64>,
    pub runs: Vec<RunTrace>,
}

impl SirTrace {
    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("at least one step")
    }
}

const SUSCEPTIBLE: u8 = 0;
const INFECTED: u8 = 1;
const RECOVERED: u8 = 2;

fn single_run(g: &Graph, seeds: &[NodeId], cfg: &SirConfig, run: usize) -> RunTrace {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run as u64);
    let mut state = vec![SUSCEPTIBLE; n];
    let mut infected: Vec<NodeId> = seeds.to_vec();
    for &s in seeds {
        state[s] = INFECTED;
    }
    let mut recovered = 0;
    let mut trace = RunTrace { susceptible: vec![n - seeds.len()], infected: vec![seeds.len()], recovered: vec![0] };
    for _ in 0..cfg.steps {
        let mut fresh = Vec::new();
        for &u in &infected {
            for &v in g.neighbors(u) {
                if state[v] == SUSCEPTIBLE && rng.gen_bool(cfg.infect_prob) {
                    state[v] = INFECTED;
                    fresh.push(v);
                }
            }
        }
        infected.retain(|&u| {
            if rng.gen_bool(cfg.recover_prob) {
                state[u] = RECOVERED;
                recovered += 1;
                false
            } else {
                true
            }
        });
        infected.extend(fresh);
        trace.infected.push(infected.len());
        trace.recovered.push(recovered);
        trace.susceptible.push(n - infected.len() - recovered);
    }
    trace
}

/// Runs `cfg.runs` independent epidemics from `seeds`. Each step every
/// infected node tries each susceptible neighbor, then every node infected
/// before the step may recover. Run `r` draws from its own stream of the
/// seeded generator, so results do not depend on scheduling.
pub fn run_sir(g: &Graph, seeds: &[NodeId], cfg: &SirConfig) -> Result<SirTrace> {
    cfg.validate()?;
    if seeds.is_empty() {
        return Err(Error::Parameter("seed set is empty".into()));
    }
    let mut seen = vec![false; g.node_count()];
    for &s in seeds {
        g.check_node(s)?;
        if std::mem::replace(&mut seen[s], true) {
            return Err(Error::Parameter(format!("seed node {s} listed twice")));
        }
    }
    let n = g.node_count();
    let runs: Vec<RunTrace> = (0..cfg.runs).into_par_iter().map(|r| single_run(g, seeds, cfg, r)).collect();
    let per_run: Vec<Vec<f64>> = runs.iter().map(|r| r.affected(n)).collect();
    let count = runs.len() as f64;
    let mut mean = Vec::with_capacity(cfg.steps + 1);
    let mut std = Vec::with_capacity(cfg.steps + 1);
    for t in 0..=cfg.steps {
        let m = per_run.iter().map(|r| r[t]).sum::<f64>() / count;
        let var = per_run.iter().map(|r| (r[t] - m).powi(2)).sum::<f64>() / count;
        mean.push(m);
        std.push(var.sqrt());
    }
    Ok(SirTrace { node_count: n, mean, std, runs })
}

/// Smallest multiple of 0.01 strictly above `β_min = ⟨k⟩/⟨k²⟩`, at least
/// 0.02 and at most 1.
pub fn default_beta(g: &Graph) -> Result<f64> {
    Ok(round_beta(degree_moments(g)?.beta_min))
}

pub fn round_beta(beta_min: f64) -> f64 {
    let hundredths = (beta_min * 100.0 + 1e-9).floor() + 1.0;
    (hundredths / 100.0).clamp(0.02, 1.0)
}

/// `min(1, β_min · (1 + margin))`.
pub fn beta_with_margin(g: &Graph, margin: f64) -> Result<f64> {
    if margin < 0.0 {
        return Err(Error::Parameter(format!("margin must be non-negative, got {margin}")));
    }
    Ok((degree_moments(g)?.beta_min * (1.0 + margin)).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn no_transmission_is_flat() {
        let g = path(10);
        let mut cfg = SirConfig::new(0.0);
        cfg.runs = 5;
        let tr = run_sir(&g, &[0, 5], &cfg).unwrap();
        assert!(tr.mean.iter().all(|&x| x == 0.2));
        assert_eq!(tr.mean.len(), 16);
    }

    #[test]
    fn certain_transmission_floods() {
        let g = path(8);
        let mut cfg = SirConfig::new(1.0);
        cfg.recover_prob = 0.0;
        cfg.runs = 3;
        cfg.steps = 10;
        let tr = run_sir(&g, &[0], &cfg).unwrap();
        assert_eq!(tr.mean[7], 1.0);
        assert!(tr.mean[6] < 1.0);
    }

    #[test]
    fn conservation_and_reproducibility() {
        let g = crate::generate::erdos_renyi(80, 0.08, 2);
        let mut cfg = SirConfig::new(0.2);
        cfg.recover_prob = 0.3;
        cfg.runs = 8;
        cfg.seed = 17;
        let tr = run_sir(&g, &[1, 2, 3], &cfg).unwrap();
        for r in &tr.runs {
            for t in 0..=cfg.steps {
                assert_eq!(r.susceptible[t] + r.infected[t] + r.recovered[t], 80);
            }
            let a = r.affected(80);
            assert!(a.windows(2).all(|w| w[0] <= w[1]));
        }
        assert_eq!(tr, run_sir(&g, &[1, 2, 3], &cfg).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let g = path(4);
        let cfg = SirConfig::new(0.5);
        assert!(run_sir(&g, &[], &cfg).is_err());
        assert!(run_sir(&g, &[1, 1], &cfg).is_err());
        assert!(matches!(run_sir(&g, &[9], &cfg), Err(Error::InvalidNode(9))));
        assert!(run_sir(&g, &[0], &SirConfig::new(1.5)).is_err());
    }

    #[test]
    fn beta_rounding() {
        assert_eq!(round_beta(0.011), 0.02);
        assert_eq!(round_beta(0.258), 0.26);
        assert_eq!(round_beta(0.25), 0.26);
        assert_eq!(round_beta(0.001), 0.02);
        assert_eq!(round_beta(0.07), 0.08);
        assert_eq!(round_beta(1.0), 1.0);
        // 4-regular ring lattice: β_min = 4/16.
        let g = Graph::from_edges(10, (0..10).flat_map(|i| [(i, (i + 1) % 10), (i, (i + 2) % 10)])).unwrap();
        assert_eq!(default_beta(&g).unwrap(), 0.26);
        assert!((beta_with_margin(&g, 0.1).unwrap() - 0.275).abs() < 1e-12);
        assert!(default_beta(&Graph::new(3)).is_err());
    }
}
