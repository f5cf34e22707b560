//! Budgeted critical-edge campaigns and spreader seeding.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cores::{core_numbers, CoreState};
use crate::error::{Error, Result};
use crate::graph::{canonical, Edge, Graph, NodeId};
use crate::incremental::{ChangeKind, DynamicCores, EdgeChange};
use crate::insertion::InsertionStrengths;
use crate::removal::{core_strength, CoronaSet, RemovalStrengths};

/// Node or edge ranking method, strength measures and baselines alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    RsId,
    RsOd,
    IsId,
    IsOd,
    IsIdStar,
    IsOdStar,
    Random,
    Degree,
    CoreNumber,
    CoreStrength,
    KShell,
    Iks,
}

impl Method {
    pub const ALL: [Method; 12] = [
        Method::RsId,
        Method::RsOd,
        Method::IsId,
        Method::IsOd,
        Method::IsIdStar,
        Method::IsOdStar,
        Method::Random,
        Method::Degree,
        Method::CoreNumber,
        Method::CoreStrength,
        Method::KShell,
        Method::Iks,
    ];

    /// Default methods of the removal campaign.
    pub const REMOVAL: [Method; 6] =
        [Method::RsId, Method::RsOd, Method::Random, Method::CoreNumber, Method::Degree, Method::CoreStrength];

    /// Default methods of the insertion campaign.
    pub const INSERTION: [Method; 8] = [
        Method::IsId,
        Method::IsOd,
        Method::IsIdStar,
        Method::IsOdStar,
        Method::Random,
        Method::CoreNumber,
        Method::Degree,
        Method::CoreStrength,
    ];

    /// Default methods of spreader seeding.
    pub const SPREADERS: [Method; 7] =
        [Method::RsId, Method::RsOd, Method::IsId, Method::IsOd, Method::KShell, Method::Iks, Method::CoreStrength];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::RsId => "rs_id",
            Method::RsOd => "rs_od",
            Method::IsId => "is_id",
            Method::IsOd => "is_od",
            Method::IsIdStar => "is_id_star",
            Method::IsOdStar => "is_od_star",
            Method::Random => "random",
            Method::Degree => "degree",
            Method::CoreNumber => "core_number",
            Method::CoreStrength => "core_strength",
            Method::KShell => "k_shell",
            Method::Iks => "iks",
        }
    }

    pub fn needs_removal_strengths(self) -> bool {
        matches!(self, Method::RsId | Method::RsOd)
    }

    pub fn needs_insertion_strengths(self) -> bool {
        matches!(self, Method::IsId | Method::IsOd | Method::IsIdStar | Method::IsOdStar)
    }

    fn is_baseline(self) -> bool {
        matches!(self, Method::Degree | Method::CoreNumber | Method::CoreStrength | Method::KShell | Method::Iks)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Method::ALL.into_iter().find(|m| m.as_str() == key).ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Sum,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Lowest,
    Highest,
}

/// How node values become an edge ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeScorePolicy {
    pub method: Method,
    pub aggregation: Aggregation,
    pub order: Order,
}

impl EdgeScorePolicy {
    /// Endpoint sum; lowest first for `rs_id`, highest first otherwise.
    pub fn removal(method: Method) -> Self {
        let order = if method == Method::RsId { Order::Lowest } else { Order::Highest };
        Self { method, aggregation: Aggregation::Sum, order }
    }

    /// Endpoint max, lowest first, for the insertion strengths; baselines keep
    /// the endpoint sum, highest first.
    pub fn insertion(method: Method) -> Self {
        if method.needs_insertion_strengths() {
            Self { method, aggregation: Aggregation::Max, order: Order::Lowest }
        } else {
            Self { method, aggregation: Aggregation::Sum, order: Order::Highest }
        }
    }

    pub fn score(&self, a: f64, b: f64) -> f64 {
        match self.aggregation {
            Aggregation::Sum => a + b,
            Aggregation::Max => a.max(b),
        }
    }

    /// Sorts `edges` best first, ties by edge.
    pub fn rank(&self, edges: impl IntoIterator<Item = Edge>, values: &[f64]) -> Vec<Edge> {
        let mut scored: Vec<(f64, Edge)> =
            edges.into_iter().map(|(u, v)| (self.score(values[u], values[v]), canonical(u, v))).collect();
        scored.sort_by(|a, b| {
            let by_score = match self.order {
                Order::Lowest => a.0.total_cmp(&b.0),
                Order::Highest => b.0.total_cmp(&a.0),
            };
            by_score.then(a.1.cmp(&b.1))
        });
        scored.into_iter().map(|(_, e)| e).collect()
    }
}

/// Strength tables available to [`node_values`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Measures<'a> {
    pub removal: Option<&'a RemovalStrengths>,
    pub insertion: Option<&'a InsertionStrengths>,
}

/// Information entropy of each node: `-Σ_{v ∈ N(u)} p_v ln p_v` with
/// `p_v = deg(v) / Σ_w deg(w)`.
pub fn iks_entropy(g: &Graph) -> Vec<f64> {
    let total: usize = (0..g.node_count()).map(|u| g.degree(u)).sum();
    if total == 0 {
        return vec![0.0; g.node_count()];
    }
    (0..g.node_count())
        .map(|u| {
            g.neighbors(u)
                .iter()
                .map(|&v| {
                    let p = g.degree(v) as f64 / total as f64;
                    -p * p.ln()
                })
                .sum()
        })
        .collect()
}

/// Per-node values of a baseline method.
pub fn baseline_scores(g: &Graph, cs: &CoreState, method: Method) -> Result<Vec<f64>> {
    Ok(match method {
        Method::Degree => (0..g.node_count()).map(|u| g.degree(u) as f64).collect(),
        Method::CoreNumber | Method::KShell => cs.cores().iter().map(|&k| k as f64).collect(),
        Method::CoreStrength => core_strength(g, cs).into_iter().map(|x| x as f64).collect(),
        Method::Iks => iks_entropy(g),
        other => return Err(Error::UnknownMethod(other.as_str().to_string())),
    })
}

/// Per-node values of any non-random method.
pub fn node_values(g: &Graph, cs: &CoreState, method: Method, m: Measures<'_>) -> Result<Vec<f64>> {
    if method.is_baseline() {
        return baseline_scores(g, cs, method);
    }
    let missing = || Error::Parameter(format!("method {method} needs strengths that were not computed"));
    Ok(match method {
        Method::RsId => m.removal.ok_or_else(missing)?.rs_id.clone(),
        Method::RsOd => m.removal.ok_or_else(missing)?.rs_od.iter().map(|&x| x as f64).collect(),
        Method::IsId => m.insertion.ok_or_else(missing)?.is_id.clone(),
        Method::IsOd => m.insertion.ok_or_else(missing)?.is_od.clone(),
        Method::IsIdStar => m.insertion.ok_or_else(missing)?.is_id_star.clone(),
        Method::IsOdStar => m.insertion.ok_or_else(missing)?.is_od_star.clone(),
        Method::Random => {
            return Err(Error::Parameter("random has no node values".into()));
        }
        _ => unreachable!(),
    })
}

/// Picks up to `c` removal edges in rank order, at most one per KAES. Edges
/// outside every KAES are taken freely (their removal changes nothing).
pub fn select_critical_removals(
    g: &Graph,
    coronas: &CoronaSet,
    values: &[f64],
    policy: EdgeScorePolicy,
    c: usize,
) -> Vec<Edge> {
    let kaes = coronas.kaes_index();
    let mut used = vec![false; coronas.len()];
    let mut picked = Vec::with_capacity(c.min(g.edge_count()));
    for e in policy.rank(g.edges(), values) {
        if picked.len() == c {
            break;
        }
        if let Some(&i) = kaes.get(&e) {
            if used[i] {
                continue;
            }
            used[i] = true;
        }
        picked.push(e);
    }
    picked
}

/// `c` distinct edges drawn uniformly, in draw order.
pub fn random_edges(edges: &[Edge], c: usize, seed: u64) -> Vec<Edge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, edges.len(), c.min(edges.len())).into_iter().map(|i| edges[i]).collect()
}

/// Non-adjacent pairs sharing at least two neighbors, ascending.
pub fn insertion_candidate_set(g: &Graph) -> Vec<Edge> {
    let n = g.node_count();
    let mut count = vec![0u32; n];
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for u in 0..n {
        for &w in g.neighbors(u) {
            for &x in g.neighbors(w) {
                if x > u && !g.has_edge(u, x) {
                    if count[x] == 0 {
                        seen.push(x);
                    }
                    count[x] += 1;
                }
            }
        }
        seen.sort_unstable();
        for &x in &seen {
            if count[x] >= 2 {
                out.push((u, x));
            }
            count[x] = 0;
        }
        seen.clear();
    }
    out
}

/// `100 · changed / n`.
pub fn f_percent(changed: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * changed as f64 / n as f64
    }
}

/// F after applying every edge, by full recomputation.
pub fn measure_f(g: &Graph, initial: &CoreState, edges: &[Edge], kind: ChangeKind) -> Result<f64> {
    let mut h = g.clone();
    for &(u, v) in edges {
        EdgeChange { kind, u, v }.apply_to(&mut h)?;
    }
    let after = core_numbers(&h);
    let changed = after.iter().zip(initial.cores()).filter(|(a, b)| a != b).count();
    Ok(f_percent(changed, g.node_count()))
}

/// Edges applied in order, with F after each one.
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub kind: ChangeKind,
    pub applied: Vec<Edge>,
    /// Insertions passed over because both endpoints had already risen.
    pub skipped: Vec<Edge>,
    /// `f[i]` is F after the first `i + 1` applied edges.
    pub f: Vec<f64>,
}

impl Campaign {
    /// F after the first `c` applied edges (all of them if fewer).
    pub fn f_at(&self, c: usize) -> f64 {
        match c.min(self.f.len()) {
            0 => 0.0,
            k => self.f[k - 1],
        }
    }

    pub fn final_f(&self) -> f64 {
        self.f_at(self.f.len())
    }
}

/// Removes `edges` one at a time, tracking F incrementally.
pub fn removal_campaign(g: &Graph, cs: &CoreState, edges: &[Edge]) -> Result<Campaign> {
    let mut dc = DynamicCores::with_state(g.clone(), cs.clone(), false);
    let mut f = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        dc.apply(EdgeChange::remove(u, v))?;
        f.push(f_percent(dc.changed_from_initial(), g.node_count()));
    }
    Ok(Campaign { kind: ChangeKind::Remove, applied: edges.to_vec(), skipped: Vec::new(), f })
}

/// Inserts edges in the given order until `c` are applied, skipping an edge
/// when both endpoints have already risen above their initial core.
pub fn insertion_campaign(g: &Graph, cs: &CoreState, ranked: &[Edge], c: usize) -> Result<Campaign> {
    let mut dc = DynamicCores::with_state(g.clone(), cs.clone(), false);
    let mut applied = Vec::new();
    let mut skipped = Vec::new();
    let mut f = Vec::new();
    for &(u, v) in ranked {
        if applied.len() == c {
            break;
        }
        let risen = |x: NodeId| dc.state().core(x) > dc.initial_cores()[x];
        if risen(u) && risen(v) {
            skipped.push((u, v));
            continue;
        }
        dc.apply(EdgeChange::insert(u, v))?;
        applied.push((u, v));
        f.push(f_percent(dc.changed_from_initial(), g.node_count()));
    }
    Ok(Campaign { kind: ChangeKind::Insert, applied, skipped, f })
}

/// Ranks the candidate set by `policy` and runs the insertion campaign.
pub fn select_critical_insertions(
    g: &Graph,
    cs: &CoreState,
    candidates: &[Edge],
    values: &[f64],
    policy: EdgeScorePolicy,
    c: usize,
) -> Result<Campaign> {
    if candidates.is_empty() {
        log::warn!("insertion candidate set is empty");
    }
    let ranked = policy.rank(candidates.iter().copied(), values);
    insertion_campaign(g, cs, &ranked, c)
}

/// Budgets `50, 100, …, 1000`, shrunk when `limit` (edges or candidates) is
/// below 2000 so that the largest budget is at most half of it.
pub fn default_budgets(limit: usize) -> Vec<usize> {
    let top = 1000.min(limit.div_ceil(2)).max(1);
    let mut out: Vec<usize> = (1..=20).map(|i| (i * top).div_ceil(20)).collect();
    out.dedup();
    out
}

/// Settings shared by every cell of a budget sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub budgets: Vec<usize>,
    /// Repetitions of the random method.
    pub random_runs: usize,
    pub seed: u64,
}

/// F against budget for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub method: Method,
    pub kind: ChangeKind,
    pub budgets: Vec<usize>,
    pub f: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
}

fn run_seed(seed: u64, run: usize) -> u64 {
    seed.wrapping_add((run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn mean_over_runs(budgets: &[usize], runs: Vec<Campaign>) -> Vec<f64> {
    let r = runs.len() as f64;
    budgets.iter().map(|&c| runs.iter().map(|cmp| cmp.f_at(c)).sum::<f64>() / r).collect()
}

/// Removal campaign for every budget. Selections are nested, so one campaign
/// at the largest budget covers every smaller one.
pub fn removal_sweep(
    g: &Graph,
    cs: &CoreState,
    coronas: &CoronaSet,
    method: Method,
    measures: Measures<'_>,
    cfg: &SweepConfig,
) -> Result<ExperimentResult> {
    let top = cfg.budgets.iter().copied().max().unwrap_or(0);
    let (f, runs) = if method == Method::Random {
        let runs = cfg.random_runs.max(1);
        let edges: Vec<Edge> = g.edges().collect();
        let campaigns = (0..runs)
            .into_par_iter()
            .map(|r| removal_campaign(g, cs, &random_edges(&edges, top, run_seed(cfg.seed, r))))
            .collect::<Result<Vec<_>>>()?;
        (mean_over_runs(&cfg.budgets, campaigns), runs)
    } else {
        let values = node_values(g, cs, method, measures)?;
        let picked = select_critical_removals(g, coronas, &values, EdgeScorePolicy::removal(method), top);
        let campaign = removal_campaign(g, cs, &picked)?;
        (cfg.budgets.iter().map(|&c| campaign.f_at(c)).collect(), 1)
    };
    Ok(ExperimentResult { method, kind: ChangeKind::Remove, budgets: cfg.budgets.clone(), f, runs, seed: cfg.seed })
}

/// Insertion campaign for every budget over a fixed candidate set.
pub fn insertion_sweep(
    g: &Graph,
    cs: &CoreState,
    candidates: &[Edge],
    method: Method,
    measures: Measures<'_>,
    cfg: &SweepConfig,
) -> Result<ExperimentResult> {
    let top = cfg.budgets.iter().copied().max().unwrap_or(0);
    let (f, runs) = if method == Method::Random {
        let runs = cfg.random_runs.max(1);
        let campaigns = (0..runs)
            .into_par_iter()
            .map(|r| {
                let mut order = candidates.to_vec();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(run_seed(cfg.seed, r)));
                insertion_campaign(g, cs, &order, top)
            })
            .collect::<Result<Vec<_>>>()?;
        (mean_over_runs(&cfg.budgets, campaigns), runs)
    } else {
        let values = node_values(g, cs, method, measures)?;
        let campaign = select_critical_insertions(g, cs, candidates, &values, EdgeScorePolicy::insertion(method), top)?;
        (cfg.budgets.iter().map(|&c| campaign.f_at(c)).collect(), 1)
    };
    Ok(ExperimentResult { method, kind: ChangeKind::Insert, budgets: cfg.budgets.clone(), f, runs, seed: cfg.seed })
}

/// `⌈fraction · n⌉`, capped at `n`.
pub fn spreader_count(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Parameter(format!("fraction must be in (0, 1], got {fraction}")));
    }
    Ok(((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n.max(1)).min(n))
}

fn descending_with_random_ties(nodes: &[NodeId], values: &[f64], rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    let mut order = nodes.to_vec();
    order.shuffle(rng);
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Round-robin seeding: each pass takes the strongest unchosen node of every
/// shell from the highest `k` down to 1, until `⌈fraction · |V|⌉` nodes are
/// chosen. Isolated nodes are only used once every other node is taken.
pub fn select_spreaders(cs: &CoreState, values: &[f64], fraction: f64, seed: u64) -> Result<Vec<NodeId>> {
    let want = spreader_count(cs.node_count(), fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shells: Vec<Vec<NodeId>> = cs
        .shells()
        .rev()
        .filter(|&(k, _)| k > 0)
        .map(|(_, nodes)| descending_with_random_ties(nodes, values, &mut rng))
        .collect();
    let mut picked = Vec::with_capacity(want);
    let mut depth = 0;
    while picked.len() < want {
        let mut progressed = false;
        for shell in &shells {
            if picked.len() == want {
                break;
            }
            if let Some(&u) = shell.get(depth) {
                picked.push(u);
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
        depth += 1;
    }
    if picked.len() < want {
        let isolated = descending_with_random_ties(cs.shell(0), values, &mut rng);
        picked.extend(isolated.into_iter().take(want - picked.len()));
    }
    Ok(picked)
}

/// The `count` largest values, ties broken at random.
pub fn select_top(values: &[f64], count: usize, seed: u64) -> Vec<NodeId> {
    let nodes: Vec<NodeId> = (0..values.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = descending_with_random_ties(&nodes, values, &mut rng);
    order.truncate(count);
    order
}

/// Seed set for `method`. Strength measures and IKS go shell by shell; the
/// other baselines take the global top; random draws uniformly.
pub fn spreader_seeds(
    g: &Graph,
    cs: &CoreState,
    method: Method,
    measures: Measures<'_>,
    fraction: f64,
    seed: u64,
) -> Result<Vec<NodeId>> {
    let n = g.node_count();
    let want = spreader_count(n, fraction)?;
    match method {
        Method::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(sample(&mut rng, n, want).into_vec())
        }
        Method::KShell | Method::CoreNumber | Method::CoreStrength | Method::Degree => {
            Ok(select_top(&baseline_scores(g, cs, method)?, want, seed))
        }
        _ => select_spreaders(cs, &node_values(g, cs, method, measures)?, fraction, seed),
    }
}
