use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use coreres::applications::{
    default_budgets, insertion_candidate_set, insertion_sweep, removal_sweep, spreader_seeds, ExperimentResult,
    Measures, Method, SweepConfig,
};
use coreres::graph::{degree_moments, load_edge_list, ParseMode};
use coreres::insertion::{
    build_candidate_graph, build_insertion_dependency_graph, naive_insertion_dependency_graph, run_insertion_trials,
    InsertionStrengths,
};
use coreres::removal::{core_strength, naive_removal_dependency_graph, percent_gain, rsc, RscOutput};
use coreres::sir::{default_beta, run_sir, SirConfig};
use coreres::{core_decompose, CoreState, Graph};

use crate::args::*;
use crate::output::{read_manifest, write_csv, write_json, Run};

/// A fast path disagreed with its reference construction.
#[derive(Debug, thiserror::Error)]
#[error("consistency check failed: {0}")]
pub struct Consistency(pub String);

pub fn run(command: Command) -> Result<()> {
    match command.clone() {
        Command::Decompose(a) => decompose(&a, command),
        Command::Strengths(a) => strengths(&a, command),
        Command::Benchmark(a) => benchmark(&a, command),
        Command::CriticalEdges(a) => critical_edges(&a, command),
        Command::Spreaders(a) => spreaders(&a, command),
        Command::Generate(a) => generate(&a),
        Command::Replay(a) => replay(&a),
    }
}

fn load(input: &InputArgs) -> Result<Graph> {
    let file = File::open(&input.graph).with_context(|| format!("opening {}", input.graph.display()))?;
    let mode = if input.strict_parse { ParseMode::Strict } else { ParseMode::Lenient };
    let (g, stats) =
        load_edge_list(BufReader::new(file), mode).with_context(|| format!("loading {}", input.graph.display()))?;
    log::info!(
        "loaded {} nodes, {} edges ({} lines skipped, {} self-loops, {} duplicates)",
        g.node_count(),
        g.edge_count(),
        stats.skipped_lines,
        stats.self_loops,
        stats.duplicate_edges
    );
    Ok(g)
}

fn parse_methods(names: &[String], default: &[Method]) -> Result<Vec<Method>> {
    if names.is_empty() {
        return Ok(default.to_vec());
    }
    let mut out = Vec::new();
    for name in names {
        let m: Method = name.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct Summary {
    nodes: usize,
    edges: usize,
    max_core: u32,
    shells: BTreeMap<u32, usize>,
    mean_degree: Option<f64>,
    mean_square_degree: Option<f64>,
    beta_min: Option<f64>,
}

fn decompose(a: &DecomposeArgs, cmd: Command) -> Result<()> {
    let mut run = Run::start(&a.input.out_dir, cmd)?;
    let g = load(&a.input)?;
    let cs = run.time("decompose", || core_decompose(&g));
    let moments = degree_moments(&g).ok();
    let summary = Summary {
        nodes: g.node_count(),
        edges: g.edge_count(),
        max_core: cs.max_core(),
        shells: cs.shells().map(|(k, nodes)| (k, nodes.len())).collect(),
        mean_degree: moments.map(|m| m.mean_degree),
        mean_square_degree: moments.map(|m| m.mean_square_degree),
        beta_min: moments.map(|m| m.beta_min),
    };
    let rows = (0..g.node_count())
        .map(|u| format!("{},{},{},{}", g.label(u), cs.core(u), cs.core(u), g.label(cs.subcore_id(u))));
    write_csv(&run.output("cores.csv")?, "node,core,shell,subcore", rows)?;
    write_json(&run.output("summary.json")?, &summary)?;
    println!(
        "{} nodes, {} edges, max core {}, {} shells",
        summary.nodes,
        summary.edges,
        summary.max_core,
        summary.shells.len()
    );
    run.finish()
}

fn write_removal(run: &mut Run, g: &Graph, cs: &CoreState, out: &RscOutput) -> Result<()> {
    let strength = core_strength(g, cs);
    let st = &out.strengths;
    let rows = (0..g.node_count())
        .map(|u| format!("{},{},{},{},{}", g.label(u), cs.core(u), strength[u], st.rs_id[u], st.rs_od[u]));
    write_csv(&run.output("removal_strengths.csv")?, "node,core,cs,rs_id,rs_od", rows)?;
    let rows = out.dependency.edges().iter().map(|&(s, d)| format!("{},{}", g.label(s), g.label(d)));
    write_csv(&run.output("removal_dependency.csv")?, "src,dst", rows)?;
    let rows = out
        .coronas
        .coronas
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{i},{},{},{},{}", c.k, c.members.len(), c.kaes.len(), c.ccn.len()));
    write_csv(&run.output("coronas.csv")?, "corona,k,size,kaes,ccn", rows)
}

fn strengths(a: &StrengthsArgs, cmd: Command) -> Result<()> {
    let mut run = Run::start(&a.input.out_dir, cmd)?;
    let g = load(&a.input)?;
    let cs = core_decompose(&g);
    match a.mode {
        Mode::Removal => {
            let out = run.time("rsc", || rsc(&g, &cs));
            if a.verify {
                let naive = run.time("naive", || naive_removal_dependency_graph(&g, &cs));
                if naive != out.dependency {
                    return Err(Consistency("removal dependency graph differs from the naive build".into()).into());
                }
            }
            write_removal(&mut run, &g, &cs, &out)?;
            run.resolve("coronas", out.coronas.len());
            run.resolve("dependency_edges", out.dependency.edge_count());
            println!(
                "{} coronas, {} dependency edges, {:.1}% fewer evaluations than per-edge",
                out.coronas.len(),
                out.dependency.edge_count(),
                percent_gain(out.coronas.len(), g.edge_count())
            );
        }
        Mode::Insertion => {
            let b = a.insertion.b;
            let trials = run.time("isc", || run_insertion_trials(&g, &cs, b, a.insertion.trials, a.seed))?;
            if a.verify {
                for (t, trial) in trials.iter().enumerate() {
                    let naive = naive_insertion_dependency_graph(&g, &cs, &trial.candidates, None);
                    if naive != trial.isc.dependency {
                        return Err(Consistency(format!("insertion dependency graph of trial {t} differs")).into());
                    }
                }
            }
            let st = InsertionStrengths::from_trials(&g, &trials);
            let rows = (0..g.node_count()).map(|u| {
                format!(
                    "{},{},{},{},{},{}",
                    g.label(u),
                    st.is_id[u],
                    st.is_od[u],
                    st.is_id_star[u],
                    st.is_od_star[u],
                    st.stddev_is_id[u]
                )
            });
            write_csv(
                &run.output("insertion_strengths.csv")?,
                "node,is_id,is_od,is_id_star,is_od_star,stddev_is_id",
                rows,
            )?;
            for (t, trial) in trials.iter().enumerate() {
                let rows = trial
                    .candidates
                    .edges
                    .iter()
                    .map(|&((u, v), origin)| format!("{},{},{}", g.label(u), g.label(v), origin.as_str()));
                write_csv(&run.output(&format!("trials/candidates_{t}.csv"))?, "u,v,origin", rows)?;
                let rows = trial
                    .isc
                    .tagged
                    .iter()
                    .map(|&(s, d, case)| format!("{},{},{}", g.label(s), g.label(d), case.as_str()));
                write_csv(&run.output(&format!("trials/dependency_{t}.csv"))?, "src,dst,case", rows)?;
            }
            let rows = trials.iter().enumerate().map(|(t, tr)| {
                let c = tr.isc.counts;
                format!(
                    "{t},{},{},{},{},{}",
                    tr.candidates.len(),
                    c.low_saturated,
                    c.both_saturated,
                    c.saturated_peer,
                    c.fallback
                )
            });
            write_csv(
                &run.output("isc_counts.csv")?,
                "trial,candidates,low_saturated,both_saturated,saturated_peer,fallback",
                rows,
            )?;
            let fallback: usize = trials.iter().map(|t| t.isc.counts.fallback).sum();
            let total: usize = trials.iter().map(|t| t.isc.counts.total()).sum();
            println!("{} trials, {total} candidate edges, {fallback} resolved by incremental insertion", trials.len());
        }
    }
    run.finish()
}

/// Fastest of `repeats` runs, in seconds, with the last result.
fn best_of<T>(repeats: usize, mut f: impl FnMut() -> T) -> (f64, T) {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let out = f();
        best = best.min(start.elapsed().as_secs_f64());
        last = Some(out);
    }
    (best, last.expect("at least one repeat"))
}

#[derive(Serialize)]
struct RemovalBench {
    edges: usize,
    coronas: usize,
    naive_evaluations: usize,
    rsc_evaluations: usize,
    percent_gain: f64,
    naive_secs: f64,
    rsc_secs: f64,
    speedup: f64,
}

#[derive(Serialize)]
struct InsertionBench {
    candidates: usize,
    low_saturated: usize,
    both_saturated: usize,
    saturated_peer: usize,
    fallback: usize,
    percent_resolved_by_rules: f64,
    naive_secs: f64,
    isc_secs: f64,
    speedup: f64,
}

#[derive(Serialize, Default)]
struct BenchReport {
    removal: Option<RemovalBench>,
    insertion: Option<InsertionBench>,
}

fn benchmark(a: &BenchmarkArgs, cmd: Command) -> Result<()> {
    let mut run = Run::start(&a.input.out_dir, cmd)?;
    let g = load(&a.input)?;
    let cs = core_decompose(&g);
    let mut report = BenchReport::default();
    if matches!(a.mode, BenchMode::Removal | BenchMode::Both) {
        let (naive_secs, naive) = best_of(a.repeats, || naive_removal_dependency_graph(&g, &cs));
        let (rsc_secs, out) = best_of(a.repeats, || rsc(&g, &cs));
        if naive != out.dependency {
            return Err(Consistency("removal dependency graph differs from the naive build".into()).into());
        }
        let r = RemovalBench {
            edges: g.edge_count(),
            coronas: out.coronas.len(),
            naive_evaluations: g.edge_count(),
            rsc_evaluations: out.evaluations(),
            percent_gain: percent_gain(out.coronas.len(), g.edge_count()),
            naive_secs,
            rsc_secs,
            speedup: naive_secs / rsc_secs,
        };
        println!(
            "removal: {} edges, {} coronas, gain {:.1}%, naive {:.4}s, rsc {:.4}s, speedup {:.2}x",
            r.edges, r.coronas, r.percent_gain, r.naive_secs, r.rsc_secs, r.speedup
        );
        report.removal = Some(r);
    }
    if matches!(a.mode, BenchMode::Insertion | BenchMode::Both) {
        let ic = build_candidate_graph(&g, a.b, a.seed)?;
        let (naive_secs, naive) = best_of(a.repeats, || naive_insertion_dependency_graph(&g, &cs, &ic, None));
        let (isc_secs, out) = best_of(a.repeats, || build_insertion_dependency_graph(&g, &cs, &ic, None));
        if naive != out.dependency {
            return Err(Consistency("insertion dependency graph differs from the naive build".into()).into());
        }
        let c = out.counts;
        let r = InsertionBench {
            candidates: ic.len(),
            low_saturated: c.low_saturated,
            both_saturated: c.both_saturated,
            saturated_peer: c.saturated_peer,
            fallback: c.fallback,
            percent_resolved_by_rules: 100.0 * (1.0 - c.fallback_rate()),
            naive_secs,
            isc_secs,
            speedup: naive_secs / isc_secs,
        };
        println!(
            "insertion: {} candidates, {:.1}% resolved by local rules, naive {:.4}s, isc {:.4}s, speedup {:.2}x",
            r.candidates, r.percent_resolved_by_rules, r.naive_secs, r.isc_secs, r.speedup
        );
        report.insertion = Some(r);
    }
    write_json(&run.output("benchmark.json")?, &report)?;
    run.finish()
}

fn insertion_strengths_for(g: &Graph, cs: &CoreState, ins: &InsertionArgs, seed: u64) -> Result<InsertionStrengths> {
    let trials = run_insertion_trials(g, cs, ins.b, ins.trials, seed)?;
    Ok(InsertionStrengths::from_trials(g, &trials))
}

fn write_sweeps(run: &mut Run, results: &[ExperimentResult]) -> Result<()> {
    let rows =
        results.iter().flat_map(|r| r.budgets.iter().zip(&r.f).map(move |(c, f)| format!("{},{c},{f}", r.method)));
    write_csv(&run.output("critical_edges.csv")?, "method,budget,F", rows)
}

fn critical_edges(a: &CriticalEdgesArgs, cmd: Command) -> Result<()> {
    let mut run = Run::start(&a.input.out_dir, cmd)?;
    let g = load(&a.input)?;
    let cs = core_decompose(&g);
    let default = match a.mode {
        Mode::Removal => &Method::REMOVAL[..],
        Mode::Insertion => &Method::INSERTION[..],
    };
    let methods = parse_methods(&a.methods, default)?;
    let results = match a.mode {
        Mode::Removal => {
            if let Some(m) = methods.iter().find(|m| m.needs_insertion_strengths()) {
                bail!(coreres::Error::Parameter(format!("method {m} does not apply to removal")));
            }
            let out = rsc(&g, &cs);
            let budgets = if a.budgets.is_empty() { default_budgets(g.edge_count()) } else { a.budgets.clone() };
            let cfg = SweepConfig { budgets, random_runs: a.random_runs, seed: a.seed };
            run.resolve("budgets", &cfg.budgets);
            let measures = Measures { removal: Some(&out.strengths), insertion: None };
            run.time("sweep", || {
                methods
                    .par_iter()
                    .map(|&m| removal_sweep(&g, &cs, &out.coronas, m, measures, &cfg))
                    .collect::<coreres::Result<Vec<_>>>()
            })?
        }
        Mode::Insertion => {
            if let Some(m) = methods.iter().find(|m| m.needs_removal_strengths()) {
                bail!(coreres::Error::Parameter(format!("method {m} does not apply to insertion")));
            }
            let ins = if methods.iter().any(|m| m.needs_insertion_strengths()) {
                Some(run.time("isc", || insertion_strengths_for(&g, &cs, &a.insertion, a.seed))?)
            } else {
                None
            };
            let candidates = insertion_candidate_set(&g);
            run.resolve("candidate_set", candidates.len());
            let budgets = if a.budgets.is_empty() { default_budgets(candidates.len()) } else { a.budgets.clone() };
            let cfg = SweepConfig { budgets, random_runs: a.random_runs, seed: a.seed };
            run.resolve("budgets", &cfg.budgets);
            let measures = Measures { removal: None, insertion: ins.as_ref() };
            run.time("sweep", || {
                methods
                    .par_iter()
                    .map(|&m| insertion_sweep(&g, &cs, &candidates, m, measures, &cfg))
                    .collect::<coreres::Result<Vec<_>>>()
            })?
        }
    };
    write_sweeps(&mut run, &results)?;
    for r in &results {
        println!(
            "{:<14} F at budget {}: {:.2}",
            r.method.as_str(),
            r.budgets.last().copied().unwrap_or(0),
            r.f.last().copied().unwrap_or(0.0)
        );
    }
    run.finish()
}

fn spreaders(a: &SpreadersArgs, cmd: Command) -> Result<()> {
    let mut run = Run::start(&a.input.out_dir, cmd)?;
    let g = load(&a.input)?;
    let cs = core_decompose(&g);
    let methods = parse_methods(&a.methods, &Method::SPREADERS)?;
    let beta = match a.beta {
        Beta::Auto => default_beta(&g)?,
        Beta::Fixed(b) => b,
    };
    run.resolve("beta", beta);
    let cfg = SirConfig { infect_prob: beta, recover_prob: a.recover_prob, steps: a.steps, runs: a.runs, seed: a.seed };
    cfg.validate()?;

    let removal = methods.iter().any(|m| m.needs_removal_strengths()).then(|| rsc(&g, &cs));
    let insertion = if methods.iter().any(|m| m.needs_insertion_strengths()) {
        Some(insertion_strengths_for(&g, &cs, &a.insertion, a.seed)?)
    } else {
        None
    };
    let measures = Measures { removal: removal.as_ref().map(|r| &r.strengths), insertion: insertion.as_ref() };

    let (seed_rows, sir_rows) = run.time("sir", || -> Result<(Vec<String>, Vec<String>)> {
        let mut seed_rows = Vec::new();
        let mut sir_rows = Vec::new();
        for &m in &methods {
            let seeds = spreader_seeds(&g, &cs, m, measures, a.fraction, a.seed)?;
            let trace = run_sir(&g, &seeds, &cfg)?;
            seed_rows.extend(seeds.iter().enumerate().map(|(i, &u)| format!("{m},{i},{}", g.label(u))));
            sir_rows.extend(
                trace.mean.iter().zip(&trace.std).enumerate().map(|(t, (mean, sd))| format!("{m},{t},{mean},{sd}")),
            );
            println!("{:<14} final S_t {:.4}", m.as_str(), trace.final_mean());
        }
        Ok((seed_rows, sir_rows))
    })?;
    write_csv(&run.output("seeds.csv")?, "method,rank,node", seed_rows)?;
    write_csv(&run.output("sir.csv")?, "method,t,S_t_mean,S_t_std", sir_rows)?;
    run.finish()
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let g = match a.model {
        Model::Er => coreres::generate::erdos_renyi(a.n, a.p, a.seed),
        Model::Ba => coreres::generate::barabasi_albert(a.n, a.m, a.seed),
    };
    write_edge_list(&a.out, &g)?;
    println!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), a.out.display());
    Ok(())
}

fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

fn replay(a: &ReplayArgs) -> Result<()> {
    let manifest = read_manifest(&a.manifest)?;
    let mut cmd = manifest.invocation;
    if let Some(dir) = &a.out_dir {
        match &mut cmd {
            Command::Decompose(x) => x.input.out_dir = dir.clone(),
            Command::Strengths(x) => x.input.out_dir = dir.clone(),
            Command::Benchmark(x) => x.input.out_dir = dir.clone(),
            Command::CriticalEdges(x) => x.input.out_dir = dir.clone(),
            Command::Spreaders(x) => x.input.out_dir = dir.clone(),
            Command::Generate(_) | Command::Replay(_) => {}
        }
    }
    if matches!(cmd, Command::Replay(_)) {
        bail!(coreres::Error::Parameter("a manifest cannot record a replay".into()));
    }
    run(cmd)
}
