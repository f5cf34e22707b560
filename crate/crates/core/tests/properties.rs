#![allow(clippy::needless_range_loop)]

mod common;

use coreres::applications::{
    insertion_campaign, insertion_candidate_set, measure_f, removal_campaign, select_spreaders, spreader_count,
};
use coreres::cores::{core_numbers, h_index_check, SubcoreIndex};
use coreres::graph::{load_edge_list, ParseMode};
use coreres::incremental::{
    insert_edge_update, recompute_oracle, remove_edge_update, ChangeKind, DynamicCores, EdgeChange,
};
use coreres::insertion::{build_candidate_graph, build_insertion_dependency_graph, IscCase, IscContext};
use coreres::removal::{core_strength, find_vulnerable_and_sensitive, rsc};
use coreres::sir::{run_sir, SirConfig};
use coreres::{core_decompose, Edge, Graph};
use proptest::prelude::*;

use common::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..n * 3)
            .prop_map(move |edges| Graph::from_edges(n, edges.into_iter().filter(|(u, v)| u != v)).unwrap())
    })
}

fn non_edges(g: &Graph) -> Vec<Edge> {
    let n = g.node_count();
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !g.has_edge(u, v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cores_match_definition(g in graph(30)) {
        prop_assert_eq!(core_numbers(&g), naive_cores(&g));
        prop_assert!(h_index_check(&g, &core_decompose(&g)));
    }

    #[test]
    fn shells_and_subcores_partition_nodes(g in graph(30)) {
        let cs = core_decompose(&g);
        let total: usize = cs.shells().map(|(_, nodes)| nodes.len()).sum();
        prop_assert_eq!(total, g.node_count());
        for u in 0..g.node_count() {
            let id = cs.subcore_id(u);
            prop_assert!(id <= u);
            prop_assert_eq!(cs.core(id), cs.core(u));
        }
        for (u, v) in g.edges() {
            if cs.core(u) == cs.core(v) {
                prop_assert_eq!(cs.subcore_id(u), cs.subcore_id(v));
            }
        }
    }

    #[test]
    fn core_strength_and_vulnerability(g in graph(30)) {
        let cs = core_decompose(&g);
        let strength = core_strength(&g, &cs);
        let vul = find_vulnerable_and_sensitive(&g, &cs);
        for u in 0..g.node_count() {
            prop_assert!(strength[u] >= 1);
            prop_assert_eq!(vul.is_vulnerable(u), strength[u] == 1 && cs.core(u) > 0);
        }
    }

    #[test]
    fn removal_update_matches_recompute(g in graph(30), pick in any::<prop::sample::Index>()) {
        let edges: Vec<Edge> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let (u, v) = edges[pick.index(edges.len())];
        let cs = core_decompose(&g);
        let fast = remove_edge_update(&g, &cs, u, v).unwrap();
        let slow = recompute_oracle(&g, EdgeChange::remove(u, v)).unwrap();
        prop_assert_eq!(fast.changed_nodes(), changed_after_removal(&g, cs.cores(), (u, v)));
        prop_assert_eq!(fast.updated_core, slow.updated_core);
    }

    #[test]
    fn insertion_update_matches_recompute(g in graph(30), pick in any::<prop::sample::Index>()) {
        let candidates = non_edges(&g);
        prop_assume!(!candidates.is_empty());
        let (u, v) = candidates[pick.index(candidates.len())];
        let cs = core_decompose(&g);
        let idx = SubcoreIndex::build(&cs);
        let expected = changed_after_insertion(&g, cs.cores(), (u, v));
        let plain = insert_edge_update(&g, &cs, u, v, None).unwrap();
        let indexed = insert_edge_update(&g, &cs, u, v, Some(&idx)).unwrap();
        prop_assert_eq!(plain.changed_nodes(), expected.clone());
        prop_assert_eq!(indexed.changed_nodes(), expected);
        prop_assert_eq!(plain.updated_core, recompute_oracle(&g, EdgeChange::insert(u, v)).unwrap().updated_core);
    }

    #[test]
    fn dynamic_sequences_stay_exact(g in graph(25), ops in prop::collection::vec((any::<bool>(), any::<prop::sample::Index>()), 1..25)) {
        let mut dc = DynamicCores::new(g.clone(), true);
        for (insert, pick) in ops {
            let pool: Vec<Edge> = if insert { non_edges(dc.graph()) } else { dc.graph().edges().collect() };
            if pool.is_empty() {
                continue;
            }
            let (u, v) = pool[pick.index(pool.len())];
            let change = if insert { EdgeChange::insert(u, v) } else { EdgeChange::remove(u, v) };
            dc.apply(change).unwrap();
            prop_assert_eq!(dc.state(), &core_decompose(dc.graph()));
        }
    }

    #[test]
    fn removal_dependency_matches_oracle(g in graph(30)) {
        let cs = core_decompose(&g);
        let out = rsc(&g, &cs);
        prop_assert_eq!(&out.dependency, &oracle_removal_dependency(&g));
        prop_assert_eq!(out.evaluations(), out.coronas.len());
        for &(src, dst) in out.dependency.edges() {
            prop_assert!(g.has_edge(src, dst));
        }
    }

    #[test]
    fn kaes_properties(g in graph(30)) {
        let cs = core_decompose(&g);
        let out = rsc(&g, &cs);
        let kaes = out.coronas.kaes_index();
        let vul = &out.coronas.vulnerability;
        let mut vectors: Vec<Option<Vec<u32>>> = vec![None; out.coronas.len()];
        for e in g.edges() {
            let after = naive_cores(&Graph::from_edges(g.node_count(), g.edges().filter(|&x| x != e)).unwrap());
            match kaes.get(&e) {
                None => prop_assert_eq!(&after[..], cs.cores()),
                Some(&i) => match &vectors[i] {
                    None => vectors[i] = Some(after.clone()),
                    Some(first) => prop_assert_eq!(first, &after),
                },
            }
            for x in [e.0, e.1] {
                let y = if x == e.0 { e.1 } else { e.0 };
                if vul.is_vulnerable(x) && cs.core(y) >= cs.core(x) {
                    prop_assert_eq!(after[x] + 1, cs.core(x));
                }
            }
        }
    }

    #[test]
    fn insertion_dependency_matches_oracle(g in graph(25), seed in any::<u64>()) {
        prop_assume!(g.node_count() > 3);
        let cs = core_decompose(&g);
        let ic = build_candidate_graph(&g, 3, seed).unwrap();
        let cands: Vec<Edge> = ic.edges.iter().map(|&(e, _)| e).collect();
        let out = build_insertion_dependency_graph(&g, &cs, &ic, None);
        prop_assert_eq!(&out.dependency, &oracle_insertion_dependency(&g, &cands));
        prop_assert_eq!(out.counts.total(), cands.len());
    }

    #[test]
    fn rule_cases_predict_exactly(g in graph(25)) {
        let cs = core_decompose(&g);
        let ctx = IscContext::new(&g, cs.cores());
        for (u, v) in non_edges(&g) {
            let cls = ctx.classify(cs.cores(), u, v);
            let changed = changed_after_insertion(&g, cs.cores(), (u, v));
            if let Some(predicted) = cls.predicted() {
                for x in [u, v] {
                    prop_assert_eq!(changed.contains(&x), predicted.contains(&x), "{:?} on {:?}", cls.case, (u, v));
                }
            }
            if cls.case == IscCase::SaturatedPeer {
                prop_assert!(changed.len() >= 2);
            }
        }
    }

    #[test]
    fn candidate_graph_invariants(g in graph(30), b in 1usize..5, seed in any::<u64>()) {
        prop_assume!(b < g.node_count());
        let ic = build_candidate_graph(&g, b, seed).unwrap();
        prop_assert_eq!(&ic, &build_candidate_graph(&g, b, seed).unwrap());
        let deg = ic.degrees(g.node_count());
        for &((u, v), _) in &ic.edges {
            prop_assert!(u < v);
            prop_assert!(!g.has_edge(u, v));
        }
        for u in 0..g.node_count() {
            let possible = g.node_count() - 1 - g.degree(u);
            prop_assert!(deg[u] >= b.min(possible));
        }
    }

    #[test]
    fn campaigns_match_recompute(g in graph(30), seed in any::<u64>()) {
        let cs = core_decompose(&g);
        let edges: Vec<Edge> = g.edges().collect();
        let picked = coreres::applications::random_edges(&edges, edges.len() / 2, seed);
        let camp = removal_campaign(&g, &cs, &picked).unwrap();
        for c in 0..=picked.len() {
            prop_assert!((camp.f_at(c) - measure_f(&g, &cs, &picked[..c], ChangeKind::Remove).unwrap()).abs() < 1e-9);
        }
        let cands = insertion_candidate_set(&g);
        let camp = insertion_campaign(&g, &cs, &cands, 10).unwrap();
        prop_assert!((camp.final_f() - measure_f(&g, &cs, &camp.applied, ChangeKind::Insert).unwrap()).abs() < 1e-9);
        prop_assert!(camp.f.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spreader_sets_have_exact_size(g in graph(30), fraction in 0.01f64..=1.0, seed in any::<u64>()) {
        let cs = core_decompose(&g);
        let values: Vec<f64> = (0..g.node_count()).map(|u| g.degree(u) as f64).collect();
        let picked = select_spreaders(&cs, &values, fraction, seed).unwrap();
        prop_assert_eq!(picked.len(), spreader_count(g.node_count(), fraction).unwrap());
        let mut sorted = picked.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), picked.len());
    }

    #[test]
    fn sir_traces_are_well_formed(g in graph(30), beta in 0.0f64..=1.0, mu in 0.0f64..=1.0, seed in any::<u64>()) {
        let cfg = SirConfig { infect_prob: beta, recover_prob: mu, steps: 10, runs: 4, seed };
        let tr = run_sir(&g, &[0], &cfg).unwrap();
        let n = g.node_count();
        for run in &tr.runs {
            let a = run.affected(n);
            prop_assert_eq!(a[0], 1.0 / n as f64);
            prop_assert!(a.windows(2).all(|w| w[0] <= w[1]));
            for t in 0..=10 {
                prop_assert_eq!(run.susceptible[t] + run.infected[t] + run.recovered[t], n);
            }
        }
        prop_assert!(tr.mean.iter().all(|&x| x <= 1.0));
    }

    #[test]
    fn edge_lists_round_trip(g in graph(30)) {
        let text: String = g.edges().map(|(u, v)| format!("{} {}\n", u * 7 + 3, v * 7 + 3)).collect();
        prop_assume!(!text.is_empty());
        let (h, stats) = load_edge_list(text.as_bytes(), ParseMode::Strict).unwrap();
        prop_assert_eq!(h.edge_count(), g.edge_count());
        prop_assert_eq!(stats.skipped_lines, 0);
        for (u, v) in h.edges() {
            let (a, b) = (((h.label(u) - 3) / 7) as usize, ((h.label(v) - 3) / 7) as usize);
            prop_assert!(g.has_edge(a, b));
        }
    }
}
