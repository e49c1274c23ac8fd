use std::collections::BTreeSet;
use std::io::Cursor;
use std::path::Path;

use grm_core::analysis::{
    average_reduced, friendship_graph, leader_closure_graph, sensitivity, theta_score, top_friends,
    EditionRankTable, SensitivityConfig,
};
use grm_core::export::{friendship_to_dot, friendship_to_gexf};
use grm_core::generate::{random_graph, random_subset};
use grm_core::{
    pagerank, parse_edge_list, reduce, Component, DMatrix, DirectedGraph, GoogleOperator, PageRankConfig,
    ReduceConfig, ReducedMatrixSet,
};
use proptest::prelude::*;

fn original_edges(g: &DirectedGraph) -> BTreeSet<(u64, u64)> {
    g.edges().map(|(s, d)| (g.external_id(s), g.external_id(d))).collect()
}

fn edge_lines() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((0u64..40, 0u64..40), 1..120)
}

fn render(lines: &[(u64, u64)]) -> String {
    lines.iter().map(|(s, d)| format!("{s} {d}\n")).collect()
}

fn parse(text: &str) -> DirectedGraph {
    parse_edge_list(Cursor::new(text), Path::new("mem"), false).unwrap()
}

fn reduced(n: usize, nr: usize, seed: u64) -> ReducedMatrixSet {
    let g = random_graph(n, 3, 0.2, seed);
    let subset = random_subset(&g, nr, seed);
    let op = GoogleOperator::new(&g, 0.85).unwrap();
    reduce(&op, &subset, &ReduceConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transpose_round_trip(n in 1usize..60, deg in 1usize..6, dangling in 0.0f64..0.6, seed: u64) {
        let g = random_graph(n, deg, dangling, seed);
        let mut from_in = BTreeSet::new();
        for d in 0..n as u32 {
            for &s in g.in_links(d) {
                from_in.insert((s, d));
            }
        }
        let from_out: BTreeSet<_> = g.edges().collect();
        prop_assert_eq!(from_in, from_out);
    }

    #[test]
    fn ingestion_is_idempotent(lines in edge_lines()) {
        let text = render(&lines);
        prop_assert_eq!(parse(&text), parse(&text));
    }

    #[test]
    fn line_order_does_not_matter(lines in edge_lines(), seed: u64) {
        let mut shuffled = lines.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            shuffled.swap(i, (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize);
        }
        let a = parse(&render(&lines));
        let b = parse(&render(&shuffled));
        prop_assert_eq!(original_edges(&a), original_edges(&b));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pagerank_is_a_fixed_point_with_monotone_residual(n in 1usize..80, dangling in 0.0f64..0.5, seed: u64) {
        let g = random_graph(n, 3, dangling, seed);
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let pr = pagerank(&op, &PageRankConfig::default()).unwrap();
        let total: f64 = pr.probabilities.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let gp = op.apply(&pr.probabilities).unwrap();
        let res: f64 = gp.iter().zip(&pr.probabilities).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!(res <= 1e-11, "residual {}", res);
        for w in pr.residual_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-14, "{:?}", w);
        }
    }

    #[test]
    fn operator_preserves_mass(n in 1usize..100, seed: u64, raw in prop::collection::vec(0.0f64..1.0, 100)) {
        let g = random_graph(n, 4, 0.3, seed);
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let v = &raw[..n];
        let mass: f64 = v.iter().sum();
        let w: f64 = op.apply(v).unwrap().iter().sum();
        prop_assert!((w - mass).abs() <= 1e-12 * n as f64);
    }

    #[test]
    fn reduction_invariants_hold(n in 25usize..120, nr in 2usize..12, seed: u64) {
        let rset = reduced(n, nr, seed);
        prop_assert!(rset.check_invariants().is_empty(), "{:?}", rset.check_invariants());
    }

    #[test]
    fn theta_is_additive_over_edition_partitions(
        editions in prop::collection::vec(prop::collection::vec(0usize..12, 0..12), 1..6),
        split in 0usize..6,
    ) {
        let tables: Vec<EditionRankTable> = editions
            .iter()
            .enumerate()
            .map(|(k, names)| {
                let mut seen = BTreeSet::new();
                let unique: Vec<String> = names.iter().filter(|n| seen.insert(**n)).map(|n| format!("x{n}")).collect();
                EditionRankTable::from_ordered(&format!("e{k}"), unique)
            })
            .collect();
        let split = split.min(tables.len());
        let whole = theta_score(&tables, 5);
        let left = theta_score(&tables[..split], 5);
        let right = theta_score(&tables[split..], 5);
        let get = |s: &[grm_core::analysis::ThetaEntry], n: &str| {
            s.iter().find(|e| e.name == n).map_or(0, |e| e.theta)
        };
        for e in &whole {
            prop_assert_eq!(e.theta, get(&left, &e.name) + get(&right, &e.name));
        }
    }

    #[test]
    fn top_friend_survives_common_scaling(n in 30usize..80, seed: u64, scale in 0.01f64..100.0) {
        let rset = reduced(n, 6, seed);
        let mut scaled = rset.clone();
        scaled.grr *= scale;
        scaled.gqrnd *= scale;
        for name in &rset.names {
            let a = top_friends(&rset, name, 1, Component::GrrPlusGqrnd).unwrap();
            let b = top_friends(&scaled, name, 1, Component::GrrPlusGqrnd).unwrap();
            prop_assert_eq!(a[0].index, b[0].index);
        }
    }

    #[test]
    fn averaged_sets_keep_invariants(n in 30usize..80, seed: u64) {
        let g1 = random_graph(n, 3, 0.2, seed);
        let g2 = random_graph(n, 4, 0.1, seed ^ 1);
        let idx = random_subset(&g1, 5, seed).indices().to_vec();
        let sets: Vec<_> = [&g1, &g2]
            .iter()
            .map(|g| {
                let subset = grm_core::NodeSubset::new(g, idx.clone()).unwrap();
                reduce(&GoogleOperator::new(g, 0.85).unwrap(), &subset, &ReduceConfig::default()).unwrap()
            })
            .collect();
        let avg = average_reduced(&sets).unwrap();
        prop_assert!(avg.check_invariants().is_empty(), "{:?}", avg.check_invariants());
    }

    #[test]
    fn negated_delta_flips_the_estimate(n in 30usize..80, seed: u64) {
        let rset = reduced(n, 4, seed);
        let cfg = SensitivityConfig::default();
        let neg = SensitivityConfig { delta: -cfg.delta, ..cfg };
        let (p, c) = (&rset.names[0], &rset.names[1]);
        let a = sensitivity(&rset, p, c, &cfg).unwrap();
        let b = sensitivity(&rset, p, c, &neg).unwrap();
        for (x, y) in a.d.iter().zip(&b.d) {
            prop_assert!((x - y).abs() <= 10.0 * cfg.delta * cfg.delta, "{} vs {}", x, y);
        }
    }
}

#[test]
fn friendship_exports_are_deterministic() {
    let rset = reduced(90, 8, 5);
    let a = friendship_graph(&rset, 4, Component::GrrPlusGqrnd).unwrap();
    let b = friendship_graph(&rset.clone(), 4, Component::GrrPlusGqrnd).unwrap();
    assert_eq!(friendship_to_gexf(&a), friendship_to_gexf(&b));
    assert_eq!(friendship_to_dot(&a), friendship_to_dot(&b));
}

#[test]
fn closure_from_every_leader_equals_friendship_graph() {
    let rset = reduced(90, 8, 9);
    for component in [Component::Gqrnd, Component::GrrPlusGqrnd] {
        let all = leader_closure_graph(&rset, &rset.names, 3, component).unwrap();
        let full = friendship_graph(&rset, 3, component).unwrap();
        let a: BTreeSet<_> = all.edge_pairs().into_iter().collect();
        let b: BTreeSet<_> = full.edge_pairs().into_iter().collect();
        assert_eq!(a, b);
    }
}

#[test]
fn closure_follows_a_chain_with_one_friend() {
    let n = 4;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[((j + 1) % n, j)] = 0.5;
    }
    let rset = ReducedMatrixSet {
        names: (0..n).map(|i| format!("v{i}")).collect(),
        original_ids: None,
        gr: m.clone(),
        grr: m,
        gpr: DMatrix::zeros(n, n),
        gqrd: DMatrix::zeros(n, n),
        gqrnd: DMatrix::zeros(n, n),
        lambda_c: None,
        alpha: 0.85,
        edition_tag: "chain".into(),
        config: ReduceConfig::default(),
        diagnostics: Default::default(),
    };
    let g = leader_closure_graph(&rset, &["v0"], 1, Component::Grr).unwrap();
    assert_eq!(g.edge_pairs(), vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
}
