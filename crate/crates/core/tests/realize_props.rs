use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigidkit::fixtures::quad_d3;
use rigidkit::realize::{
    build_construction, drplan, edge_residuals, incremental_solve, max_rigid_subsystem, residual,
    solve, solve_with_plan, stage1_size, ConstructionError, DrPlanError, NodeKind, SolveConfig,
    SolveError,
};
use rigidkit::rigidity::{
    combinatorial_check, generic_rank, random_framework, RankBackend, RigidityClass,
};
use rigidkit::sparsity::is_tight;

#[test]
fn stage1_sizes() {
    let got: Vec<(usize, usize, usize)> = [(3, 1), (3, 2), (4, 2), (4, 3), (5, 2)]
        .iter()
        .map(|&(d, s)| {
            let z = stage1_size(d, s);
            (z.k, z.vertices, z.edges)
        })
        .collect();
    assert_eq!(
        got,
        vec![(1, 2, 2), (5, 5, 10), (2, 4, 6), (6, 6, 18), (2, 6, 8)]
    );
}

#[test]
fn construction_rejects_bad_shapes() {
    assert_eq!(
        build_construction(3, 3, 30, 0).unwrap_err(),
        ConstructionError::Shape { d: 3, s: 3 }
    );
    assert_eq!(
        build_construction(3, 2, 9, 0).unwrap_err(),
        ConstructionError::TooFewPins { m: 9, min: 10 }
    );
}

#[test]
fn construction_leaves_remainder_unused() {
    let (h, trace) = build_construction(3, 2, 13, 0).unwrap();
    assert_eq!((trace.pins_used, trace.remainder), (12, 1));
    assert_eq!(h.edges().len(), 12);
    assert_eq!(h.num_vertices(), 6);
}

#[test]
fn solve_realizes_quad_d3_from_generic_pins() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fr = random_framework(&quad_d3(), &mut rng);
    let rep = solve(
        &fr.instance,
        &SolveConfig::default(),
        None,
        &BTreeSet::new(),
    )
    .unwrap();
    assert!(rep.residual <= 1e-10);
    assert!(edge_residuals(&rep.framework).iter().all(|r| *r <= 1e-9));
}

#[test]
fn solve_rejects_bad_configuration() {
    let fr = random_framework(&quad_d3(), &mut ChaCha8Rng::seed_from_u64(1));
    let cfg = SolveConfig {
        restarts: 0,
        ..SolveConfig::default()
    };
    assert!(matches!(
        solve(&fr.instance, &cfg, None, &BTreeSet::new()),
        Err(SolveError::Config(_))
    ));
    let frozen: BTreeSet<usize> = [0].into();
    assert!(matches!(
        solve(&fr.instance, &SolveConfig::default(), None, &frozen),
        Err(SolveError::Init(_))
    ));
}

#[test]
fn frozen_vertices_stay_put() {
    let fr = random_framework(&quad_d3(), &mut ChaCha8Rng::seed_from_u64(3));
    let frozen: BTreeSet<usize> = [0, 1].into();
    let mut init = fr.points.clone();
    init[2] = vec![0.0, 0.0];
    init[3] = vec![0.5, 0.5];
    let rep = solve(&fr.instance, &SolveConfig::default(), Some(&init), &frozen).unwrap();
    assert_eq!(rep.framework.points[0], fr.points[0]);
    assert_eq!(rep.framework.points[1], fr.points[1]);
    assert!(residual(&rep.framework) <= 1e-9);
}

#[test]
fn drplan_rejects_non_tight_input() {
    let mut edges = quad_d3().edges().to_vec();
    edges.pop();
    let h = rigidkit::hypergraph::WeightedHypergraph::new(3, 4, edges, None).unwrap();
    assert!(matches!(drplan(&h), Err(DrPlanError::NotTight(_))));
}

#[test]
fn quad_d3_plan_solves() {
    let h = quad_d3();
    let plan = drplan(&h).unwrap();
    plan.validate(&h).unwrap();
    let fr = random_framework(&h, &mut ChaCha8Rng::seed_from_u64(8));
    let got = solve_with_plan(&fr.instance, &plan, &SolveConfig::default()).unwrap();
    assert!(residual(&got) <= 1e-9);
}

#[test]
fn max_rigid_subsystem_drops_surplus_copies() {
    let mut edges = quad_d3().edges().to_vec();
    edges.push(rigidkit::hypergraph::Hyperedge::new(vec![0, 3], 1));
    let h = rigidkit::hypergraph::WeightedHypergraph::new(3, 4, edges, None).unwrap();
    let core = max_rigid_subsystem(&h);
    assert!(core.tight && core.independent);
    assert_eq!(core.dropped, vec![(5, 0)]);
    assert_eq!(core.hypergraph.total_copies(), 8);
}

#[test]
fn max_rigid_subsystem_flags_dependent_core() {
    // v1 pinned, then two pins on the line v1 v3: v3 collapses onto v1
    let mut edges = quad_d3().edges().to_vec();
    edges[2].weight = 2;
    let h = rigidkit::hypergraph::WeightedHypergraph::new(3, 4, edges, None).unwrap();
    let core = max_rigid_subsystem(&h);
    assert!(core.tight && !core.independent);
    assert_eq!(core.dropped, vec![(4, 1)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructions_are_tight_and_minimally_rigid(
        (d, s) in prop_oneof![Just((3usize, 1usize)), Just((3, 2)), Just((4, 2)), Just((4, 3))],
        extra in 0usize..12,
        seed in any::<u64>(),
    ) {
        let m = stage1_size(d, s).edges + extra;
        let (h, trace) = build_construction(d, s, m, seed).unwrap();
        prop_assert!(is_tight(&h.expand(), d - 1));
        prop_assert!(h.edges().iter().all(|e| e.size() == s && e.weight == 1));
        prop_assert_eq!(trace.pins_used + trace.remainder, m);
        prop_assert_eq!((d - s) * h.edges().len(), (d - 1) * h.num_vertices());
        prop_assert_eq!(generic_rank(&h, 3, seed, RankBackend::PrimeField), h.freedom());
        prop_assert_eq!(combinatorial_check(&h).class, RigidityClass::MinimallyRigid);
    }

    #[test]
    fn incremental_solve_matches_planted_pins(extra in 0usize..4, seed in 0u64..1000) {
        let m = 10 + 2 * extra;
        let (h, trace) = build_construction(3, 2, m, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fr = random_framework(&h, &mut rng);
        let pins: Vec<Vec<f64>> = fr.instance.pins.iter().map(|p| p[0].clone()).collect();
        let cfg = SolveConfig { seed, ..SolveConfig::default() };
        if let Ok((points, stats)) = incremental_solve(&h, &trace, &pins, &cfg) {
            prop_assert_eq!(stats.block_restarts.len(), trace.blocks.len());
            let got = rigidkit::rigidity::Framework::new(fr.instance.clone(), points).unwrap();
            prop_assert!(residual(&got) <= 1e-8);
        }
    }

    #[test]
    fn drplan_nodes_are_rigid_and_nested(extra in 0usize..6, seed in any::<u64>()) {
        let (h, _) = build_construction(3, 2, 10 + 2 * extra, seed).unwrap();
        let plan = drplan(&h).unwrap();
        prop_assert!(plan.validate(&h).is_ok());
        for node in &plan.nodes {
            if node.kind == NodeKind::Rigid {
                let copies: usize = node.edges.iter().map(|&k| h.copies(k)).sum();
                prop_assert_eq!(copies, 2 * node.vertices.len());
            }
            for &c in &node.children {
                let inner: BTreeSet<usize> = plan.nodes[c].vertices.iter().copied().collect();
                prop_assert!(inner.iter().all(|v| node.vertices.contains(v)));
            }
        }
    }
}
