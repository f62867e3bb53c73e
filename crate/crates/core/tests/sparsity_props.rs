use proptest::prelude::*;
use rigidkit::fixtures::quad_d3;
use rigidkit::hypergraph::MultiHypergraph;
use rigidkit::realize::build_construction;
use rigidkit::sparsity::{
    brute_force_sparse, is_tight, map_decompose, map_decompose_ordered, pebble_game,
};

fn multi(n: usize, edges: &[Vec<usize>]) -> MultiHypergraph {
    let mut mh = MultiHypergraph::new(n);
    for (i, e) in edges.iter().enumerate() {
        let mut vs = e.clone();
        vs.sort_unstable();
        vs.dedup();
        mh.push(i, vs);
    }
    mh
}

fn edge_lists() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (1usize..=6).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(prop::collection::vec(0..n, 1..=3), 0..14),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pebble_game_matches_brute_force((n, edges) in edge_lists(), k in 1usize..=3) {
        let mh = multi(n, &edges);
        prop_assert_eq!(pebble_game(&mh, k, 0).sparse, brute_force_sparse(&mh, k).unwrap());
    }

    #[test]
    fn accepted_prefix_is_sparse((n, edges) in edge_lists(), k in 1usize..=3) {
        let mh = multi(n, &edges);
        let out = pebble_game(&mh, k, 0);
        let kept: Vec<Vec<usize>> = mh
            .edges
            .iter()
            .zip(&out.state.orientation)
            .filter(|(_, t)| t.is_some())
            .map(|(e, _)| e.vertices.clone())
            .collect();
        prop_assert!(brute_force_sparse(&multi(n, &kept), k).unwrap());
        let pebbles: usize = out.state.pebbles.iter().sum();
        prop_assert_eq!(pebbles + kept.len(), k * n);
    }

    #[test]
    fn decomposition_valid_in_any_order(seed in any::<u64>(), m in 10usize..=20) {
        let (h, _) = build_construction(3, 2, m, seed).unwrap();
        let mh = h.expand();
        let mut order: Vec<usize> = (0..mh.len()).collect();
        let mut state = seed | 1;
        for i in (1..order.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let md = map_decompose_ordered(&mh, 2, &order).unwrap();
        prop_assert!(md.validate(&mh).is_ok());
    }
}

#[test]
fn quad_d3_expansion_is_tight_and_splits_into_two_maps() {
    let mh = quad_d3().expand();
    assert!(is_tight(&mh, 2));
    let md = map_decompose(&mh, 2).unwrap();
    md.validate(&mh).unwrap();
    for j in 0..2 {
        assert_eq!(md.map_index.iter().filter(|&&x| x == j).count(), 4);
    }
}

#[test]
fn tightness_under_copy_changes() {
    let h = quad_d3();
    let mut mh = h.expand();
    mh.remove_copy(4);
    assert!(!is_tight(&mh, 2));
    let mut over = h.expand();
    over.push(4, vec![2, 3]);
    assert!(!pebble_game(&over, 2, 0).sparse);
}

#[test]
fn pair_subgraph_count() {
    // {v3, v4} with e5 expanded: 2 copies <= 2 * 2
    let mh = multi(2, &[vec![0, 1], vec![0, 1]]);
    assert!(brute_force_sparse(&mh, 2).unwrap());
}
