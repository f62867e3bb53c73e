//! Small named hypergraphs used across tests, the CLI, and documentation.

use crate::hypergraph::{Hyperedge, WeightedHypergraph};

fn named(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

/// Minimally rigid system in `d = 3`: `e1={v1}, e2={v2}, e3={v1,v3},
/// e4={v2,v4}, e5={v3,v4}` with `m5 = 2` and all other weights 1.
pub fn quad_d3() -> WeightedHypergraph {
    let e = |vs: &[usize], w| Hyperedge::new(vs.to_vec(), w);
    WeightedHypergraph::new(
        3,
        4,
        vec![
            e(&[0], 1),
            e(&[1], 1),
            e(&[0, 2], 1),
            e(&[1, 3], 1),
            e(&[2, 3], 2),
        ],
        Some(named(4)),
    )
    .expect("fixture is valid")
}

/// A `d = 4` system that passes the count and labeling conditions but whose
/// four pins on `e1 = {v1,v2}`, `e4 = {v2,v3}` and `e5 = {v1,v2,v3}` (m = 2)
/// are forced into the plane spanned by `v1, v2, v3`.
pub fn forced_coplanar_d4() -> WeightedHypergraph {
    let e = |vs: &[usize], w| Hyperedge::new(vs.to_vec(), w);
    WeightedHypergraph::new(
        4,
        4,
        vec![
            e(&[0, 1], 1),
            e(&[3], 1),
            e(&[2], 1),
            e(&[1, 2], 1),
            e(&[0, 1, 2], 2),
        ],
        Some(named(4)),
    )
    .expect("fixture is valid")
}

/// Single hyperedge `{v1, v2}` with two pins in `d = 4`.
pub fn double_pinned_line_d4() -> WeightedHypergraph {
    WeightedHypergraph::new(4, 2, vec![Hyperedge::new(vec![0, 1], 2)], Some(named(2)))
        .expect("fixture is valid")
}

/// One vertex pinned to one point.
pub fn pinned_point(d: usize) -> WeightedHypergraph {
    WeightedHypergraph::new(d, 1, vec![Hyperedge::new(vec![0], 1)], Some(named(1)))
        .expect("fixture is valid")
}
