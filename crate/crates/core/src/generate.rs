//! Enumerated and random weighted hypergraphs for experiments and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hypergraph::{Hyperedge, WeightedHypergraph};

/// Bounds of an exhaustive family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyBounds {
    pub dim: usize,
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_weight: usize,
}

/// Candidate hyperedges on `n` vertices: every nonempty subset of size below
/// `d` with every admissible weight, in (size, lexicographic, weight) order.
fn candidates(dim: usize, n: usize, max_weight: usize) -> Vec<Vec<Hyperedge>> {
    let mut sets: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&v| mask & (1 << v) != 0).collect::<Vec<_>>())
        .filter(|s| s.len() < dim)
        .collect();
    sets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    sets.into_iter()
        .map(|s| {
            (1..=max_weight.min(s.len()))
                .map(|w| Hyperedge::new(s.clone(), w))
                .collect()
        })
        .collect()
}

/// Every weighted hypergraph within the bounds: `1..=max_vertices` vertices
/// and `0..=max_edges` hyperedges on distinct vertex sets.
pub fn exhaustive_family(b: FamilyBounds) -> Vec<WeightedHypergraph> {
    let mut out = Vec::new();
    for n in 1..=b.max_vertices {
        let cands = candidates(b.dim, n, b.max_weight);
        let mut chosen = Vec::new();
        extend(&cands, 0, b.max_edges, &mut chosen, &mut |edges| {
            out.push(
                WeightedHypergraph::new(b.dim, n, edges.to_vec(), None)
                    .expect("enumerated edges are valid"),
            );
        });
    }
    out
}

fn extend(
    cands: &[Vec<Hyperedge>],
    start: usize,
    left: usize,
    chosen: &mut Vec<Hyperedge>,
    emit: &mut dyn FnMut(&[Hyperedge]),
) {
    emit(chosen);
    if left == 0 {
        return;
    }
    for i in start..cands.len() {
        for e in &cands[i] {
            chosen.push(e.clone());
            extend(cands, i + 1, left - 1, chosen, emit);
            chosen.pop();
        }
    }
}

/// Random hypergraph with `n` vertices and up to `edges` hyperedges on
/// distinct vertex sets, each of size below `d`, weight in `1..=max_weight`.
pub fn random_hypergraph<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
    edges: usize,
    max_weight: usize,
) -> WeightedHypergraph {
    let mut list: Vec<Hyperedge> = Vec::new();
    for _ in 0..edges {
        let size = rng.random_range(1..dim.min(n + 1));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        vs.truncate(size);
        vs.sort_unstable();
        if list.iter().any(|e| e.vertices == vs) {
            continue;
        }
        let w = rng.random_range(1..=max_weight.min(size));
        list.push(Hyperedge::new(vs, w));
    }
    WeightedHypergraph::new(dim, n, list, None).expect("generated edges are valid")
}

/// Random hypergraph whose copy count equals `(d - 1) n`: hyperedges are
/// drawn until the count is met, skipping any draw that would overshoot.
/// Returns `None` if `attempts` draws do not reach the count.
pub fn random_tight_count<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
    max_weight: usize,
    attempts: usize,
) -> Option<WeightedHypergraph> {
    let target = (dim - 1) * n;
    let mut list: Vec<Hyperedge> = Vec::new();
    let mut total = 0;
    for _ in 0..attempts {
        if total == target {
            break;
        }
        let size = rng.random_range(1..dim.min(n + 1));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        vs.truncate(size);
        vs.sort_unstable();
        let w = rng.random_range(1..=max_weight.min(size));
        let copies = w * (dim - size);
        if total + copies > target || list.iter().any(|e| e.vertices == vs) {
            continue;
        }
        total += copies;
        list.push(Hyperedge::new(vs, w));
    }
    (total == target)
        .then(|| WeightedHypergraph::new(dim, n, list, None).expect("generated edges are valid"))
}
