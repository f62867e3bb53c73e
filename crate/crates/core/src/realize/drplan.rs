//! Decomposition-recombination plans for minimally rigid systems, their
//! validation, realization along a plan, and extraction of a maximal
//! independent subsystem from overconstrained input.
//!
//! A vertex set is rigid when its induced copies number exactly
//! `(d - 1)` per vertex. Rigid sets of a tight hypergraph are closed under
//! union and intersection, so the largest rigid subset of `W \ {v}` is
//! unique and every vertex-maximal proper rigid subset of `W` is a connected
//! component of one of them.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::solve::{solve_accepting, SolveConfig, SolveError};
use crate::hypergraph::{PinnedInstance, Point, WeightedHypergraph};
use crate::rigidity::{barycentric, generic_rank, Framework, RankBackend};
use crate::sparsity::{pebble_game, PebbleGame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Rigid,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrNode {
    pub kind: NodeKind,
    pub vertices: Vec<usize>,
    /// Hyperedges of the induced subgraph.
    pub edges: Vec<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrPlan {
    pub nodes: Vec<DrNode>,
    pub roots: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DrPlanError {
    #[error("hypergraph is not (d-1, 0)-tight: {0}")]
    NotTight(String),
    #[error("node {node}: {source}")]
    Solve { node: usize, source: SolveError },
}

fn induced_edges(h: &WeightedHypergraph, w: &BTreeSet<usize>) -> Vec<usize> {
    (0..h.edges().len())
        .filter(|&k| h.edges()[k].vertices.iter().all(|v| w.contains(v)))
        .collect()
}

fn induced_copies(h: &WeightedHypergraph, w: &BTreeSet<usize>) -> usize {
    induced_edges(h, w).iter().map(|&k| h.copies(k)).sum()
}

/// Rigid in a sparse hypergraph: exactly `(d - 1) |W|` induced copies.
fn is_rigid_set(h: &WeightedHypergraph, w: &BTreeSet<usize>) -> bool {
    !w.is_empty() && induced_copies(h, w) == (h.dim() - 1) * w.len()
}

fn components(h: &WeightedHypergraph, w: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let sub = h.induced_subgraph(w);
    sub.hypergraph
        .components()
        .into_iter()
        .map(|c| c.into_iter().map(|v| sub.vertex_map[v]).collect())
        .collect()
}

fn is_connected(h: &WeightedHypergraph, w: &BTreeSet<usize>) -> bool {
    components(h, w).len() == 1
}

/// Largest rigid subset of `w`.
fn max_rigid_subset(h: &WeightedHypergraph, w: &BTreeSet<usize>) -> BTreeSet<usize> {
    let sub = h.induced_subgraph(w);
    let mh = sub.hypergraph.expand();
    let mut game = PebbleGame::new(mh.num_vertices, h.dim() - 1, 0);
    for e in &mh.edges {
        game.try_add(&e.vertices);
    }
    game.max_tight_set()
        .into_iter()
        .map(|v| sub.vertex_map[v])
        .collect()
}

/// Vertex-maximal connected rigid proper subsets of `w`, sorted.
pub fn maximal_rigid_proper_subsets(
    h: &WeightedHypergraph,
    w: &BTreeSet<usize>,
) -> Vec<BTreeSet<usize>> {
    let mut cands: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for &v in w {
        let mut rest = w.clone();
        rest.remove(&v);
        let r = max_rigid_subset(h, &rest);
        if !r.is_empty() {
            cands.extend(components(h, &r));
        }
    }
    let all: Vec<BTreeSet<usize>> = cands.into_iter().collect();
    all.iter()
        .filter(|c| !all.iter().any(|o| o.len() > c.len() && c.is_subset(o)))
        .cloned()
        .collect()
}

/// Canonical DR-plan: children are the vertex-maximal rigid proper subsets
/// when they are pairwise disjoint (plus the hyperedges none of them
/// contains), otherwise the first two that share a vertex.
pub fn drplan(h: &WeightedHypergraph) -> Result<DrPlan, DrPlanError> {
    let mh = h.expand();
    if mh.len() != h.freedom() {
        return Err(DrPlanError::NotTight(format!(
            "{} copies for {} coordinates",
            mh.len(),
            h.freedom()
        )));
    }
    if !pebble_game(&mh, h.dim() - 1, 0).sparse {
        return Err(DrPlanError::NotTight(
            "some vertex subset is over-counted".into(),
        ));
    }
    let mut plan = DrPlan {
        nodes: Vec::new(),
        roots: Vec::new(),
    };
    for comp in h.components() {
        let id = build_node(h, comp, &mut plan);
        plan.roots.push(id);
    }
    Ok(plan)
}

fn leaf(h: &WeightedHypergraph, k: usize, plan: &mut DrPlan) -> usize {
    plan.nodes.push(DrNode {
        kind: NodeKind::Leaf,
        vertices: h.edges()[k].vertices.clone(),
        edges: vec![k],
        children: Vec::new(),
    });
    plan.nodes.len() - 1
}

fn build_node(h: &WeightedHypergraph, w: BTreeSet<usize>, plan: &mut DrPlan) -> usize {
    let edges = induced_edges(h, &w);
    if edges.len() == 1 && h.edges()[edges[0]].size() == w.len() {
        return leaf(h, edges[0], plan);
    }
    let maximal = maximal_rigid_proper_subsets(h, &w);
    let crossing = maximal.iter().enumerate().find_map(|(i, a)| {
        maximal[i + 1..]
            .iter()
            .find(|b| !a.is_disjoint(b))
            .map(|b| (a.clone(), b.clone()))
    });
    let mut children = Vec::new();
    match crossing {
        Some((a, b)) => {
            children.push(build_node(h, a, plan));
            children.push(build_node(h, b, plan));
        }
        None => {
            for c in &maximal {
                children.push(build_node(h, c.clone(), plan));
            }
            for &k in &edges {
                if !maximal
                    .iter()
                    .any(|c| h.edges()[k].vertices.iter().all(|v| c.contains(v)))
                {
                    children.push(leaf(h, k, plan));
                }
            }
        }
    }
    plan.nodes.push(DrNode {
        kind: NodeKind::Rigid,
        vertices: w.into_iter().collect(),
        edges,
        children,
    });
    plan.nodes.len() - 1
}

impl DrPlan {
    pub fn fan_in(&self, node: usize) -> usize {
        self.nodes[node].children.len()
    }

    pub fn max_fan_in(&self) -> usize {
        (0..self.nodes.len())
            .map(|i| self.fan_in(i))
            .max()
            .unwrap_or(0)
    }

    /// Children before parents, roots last.
    pub fn postorder(&self) -> Vec<usize> {
        fn go(plan: &DrPlan, n: usize, out: &mut Vec<usize>) {
            for &c in &plan.nodes[n].children {
                go(plan, c, out);
            }
            out.push(n);
        }
        let mut out = Vec::with_capacity(self.nodes.len());
        for &r in &self.roots {
            go(self, r, &mut out);
        }
        out
    }

    /// Checks the node invariants and the two canonical child conditions.
    pub fn validate(&self, h: &WeightedHypergraph) -> Result<(), String> {
        let root_sets: BTreeSet<Vec<usize>> = self
            .roots
            .iter()
            .map(|&r| self.nodes[r].vertices.clone())
            .collect();
        let comps: BTreeSet<Vec<usize>> = h
            .components()
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        if root_sets != comps {
            return Err("roots are not the connected components".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            let w: BTreeSet<usize> = node.vertices.iter().copied().collect();
            if !is_connected(h, &w) {
                return Err(format!("node {i}: not connected"));
            }
            match node.kind {
                NodeKind::Leaf => {
                    if !node.children.is_empty() {
                        return Err(format!("node {i}: leaf with children"));
                    }
                    if node.edges.len() != 1 || h.edges()[node.edges[0]].vertices != node.vertices {
                        return Err(format!("node {i}: leaf is not a single hyperedge"));
                    }
                }
                NodeKind::Rigid => {
                    if node.edges != induced_edges(h, &w) {
                        return Err(format!("node {i}: edge list is not the induced subgraph"));
                    }
                    if !is_rigid_set(h, &w) {
                        return Err(format!("node {i}: not rigid"));
                    }
                    if node.children.is_empty() {
                        return Err(format!("node {i}: internal node without children"));
                    }
                    self.validate_children(h, i, &w)?;
                }
            }
        }
        Ok(())
    }

    fn validate_children(
        &self,
        h: &WeightedHypergraph,
        i: usize,
        w: &BTreeSet<usize>,
    ) -> Result<(), String> {
        let node = &self.nodes[i];
        let union: BTreeSet<usize> = node
            .children
            .iter()
            .flat_map(|&c| self.nodes[c].vertices.iter().copied())
            .collect();
        if &union != w {
            return Err(format!("node {i}: children do not cover its vertices"));
        }
        let maximal = maximal_rigid_proper_subsets(h, w);
        let rigid_children: Vec<BTreeSet<usize>> = node
            .children
            .iter()
            .filter(|&&c| self.nodes[c].kind == NodeKind::Rigid)
            .map(|&c| self.nodes[c].vertices.iter().copied().collect())
            .collect();
        for c in &rigid_children {
            if !maximal.contains(c) {
                return Err(format!(
                    "node {i}: child {c:?} is not a vertex-maximal rigid proper subgraph"
                ));
            }
        }
        let pairwise_disjoint = maximal
            .iter()
            .enumerate()
            .all(|(a, x)| maximal[a + 1..].iter().all(|y| x.is_disjoint(y)));
        if pairwise_disjoint {
            // leaf children that are themselves vertex-maximal rigid sets count too
            let all_children: BTreeSet<BTreeSet<usize>> = node
                .children
                .iter()
                .map(|&c| self.nodes[c].vertices.iter().copied().collect())
                .collect();
            if !maximal.iter().all(|m| all_children.contains(m)) {
                return Err(format!(
                    "node {i}: a disjoint vertex-maximal rigid subgraph is missing"
                ));
            }
        } else if node.children.len() != 2
            || rigid_children.len() != 2
            || rigid_children[0].is_disjoint(&rigid_children[1])
        {
            return Err(format!(
                "node {i}: expected exactly two intersecting children"
            ));
        }
        Ok(())
    }
}

/// Realizes a pinned instance along its DR-plan: each rigid node solves for
/// its vertices not fixed by earlier nodes, using the hyperedges that touch
/// them, with already solved vertices frozen.
pub fn solve_with_plan(
    inst: &PinnedInstance,
    plan: &DrPlan,
    cfg: &SolveConfig,
) -> Result<Framework, DrPlanError> {
    solve_with_plan_checked(inst, plan, cfg, &[], CHECK_TOL)
}

/// Relative tolerance of [`solve_with_plan_checked`]'s pin checks.
pub const CHECK_TOL: f64 = 1e-7;

/// [`solve_with_plan`] with extra pins that are not part of the system, each
/// given with the vertex set whose span must contain it. A node rejects a root
/// unless every check whose vertices lie inside the node holds within `tol`;
/// a node whose vertices are all solved already fails if one of them does not.
pub fn solve_with_plan_checked(
    inst: &PinnedInstance,
    plan: &DrPlan,
    cfg: &SolveConfig,
    checks: &[(Vec<usize>, Point)],
    tol: f64,
) -> Result<Framework, DrPlanError> {
    let h = &inst.hypergraph;
    let n = h.num_vertices();
    let mut points: Vec<Point> = vec![vec![0.0; h.dim() - 1]; n];
    let mut fixed = vec![false; n];
    for id in plan.postorder() {
        let node = &plan.nodes[id];
        if node.kind == NodeKind::Leaf {
            continue;
        }
        let w: BTreeSet<usize> = node.vertices.iter().copied().collect();
        let inside: Vec<&(Vec<usize>, Point)> = checks
            .iter()
            .filter(|(vs, _)| vs.iter().all(|v| w.contains(v)))
            .collect();
        if node.vertices.iter().all(|&v| fixed[v]) {
            if inside
                .iter()
                .all(|(vs, pin)| on_span(&points, vs, pin, tol))
            {
                continue;
            }
            let best_residual = f64::INFINITY;
            return Err(DrPlanError::Solve {
                node: id,
                source: SolveError::NoRealSolutionFound {
                    best_residual,
                    restarts: 0,
                },
            });
        }
        let (sub, map) = inst.induced(&w);
        let node_cfg = SolveConfig {
            seed: cfg.seed.wrapping_add(id as u64),
            ..*cfg
        };
        let mut rng = ChaCha8Rng::seed_from_u64(node_cfg.seed ^ 0x5eed);
        // free vertices start at the centroid of their incident pins
        let local_init: Vec<Point> = map
            .vertex_map
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if fixed[v] {
                    return points[v].clone();
                }
                let near: Vec<&Point> = sub
                    .hypergraph
                    .edges()
                    .iter()
                    .zip(&sub.pins)
                    .filter(|(e, _)| e.contains(i))
                    .flat_map(|(_, ps)| ps.iter())
                    .collect();
                if near.is_empty() {
                    return (0..h.dim() - 1)
                        .map(|_| rng.random_range(-1.0..1.0))
                        .collect();
                }
                (0..h.dim() - 1)
                    .map(|j| near.iter().map(|p| p[j]).sum::<f64>() / near.len() as f64)
                    .collect()
            })
            .collect();
        let frozen: BTreeSet<usize> = (0..map.vertex_map.len())
            .filter(|&i| fixed[map.vertex_map[i]])
            .collect();
        let local_checks: Vec<(Vec<usize>, &Point)> = inside
            .iter()
            .map(|(vs, pin)| {
                (
                    vs.iter()
                        .map(|v| map.vertex_map.binary_search(v).expect("inside node"))
                        .collect(),
                    pin,
                )
            })
            .collect();
        let accept = |pts: &[Point]| {
            local_checks
                .iter()
                .all(|(vs, pin)| on_span(pts, vs, pin, tol))
        };
        let rep = solve_accepting(&sub, &node_cfg, Some(&local_init), &frozen, &accept)
            .map_err(|source| DrPlanError::Solve { node: id, source })?;
        for (i, &v) in map.vertex_map.iter().enumerate() {
            points[v] = rep.framework.points[i].clone();
            fixed[v] = true;
        }
    }
    Ok(Framework {
        instance: inst.clone(),
        points,
    })
}

fn on_span(points: &[Point], vs: &[usize], pin: &[f64], tol: f64) -> bool {
    let span: Vec<&[f64]> = vs.iter().map(|&v| points[v].as_slice()).collect();
    barycentric(&span, pin, tol).is_ok()
}

/// Pin slots kept by [`max_rigid_subsystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct RigidCore {
    pub hypergraph: WeightedHypergraph,
    /// `kept[k]` lists the accepted pin indices of original hyperedge `k`.
    pub kept: Vec<Vec<usize>>,
    /// Original index of each hyperedge of `hypergraph`.
    pub edge_map: Vec<usize>,
    /// `(k, l)` pin slots that were rejected.
    pub dropped: Vec<(usize, usize)>,
    /// Copies of the core equal `(d - 1) |V|`.
    pub tight: bool,
    /// Generic rank equals the copy count, confirming independence.
    pub independent: bool,
}

/// Greedy maximal independent set of pin slots, visiting `(k, l)` by edge
/// then pin index.
pub fn max_rigid_subsystem(h: &WeightedHypergraph) -> RigidCore {
    let order: Vec<(usize, usize)> = h
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(k, e)| (0..e.weight).map(move |l| (k, l)))
        .collect();
    max_rigid_subsystem_ordered(h, &order)
}

/// [`max_rigid_subsystem`] with an explicit slot order; slots missing from
/// `order` are dropped.
pub fn max_rigid_subsystem_ordered(h: &WeightedHypergraph, order: &[(usize, usize)]) -> RigidCore {
    let d = h.dim();
    let mut game = PebbleGame::new(h.num_vertices(), d - 1, 0);
    let mut kept = vec![Vec::new(); h.edges().len()];
    let mut dropped = Vec::new();
    for &(k, l) in order {
        let e = &h.edges()[k];
        if game.try_add_group(&e.vertices, d - e.size()).is_some() {
            kept[k].push(l);
        } else {
            dropped.push((k, l));
        }
    }
    let seen: BTreeSet<(usize, usize)> = order.iter().copied().collect();
    for (k, e) in h.edges().iter().enumerate() {
        for l in 0..e.weight {
            if !seen.contains(&(k, l)) {
                dropped.push((k, l));
            }
        }
    }
    for k in &mut kept {
        k.sort_unstable();
    }
    let weights: Vec<usize> = kept.iter().map(Vec::len).collect();
    let (core, edge_map) = h.reweighted(&weights);
    let tight = core.total_copies() == core.freedom();
    let independent = generic_rank(&core, 3, 0, RankBackend::PrimeField) == core.total_copies();
    RigidCore {
        hypergraph: core,
        kept,
        edge_map,
        dropped,
        tight,
        independent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{quad_d3, pinned_point};
    use crate::hypergraph::Hyperedge;

    #[test]
    fn quad_d3_plan_leaves_are_the_hyperedges() {
        let h = quad_d3();
        let plan = drplan(&h).unwrap();
        plan.validate(&h).unwrap();
        assert_eq!(plan.roots.len(), 1);
        let root = &plan.nodes[plan.roots[0]];
        let leaves: BTreeSet<usize> = root
            .children
            .iter()
            .flat_map(|&c| plan.nodes[c].edges.clone())
            .collect();
        assert_eq!(leaves, (0..5).collect());
        assert!(root
            .children
            .iter()
            .all(|&c| plan.nodes[c].kind == NodeKind::Leaf));
        assert_eq!(plan.max_fan_in(), 5);
    }

    #[test]
    fn single_hyperedge_plan() {
        let h = pinned_point(3);
        let plan = drplan(&h).unwrap();
        plan.validate(&h).unwrap();
        assert_eq!(plan.nodes.len(), 1);
        assert_eq!(plan.nodes[0].kind, NodeKind::Leaf);
    }

    #[test]
    fn non_tight_input_rejected() {
        let mut edges = quad_d3().edges().to_vec();
        edges[4].weight = 1;
        let h = WeightedHypergraph::new(3, 4, edges, None).unwrap();
        assert!(matches!(drplan(&h), Err(DrPlanError::NotTight(_))));
    }

    #[test]
    fn core_of_rigid_input_is_identity() {
        let core = max_rigid_subsystem(&quad_d3());
        assert_eq!(core.hypergraph, quad_d3());
        assert!(core.dropped.is_empty() && core.tight && core.independent);
    }

    #[test]
    fn one_redundant_pin_is_dropped() {
        let mut edges = quad_d3().edges().to_vec();
        edges.push(Hyperedge::new(vec![0, 3], 1));
        let h = WeightedHypergraph::new(3, 4, edges, None).unwrap();
        let core = max_rigid_subsystem(&h);
        assert_eq!(core.dropped, vec![(5, 0)]);
        assert_eq!(core.hypergraph.total_copies(), 8);
        assert!(core.tight && core.independent);
    }
}
