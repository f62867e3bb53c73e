//! The staged construction of a minimally rigid hypergraph with one pin per
//! hyperedge, and the block-by-block solver that realizes it.
//!
//! Stage 1 builds `H0` on `k (d - s)` vertices with the modified pebble game
//! (every add-edge move adds the `d - s` copies of one `s`-set). Stage 2
//! appends `d - s` vertices and `d - 1` hyperedges touching them, with pebbles
//! and pebble shifts confined to the new vertices; the vertices of `H0` it
//! uses are the base. Each further block copies the Stage 2 template onto the
//! same base.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::solve::{solve, SolveConfig, SolveError};
use crate::hypergraph::{Hyperedge, PinnedInstance, Point, WeightedHypergraph};
use crate::rigidity::{generic_rank, RankBackend};
use crate::sparsity::PebbleGame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage1Size {
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Smallest `k` with `C(k (d - s), s) >= k (d - 1)`.
pub fn stage1_size(d: usize, s: usize) -> Stage1Size {
    assert!(1 <= s && s < d, "need 1 <= s < d");
    let k = (1..)
        .find(|&k| binomial(k * (d - s), s) >= (k * (d - 1)) as u128)
        .expect("binomial grows");
    Stage1Size {
        k,
        vertices: k * (d - s),
        edges: k * (d - 1),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("need 1 <= s < d, got d = {d}, s = {s}")]
    Shape { d: usize, s: usize },
    #[error("m = {m} is below the Stage 1 minimum of {min} pins")]
    TooFewPins { m: usize, min: usize },
    #[error("the pebble game could not build a tight Stage 1 hypergraph")]
    Stage1,
    #[error("no Stage 2 template with full generic rank exists")]
    Stage2,
}

/// Stage 2 block shape: edges over slots, slot `i < base.len()` standing
/// for `base[i]` and slot `base.len() + j` for the `j`-th new vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTemplate {
    pub base: Vec<usize>,
    pub new_vertices: usize,
    pub edges: Vec<Vec<usize>>,
}

impl BlockTemplate {
    fn instantiate(&self, first_new: usize) -> Vec<Vec<usize>> {
        let b = self.base.len();
        self.edges
            .iter()
            .map(|slots| {
                let mut vs: Vec<usize> = slots
                    .iter()
                    .map(|&i| {
                        if i < b {
                            self.base[i]
                        } else {
                            first_new + i - b
                        }
                    })
                    .collect();
                vs.sort_unstable();
                vs
            })
            .collect()
    }
}

/// One appended block: its new vertices and the range of its hyperedges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub vertices: Vec<usize>,
    pub edges: std::ops::Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub d: usize,
    pub s: usize,
    pub stage1: Stage1Size,
    pub template: Option<BlockTemplate>,
    /// Block 0 is Stage 2, the rest are Stage 3.
    pub blocks: Vec<Block>,
    pub pins_used: usize,
    /// Pins left over because `m - |E0|` is not a multiple of `d - 1`.
    pub remainder: usize,
}

impl ConstructionTrace {
    pub fn base(&self) -> &[usize] {
        self.template.as_ref().map_or(&[], |t| &t.base)
    }
}

fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, s, &mut Vec::new(), &mut out);
    out
}

fn stage1(d: usize, s: usize, size: Stage1Size) -> Result<Vec<Vec<usize>>, ConstructionError> {
    let mut game = PebbleGame::new(size.vertices, d - 1, 0);
    let mut edges = Vec::with_capacity(size.edges);
    for set in subsets(size.vertices, s) {
        if edges.len() == size.edges {
            break;
        }
        if game.try_add_group(&set, d - s).is_some() {
            edges.push(set);
        }
    }
    if edges.len() != size.edges || game.remaining() != 0 {
        return Err(ConstructionError::Stage1);
    }
    Ok(edges)
}

/// Searches Stage 2 edge sets in candidate order (fewest new vertices first,
/// then lexicographic) with the restricted pebble game, keeping the first
/// whose extension of `H0` has full generic rank.
fn stage2(
    d: usize,
    s: usize,
    h0_edges: &[Vec<usize>],
    n0: usize,
    seed: u64,
) -> Result<BlockTemplate, ConstructionError> {
    let n1 = d - s;
    let n = n0 + n1;
    let mut cands: Vec<Vec<usize>> = subsets(n, s)
        .into_iter()
        .filter(|e| e.iter().any(|&v| v >= n0))
        .collect();
    cands.sort_by_key(|e| (e.iter().filter(|&&v| v >= n0).count(), e.clone()));
    let mut pebbles = vec![0; n];
    let mut movable = vec![false; n];
    for v in n0..n {
        pebbles[v] = d - 1;
        movable[v] = true;
    }
    let game = PebbleGame::with_pebbles(pebbles, d - 1, 0, movable);

    struct Ctx<'a> {
        d: usize,
        s: usize,
        n: usize,
        h0: &'a [Vec<usize>],
        cands: Vec<Vec<usize>>,
        seed: u64,
    }
    fn go(
        ctx: &Ctx,
        start: usize,
        game: &PebbleGame,
        chosen: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if chosen.len() == ctx.d - 1 {
            let mut edges: Vec<Hyperedge> = ctx
                .h0
                .iter()
                .map(|e| Hyperedge::new(e.clone(), 1))
                .collect();
            edges.extend(
                chosen
                    .iter()
                    .map(|&i| Hyperedge::new(ctx.cands[i].clone(), 1)),
            );
            let h = WeightedHypergraph::new(ctx.d, ctx.n, edges, None).ok()?;
            let full = generic_rank(&h, 2, ctx.seed, RankBackend::PrimeField) == h.freedom();
            return full.then(|| chosen.clone());
        }
        for i in start..ctx.cands.len() {
            let mut g = game.clone();
            if g.try_add_group(&ctx.cands[i], ctx.d - ctx.s).is_some() {
                chosen.push(i);
                if let Some(found) = go(ctx, i + 1, &g, chosen) {
                    return Some(found);
                }
                chosen.pop();
            }
        }
        None
    }
    let ctx = Ctx {
        d,
        s,
        n,
        h0: h0_edges,
        cands,
        seed,
    };
    let chosen = go(&ctx, 0, &game, &mut Vec::new()).ok_or(ConstructionError::Stage2)?;
    let edges: Vec<Vec<usize>> = chosen.iter().map(|&i| ctx.cands[i].clone()).collect();
    let base: Vec<usize> = edges
        .iter()
        .flatten()
        .copied()
        .filter(|&v| v < n0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let slot = |v: usize| {
        if v < n0 {
            base.iter().position(|&b| b == v).expect("base vertex")
        } else {
            base.len() + v - n0
        }
    };
    let edges = edges
        .iter()
        .map(|e| e.iter().map(|&v| slot(v)).collect())
        .collect();
    Ok(BlockTemplate {
        base,
        new_vertices: n1,
        edges,
    })
}

/// Builds the staged hypergraph consuming `m` pins, one per hyperedge.
/// `seed` drives the generic-rank check of the Stage 2 template.
pub fn build_construction(
    d: usize,
    s: usize,
    m: usize,
    seed: u64,
) -> Result<(WeightedHypergraph, ConstructionTrace), ConstructionError> {
    if s == 0 || s >= d {
        return Err(ConstructionError::Shape { d, s });
    }
    let size = stage1_size(d, s);
    if m < size.edges {
        return Err(ConstructionError::TooFewPins { m, min: size.edges });
    }
    let h0 = stage1(d, s, size)?;
    let nblocks = (m - size.edges) / (d - 1);
    let remainder = (m - size.edges) % (d - 1);
    let template = if nblocks > 0 {
        Some(stage2(d, s, &h0, size.vertices, seed)?)
    } else {
        None
    };
    let mut edges: Vec<Hyperedge> = h0.into_iter().map(|e| Hyperedge::new(e, 1)).collect();
    let mut blocks = Vec::with_capacity(nblocks);
    let mut n = size.vertices;
    if let Some(t) = &template {
        for _ in 0..nblocks {
            let first = edges.len();
            edges.extend(t.instantiate(n).into_iter().map(|e| Hyperedge::new(e, 1)));
            blocks.push(Block {
                vertices: (n..n + t.new_vertices).collect(),
                edges: first..edges.len(),
            });
            n += t.new_vertices;
        }
    }
    let names = (1..=n).map(|i| format!("v{i}")).collect();
    let h =
        WeightedHypergraph::new(d, n, edges, Some(names)).expect("construction edges are valid");
    let trace = ConstructionTrace {
        d,
        s,
        stage1: size,
        template,
        blocks,
        pins_used: m - remainder,
        remainder,
    };
    Ok((h, trace))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IncrementalError {
    #[error("expected {expected} pins (one per hyperedge), got {found}")]
    PinCount { expected: usize, found: usize },
    #[error("Stage 1 system: {0}")]
    Stage1(SolveError),
    #[error("block {block}: {source}")]
    Block { block: usize, source: SolveError },
}

/// Per-stage solver statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementalStats {
    pub stage1_restart: usize,
    pub block_restarts: Vec<usize>,
}

fn local_instance(
    d: usize,
    vertices: &[usize],
    edges: &[Vec<usize>],
    pins: &[Point],
) -> PinnedInstance {
    let local = |v: usize| {
        vertices
            .iter()
            .position(|&u| u == v)
            .expect("edge vertex in block")
    };
    let hedges = edges
        .iter()
        .map(|e| Hyperedge::new(e.iter().map(|&v| local(v)).collect(), 1))
        .collect();
    let h = WeightedHypergraph::new(d, vertices.len(), hedges, None).expect("block is valid");
    PinnedInstance::new(h, pins.iter().map(|p| vec![p.clone()]).collect())
        .expect("pins match block")
}

/// Solves `H0` first, then every block with its base vertices frozen.
/// `pins[k]` is the pin of hyperedge `k`.
pub fn incremental_solve(
    h: &WeightedHypergraph,
    trace: &ConstructionTrace,
    pins: &[Point],
    cfg: &SolveConfig,
) -> Result<(Vec<Point>, IncrementalStats), IncrementalError> {
    if pins.len() != h.edges().len() {
        return Err(IncrementalError::PinCount {
            expected: h.edges().len(),
            found: pins.len(),
        });
    }
    let d = h.dim();
    let n0 = trace.stage1.vertices;
    let e0 = trace.stage1.edges;
    let v0: Vec<usize> = (0..n0).collect();
    let edges0: Vec<Vec<usize>> = h.edges()[..e0].iter().map(|e| e.vertices.clone()).collect();
    let inst0 = local_instance(d, &v0, &edges0, &pins[..e0]);
    let rep = solve(&inst0, cfg, None, &BTreeSet::new()).map_err(IncrementalError::Stage1)?;
    let mut points = vec![Vec::new(); h.num_vertices()];
    points[..n0].clone_from_slice(&rep.framework.points);
    let mut stats = IncrementalStats {
        stage1_restart: rep.restart,
        block_restarts: Vec::with_capacity(trace.blocks.len()),
    };
    let base = trace.base();
    let frozen: BTreeSet<usize> = (0..base.len()).collect();
    for (i, block) in trace.blocks.iter().enumerate() {
        let vertices: Vec<usize> = base.iter().chain(&block.vertices).copied().collect();
        let edges: Vec<Vec<usize>> = h.edges()[block.edges.clone()]
            .iter()
            .map(|e| e.vertices.clone())
            .collect();
        let inst = local_instance(d, &vertices, &edges, &pins[block.edges.clone()]);
        // new vertices start at the centroid of the block's pins
        let centroid: Point = (0..d - 1)
            .map(|j| {
                pins[block.edges.clone()].iter().map(|p| p[j]).sum::<f64>()
                    / block.edges.len() as f64
            })
            .collect();
        let init: Vec<Point> = vertices
            .iter()
            .map(|&v| {
                if v < n0 {
                    points[v].clone()
                } else {
                    centroid.clone()
                }
            })
            .collect();
        let block_cfg = SolveConfig {
            seed: cfg.seed.wrapping_add(i as u64 + 1),
            ..*cfg
        };
        let rep = solve(&inst, &block_cfg, Some(&init), &frozen)
            .map_err(|source| IncrementalError::Block { block: i, source })?;
        for (local, &v) in vertices.iter().enumerate().skip(base.len()) {
            points[v] = rep.framework.points[local].clone();
        }
        stats.block_restarts.push(rep.restart);
    }
    Ok((points, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparsity::is_tight;

    #[test]
    fn stage1_sizes() {
        assert_eq!(
            stage1_size(3, 2),
            Stage1Size {
                k: 5,
                vertices: 5,
                edges: 10
            }
        );
        assert_eq!(
            stage1_size(4, 2),
            Stage1Size {
                k: 2,
                vertices: 4,
                edges: 6
            }
        );
        assert_eq!(
            stage1_size(4, 3),
            Stage1Size {
                k: 6,
                vertices: 6,
                edges: 18
            }
        );
    }

    #[test]
    fn d3_counts() {
        let (h, t) = build_construction(3, 2, 10, 0).unwrap();
        assert_eq!((h.num_vertices(), h.edges().len()), (5, 10));
        assert!(t.blocks.is_empty());
        let (h, t) = build_construction(3, 2, 12, 0).unwrap();
        assert_eq!((h.num_vertices(), h.edges().len()), (6, 12));
        assert_eq!(t.base(), &[0, 1]);
        let (h, t) = build_construction(3, 2, 15, 0).unwrap();
        assert_eq!((h.num_vertices(), h.edges().len(), t.remainder), (7, 14, 1));
        assert!(is_tight(&h.expand(), 2));
    }

    #[test]
    fn d4_s2_template_avoids_concurrent_lines() {
        let (h, t) = build_construction(4, 2, 12, 0).unwrap();
        let tpl = t.template.unwrap();
        assert_eq!(tpl.base.len(), 2);
        assert!(is_tight(&h.expand(), 3));
        assert_eq!(generic_rank(&h, 2, 1, RankBackend::PrimeField), h.freedom());
    }

    #[test]
    fn too_few_pins() {
        assert_eq!(
            build_construction(3, 2, 9, 0).unwrap_err(),
            ConstructionError::TooFewPins { m: 9, min: 10 }
        );
    }
}
