//! `(k, l)`-sparsity of multi-hypergraphs via the pebble game, tightness,
//! map decompositions, and an exhaustive oracle.
//!
//! Every vertex starts with `k` pebbles. Accepting a multi-edge consumes one
//! pebble from one of its vertices, which becomes the edge's tail; pebbles are
//! gathered by reversing directed paths (pebble shifts). With `l = 0` the
//! final orientation has out-degree exactly `k` at every vertex of a tight
//! input, which is what the map decomposition is read from.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::hypergraph::MultiHypergraph;

/// Largest vertex count accepted by [`brute_force_sparse`].
pub const BRUTE_FORCE_MAX_VERTICES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparsityError {
    #[error("exhaustive enumeration limited to {max} vertices, got {got}")]
    TooLarge { max: usize, got: usize },
    #[error("multi-hypergraph is not ({k},0)-tight: {reason}")]
    NotTight { k: usize, reason: String },
}

/// Pebble counts and the current orientation of accepted multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleState {
    pub k: usize,
    pub pebbles: Vec<usize>,
    /// `orientation[i]` is the tail of multi-edge `i`, `None` if rejected.
    pub orientation: Vec<Option<usize>>,
}

impl PebbleState {
    pub fn remaining(&self) -> usize {
        self.pebbles.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleOutcome {
    pub sparse: bool,
    pub state: PebbleState,
}

/// Incremental pebble game over a fixed vertex set.
#[derive(Debug, Clone)]
pub struct PebbleGame {
    k: usize,
    l: usize,
    pebbles: Vec<usize>,
    /// vertex lists of accepted edges, indexed by game edge id
    edges: Vec<Vec<usize>>,
    tails: Vec<usize>,
    /// accepted edge ids by tail
    out: Vec<Vec<usize>>,
    /// vertices pebble searches may pass through; `None` allows all
    movable: Option<Vec<bool>>,
}

impl PebbleGame {
    pub fn new(num_vertices: usize, k: usize, l: usize) -> Self {
        assert!(k >= 1, "k must be positive");
        Self {
            k,
            l,
            pebbles: vec![k; num_vertices],
            edges: Vec::new(),
            tails: Vec::new(),
            out: vec![Vec::new(); num_vertices],
            movable: None,
        }
    }

    /// Game whose vertices start with the given pebble counts, every missing
    /// pebble standing for capacity already used elsewhere. Searches only pass
    /// through vertices flagged in `movable`.
    pub fn with_pebbles(pebbles: Vec<usize>, k: usize, l: usize, movable: Vec<bool>) -> Self {
        assert_eq!(pebbles.len(), movable.len());
        let n = pebbles.len();
        Self {
            k,
            l,
            pebbles,
            edges: Vec::new(),
            tails: Vec::new(),
            out: vec![Vec::new(); n],
            movable: Some(movable),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.pebbles.len()
    }

    pub fn pebbles(&self) -> &[usize] {
        &self.pebbles
    }

    pub fn tails(&self) -> &[usize] {
        &self.tails
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn remaining(&self) -> usize {
        self.pebbles.iter().sum()
    }

    fn pebbles_on(&self, e: &[usize]) -> usize {
        e.iter().map(|&v| self.pebbles[v]).sum()
    }

    /// Tries to accept one multi-edge; returns its game edge id.
    pub fn try_add(&mut self, vertices: &[usize]) -> Option<usize> {
        if !self.gather(vertices, self.l + 1) {
            return None;
        }
        let &tail = vertices.iter().find(|&&v| self.pebbles[v] > 0)?;
        self.pebbles[tail] -= 1;
        let id = self.edges.len();
        self.edges.push(vertices.to_vec());
        self.tails.push(tail);
        self.out[tail].push(id);
        self.debug_check();
        Some(id)
    }

    /// Accepts `count` copies of the same multi-edge atomically: either all
    /// are accepted or the game is left unchanged.
    pub fn try_add_group(&mut self, vertices: &[usize], count: usize) -> Option<Vec<usize>> {
        let snapshot = self.clone();
        let mut ids = Vec::with_capacity(count);
        for _ in 0..count {
            match self.try_add(vertices) {
                Some(id) => ids.push(id),
                None => {
                    *self = snapshot;
                    return None;
                }
            }
        }
        Some(ids)
    }

    /// Brings at least `need` pebbles onto the vertices of `e`.
    fn gather(&mut self, e: &[usize], need: usize) -> bool {
        while self.pebbles_on(e) < need {
            let mut moved = false;
            for &v in e {
                if self.search_and_shift(v, e) {
                    moved = true;
                    break;
                }
            }
            if !moved {
                return false;
            }
        }
        true
    }

    fn can_visit(&self, v: usize) -> bool {
        self.movable.as_ref().is_none_or(|m| m[v])
    }

    /// Depth-first search from `root` along tail-to-head arcs for a pebble
    /// outside `protected`; on success the path is reversed so the pebble ends
    /// up on `root`.
    fn search_and_shift(&mut self, root: usize, protected: &[usize]) -> bool {
        if !self.can_visit(root) {
            return false;
        }
        let n = self.num_vertices();
        let mut visited = vec![false; n];
        for &v in protected {
            visited[v] = true;
        }
        // parent[w] = (edge id, predecessor vertex)
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        // stack of (vertex, index into out[vertex], index into edge vertices)
        let mut stack = vec![(root, 0usize, 0usize)];
        let mut found = None;
        'search: while let Some(top) = stack.last_mut() {
            let (u, ei, vi) = *top;
            if ei >= self.out[u].len() {
                stack.pop();
                continue;
            }
            let edge = self.out[u][ei];
            let verts = &self.edges[edge];
            if vi >= verts.len() {
                top.1 += 1;
                top.2 = 0;
                continue;
            }
            top.2 += 1;
            let w = verts[vi];
            if w == u || visited[w] || !self.can_visit(w) {
                continue;
            }
            visited[w] = true;
            parent[w] = Some((edge, u));
            if self.pebbles[w] > 0 {
                found = Some(w);
                break 'search;
            }
            stack.push((w, 0, 0));
        }
        let Some(target) = found else { return false };
        let mut w = target;
        while w != root {
            let (edge, u) = parent[w].expect("path recorded");
            // edge was tailed at u; it now points out of w
            let pos = self.out[u]
                .iter()
                .position(|&x| x == edge)
                .expect("edge in out list");
            self.out[u].swap_remove(pos);
            self.out[w].push(edge);
            self.tails[edge] = w;
            w = u;
        }
        self.pebbles[target] -= 1;
        self.pebbles[root] += 1;
        self.debug_check();
        true
    }

    fn debug_check(&self) {
        debug_assert!(self.pebbles.iter().all(|&p| p <= self.k));
        debug_assert!(
            self.movable.is_some()
                || self.remaining() + self.edges.len() == self.k * self.num_vertices()
        );
    }

    /// Vertices from which no pebble can be reached. With `l = 0` this is the
    /// largest vertex set whose induced accepted edges number exactly `k` per
    /// vertex (empty if none).
    pub fn max_tight_set(&self) -> BTreeSet<usize> {
        let n = self.num_vertices();
        // reverse arcs: head -> tail
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (id, verts) in self.edges.iter().enumerate() {
            let t = self.tails[id];
            for &w in verts {
                if w != t {
                    rev[w].push(t);
                }
            }
        }
        let mut reach = vec![false; n];
        let mut queue: Vec<usize> = (0..n).filter(|&v| self.pebbles[v] > 0).collect();
        for &v in &queue {
            reach[v] = true;
        }
        while let Some(w) = queue.pop() {
            for &t in &rev[w] {
                if !reach[t] {
                    reach[t] = true;
                    queue.push(t);
                }
            }
        }
        (0..n).filter(|&v| !reach[v]).collect()
    }
}

/// Runs the pebble game over the multi-edges of `mh` in their stored order.
pub fn pebble_game(mh: &MultiHypergraph, k: usize, l: usize) -> PebbleOutcome {
    let order: Vec<usize> = (0..mh.len()).collect();
    pebble_game_ordered(mh, k, l, &order)
}

/// Pebble game with an explicit insertion order (a permutation of edge indices).
pub fn pebble_game_ordered(
    mh: &MultiHypergraph,
    k: usize,
    l: usize,
    order: &[usize],
) -> PebbleOutcome {
    let mut game = PebbleGame::new(mh.num_vertices, k, l);
    let mut ids = vec![None; mh.len()];
    for &i in order {
        ids[i] = game.try_add(&mh.edges[i].vertices);
    }
    let orientation = ids.iter().map(|id| id.map(|id| game.tails()[id])).collect();
    PebbleOutcome {
        sparse: ids.iter().all(Option::is_some),
        state: PebbleState {
            k,
            pebbles: game.pebbles().to_vec(),
            orientation,
        },
    }
}

/// `(k, 0)`-tight: sparse and exactly `k |V|` multi-edges.
pub fn is_tight(mh: &MultiHypergraph, k: usize) -> bool {
    mh.len() == k * mh.num_vertices && pebble_game(mh, k, 0).sparse
}

/// Partition of the multi-edges into `k` map-graphs with a tail per multi-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDecomposition {
    pub k: usize,
    pub map_index: Vec<usize>,
    pub tail: Vec<usize>,
}

impl MapDecomposition {
    /// Checks that each map has every vertex as the tail of exactly one of its
    /// multi-edges and that every tail belongs to its multi-edge.
    pub fn validate(&self, mh: &MultiHypergraph) -> Result<(), String> {
        if self.map_index.len() != mh.len() || self.tail.len() != mh.len() {
            return Err("decomposition length differs from edge count".into());
        }
        let n = mh.num_vertices;
        let mut hits = vec![vec![0usize; n]; self.k];
        for (i, e) in mh.edges.iter().enumerate() {
            let (j, t) = (self.map_index[i], self.tail[i]);
            if j >= self.k {
                return Err(format!("edge {i} assigned to map {j} of {}", self.k));
            }
            if !e.vertices.contains(&t) {
                return Err(format!("edge {i} has tail {t} outside its vertex set"));
            }
            hits[j][t] += 1;
        }
        for (j, row) in hits.iter().enumerate() {
            if let Some(v) = row.iter().position(|&c| c != 1) {
                return Err(format!(
                    "vertex {v} is the tail of {} edges in map {j}",
                    row[v]
                ));
            }
        }
        Ok(())
    }
}

/// Decomposes a `(k, 0)`-tight multi-hypergraph into `k` maps.
pub fn map_decompose(mh: &MultiHypergraph, k: usize) -> Result<MapDecomposition, SparsityError> {
    let order: Vec<usize> = (0..mh.len()).collect();
    map_decompose_ordered(mh, k, &order)
}

/// [`map_decompose`] with the pebble game run in the given insertion order.
pub fn map_decompose_ordered(
    mh: &MultiHypergraph,
    k: usize,
    order: &[usize],
) -> Result<MapDecomposition, SparsityError> {
    if mh.len() != k * mh.num_vertices {
        return Err(SparsityError::NotTight {
            k,
            reason: format!("{} multi-edges, expected {}", mh.len(), k * mh.num_vertices),
        });
    }
    let outcome = pebble_game_ordered(mh, k, 0, order);
    if !outcome.sparse {
        return Err(SparsityError::NotTight {
            k,
            reason: "some vertex subset is over-counted".into(),
        });
    }
    let tail: Vec<usize> = outcome
        .state
        .orientation
        .iter()
        .map(|t| t.expect("accepted"))
        .collect();
    let mut next = vec![0usize; mh.num_vertices];
    let map_index = tail
        .iter()
        .map(|&t| {
            let j = next[t];
            next[t] += 1;
            j
        })
        .collect();
    Ok(MapDecomposition { k, map_index, tail })
}

/// Exact `(k, 0)`-sparsity by enumerating every vertex subset.
pub fn brute_force_sparse(mh: &MultiHypergraph, k: usize) -> Result<bool, SparsityError> {
    let n = mh.num_vertices;
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(SparsityError::TooLarge {
            max: BRUTE_FORCE_MAX_VERTICES,
            got: n,
        });
    }
    let masks: Vec<u32> = mh
        .edges
        .iter()
        .map(|e| e.vertices.iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();
    for subset in 1u32..(1u32 << n) {
        let inside = masks.iter().filter(|&&m| m & subset == m).count();
        if inside > k * subset.count_ones() as usize {
            return Ok(false);
        }
    }
    Ok(true)
}
