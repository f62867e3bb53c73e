//! Labelings of the multi-hypergraph compatible with a map decomposition.
//!
//! A labeling assigns each copy of `e_k` a distinct row `(t, l)`. It is
//! compatible with a decomposition into `d - 1` maps when a copy placed in
//! map `j` (1-based) carries a row that is nonzero in column group `j`, i.e.
//! `j <= |e_k| - 1` or `j = |e_k| - 1 + t`. On top of that:
//!
//! * (2a) copies of `e_k` with equal `l` lie in different maps;
//! * (2b) copies of `e_k` with equal `t` have different tails.
//!
//! [`compatible_labeling`] works on a fixed decomposition, one hyperedge at a
//! time. [`search_labeling`] searches decompositions and labels jointly as an
//! assignment of rows `(k, t, l)` to slots `(map, tail)`, pruned with a
//! bipartite matching bound.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::equations::{row_labels, RowLabel};
use crate::hypergraph::WeightedHypergraph;
use crate::sparsity::MapDecomposition;

/// One labelled copy. `map` is 0-based, `t` and `l` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledCopy {
    pub edge: usize,
    pub map: usize,
    pub tail: usize,
    pub t: usize,
    pub l: usize,
}

/// Labels for every copy of the expansion, in expansion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub copies: Vec<LabeledCopy>,
}

/// Whether a copy in 0-based map `j` may carry row `t` for an edge of size `s`.
pub fn map_admits_row(j: usize, s: usize, t: usize) -> bool {
    j + 1 < s || j + 2 == s + t
}

impl Labeling {
    pub fn decomposition(&self, k: usize) -> MapDecomposition {
        MapDecomposition {
            k,
            map_index: self.copies.iter().map(|c| c.map).collect(),
            tail: self.copies.iter().map(|c| c.tail).collect(),
        }
    }

    /// Full check of every condition the labeling is supposed to satisfy.
    pub fn validate(&self, h: &WeightedHypergraph) -> Result<(), String> {
        let mh = h.expand();
        if self.copies.len() != mh.len() {
            return Err(format!(
                "{} labels for {} copies",
                self.copies.len(),
                mh.len()
            ));
        }
        self.decomposition(h.dim() - 1).validate(&mh)?;
        let d = h.dim();
        for (i, (c, e)) in self.copies.iter().zip(&mh.edges).enumerate() {
            if c.edge != e.parent {
                return Err(format!(
                    "copy {i} labelled for edge {} but belongs to {}",
                    c.edge, e.parent
                ));
            }
            let s = e.vertices.len();
            if c.t == 0 || c.t > d - s || c.l == 0 || c.l > h.edges()[c.edge].weight {
                return Err(format!(
                    "copy {i} has out-of-range label ({}, {})",
                    c.t, c.l
                ));
            }
            if !map_admits_row(c.map, s, c.t) {
                return Err(format!(
                    "copy {i} in map {} cannot carry t = {}",
                    c.map, c.t
                ));
            }
        }
        let mut rows = HashSet::new();
        let mut by_l = HashSet::new();
        let mut by_t = HashSet::new();
        for c in &self.copies {
            if !rows.insert((c.edge, c.t, c.l)) {
                return Err(format!("row ({}, {}, {}) used twice", c.edge, c.t, c.l));
            }
            if !by_l.insert((c.edge, c.l, c.map)) {
                return Err(format!(
                    "edge {}: two copies with l = {} in map {}",
                    c.edge, c.l, c.map
                ));
            }
            if !by_t.insert((c.edge, c.t, c.tail)) {
                return Err(format!(
                    "edge {}: two copies with t = {} share tail {}",
                    c.edge, c.t, c.tail
                ));
            }
        }
        Ok(())
    }
}

/// Labels a fixed decomposition of `h.expand()`, or `None` if no compatible
/// labeling exists for it.
pub fn compatible_labeling(md: &MapDecomposition, h: &WeightedHypergraph) -> Option<Labeling> {
    let mh = h.expand();
    let d = h.dim();
    let mut copies: Vec<Option<LabeledCopy>> = vec![None; mh.len()];
    let mut start = 0;
    for (k, e) in h.edges().iter().enumerate() {
        let count = h.copies(k);
        let idx: Vec<usize> = (start..start + count).collect();
        start += count;
        let rows: Vec<(usize, usize)> = (1..=d - e.size())
            .flat_map(|t| (1..=e.weight).map(move |l| (t, l)))
            .collect();
        let slots: Vec<(usize, usize)> =
            idx.iter().map(|&i| (md.map_index[i], md.tail[i])).collect();
        let assignment = label_one_edge(&slots, &rows, e.size())?;
        for (pos, &i) in idx.iter().enumerate() {
            let (t, l) = rows[assignment[pos]];
            copies[i] = Some(LabeledCopy {
                edge: k,
                map: slots[pos].0,
                tail: slots[pos].1,
                t,
                l,
            });
        }
    }
    Some(Labeling {
        copies: copies
            .into_iter()
            .map(|c| c.expect("every copy labelled"))
            .collect(),
    })
}

/// Backtracking over the copies of one hyperedge: copy `i` sits at
/// `slots[i] = (map, tail)` and receives a distinct index into `rows`.
fn label_one_edge(
    slots: &[(usize, usize)],
    rows: &[(usize, usize)],
    s: usize,
) -> Option<Vec<usize>> {
    fn go(
        i: usize,
        slots: &[(usize, usize)],
        rows: &[(usize, usize)],
        s: usize,
        used: &mut [bool],
        out: &mut Vec<usize>,
    ) -> bool {
        if i == slots.len() {
            return true;
        }
        let (map, tail) = slots[i];
        for r in 0..rows.len() {
            if used[r] {
                continue;
            }
            let (t, l) = rows[r];
            if !map_admits_row(map, s, t) {
                continue;
            }
            let clash = out.iter().enumerate().any(|(prev, &pr)| {
                let (pt, pl) = rows[pr];
                (pl == l && slots[prev].0 == map) || (pt == t && slots[prev].1 == tail)
            });
            if clash {
                continue;
            }
            used[r] = true;
            out.push(r);
            if go(i + 1, slots, rows, s, used, out) {
                return true;
            }
            out.pop();
            used[r] = false;
        }
        false
    }
    let mut used = vec![false; rows.len()];
    let mut out = Vec::with_capacity(slots.len());
    go(0, slots, rows, s, &mut used, &mut out).then_some(out)
}

/// Result of the joint decomposition + labeling search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Labeling),
    /// Every decomposition was ruled out.
    Exhausted,
    /// The node budget ran out first.
    BudgetExceeded,
}

struct Search<'a> {
    h: &'a WeightedHypergraph,
    rows: Vec<RowLabel>,
    n: usize,
    maps: usize,
    assigned: Vec<Option<(usize, usize)>>,
    slot_used: Vec<bool>,
    maps_by_pin: HashSet<(usize, usize, usize)>,
    tails_by_t: HashSet<(usize, usize, usize)>,
    nodes: u64,
    budget: Option<u64>,
}

impl Search<'_> {
    fn feasible(&self, r: usize) -> Vec<(usize, usize)> {
        let RowLabel { edge, t, l } = self.rows[r];
        let e = &self.h.edges()[edge];
        let s = e.size();
        let mut out = Vec::new();
        // maps descending, tails ascending
        for j in (0..self.maps).rev() {
            if !map_admits_row(j, s, t) || self.maps_by_pin.contains(&(edge, l, j)) {
                continue;
            }
            for &v in &e.vertices {
                if !self.slot_used[j * self.n + v] && !self.tails_by_t.contains(&(edge, t, v)) {
                    out.push((j, v));
                }
            }
        }
        out
    }

    /// Can the unassigned rows still be matched to distinct free slots?
    fn matching_possible(&self) -> bool {
        let open: Vec<usize> = (0..self.rows.len())
            .filter(|&r| self.assigned[r].is_none())
            .collect();
        let domains: Vec<Vec<usize>> = open
            .iter()
            .map(|&r| {
                self.feasible(r)
                    .into_iter()
                    .map(|(j, v)| j * self.n + v)
                    .collect()
            })
            .collect();
        let mut owner: Vec<Option<usize>> = vec![None; self.maps * self.n];
        fn augment(
            r: usize,
            domains: &[Vec<usize>],
            owner: &mut [Option<usize>],
            seen: &mut [bool],
        ) -> bool {
            for &slot in &domains[r] {
                if seen[slot] {
                    continue;
                }
                seen[slot] = true;
                if owner[slot].is_none_or(|o| augment(o, domains, owner, seen)) {
                    owner[slot] = Some(r);
                    return true;
                }
            }
            false
        }
        for r in 0..open.len() {
            let mut seen = vec![false; owner.len()];
            if !augment(r, &domains, &mut owner, &mut seen) {
                return false;
            }
        }
        true
    }

    fn run(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            return None;
        }
        let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
        for r in 0..self.rows.len() {
            if self.assigned[r].is_some() {
                continue;
            }
            let f = self.feasible(r);
            if best.as_ref().is_none_or(|(_, b)| f.len() < b.len()) {
                let empty = f.is_empty();
                best = Some((r, f));
                if empty {
                    break;
                }
            }
        }
        let Some((r, options)) = best else {
            return Some(true);
        };
        let RowLabel { edge, t, l } = self.rows[r];
        for (j, v) in options {
            self.assigned[r] = Some((j, v));
            self.slot_used[j * self.n + v] = true;
            self.maps_by_pin.insert((edge, l, j));
            self.tails_by_t.insert((edge, t, v));
            if self.matching_possible() {
                match self.run() {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            self.assigned[r] = None;
            self.slot_used[j * self.n + v] = false;
            self.maps_by_pin.remove(&(edge, l, j));
            self.tails_by_t.remove(&(edge, t, v));
        }
        Some(false)
    }
}

/// Searches over all map decompositions of `h.expand()` for one admitting a
/// compatible labeling. Requires a tight count; returns `Exhausted` otherwise.
pub fn search_labeling(h: &WeightedHypergraph, budget: Option<u64>) -> SearchOutcome {
    let n = h.num_vertices();
    let maps = h.dim() - 1;
    let rows = row_labels(h);
    if rows.len() != maps * n {
        return SearchOutcome::Exhausted;
    }
    let mut search = Search {
        h,
        assigned: vec![None; rows.len()],
        rows,
        n,
        maps,
        slot_used: vec![false; maps * n],
        maps_by_pin: HashSet::new(),
        tails_by_t: HashSet::new(),
        nodes: 0,
        budget,
    };
    if !search.matching_possible() {
        return SearchOutcome::Exhausted;
    }
    match search.run() {
        None => SearchOutcome::BudgetExceeded,
        Some(false) => SearchOutcome::Exhausted,
        Some(true) => {
            // rows of each edge map onto its copies in order
            let copies = search
                .rows
                .iter()
                .zip(&search.assigned)
                .map(|(row, a)| {
                    let (map, tail) = a.expect("complete assignment");
                    LabeledCopy {
                        edge: row.edge,
                        map,
                        tail,
                        t: row.t,
                        l: row.l,
                    }
                })
                .collect();
            SearchOutcome::Found(Labeling { copies })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{quad_d3, pinned_point};
    use crate::hypergraph::Hyperedge;
    use crate::sparsity::map_decompose;

    #[test]
    fn admissible_maps() {
        // |e| = 1 in d = 3: map j carries t = j + 1 only
        assert!(map_admits_row(0, 1, 1));
        assert!(!map_admits_row(0, 1, 2));
        assert!(map_admits_row(1, 1, 2));
        // |e| = 2 in d = 4: map 0 anything, map 1 -> t=1, map 2 -> t=2
        assert!(map_admits_row(0, 2, 2));
        assert!(map_admits_row(1, 2, 1));
        assert!(!map_admits_row(2, 2, 1));
    }

    #[test]
    fn quad_d3_decomposition_labels() {
        let h = quad_d3();
        let md = map_decompose(&h.expand(), 2).unwrap();
        let lab = compatible_labeling(&md, &h).expect("labeling exists");
        lab.validate(&h).unwrap();
        // e5 has two pins on the single row t = 1; they need distinct tails
        let e5: Vec<_> = lab.copies.iter().filter(|c| c.edge == 4).collect();
        assert_eq!(e5.len(), 2);
        assert_ne!(e5[0].tail, e5[1].tail);
        assert_ne!(e5[0].l, e5[1].l);
    }

    #[test]
    fn single_vertex_forced_labels() {
        let h = pinned_point(3);
        let md = map_decompose(&h.expand(), 2).unwrap();
        let lab = compatible_labeling(&md, &h).unwrap();
        for c in &lab.copies {
            assert_eq!(c.t, c.map + 1);
        }
    }

    #[test]
    fn too_many_copies_in_one_map_fails() {
        // {v1,v2} with m = 2 in d = 3: both copies have t = 1; put both in map 0
        // with distinct tails, then (2a) has room but put them at the same tail
        let h = WeightedHypergraph::new(3, 2, vec![Hyperedge::new(vec![0, 1], 2)], None).unwrap();
        let md = MapDecomposition {
            k: 2,
            map_index: vec![0, 0],
            tail: vec![0, 0],
        };
        assert!(compatible_labeling(&md, &h).is_none());
        // three copies of a 2-pin edge cannot fit in one map (pigeonhole on l)
        let h = WeightedHypergraph::new(4, 2, vec![Hyperedge::new(vec![0, 1], 2)], None).unwrap();
        let md = MapDecomposition {
            k: 3,
            map_index: vec![0, 0, 0, 1],
            tail: vec![0, 1, 0, 1],
        };
        assert!(compatible_labeling(&md, &h).is_none());
    }

    #[test]
    fn joint_search_finds_quad_d3() {
        let h = quad_d3();
        match search_labeling(&h, None) {
            SearchOutcome::Found(lab) => lab.validate(&h).unwrap(),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn joint_search_rejects_sliding_point() {
        // v1 pinned, v2 only on a line through two pins: v2 can slide
        let h = WeightedHypergraph::new(
            3,
            2,
            vec![Hyperedge::new(vec![0], 1), Hyperedge::new(vec![0, 1], 2)],
            None,
        )
        .unwrap();
        assert_eq!(search_labeling(&h, None), SearchOutcome::Exhausted);
    }
}
