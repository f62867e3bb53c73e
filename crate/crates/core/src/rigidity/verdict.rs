//! The combinatorial decision procedure and its verdict.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::labeling::{search_labeling, Labeling, SearchOutcome};
use super::{generic_rank, kernel_basis, RankBackend};
use crate::equations;
use crate::hypergraph::WeightedHypergraph;
use crate::sparsity::pebble_game;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RigidityClass {
    MinimallyRigid,
    Flexible,
    Overconstrained,
    Mixed,
    /// The labeling search hit its node budget on a tight count.
    Undetermined,
}

impl std::fmt::Display for RigidityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::MinimallyRigid => "minimally-rigid",
            Self::Flexible => "flexible",
            Self::Overconstrained => "overconstrained",
            Self::Mixed => "mixed",
            Self::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

/// A connected group of hyperedges spanning fewer than `d` vertices that
/// carries more pins than vertices. Generic pins cannot all lie in the
/// subspace those vertices span, so any realization has special pins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralPositionWarning {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub pins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityVerdict {
    pub class: RigidityClass,
    pub total_copies: usize,
    pub freedom: usize,
    /// `(d-1, 0)`-sparsity of the expansion.
    pub sparse: bool,
    /// Tight count, sparsity, and a compatible labeling all hold. The class
    /// is still overconstrained when the pins are forced out of general
    /// position (see `warnings`).
    pub conditions_met: bool,
    pub labeling: Option<Labeling>,
    /// Generic rank over the prime field; `None` if not requested.
    pub numeric_rank: Option<usize>,
    /// Flexes of one random float framework, when requested and not rigid.
    pub flex_basis: Option<Vec<Vec<f64>>>,
    pub warnings: Vec<GeneralPositionWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Node budget for the labeling search; `None` searches exhaustively.
    pub budget: Option<u64>,
    /// Prime-field trials for the reported rank; 0 skips the rank.
    pub rank_trials: usize,
    pub flexes: bool,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            budget: Some(2_000_000),
            rank_trials: 3,
            flexes: false,
            seed: 0,
        }
    }
}

/// [`combinatorial_check_with`] under default options.
pub fn combinatorial_check(h: &WeightedHypergraph) -> RigidityVerdict {
    combinatorial_check_with(h, &CheckOptions::default())
}

pub fn combinatorial_check_with(h: &WeightedHypergraph, opts: &CheckOptions) -> RigidityVerdict {
    let total = h.total_copies();
    let freedom = h.freedom();
    let sparse = pebble_game(&h.expand(), h.dim() - 1, 0).sparse;
    let mut labeling = None;
    let warnings = general_position_warnings(h);
    let class = if !sparse {
        if total > freedom {
            RigidityClass::Overconstrained
        } else {
            RigidityClass::Mixed
        }
    } else if total < freedom {
        RigidityClass::Flexible
    } else {
        match search_labeling(h, opts.budget) {
            SearchOutcome::Found(l) => {
                labeling = Some(l);
                if warnings.is_empty() {
                    RigidityClass::MinimallyRigid
                } else {
                    RigidityClass::Overconstrained
                }
            }
            SearchOutcome::Exhausted => RigidityClass::Mixed,
            SearchOutcome::BudgetExceeded => RigidityClass::Undetermined,
        }
    };
    let numeric_rank = (opts.rank_trials > 0)
        .then(|| generic_rank(h, opts.rank_trials, opts.seed, RankBackend::PrimeField));
    let flex_basis = (opts.flexes && class != RigidityClass::MinimallyRigid)
        .then(|| random_flexes(h, opts.seed));
    RigidityVerdict {
        class,
        total_copies: total,
        freedom,
        sparse,
        conditions_met: labeling.is_some(),
        labeling,
        numeric_rank,
        flex_basis,
        warnings,
    }
}

fn random_flexes(h: &WeightedHypergraph, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..h.num_vertices())
        .map(|_| {
            (0..h.dim() - 1)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    let bary: Vec<Vec<Vec<f64>>> = h
        .edges()
        .iter()
        .map(|e| {
            (0..e.weight)
                .map(|_| {
                    let mut b: Vec<f64> =
                        (1..e.size()).map(|_| rng.random_range(-1.0..1.0)).collect();
                    b.insert(0, 1.0 - b.iter().sum::<f64>());
                    b
                })
                .collect()
        })
        .collect();
    let rows = equations::simplified_rows(h, &points, &bary);
    let m = nalgebra::DMatrix::from_fn(rows.len(), h.freedom(), |r, c| rows[r][c]);
    kernel_basis(&m)
}

/// Every vertex set of fewer than `d` vertices that is a connected union of
/// hyperedges and carries more pins than it has vertices.
pub fn general_position_warnings(h: &WeightedHypergraph) -> Vec<GeneralPositionWarning> {
    let d = h.dim();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); h.num_vertices()];
    for (k, e) in h.edges().iter().enumerate() {
        for &v in &e.vertices {
            incident[v].push(k);
        }
    }
    let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
    let mut stack: Vec<BTreeSet<usize>> = Vec::new();
    for e in h.edges() {
        let s: BTreeSet<usize> = e.vertices.iter().copied().collect();
        if seen.insert(s.clone()) {
            stack.push(s);
        }
    }
    let mut out = Vec::new();
    while let Some(set) = stack.pop() {
        let mut inside = BTreeSet::new();
        for &v in &set {
            for &k in &incident[v] {
                let e = &h.edges()[k];
                if e.vertices.iter().all(|u| set.contains(u)) {
                    inside.insert(k);
                } else {
                    let grown: BTreeSet<usize> =
                        set.iter().chain(e.vertices.iter()).copied().collect();
                    if grown.len() < d && seen.insert(grown.clone()) {
                        stack.push(grown);
                    }
                }
            }
        }
        let pins: usize = inside.iter().map(|&k| h.edges()[k].weight).sum();
        if pins > set.len() {
            out.push(GeneralPositionWarning {
                vertices: set.into_iter().collect(),
                edges: inside.into_iter().collect(),
                pins,
            });
        }
    }
    out.sort_by(|a, b| (a.vertices.len(), &a.vertices).cmp(&(b.vertices.len(), &b.vertices)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{quad_d3, forced_coplanar_d4};
    use crate::hypergraph::Hyperedge;

    #[test]
    fn quad_d3_is_minimally_rigid() {
        let v = combinatorial_check(&quad_d3());
        assert_eq!(v.class, RigidityClass::MinimallyRigid);
        assert_eq!(v.numeric_rank, Some(8));
        v.labeling.unwrap().validate(&quad_d3()).unwrap();
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn quad_d3_minus_copy_is_flexible() {
        let mut edges = quad_d3().edges().to_vec();
        edges[4].weight = 1;
        let h = WeightedHypergraph::new(3, 4, edges, None).unwrap();
        let opts = CheckOptions {
            flexes: true,
            ..CheckOptions::default()
        };
        let v = combinatorial_check_with(&h, &opts);
        assert_eq!(v.class, RigidityClass::Flexible);
        assert_eq!(v.numeric_rank, Some(7));
        assert_eq!(v.flex_basis.unwrap().len(), 1);
    }

    #[test]
    fn overcounted_subset() {
        // both endpoints pinned, plus two pins on the line through them
        let e = |vs: &[usize], w| Hyperedge::new(vs.to_vec(), w);
        let h = WeightedHypergraph::new(3, 2, vec![e(&[0], 1), e(&[0, 1], 2), e(&[1], 1)], None)
            .unwrap();
        let v = combinatorial_check(&h);
        assert!(!v.sparse);
        assert_eq!(v.class, RigidityClass::Overconstrained);
        assert_eq!(v.numeric_rank, Some(4));
    }

    #[test]
    fn coplanar_pins_are_flagged() {
        let h = forced_coplanar_d4();
        let v = combinatorial_check(&h);
        assert!(v.conditions_met);
        assert_eq!(v.class, RigidityClass::Overconstrained);
        assert_eq!(v.numeric_rank, Some(10));
        assert_eq!(v.warnings.len(), 1);
        assert_eq!(v.warnings[0].vertices, vec![0, 1, 2]);
        assert_eq!(v.warnings[0].pins, 5);
    }

    #[test]
    fn sliding_point_is_mixed() {
        // v1 pinned and a line through v1 pinned twice: v2 slides along the line
        let e = |vs: &[usize], w| Hyperedge::new(vs.to_vec(), w);
        let h = WeightedHypergraph::new(3, 2, vec![e(&[0], 1), e(&[0, 1], 2)], None).unwrap();
        let v = combinatorial_check(&h);
        assert!(v.sparse);
        assert_eq!(v.total_copies, 4);
        assert_eq!(v.class, RigidityClass::Mixed);
        assert_eq!(v.numeric_rank, Some(3));
    }
}
