//! Rigidity of pinned subspace-incidence frameworks: the numeric rigidity
//! matrix, its generic rank, the pure condition, infinitesimal flexes, and the
//! combinatorial decision procedure.

mod labeling;
mod verdict;

pub use labeling::{
    compatible_labeling, map_admits_row, search_labeling, LabeledCopy, Labeling, SearchOutcome,
};
pub use verdict::{
    combinatorial_check, combinatorial_check_with, general_position_warnings, CheckOptions,
    GeneralPositionWarning, RigidityClass, RigidityVerdict,
};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equations::{self, RowLabel};
use crate::field::{rank_mod_p, Fp, Scalar};
use crate::hypergraph::{PinnedInstance, Point, WeightedHypergraph};

/// Singular values below `sigma_max * RANK_RTOL * max(rows, cols)` count as zero.
pub const RANK_RTOL: f64 = 1e-9;
/// Pure-condition values below this fraction of the product of row norms
/// flag a non-generic framework.
pub const PURE_CONDITION_RTOL: f64 = 1e-9;
/// Default incidence tolerance for frameworks and barycentric coordinates.
pub const INCIDENCE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidityError {
    #[error("points of the hyperedge are affinely dependent")]
    AffinelyDependent,
    #[error("pin lies off the affine span of its hyperedge (residual {residual:e})")]
    OffSpan { residual: f64 },
    #[error("hyperedge {edge}, pin {pin}: {source}")]
    Row {
        edge: usize,
        pin: usize,
        #[source]
        source: Box<RigidityError>,
    },
    #[error("expected {expected} points, got {found}")]
    PointCount { expected: usize, found: usize },
    #[error("point {vertex} has {found} coordinates, expected {expected}")]
    PointDimension {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("rigidity matrix is {rows} x {cols}; the pure condition needs a square matrix")]
    NotSquare { rows: usize, cols: usize },
}

/// A pinned instance with a point for every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    pub instance: PinnedInstance,
    pub points: Vec<Point>,
}

impl Framework {
    /// Pairs points with an instance, checking shapes only.
    pub fn new(instance: PinnedInstance, points: Vec<Point>) -> Result<Self, RigidityError> {
        let h = &instance.hypergraph;
        if points.len() != h.num_vertices() {
            return Err(RigidityError::PointCount {
                expected: h.num_vertices(),
                found: points.len(),
            });
        }
        for (v, p) in points.iter().enumerate() {
            if p.len() != h.dim() - 1 {
                return Err(RigidityError::PointDimension {
                    vertex: v,
                    expected: h.dim() - 1,
                    found: p.len(),
                });
            }
        }
        Ok(Self { instance, points })
    }

    /// Like [`Framework::new`] but also requires every pin to lie on the span
    /// of its hyperedge within `tol`.
    pub fn checked(
        instance: PinnedInstance,
        points: Vec<Point>,
        tol: f64,
    ) -> Result<Self, RigidityError> {
        let fr = Self::new(instance, points)?;
        fr.barycentric_all(tol)?;
        Ok(fr)
    }

    pub fn hypergraph(&self) -> &WeightedHypergraph {
        &self.instance.hypergraph
    }

    fn edge_points(&self, k: usize) -> Vec<&[f64]> {
        self.hypergraph().edges()[k]
            .vertices
            .iter()
            .map(|&v| self.points[v].as_slice())
            .collect()
    }

    /// Barycentric coordinates of every pin, `[k][l][i]`.
    pub fn barycentric_all(&self, tol: f64) -> Result<Vec<Vec<Vec<f64>>>, RigidityError> {
        let mut out = Vec::with_capacity(self.instance.pins.len());
        for (k, pins) in self.instance.pins.iter().enumerate() {
            let pts = self.edge_points(k);
            let mut per_edge = Vec::with_capacity(pins.len());
            for (l, x) in pins.iter().enumerate() {
                let b = barycentric(&pts, x, tol).map_err(|e| RigidityError::Row {
                    edge: k,
                    pin: l,
                    source: Box::new(e),
                })?;
                per_edge.push(b);
            }
            out.push(per_edge);
        }
        Ok(out)
    }
}

/// Barycentric coordinates of `pin` with respect to affinely independent
/// `points`: `sum b_i = 1` and `sum b_i p_i = pin`.
pub fn barycentric(points: &[&[f64]], pin: &[f64], tol: f64) -> Result<Vec<f64>, RigidityError> {
    let s = points.len();
    let dim = pin.len();
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .chain(pin.iter())
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    if s == 1 {
        let residual = points[0]
            .iter()
            .zip(pin)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual > tol * scale {
            return Err(RigidityError::OffSpan { residual });
        }
        return Ok(vec![1.0]);
    }
    let a = DMatrix::from_fn(dim, s - 1, |r, c| points[c + 1][r] - points[0][r]);
    let rhs = DMatrix::from_fn(dim, 1, |r, _| pin[r] - points[0][r]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 || svd.singular_values.min() <= smax * 1e-12 * dim.max(s) as f64 {
        return Err(RigidityError::AffinelyDependent);
    }
    let c = svd
        .solve(&rhs, 0.0)
        .map_err(|_| RigidityError::AffinelyDependent)?;
    let residual = (&a * &c - &rhs).norm();
    if residual > tol * scale {
        return Err(RigidityError::OffSpan { residual });
    }
    let mut b = Vec::with_capacity(s);
    b.push(1.0 - c.iter().sum::<f64>());
    b.extend(c.iter().copied());
    Ok(b)
}

/// The simplified rigidity matrix with row labels `(k, t, l)`; column
/// `v * (d - 1) + j` holds coordinate `j` of vertex `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidityMatrix {
    pub dim: usize,
    pub entries: DMatrix<f64>,
    pub row_labels: Vec<RowLabel>,
}

impl RigidityMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// Column indices of column group `C_j` (0-based `j`).
    pub fn column_group(&self, j: usize) -> Vec<usize> {
        let n = self.cols() / (self.dim - 1);
        (0..n).map(|v| equations::column(self.dim, v, j)).collect()
    }

    pub fn rank(&self) -> usize {
        numeric_rank(&self.entries)
    }
}

/// Assembles the simplified rigidity matrix of a framework.
pub fn assemble(fr: &Framework) -> Result<RigidityMatrix, RigidityError> {
    assemble_with_tol(fr, INCIDENCE_TOL)
}

pub fn assemble_with_tol(fr: &Framework, tol: f64) -> Result<RigidityMatrix, RigidityError> {
    let h = fr.hypergraph();
    let bary = fr.barycentric_all(tol)?;
    let rows = equations::simplified_rows(h, &fr.points, &bary);
    Ok(RigidityMatrix {
        dim: h.dim(),
        entries: dense(&rows, h.freedom()),
        row_labels: equations::row_labels(h),
    })
}

/// Raw Jacobian of the minor equations at the framework, same layout as
/// [`assemble`].
pub fn raw_jacobian(fr: &Framework) -> DMatrix<f64> {
    equations::constraint_jacobian(fr.hypergraph(), &fr.instance.pins, &fr.points)
}

fn dense(rows: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c])
}

fn rank_threshold(singular: &[f64], rows: usize, cols: usize) -> f64 {
    let smax = singular.iter().copied().fold(0.0, f64::max);
    smax * RANK_RTOL * rows.max(cols) as f64
}

/// Numeric rank by singular-value thresholding.
pub fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let tol = rank_threshold(sv.as_slice(), m.nrows(), m.ncols());
    sv.iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis of the kernel of `m`, one vector per entry.
pub fn kernel_basis(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    // pad to at least square so that V^T is complete
    let rows = m.nrows().max(cols);
    let padded = DMatrix::from_fn(
        rows,
        cols,
        |r, c| if r < m.nrows() { m[(r, c)] } else { 0.0 },
    );
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let tol = rank_threshold(svd.singular_values.as_slice(), m.nrows(), cols);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s <= tol)
        .map(|(i, _)| v_t.row(i).iter().copied().collect())
        .collect()
}

/// Infinitesimal flexes: orthonormal kernel basis of the rigidity matrix.
pub fn flex_basis(fr: &Framework) -> Result<Vec<Vec<f64>>, RigidityError> {
    Ok(kernel_basis(&assemble(fr)?.entries))
}

/// Determinant of the square rigidity matrix together with its size relative
/// to the product of row norms (Hadamard's bound).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureCondition {
    pub value: f64,
    pub relative: f64,
    pub degenerate: bool,
}

/// Evaluates the pure condition: the rigidity-matrix determinant.
pub fn pure_condition_value(fr: &Framework) -> Result<PureCondition, RigidityError> {
    let m = assemble(fr)?;
    if m.rows() != m.cols() {
        return Err(RigidityError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let value = m.entries.clone().determinant();
    let norms: f64 = m.entries.row_iter().map(|r| r.norm()).product();
    let relative = if norms == 0.0 {
        0.0
    } else {
        value.abs() / norms
    };
    Ok(PureCondition {
        value,
        relative,
        degenerate: relative < PURE_CONDITION_RTOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RankBackend {
    /// Exact elimination over `Z/pZ`, `p = 2^61 - 1`.
    #[default]
    PrimeField,
    /// Singular-value thresholding in `f64`.
    Float,
}

/// Maximum rigidity-matrix rank over `trials` random evaluations of points
/// and barycentric coefficients.
pub fn generic_rank(
    h: &WeightedHypergraph,
    trials: usize,
    seed: u64,
    backend: RankBackend,
) -> usize {
    let full = h.total_copies().min(h.freedom());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials.max(1) {
        let r = match backend {
            RankBackend::PrimeField => prime_trial(h, &mut rng),
            RankBackend::Float => float_trial(h, &mut rng),
        };
        best = best.max(r);
        if best == full {
            break;
        }
    }
    best
}

fn random_bary<S: Scalar>(
    h: &WeightedHypergraph,
    mut sample: impl FnMut() -> S,
) -> Vec<Vec<Vec<S>>> {
    h.edges()
        .iter()
        .map(|e| {
            (0..e.weight)
                .map(|_| {
                    let mut b: Vec<S> = (1..e.size()).map(|_| sample()).collect();
                    let rest = b.iter().fold(S::one(), |acc, &x| acc - x);
                    b.insert(0, rest);
                    b
                })
                .collect()
        })
        .collect()
}

fn prime_trial(h: &WeightedHypergraph, rng: &mut ChaCha8Rng) -> usize {
    let points: Vec<Vec<Fp>> = (0..h.num_vertices())
        .map(|_| (0..h.dim() - 1).map(|_| Fp::random(rng)).collect())
        .collect();
    let bary = random_bary(h, || Fp::random(rng));
    rank_mod_p(equations::simplified_rows(h, &points, &bary))
}

/// Framework with points uniform in `[-1, 1]^(d-1)` and each pin a random
/// affine combination (coefficients in `[-1, 1]`, summing to one) of its
/// hyperedge's points.
pub fn random_framework<R: Rng + ?Sized>(h: &WeightedHypergraph, rng: &mut R) -> Framework {
    let points: Vec<Point> = (0..h.num_vertices())
        .map(|_| {
            (0..h.dim() - 1)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    let bary = random_bary(h, || rng.random_range(-1.0..1.0));
    let pins: Vec<Vec<Point>> = h
        .edges()
        .iter()
        .zip(&bary)
        .map(|(e, bs)| {
            bs.iter()
                .map(|b| {
                    (0..h.dim() - 1)
                        .map(|j| {
                            e.vertices
                                .iter()
                                .zip(b)
                                .map(|(&v, c)| c * points[v][j])
                                .sum()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let instance = PinnedInstance::new(h.clone(), pins).expect("pins match weights");
    Framework { instance, points }
}

fn float_trial(h: &WeightedHypergraph, rng: &mut ChaCha8Rng) -> usize {
    let points: Vec<Vec<f64>> = (0..h.num_vertices())
        .map(|_| {
            (0..h.dim() - 1)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    let bary = random_bary(h, || rng.random_range(-1.0..1.0));
    let rows = equations::simplified_rows(h, &points, &bary);
    numeric_rank(&dense(&rows, h.freedom()))
}
