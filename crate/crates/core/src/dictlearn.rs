//! Dictionary learning on top of the rigidity machinery.
//!
//! Data vectors become pins in an affine chart of projective `(d-1)`-space,
//! dictionary vectors become the points of a realized framework, and the
//! support of each data vector is the hyperedge its pin sits on.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Hyperedge, PinnedInstance, Point, WeightedHypergraph};
use crate::realize::{
    build_construction, drplan, edge_residuals, incremental_solve, max_rigid_subsystem_ordered,
    solve_with_plan, solve_with_plan_checked, ConstructionError, ConstructionTrace, DrPlanError,
    IncrementalError, SolveConfig, CHECK_TOL,
};
use crate::rigidity::{general_position_warnings, generic_rank, RankBackend};
use crate::sparsity::PebbleGame;

/// Coefficients with magnitude below this are set to zero.
pub const COEFFICIENT_CLAMP: f64 = 1e-12;
/// Default relative reconstruction tolerance.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;
/// Chart rotations tried; the one with the largest smallest last coordinate wins.
const ROTATION_CANDIDATES: usize = 8;
/// Reassignments of data points to hyperedges tried by [`learn_random`].
pub const ASSIGNMENT_ATTEMPTS: usize = 8;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("need 1 <= s < d, got d = {d}, s = {s}")]
    Shape { d: usize, s: usize },
    #[error("dataset: {0}")]
    Dataset(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("solver failed after {attempts} assignments, last: {last}")]
    Incremental {
        attempts: usize,
        last: IncrementalError,
    },
    #[error("fitted hypergraph: {0}")]
    Hypergraph(String),
    #[error("core system is not rigid: {copies} copies for {freedom} coordinates")]
    NotRigid { copies: usize, freedom: usize },
    #[error(transparent)]
    Plan(#[from] DrPlanError),
}

/// Data vectors, optionally with known supports over `n` dictionary slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supports: Option<Vec<Vec<usize>>>,
}

impl Dataset {
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Self {
        Self {
            d,
            points,
            n: None,
            supports: None,
        }
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        if self.d < 2 {
            return Err(LearnError::Dataset(format!("dimension {} below 2", self.d)));
        }
        for (i, x) in self.points.iter().enumerate() {
            if x.len() != self.d {
                return Err(LearnError::Dataset(format!(
                    "point {i} has {} coordinates, expected {}",
                    x.len(),
                    self.d
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(LearnError::Dataset(format!("point {i} is not finite")));
            }
            if x.iter().all(|&v| v == 0.0) {
                return Err(LearnError::Dataset(format!("point {i} is zero")));
            }
        }
        if let Some(sup) = &self.supports {
            let n = self
                .n
                .ok_or_else(|| LearnError::Dataset("supports given without n".into()))?;
            if sup.len() != self.points.len() {
                return Err(LearnError::Dataset(format!(
                    "{} supports for {} points",
                    sup.len(),
                    self.points.len()
                )));
            }
            for (i, s) in sup.iter().enumerate() {
                if s.is_empty() || s.iter().any(|&j| j >= n) {
                    return Err(LearnError::Dataset(format!(
                        "support of point {i} is empty or out of range"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        let ds: Dataset =
            serde_json::from_str(text).map_err(|e| LearnError::Dataset(e.to_string()))?;
        ds.validate()?;
        Ok(ds)
    }

    /// One point per row, fields separated by commas or whitespace; `#` starts a comment.
    pub fn from_delimited(text: &str) -> Result<Self, LearnError> {
        let mut points = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .map(str::parse)
                .collect();
            points
                .push(row.map_err(|e| LearnError::Dataset(format!("line {}: {e}", line_no + 1)))?);
        }
        let d = points.first().map_or(0, Vec::len);
        let ds = Dataset::new(d, points);
        ds.validate()?;
        Ok(ds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }
}

/// Sparse coefficients of one data point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCode {
    pub point: usize,
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseCode {
    pub fn nonzeros(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dictionary {
    pub d: usize,
    pub vectors: Vec<Vec<f64>>,
    pub codes: Vec<SparseCode>,
}

impl Dictionary {
    /// Computes codes for `points` on the given supports by least squares.
    pub fn with_codes(
        d: usize,
        vectors: Vec<Vec<f64>>,
        points: &[Vec<f64>],
        supports: &[(usize, Vec<usize>)],
    ) -> Self {
        let codes = supports
            .iter()
            .map(|(i, s)| code_on_support(&vectors, &points[*i], *i, s))
            .collect();
        Self { d, vectors, codes }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dictionary serializes")
    }
}

fn code_on_support(vectors: &[Vec<f64>], x: &[f64], point: usize, support: &[usize]) -> SparseCode {
    let d = x.len();
    let a = DMatrix::from_fn(d, support.len(), |r, c| vectors[support[c]][r]);
    let b = DVector::from_column_slice(x);
    let theta = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(support.len()));
    let values = theta
        .iter()
        .map(|&v| if v.abs() < COEFFICIENT_CLAMP { 0.0 } else { v })
        .collect();
    SparseCode {
        point,
        support: support.to_vec(),
        values,
    }
}

/// `ceil((d - s) m / (d - 1))`.
pub fn size_bound(m: usize, d: usize, s: usize) -> usize {
    assert!(1 <= s && s < d, "need 1 <= s < d");
    ((d - s) * m).div_ceil(d - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCheck {
    pub point: usize,
    pub support_size: usize,
    /// `||x - D theta|| / ||x||`; infinite for a point without a code.
    pub error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub s: usize,
    pub tol: f64,
    pub points: Vec<PointCheck>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.pass).count()
    }

    pub fn max_error(&self) -> f64 {
        self.points.iter().map(|p| p.error).fold(0.0, f64::max)
    }
}

/// Checks every coded point, plus every point listed in `required`.
pub fn verify_points(
    x: &Dataset,
    dict: &Dictionary,
    s: usize,
    tol: f64,
    required: &[usize],
) -> VerifyReport {
    let mut by_point: BTreeMap<usize, &SparseCode> = BTreeMap::new();
    for c in &dict.codes {
        by_point.insert(c.point, c);
    }
    let mut wanted: BTreeSet<usize> = by_point.keys().copied().collect();
    wanted.extend(required.iter().copied());
    let points: Vec<PointCheck> = wanted
        .into_iter()
        .map(|i| {
            let Some(code) = by_point.get(&i).filter(|_| i < x.points.len()) else {
                return PointCheck {
                    point: i,
                    support_size: 0,
                    error: f64::INFINITY,
                    pass: false,
                };
            };
            let xi = &x.points[i];
            let mut r = xi.clone();
            for (&j, &v) in code.support.iter().zip(&code.values) {
                let dv = dict.vectors.get(j).map_or(&[][..], Vec::as_slice);
                if dv.len() != xi.len() {
                    return PointCheck {
                        point: i,
                        support_size: code.nonzeros(),
                        error: f64::INFINITY,
                        pass: false,
                    };
                }
                for (rk, dk) in r.iter_mut().zip(dv) {
                    *rk -= v * dk;
                }
            }
            let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let error = r.iter().map(|v| v * v).sum::<f64>().sqrt() / norm;
            let support_size = code.nonzeros();
            PointCheck {
                point: i,
                support_size,
                error,
                pass: error <= tol && support_size <= s,
            }
        })
        .collect();
    let pass = points.iter().all(|p| p.pass);
    VerifyReport {
        s,
        tol,
        points,
        pass,
    }
}

/// Checks every point of `x` against the dictionary's codes.
pub fn verify(x: &Dataset, dict: &Dictionary, s: usize, tol: f64) -> VerifyReport {
    let all: Vec<usize> = (0..x.points.len()).collect();
    verify_points(x, dict, s, tol, &all)
}

/// Seeded rotation, the chart `y -> y[..d-1] / y[d-1]`, then an affine
/// normalization (coordinatewise median and median absolute deviation) that
/// puts the bulk of the data's chart points in the box `[-1, 1]^(d-1)`.
/// Incidence is affine invariant, so the normalization changes nothing but
/// the scale the solver sees.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    rotation: DMatrix<f64>,
    center: Vec<f64>,
    scale: f64,
}

fn random_rotation(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

impl Chart {
    /// Picks the rotation that keeps the data furthest from the chart
    /// boundary, then fits the box normalization to the data.
    pub fn for_data(points: &[Vec<f64>], d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<(f64, DMatrix<f64>)> = None;
        for _ in 0..ROTATION_CANDIDATES {
            let q = random_rotation(d, &mut rng);
            let margin = points
                .iter()
                .map(|x| {
                    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    (0..d).map(|j| q[(d - 1, j)] * x[j]).sum::<f64>().abs() / norm
                })
                .fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|(m, _)| margin > *m) {
                best = Some((margin, q));
            }
        }
        let mut chart = Self {
            rotation: best.expect("at least one candidate").1,
            center: vec![0.0; d - 1],
            scale: 1.0,
        };
        if !points.is_empty() {
            let raw: Vec<Point> = points.iter().map(|x| chart.to_chart(x)).collect();
            let median = |mut v: Vec<f64>| {
                v.sort_by(f64::total_cmp);
                v[v.len() / 2]
            };
            chart.center = (0..d - 1)
                .map(|j| median(raw.iter().map(|p| p[j]).collect()))
                .collect();
            let half = (0..d - 1)
                .map(|j| median(raw.iter().map(|p| (p[j] - chart.center[j]).abs()).collect()))
                .fold(0.0, f64::max);
            chart.scale = if half > 1e-12 { half } else { 1.0 };
        }
        chart
    }

    pub fn identity(d: usize) -> Self {
        Self {
            rotation: DMatrix::identity(d, d),
            center: vec![0.0; d - 1],
            scale: 1.0,
        }
    }

    pub fn to_chart(&self, x: &[f64]) -> Point {
        let y = &self.rotation * DVector::from_column_slice(x);
        let d = y.len();
        (0..d - 1)
            .map(|j| (y[j] / y[d - 1] - self.center[j]) / self.scale)
            .collect()
    }

    /// Unit vector over the chart point, first nonzero coordinate positive.
    pub fn lift(&self, p: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = p
            .iter()
            .zip(&self.center)
            .map(|(q, c)| q * self.scale + c)
            .collect();
        y.push(1.0);
        let x = self.rotation.transpose() * DVector::from_vec(y);
        let norm = x.norm();
        let mut v: Vec<f64> = x.iter().map(|c| c / norm).collect();
        if v.iter().find(|c| c.abs() > 1e-15).is_some_and(|&c| c < 0.0) {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        v
    }
}

/// Output of [`learn_random`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomLearn {
    pub dictionary: Dictionary,
    pub hypergraph: WeightedHypergraph,
    pub trace: ConstructionTrace,
    /// Data point placed on each hyperedge.
    pub assignment: Vec<usize>,
    /// Data points beyond the construction's pin budget.
    pub unused: Vec<usize>,
    /// Assignment attempts made (1 when the first succeeds).
    pub attempts: usize,
    pub report: VerifyReport,
}

/// The staged construction pipeline for data in general position.
pub fn learn_random(x: &Dataset, s: usize, cfg: &SolveConfig) -> Result<RandomLearn, LearnError> {
    x.validate()?;
    let d = x.d;
    if s == 0 || s >= d {
        return Err(LearnError::Shape { d, s });
    }
    let m = x.points.len();
    let (h, trace) = build_construction(d, s, m, cfg.seed)?;
    let chart = Chart::for_data(&x.points, d, cfg.seed);
    let used = trace.pins_used;
    let mut assignment: Vec<usize> = (0..used).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa551);
    let mut last = None;
    for attempt in 0..ASSIGNMENT_ATTEMPTS {
        if attempt > 0 {
            assignment.shuffle(&mut rng);
        }
        let pins: Vec<Point> = assignment
            .iter()
            .map(|&i| chart.to_chart(&x.points[i]))
            .collect();
        let attempt_cfg = SolveConfig {
            seed: cfg.seed.wrapping_add(attempt as u64),
            ..*cfg
        };
        match incremental_solve(&h, &trace, &pins, &attempt_cfg) {
            Ok((points, _)) => {
                let vectors: Vec<Vec<f64>> = points.iter().map(|p| chart.lift(p)).collect();
                let supports: Vec<(usize, Vec<usize>)> = assignment
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (i, h.edges()[k].vertices.clone()))
                    .collect();
                let dictionary = Dictionary::with_codes(d, vectors, &x.points, &supports);
                let report = verify_points(x, &dictionary, s, RECONSTRUCTION_TOL, &assignment);
                return Ok(RandomLearn {
                    dictionary,
                    hypergraph: h,
                    trace,
                    assignment,
                    unused: (used..m).collect(),
                    attempts: attempt + 1,
                    report,
                });
            }
            Err(e) => last = Some(e),
        }
    }
    Err(LearnError::Incremental {
        attempts: ASSIGNMENT_ATTEMPTS,
        last: last.expect("at least one attempt"),
    })
}

/// A data point whose pin is not part of the solved core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationPin {
    pub point: usize,
    pub error: f64,
}

/// Output of [`learn_fitted`].
#[derive(Debug, Clone, PartialEq)]
pub struct FittedLearn {
    pub dictionary: Dictionary,
    /// Weighted hypergraph of the solved core.
    pub core: WeightedHypergraph,
    pub max_fan_in: usize,
    /// Core residual per core hyperedge in the chart.
    pub core_residuals: Vec<f64>,
    pub validation: Vec<ValidationPin>,
    /// Some validation pin misses its subspace: the data are not generic or
    /// not consistent with the supports.
    pub validation_breach: bool,
    /// The core root was chosen to satisfy the validation pins.
    pub guided: bool,
    pub report: VerifyReport,
}

/// Realizes the dictionary for data with known supports.
pub fn learn_fitted(x: &Dataset, cfg: &SolveConfig) -> Result<FittedLearn, LearnError> {
    x.validate()?;
    let d = x.d;
    let (Some(n), Some(supports)) = (x.n, x.supports.as_ref()) else {
        return Err(LearnError::Dataset(
            "fitted learning needs n and supports".into(),
        ));
    };
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, sup) in supports.iter().enumerate() {
        let mut key = sup.clone();
        key.sort_unstable();
        key.dedup();
        if key.len() >= d {
            return Err(LearnError::Hypergraph(format!(
                "support of point {i} has {} >= d vectors",
                key.len()
            )));
        }
        groups.entry(key).or_default().push(i);
    }
    let mut edges = Vec::new();
    let mut pins_of_edge: Vec<Vec<usize>> = Vec::new();
    let mut validation_points = Vec::new();
    for (set, pts) in &groups {
        let w = pts.len().min(set.len());
        edges.push(Hyperedge::new(set.clone(), w));
        pins_of_edge.push(pts[..w].to_vec());
        validation_points.extend_from_slice(&pts[w..]);
    }
    let h = WeightedHypergraph::new(d, n, edges, None)
        .map_err(|e| LearnError::Hypergraph(e.to_string()))?;
    // first pins of every hyperedge before any second pin
    let mut slots: Vec<(usize, usize)> = h
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(k, e)| (0..e.weight).map(move |l| (k, l)))
        .collect();
    slots.sort_by_key(|&(k, l)| (l, k));
    let core = max_rigid_subsystem_ordered(&h, &slots);
    for &(k, l) in &core.dropped {
        validation_points.push(pins_of_edge[k][l]);
    }
    let ch = &core.hypergraph;
    if !core.tight {
        return Err(LearnError::NotRigid {
            copies: ch.total_copies(),
            freedom: ch.freedom(),
        });
    }
    let core_points: Vec<Vec<usize>> = core
        .edge_map
        .iter()
        .map(|&k| core.kept[k].iter().map(|&l| pins_of_edge[k][l]).collect())
        .collect();
    let plan = drplan(ch)?;
    let chart = Chart::for_data(&x.points, d, cfg.seed);
    let pins: Vec<Vec<Point>> = core_points
        .iter()
        .map(|pts| pts.iter().map(|&i| chart.to_chart(&x.points[i])).collect())
        .collect();
    let inst =
        PinnedInstance::new(ch.clone(), pins).map_err(|e| LearnError::Hypergraph(e.to_string()))?;
    let checks: Vec<(Vec<usize>, Point)> = validation_points
        .iter()
        .map(|&i| {
            let mut sup = supports[i].clone();
            sup.sort_unstable();
            sup.dedup();
            (sup, chart.to_chart(&x.points[i]))
        })
        .collect();
    // validation pins pick the root among the core's finitely many; if no
    // node root satisfies them, solve the core alone and report the breach
    let (fr, guided) = match solve_with_plan_checked(&inst, &plan, cfg, &checks, CHECK_TOL) {
        Ok(fr) => (fr, true),
        Err(_) if !checks.is_empty() => (solve_with_plan(&inst, &plan, cfg)?, false),
        Err(e) => return Err(e.into()),
    };
    let vectors: Vec<Vec<f64>> = fr.points.iter().map(|p| chart.lift(p)).collect();
    let mut coded: Vec<(usize, Vec<usize>)> = Vec::new();
    for (set, pts) in &groups {
        coded.extend(pts.iter().map(|&i| (i, set.clone())));
    }
    coded.sort_by_key(|(i, _)| *i);
    let dictionary = Dictionary::with_codes(d, vectors, &x.points, &coded);
    let s = groups.keys().map(Vec::len).max().unwrap_or(0);
    let core_set: Vec<usize> = core_points.iter().flatten().copied().collect();
    let report = verify_points(x, &dictionary, s, RECONSTRUCTION_TOL, &core_set);
    let full = verify(x, &dictionary, s, RECONSTRUCTION_TOL);
    validation_points.sort_unstable();
    let validation: Vec<ValidationPin> = validation_points
        .iter()
        .map(|&i| ValidationPin {
            point: i,
            error: full
                .points
                .iter()
                .find(|p| p.point == i)
                .map_or(f64::INFINITY, |p| p.error),
        })
        .collect();
    let validation_breach = validation.iter().any(|v| v.error > RECONSTRUCTION_TOL);
    let report = VerifyReport {
        points: report
            .points
            .into_iter()
            .filter(|p| core_set.contains(&p.point))
            .collect(),
        ..report
    };
    let report = VerifyReport {
        pass: report.points.iter().all(|p| p.pass),
        ..report
    };
    Ok(FittedLearn {
        dictionary,
        core: ch.clone(),
        max_fan_in: plan.max_fan_in(),
        core_residuals: edge_residuals(&fr),
        validation,
        validation_breach,
        guided,
        report,
    })
}

/// Unit vectors drawn uniformly from the sphere.
pub fn uniform_dataset(d: usize, m: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..m).map(|_| random_unit(d, &mut rng)).collect();
    Dataset::new(d, points)
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Random `(d-1, 0)`-tight hypergraph on `n` vertices with one pin on each of
/// `(d-1) n / (d-s)` distinct `s`-sets, full generic rank and no forced
/// special pin positions. `None` if the count is not integral or no such
/// hypergraph turned up.
pub fn random_tight_support(
    d: usize,
    s: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Option<WeightedHypergraph> {
    if !((d - 1) * n).is_multiple_of(d - s) || n < s {
        return None;
    }
    let target = (d - 1) * n / (d - s);
    for _ in 0..64 {
        let mut game = PebbleGame::new(n, d - 1, 0);
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..target * 50 {
            if sets.len() == target {
                break;
            }
            order.shuffle(rng);
            let mut e = order[..s].to_vec();
            e.sort_unstable();
            if !sets.contains(&e) && game.try_add_group(&e, d - s).is_some() {
                sets.insert(e);
            }
        }
        if sets.len() != target {
            continue;
        }
        let edges = sets.into_iter().map(|e| Hyperedge::new(e, 1)).collect();
        let h = WeightedHypergraph::new(d, n, edges, None).expect("distinct valid sets");
        if general_position_warnings(&h).is_empty()
            && generic_rank(&h, 2, rng.random(), RankBackend::PrimeField) == h.freedom()
        {
            return Some(h);
        }
    }
    None
}

/// A planted fitted instance: hidden unit dictionary, a random tight support
/// hypergraph, and one data point per hyperedge with random nonzero
/// coefficients. Returns the dataset and the hidden vectors.
pub fn planted_fitted(d: usize, s: usize, n: usize, seed: u64) -> Option<(Dataset, Vec<Vec<f64>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_tight_support(d, s, n, &mut rng)?;
    let hidden: Vec<Vec<f64>> = (0..n).map(|_| random_unit(d, &mut rng)).collect();
    let mut points = Vec::new();
    let mut supports = Vec::new();
    for e in h.edges() {
        let mut x = vec![0.0; d];
        for &v in &e.vertices {
            let c = rng.random_range(0.5..1.5) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            for (xk, hk) in x.iter_mut().zip(&hidden[v]) {
                *xk += c * hk;
            }
        }
        points.push(x);
        supports.push(e.vertices.clone());
    }
    Some((
        Dataset {
            d,
            points,
            n: Some(n),
            supports: Some(supports),
        },
        hidden,
    ))
}
