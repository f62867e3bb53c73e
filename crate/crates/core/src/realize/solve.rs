//! Residuals and the Newton / Levenberg-Marquardt solver.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equations::{self, column};
use crate::hypergraph::{PinnedInstance, Point, WeightedHypergraph};
use crate::rigidity::{barycentric, Framework, INCIDENCE_TOL};

/// Jacobians with a larger condition estimate skip the plain Newton step.
pub const NEWTON_MAX_CONDITION: f64 = 1e8;
/// Converged points whose hyperedge spans are thinner than this (relative)
/// count as a failed restart.
pub const DEGENERATE_SPAN: f64 = 1e-7;
const NEWTON_BACKTRACKS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            restarts: 16,
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 || self.restarts == 0 {
            return Err(SolveError::Config(format!(
                "need tol > 0, max_iter >= 1, restarts >= 1 (got {}, {}, {})",
                self.tol, self.max_iter, self.restarts
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("initial points: {0}")]
    Init(String),
    #[error("no real solution found in {restarts} restarts (best residual {best_residual:e})")]
    NoRealSolutionFound { best_residual: f64, restarts: usize },
}

/// A successful solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub framework: Framework,
    /// Root-sum-square of the constraints that involve a free vertex.
    pub residual: f64,
    /// 0-based restart that converged.
    pub restart: usize,
    pub iterations: usize,
}

/// Root-sum-square of every incidence constraint of the framework.
pub fn residual(fr: &Framework) -> f64 {
    let h = fr.hypergraph();
    equations::constraint_values(h, &fr.instance.pins, &fr.points)
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Per-hyperedge root-sum-square residuals.
pub fn edge_residuals(fr: &Framework) -> Vec<f64> {
    let h = fr.hypergraph();
    let d = h.dim();
    h.edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let pts: Vec<&[f64]> = e
                .vertices
                .iter()
                .map(|&v| fr.points[v].as_slice())
                .collect();
            let mut sum = 0.0;
            for t in 1..=d - e.size() {
                for x in &fr.instance.pins[k] {
                    sum += equations::constraint_value(&pts, x, t).powi(2);
                }
            }
            sum.sqrt()
        })
        .collect()
}

/// The square-or-not system over the free vertices.
struct System<'a> {
    inst: &'a PinnedInstance,
    /// hyperedges touching a free vertex
    edges: Vec<usize>,
    /// vertex set and pins of each hyperedge in `edges`
    groups: Vec<(&'a [usize], Vec<&'a [f64]>)>,
    /// column of each free coordinate in the full layout, in unknown order
    free_col: Vec<Option<usize>>,
    unknowns: usize,
    rows: usize,
}

impl<'a> System<'a> {
    fn new(inst: &'a PinnedInstance, frozen: &BTreeSet<usize>) -> Self {
        let h = &inst.hypergraph;
        let d = h.dim();
        let mut free_col = vec![None; h.freedom()];
        let mut unknowns = 0;
        for v in (0..h.num_vertices()).filter(|v| !frozen.contains(v)) {
            for j in 0..d - 1 {
                free_col[column(d, v, j)] = Some(unknowns);
                unknowns += 1;
            }
        }
        let touches = |vs: &[usize]| vs.iter().any(|v| !frozen.contains(v));
        let edges: Vec<usize> = (0..h.edges().len())
            .filter(|&k| touches(&h.edges()[k].vertices))
            .collect();
        let groups: Vec<(&[usize], Vec<&[f64]>)> = edges
            .iter()
            .map(|&k| {
                (
                    h.edges()[k].vertices.as_slice(),
                    inst.pins[k].iter().map(Vec::as_slice).collect(),
                )
            })
            .collect();
        let rows = groups
            .iter()
            .map(|(vs, ps)| (d - vs.len()) * ps.len())
            .sum();
        Self {
            inst,
            edges,
            groups,
            free_col,
            unknowns,
            rows,
        }
    }

    /// Residuals and Jacobian with each group's rows divided by the current
    /// size of its span, plus the unscaled residual norm. The scaling leaves
    /// the solution set alone but removes the pull toward collapsed
    /// hyperedges, where the raw residual vanishes; its derivative is dropped,
    /// which costs nothing at a root.
    fn evaluate(&self, points: &[Point], want_jac: bool) -> (DVector<f64>, DMatrix<f64>, f64) {
        let d = self.inst.dim();
        let mut raw = 0.0;
        let mut r = DVector::zeros(self.rows);
        let mut jac = if want_jac {
            DMatrix::zeros(self.rows, self.unknowns)
        } else {
            DMatrix::zeros(0, 0)
        };
        let mut row = 0;
        for (vs, pins) in &self.groups {
            let pts: Vec<&[f64]> = vs.iter().map(|&v| points[v].as_slice()).collect();
            let w = 1.0 / span_size(&pts).max(1e-150);
            for t in 1..=d - vs.len() {
                for x in pins {
                    if want_jac {
                        let (val, grads) = equations::constraint_with_gradient(&pts, x, t);
                        raw += val * val;
                        r[row] = w * val;
                        for (&v, g) in vs.iter().zip(&grads) {
                            for (j, &gj) in g.iter().enumerate() {
                                if let Some(c) = self.free_col[column(d, v, j)] {
                                    jac[(row, c)] = w * gj;
                                }
                            }
                        }
                    } else {
                        let val = equations::constraint_value(&pts, x, t);
                        raw += val * val;
                        r[row] = w * val;
                    }
                    row += 1;
                }
            }
        }
        (r, jac, raw.sqrt())
    }

    fn apply(&self, points: &mut [Point], step: &DVector<f64>) {
        let d = self.inst.dim();
        for (v, p) in points.iter_mut().enumerate() {
            for (j, x) in p.iter_mut().enumerate() {
                if let Some(c) = self.free_col[column(d, v, j)] {
                    *x += step[c];
                }
            }
        }
    }
}

/// `sqrt(det(A^T A))` for the edge vectors `A` from the first point; 1 for a
/// single point.
fn span_size(pts: &[&[f64]]) -> f64 {
    if pts.len() < 2 {
        return 1.0;
    }
    let a = DMatrix::from_fn(pts[0].len(), pts.len() - 1, |r, c| {
        pts[c + 1][r] - pts[0][r]
    });
    (a.transpose() * &a).determinant().max(0.0).sqrt()
}

/// Newton step when the system is square and well conditioned.
fn newton_step(jac: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    if jac.nrows() != jac.ncols() {
        return None;
    }
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 0.0 || smax / smin > NEWTON_MAX_CONDITION {
        return None;
    }
    svd.solve(&(-r), 0.0).ok()
}

fn lm_step(jac: &DMatrix<f64>, r: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let jt = jac.transpose();
    let mut a = &jt * jac;
    let scale = a.diagonal().max().max(1e-300);
    for i in 0..a.nrows() {
        a[(i, i)] += lambda * scale;
    }
    a.cholesky().map(|c| c.solve(&(-(&jt * r))))
}

/// Runs one local solve from `points`, which is updated in place. Returns
/// the final raw residual, the iteration count and whether it converged.
fn descend(sys: &System, points: &mut [Point], cfg: &SolveConfig) -> (f64, usize, bool) {
    let (mut r, mut jac, mut raw) = sys.evaluate(points, true);
    let mut norm = r.norm();
    let mut lambda = 1e-3;
    for iter in 0..cfg.max_iter {
        // both norms: near a collapsed hyperedge only the raw one is small
        if raw <= cfg.tol && norm <= cfg.tol {
            return (raw, iter, true);
        }
        if !norm.is_finite() {
            break;
        }
        let mut accepted = false;
        if let Some(step) = newton_step(&jac, &r) {
            // backtrack along the Newton direction before falling back to LM
            let mut alpha = 1.0;
            for _ in 0..NEWTON_BACKTRACKS {
                let mut trial = points.to_vec();
                sys.apply(&mut trial, &(&step * alpha));
                let (tr, _, _) = sys.evaluate(&trial, false);
                if tr.norm() < norm {
                    points.clone_from_slice(&trial);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
        }
        while !accepted && lambda < 1e12 {
            let Some(step) = lm_step(&jac, &r, lambda) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = points.to_vec();
            sys.apply(&mut trial, &step);
            let (tr, _, _) = sys.evaluate(&trial, false);
            if tr.norm() < norm {
                points.clone_from_slice(&trial);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
            } else {
                lambda *= 10.0;
            }
        }
        if !accepted {
            break;
        }
        (r, jac, raw) = sys.evaluate(points, true);
        norm = r.norm();
    }
    (raw, cfg.max_iter, false)
}

/// Solves the incidence system for the vertices outside `frozen`.
///
/// `init` gives starting points for every vertex and is required when
/// `frozen` is nonempty; frozen vertices keep their `init` coordinates. The
/// first restart starts from `init` (if given). Later restarts place each free
/// vertex at a random pin of an incident hyperedge plus a uniform offset in
/// `[-1, 1]` per coordinate; a vertex without pins is offset from the origin.
pub fn solve(
    inst: &PinnedInstance,
    cfg: &SolveConfig,
    init: Option<&[Point]>,
    frozen: &BTreeSet<usize>,
) -> Result<SolveReport, SolveError> {
    solve_accepting(inst, cfg, init, frozen, &|_| true)
}

/// [`solve`] that also counts a converged restart as failed unless `accept`
/// holds for its points.
pub fn solve_accepting(
    inst: &PinnedInstance,
    cfg: &SolveConfig,
    init: Option<&[Point]>,
    frozen: &BTreeSet<usize>,
    accept: &dyn Fn(&[Point]) -> bool,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let h = &inst.hypergraph;
    let n = h.num_vertices();
    let chart = h.dim() - 1;
    if let Some(p) = init {
        if p.len() != n || p.iter().any(|q| q.len() != chart) {
            return Err(SolveError::Init(format!(
                "expected {n} points of dimension {chart}"
            )));
        }
    } else if !frozen.is_empty() {
        return Err(SolveError::Init(
            "frozen vertices need initial coordinates".into(),
        ));
    }
    if let Some(&v) = frozen.iter().find(|&&v| v >= n) {
        return Err(SolveError::Init(format!("frozen vertex {v} out of range")));
    }
    let sys = System::new(inst, frozen);
    let origin = vec![0.0; chart];
    let anchors: Vec<Vec<&[f64]>> = (0..n)
        .map(|v| {
            h.edges()
                .iter()
                .zip(&inst.pins)
                .filter(|(e, _)| e.contains(v))
                .flat_map(|(_, ps)| ps.iter().map(Vec::as_slice))
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best = f64::INFINITY;
    for restart in 0..cfg.restarts {
        let mut points: Vec<Point> = match init {
            Some(p) if restart == 0 => p.to_vec(),
            _ => (0..n)
                .map(|v| {
                    if frozen.contains(&v) {
                        init.expect("checked above")[v].clone()
                    } else {
                        let near = &anchors[v];
                        let base: &[f64] = if near.is_empty() {
                            &origin
                        } else {
                            near[rng.random_range(0..near.len())]
                        };
                        base.iter()
                            .map(|x| x + rng.random_range(-1.0..1.0))
                            .collect()
                    }
                })
                .collect(),
        };
        let (res, iterations, converged) = descend(&sys, &mut points, cfg);
        if converged && !spurious(&sys, h, &points) && accept(&points) {
            let framework = Framework {
                instance: inst.clone(),
                points,
            };
            return Ok(SolveReport {
                framework,
                residual: res,
                restart,
                iterations,
            });
        }
        if res < best {
            best = res;
        }
    }
    Err(SolveError::NoRealSolutionFound {
        best_residual: best,
        restarts: cfg.restarts,
    })
}

/// True if the converged points are a spurious root: some hyperedge touching
/// a free vertex has affinely dependent points (every incidence equation then
/// vanishes), or a pin is off its span although the chart equations vanish.
fn spurious(sys: &System, h: &WeightedHypergraph, points: &[Point]) -> bool {
    sys.edges.iter().any(|&k| {
        let vs = &h.edges()[k].vertices;
        let pts: Vec<&[f64]> = vs.iter().map(|&v| points[v].as_slice()).collect();
        if vs.len() >= 2 {
            let scale = pts
                .iter()
                .flat_map(|p| p.iter())
                .fold(1.0f64, |m, x| m.max(x.abs()));
            let a = DMatrix::from_fn(pts[0].len(), vs.len() - 1, |r, c| pts[c + 1][r] - pts[0][r]);
            if a.singular_values().min() <= DEGENERATE_SPAN * scale {
                return true;
            }
        }
        sys.inst.pins[k]
            .iter()
            .any(|x| barycentric(&pts, x, INCIDENCE_TOL).is_err())
    })
}
