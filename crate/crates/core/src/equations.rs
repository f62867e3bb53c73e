//! The polynomial incidence system and its two linearizations.
//!
//! For a hyperedge `e_k` of size `s` and pin `x`, incidence means every
//! `s x s` minor of the matrix with rows `p_i - x` vanishes. Only the
//! `d - s` minors on the column sets `C(t)` (first `s - 1` chart columns plus
//! column `s - 1 + t`) are kept. Their gradient is the raw Jacobian row; the
//! simplified row replaces it by `D_{t,j} * b_i`, where `b` are the
//! barycentric coordinates of the pin and `D_{t,j}` is the determinant of the
//! restricted point matrix with column `j` replaced by ones.

use nalgebra::DMatrix;

use crate::field::{determinant, Scalar};
use crate::hypergraph::{Point, WeightedHypergraph};

/// Identifies the row `r^k_{t,l}`; `t` and `l` are 1-based.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub struct RowLabel {
    pub edge: usize,
    pub t: usize,
    pub l: usize,
}

/// 0-based chart columns `C(t)` for an edge of size `s`.
pub fn chart_columns(s: usize, t: usize) -> Vec<usize> {
    let mut cols: Vec<usize> = (0..s - 1).collect();
    cols.push(s + t - 2);
    cols
}

/// Row labels in assembly order: by edge, then `t`, then `l`.
pub fn row_labels(h: &WeightedHypergraph) -> Vec<RowLabel> {
    let d = h.dim();
    let mut labels = Vec::with_capacity(h.total_copies());
    for (k, e) in h.edges().iter().enumerate() {
        for t in 1..=d - e.size() {
            for l in 1..=e.weight {
                labels.push(RowLabel { edge: k, t, l });
            }
        }
    }
    labels
}

/// Column of coordinate `j` (0-based) of vertex `v`.
pub fn column(dim: usize, v: usize, j: usize) -> usize {
    v * (dim - 1) + j
}

/// The coefficient vector `(D_{t,1}, ..., D_{t,d-1})` for the given edge points.
pub fn normal_coefficients<S: Scalar>(points: &[&[S]], t: usize, chart_dim: usize) -> Vec<S> {
    let s = points.len();
    let cols = chart_columns(s, t);
    let mut out = vec![S::zero(); chart_dim];
    for (q, &j) in cols.iter().enumerate() {
        let m: Vec<Vec<S>> = points
            .iter()
            .map(|p| {
                cols.iter()
                    .enumerate()
                    .map(|(c, &col)| if c == q { S::one() } else { p[col] })
                    .collect()
            })
            .collect();
        out[j] = determinant(m);
    }
    out
}

/// Simplified rigidity-matrix rows, dense, from points and barycentric
/// coefficients `bary[k][l][i]`.
pub fn simplified_rows<S: Scalar>(
    h: &WeightedHypergraph,
    points: &[Vec<S>],
    bary: &[Vec<Vec<S>>],
) -> Vec<Vec<S>> {
    let d = h.dim();
    let cols = h.freedom();
    let mut rows = Vec::with_capacity(h.total_copies());
    for (k, e) in h.edges().iter().enumerate() {
        let pts: Vec<&[S]> = e.vertices.iter().map(|&v| points[v].as_slice()).collect();
        for t in 1..=d - e.size() {
            let dt = normal_coefficients(&pts, t, d - 1);
            for b in &bary[k] {
                let mut row = vec![S::zero(); cols];
                for (i, &v) in e.vertices.iter().enumerate() {
                    for (j, &dtj) in dt.iter().enumerate() {
                        row[column(d, v, j)] = dtj * b[i];
                    }
                }
                rows.push(row);
            }
        }
    }
    rows
}

/// Value of `det(E[., C(t)])` and its gradient with respect to each point of
/// the edge (one `d - 1` vector per point).
#[allow(clippy::needless_range_loop)]
pub fn constraint_with_gradient(points: &[&[f64]], pin: &[f64], t: usize) -> (f64, Vec<Vec<f64>>) {
    let s = points.len();
    let chart_dim = pin.len();
    let cols = chart_columns(s, t);
    let e: Vec<Vec<f64>> = points
        .iter()
        .map(|p| cols.iter().map(|&c| p[c] - pin[c]).collect())
        .collect();
    let value = determinant(e.clone());
    let mut grads = vec![vec![0.0; chart_dim]; s];
    for i in 0..s {
        for (q, &col) in cols.iter().enumerate() {
            let minor: Vec<Vec<f64>> = e
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != q)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if (i + q) % 2 == 0 { 1.0 } else { -1.0 };
            grads[i][col] = sign * determinant(minor);
        }
    }
    (value, grads)
}

/// Constraint value only.
pub fn constraint_value(points: &[&[f64]], pin: &[f64], t: usize) -> f64 {
    let cols = chart_columns(points.len(), t);
    let e: Vec<Vec<f64>> = points
        .iter()
        .map(|p| cols.iter().map(|&c| p[c] - pin[c]).collect())
        .collect();
    determinant(e)
}

/// All constraint values in [`row_labels`] order.
pub fn constraint_values(
    h: &WeightedHypergraph,
    pins: &[Vec<Point>],
    points: &[Point],
) -> Vec<f64> {
    let d = h.dim();
    let mut out = Vec::with_capacity(h.total_copies());
    for (k, e) in h.edges().iter().enumerate() {
        let pts: Vec<&[f64]> = e.vertices.iter().map(|&v| points[v].as_slice()).collect();
        for t in 1..=d - e.size() {
            for x in &pins[k] {
                out.push(constraint_value(&pts, x, t));
            }
        }
    }
    out
}

/// Raw Jacobian of [`constraint_values`] with respect to all chart coordinates.
pub fn constraint_jacobian(
    h: &WeightedHypergraph,
    pins: &[Vec<Point>],
    points: &[Point],
) -> DMatrix<f64> {
    let d = h.dim();
    let mut jac = DMatrix::zeros(h.total_copies(), h.freedom());
    let mut row = 0;
    for (k, e) in h.edges().iter().enumerate() {
        let pts: Vec<&[f64]> = e.vertices.iter().map(|&v| points[v].as_slice()).collect();
        for t in 1..=d - e.size() {
            for x in &pins[k] {
                let (_, grads) = constraint_with_gradient(&pts, x, t);
                for (i, &v) in e.vertices.iter().enumerate() {
                    for j in 0..d - 1 {
                        jac[(row, column(d, v, j))] = grads[i][j];
                    }
                }
                row += 1;
            }
        }
    }
    jac
}
