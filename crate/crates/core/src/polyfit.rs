//! Per-rectangle polynomial least squares: monomial bases, additive
//! sufficient statistics, and projections onto piecewise-polynomial
//! subspaces.
//!
//! Monomials are evaluated at globally scaled coordinates `i_k / n_k`, so a
//! rectangle's Gram matrix and moment vector add across any split of the
//! rectangle. That additivity is what lets the solvers assemble per-rectangle
//! statistics bottom-up instead of rescanning cells.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{for_each_cell, Family, LatticeArray, Partition, Rect};

/// Relative eigenvalue threshold below which a Gram pivot is treated as
/// zero, giving the minimum-norm least-squares solution.
const PIVOT_RTOL: f64 = 1e-10;

/// Number of monomials of total degree at most `degree` in `d` variables,
/// i.e. `C(degree + d, d)`.
pub fn basis_dim(degree: usize, d: usize) -> usize {
    // Multiplicative binomial evaluation; exact for the small sizes used.
    let mut num = 1.0f64;
    for i in 1..=d {
        num = num * (degree + i) as f64 / i as f64;
    }
    num.round() as usize
}

/// The monomial basis of total degree <= `degree` on a lattice of shape
/// `dims`, with a fixed column order: degree-major, then lexicographically
/// by exponents with earlier axes first (so for d = 2, r = 2 the columns
/// are 1, x1, x2, x1^2, x1 x2, x2^2).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyBasis {
    degree: usize,
    dims: Vec<usize>,
    exponents: Vec<Vec<u32>>,
}

impl PolyBasis {
    pub fn new(degree: usize, dims: &[usize]) -> Self {
        let d = dims.len();
        let mut exponents = Vec::with_capacity(basis_dim(degree, d));
        for total in 0..=degree {
            let mut current = vec![0u32; d];
            push_exponents(&mut exponents, &mut current, 0, total as u32);
        }
        Self {
            degree,
            dims: dims.to_vec(),
            exponents,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of basis columns L.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Evaluates every monomial at a lattice point, writing into `out`.
    pub fn eval_into(&self, point: &[usize], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        // Powers of each scaled coordinate up to `degree`.
        for (col, exps) in self.exponents.iter().enumerate() {
            let mut v = 1.0;
            for (axis, &e) in exps.iter().enumerate() {
                if e > 0 {
                    let x = point[axis] as f64 / self.dims[axis] as f64;
                    v *= x.powi(e as i32);
                }
            }
            out[col] = v;
        }
    }
}

fn push_exponents(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, axis: usize, remaining: u32) {
    if axis + 1 == current.len() {
        current[axis] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[axis] = e;
        push_exponents(out, current, axis + 1, remaining - e);
        current[axis] = 0;
    }
}

/// Vector of monomial values at a 1-based lattice point.
pub fn basis_value(basis: &PolyBasis, point: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; basis.len()];
    basis.eval_into(point, &mut out);
    out
}

/// Sufficient statistics of one rectangle for least squares against a
/// basis: cell count, response sum and sum of squares, the Gram matrix
/// `B_R^T B_R` (row-major), and the moment vector `B_R^T y_R`.
///
/// All fields are additive over a disjoint union of rectangles.
#[derive(Clone, Debug, PartialEq)]
pub struct RectStats {
    pub count: f64,
    pub sum: f64,
    pub sumsq: f64,
    pub gram: Vec<f64>,
    pub moment: Vec<f64>,
}

impl RectStats {
    pub fn zeros(basis_len: usize) -> Self {
        Self {
            count: 0.0,
            sum: 0.0,
            sumsq: 0.0,
            gram: vec![0.0; basis_len * basis_len],
            moment: vec![0.0; basis_len],
        }
    }

    pub fn basis_len(&self) -> usize {
        self.moment.len()
    }

    /// Statistics of a single lattice cell.
    pub fn singleton(y: &LatticeArray, point: &[usize], basis: &PolyBasis) -> Self {
        let l = basis.len();
        let mut s = Self::zeros(l);
        let mut row = vec![0.0; l];
        basis.eval_into(point, &mut row);
        let v = y.get(point);
        accumulate(&mut s, &row, v);
        s
    }

    /// Direct accumulation over all cells of a rectangle.
    pub fn from_rect(y: &LatticeArray, rect: &Rect, basis: &PolyBasis) -> Self {
        let l = basis.len();
        let mut s = Self::zeros(l);
        let mut row = vec![0.0; l];
        for_each_cell(rect, y.dims(), |point, lin| {
            basis.eval_into(point, &mut row);
            accumulate(&mut s, &row, y.values()[lin]);
        });
        s
    }

    pub fn add_assign(&mut self, other: &RectStats) {
        debug_assert_eq!(self.basis_len(), other.basis_len());
        self.count += other.count;
        self.sum += other.sum;
        self.sumsq += other.sumsq;
        for (a, b) in self.gram.iter_mut().zip(&other.gram) {
            *a += b;
        }
        for (a, b) in self.moment.iter_mut().zip(&other.moment) {
            *a += b;
        }
    }
}

fn accumulate(s: &mut RectStats, row: &[f64], v: f64) {
    let l = row.len();
    s.count += 1.0;
    s.sum += v;
    s.sumsq += v * v;
    for i in 0..l {
        for j in 0..l {
            s.gram[i * l + j] += row[i] * row[j];
        }
    }
    for i in 0..l {
        s.moment[i] += v * row[i];
    }
}

/// Solves the normal equations from flat Gram/moment storage, returning the
/// minimum-norm coefficient vector and the explained quadratic `m^T c`.
///
/// Near-zero eigenvalues (relative to the largest) are dropped, so rank
/// deficiency from tiny rectangles or collinear columns never faults.
pub(crate) fn solve_normal_equations(gram: &[f64], moment: &[f64], l: usize) -> (Vec<f64>, f64) {
    if l == 1 {
        let (g, m) = (gram[0], moment[0]);
        if g > 0.0 {
            return (vec![m / g], m * m / g);
        }
        return (vec![0.0], 0.0);
    }
    let g = DMatrix::from_row_slice(l, l, gram);
    let m = DVector::from_column_slice(moment);
    let eig = g.symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut w = eig.eigenvectors.transpose() * &m;
    if max_ev > 0.0 {
        let cutoff = PIVOT_RTOL * max_ev;
        for i in 0..l {
            let ev = eig.eigenvalues[i];
            w[i] = if ev > cutoff { w[i] / ev } else { 0.0 };
        }
    } else {
        w.fill(0.0);
    }
    let c = eig.eigenvectors * w;
    let explained = m.dot(&c);
    (c.as_slice().to_vec(), explained)
}

/// Least-squares fit of a rectangle from its sufficient statistics:
/// coefficients minimizing `||y_R - B_R c||^2` and the residual sum of
/// squares `y_R^T y_R - y_R^T O_{B_R} y_R`, clamped at zero.
pub fn fit_rect(stats: &RectStats) -> (Vec<f64>, f64) {
    let l = stats.basis_len();
    let (coeffs, explained) = solve_normal_equations(&stats.gram, &stats.moment, l);
    let sse = (stats.sumsq - explained).max(0.0);
    (coeffs, sse)
}

/// A fitted piecewise-polynomial model: the partition, per-rectangle
/// coefficients in basis order, the fitted array, and the achieved
/// penalized objective `||y - fitted||^2 + lambda |partition|`.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub partition: Partition,
    pub coeffs: Vec<Vec<f64>>,
    pub fitted: LatticeArray,
    pub objective: f64,
    pub lambda: f64,
    pub order: usize,
}

impl FitResult {
    pub fn family(&self) -> Family {
        self.partition.family()
    }

    /// Total squared residual implied by the objective.
    pub fn sse(&self) -> f64 {
        self.objective - self.lambda * self.partition.len() as f64
    }
}

/// Orthogonal projection of `y` onto the subspace of arrays that are degree
/// <= r polynomials on each rectangle of `p`. With `lambda` supplied the
/// objective includes the penalty `lambda * |p|`.
pub fn project_partition(
    y: &LatticeArray,
    p: &Partition,
    basis: &PolyBasis,
    lambda: Option<f64>,
) -> Result<FitResult> {
    if p.root() != &y.full_rect() {
        return Err(Error::DimensionMismatch(format!(
            "partition root {} does not match lattice {:?}",
            p.root(),
            y.dims()
        )));
    }
    if basis.dims() != y.dims() {
        return Err(Error::DimensionMismatch(
            "basis was built for a different lattice shape".into(),
        ));
    }
    let lambda = lambda.unwrap_or(0.0);
    let mut fitted = LatticeArray::zeros(y.dims().to_vec())?;
    let mut coeffs = Vec::with_capacity(p.len());
    let mut total_sse = 0.0;
    let l = basis.len();
    let mut row = vec![0.0; l];
    for rect in p.rects() {
        let stats = RectStats::from_rect(y, rect, basis);
        let (c, sse) = fit_rect(&stats);
        total_sse += sse;
        for_each_cell(rect, y.dims(), |point, lin| {
            basis.eval_into(point, &mut row);
            let v: f64 = row.iter().zip(&c).map(|(b, c)| b * c).sum();
            fitted.values_mut()[lin] = v;
        });
        coeffs.push(c);
    }
    Ok(FitResult {
        objective: total_sse + lambda * p.len() as f64,
        partition: p.clone(),
        coeffs,
        fitted,
        lambda,
        order: basis.degree(),
    })
}
