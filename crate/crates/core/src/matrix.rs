//! Dense matrices over a [`Field`]: products, characteristic polynomials,
//! exact Gaussian elimination, solution structure of linear systems.
//!
//! Over exact fields every pivot decision is exact. Over floating-point
//! fields the largest-magnitude pivot is chosen and entries below
//! [`FLOAT_RANK_TOL`] (relative to the largest entry) are treated as zero.

use std::fmt;

use crate::error::{KovaError, Result};
use crate::poly::{MultiPoly, Vars};
use crate::scalar::Field;

/// Relative tolerance used for rank decisions over inexact fields.
pub const FLOAT_RANK_TOL: f64 = 1e-8;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Structure of the solution set of `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution<F: Field> {
    /// Exactly one solution.
    Unique(Vec<F>),
    /// `particular + span(nullspace)`.
    Affine {
        particular: Vec<F>,
        nullspace: Vec<Vec<F>>,
    },
    /// No solution; `witness` is a vector `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent { witness: Vec<F> },
}

impl<F: Field> LinearSolution<F> {
    /// Some solution, when one exists.
    pub fn particular(&self) -> Option<&Vec<F>> {
        match self {
            LinearSolution::Unique(x) => Some(x),
            LinearSolution::Affine { particular, .. } => Some(particular),
            LinearSolution::Inconsistent { .. } => None,
        }
    }
}

/// Reduced row echelon form with the transformation that produced it.
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    /// `E · A`.
    pub reduced: Matrix<F>,
    /// Invertible row-operation matrix `E`.
    pub transform: Matrix<F>,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

fn negligible<F: Field>(x: &F, scale: f64) -> bool {
    if F::is_exact() {
        x.is_zero()
    } else {
        x.to_complex().norm() <= FLOAT_RANK_TOL * scale.max(1.0)
    }
}

impl<F: Field> Matrix<F> {
    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(KovaError::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from a closure `(i, j) ↦ entry`.
    pub fn from_fn<G: FnMut(usize, usize) -> F>(rows: usize, cols: usize, mut g: G) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(g(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Diagonal matrix.
    pub fn diagonal(d: &[F]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether the matrix is square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    /// Sets entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// All rows.
    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(KovaError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.cols {
            return Err(KovaError::Dimension(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc = acc + self.get(i, j).clone() * vj.clone();
                }
                acc
            })
            .collect())
    }

    /// Entry-wise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Entry-wise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with<G: Fn(F, F) -> F>(&self, other: &Self, g: G) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(KovaError::Dimension("shape mismatch".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| g(a.clone(), b.clone()))
                .collect(),
        })
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// `self − c·I`.
    pub fn shift(&self, c: &F) -> Result<Self> {
        if !self.is_square() {
            return Err(KovaError::Dimension("shift of non-square matrix".into()));
        }
        let mut m = self.clone();
        for i in 0..self.rows {
            let v = m.get(i, i).clone() - c.clone();
            m.set(i, i, v);
        }
        Ok(m)
    }

    /// Trace.
    pub fn trace(&self) -> F {
        let mut t = F::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t + self.get(i, i).clone();
        }
        t
    }

    /// Maps entries into another field.
    pub fn map<G: Field, M: Fn(&F) -> G>(&self, f: M) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn scale_hint(&self) -> f64 {
        if F::is_exact() {
            1.0
        } else {
            self.data
                .iter()
                .map(|x| x.to_complex().norm())
                .fold(0.0, f64::max)
        }
    }

    /// Characteristic polynomial `det(λI − M)` as dense coefficients (lowest
    /// degree first, monic), by the Faddeev–LeVerrier recursion.
    pub fn charpoly(&self) -> Result<Vec<F>> {
        if !self.is_square() {
            return Err(KovaError::Dimension(format!(
                "characteristic polynomial of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut coeffs = vec![F::zero(); n + 1];
        coeffs[n] = F::one();
        let mut m_k = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k−1} + c_{n−k+1} I ; c_{n−k} = −tr(A·M_k)/k
            let mut mk = self.mul(&m_k)?;
            for i in 0..n {
                let v = mk.get(i, i).clone() + coeffs[n - k + 1].clone();
                mk.set(i, i, v);
            }
            let am = self.mul(&mk)?;
            coeffs[n - k] = -am.trace() / F::from_i64(k as i64);
            m_k = mk;
        }
        Ok(coeffs)
    }

    /// Characteristic polynomial as a univariate polynomial in a named ring.
    pub fn charpoly_poly(&self, var: &Vars) -> Result<MultiPoly<F>> {
        Ok(MultiPoly::from_dense(var, &self.charpoly()?))
    }

    /// Reduced row echelon form together with the row-operation matrix.
    pub fn rref(&self) -> Rref<F> {
        let mut a = self.clone();
        let mut e = Self::identity(self.rows);
        let scale = self.scale_hint();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let piv = if F::is_exact() {
                (r..self.rows).find(|&i| !a.get(i, c).is_zero())
            } else {
                (r..self.rows)
                    .filter(|&i| !negligible(a.get(i, c), scale))
                    .max_by(|&i, &j| {
                        a.get(i, c)
                            .to_complex()
                            .norm()
                            .total_cmp(&a.get(j, c).to_complex().norm())
                    })
            };
            let Some(p) = piv else { continue };
            a.swap_rows(r, p);
            e.swap_rows(r, p);
            let inv = F::one() / a.get(r, c).clone();
            a.scale_row(r, &inv);
            e.scale_row(r, &inv);
            for i in 0..self.rows {
                if i != r && !a.get(i, c).is_zero() {
                    let f = a.get(i, c).clone();
                    a.axpy_row(i, r, &f);
                    e.axpy_row(i, r, &f);
                    if !F::is_exact() {
                        a.set(i, c, F::zero());
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            reduced: a,
            transform: e,
            pivots,
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn scale_row(&mut self, i: usize, c: &F) {
        for k in 0..self.cols {
            let v = self.get(i, k).clone() * c.clone();
            self.set(i, k, v);
        }
    }

    /// row_i ← row_i − f · row_r
    fn axpy_row(&mut self, i: usize, r: usize, f: &F) {
        for k in 0..self.cols {
            let v = self.get(i, k).clone() - f.clone() * self.get(r, k).clone();
            self.set(i, k, v);
        }
    }

    /// Rank.
    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Determinant (square matrices only).
    pub fn det(&self) -> Result<F> {
        if !self.is_square() {
            return Err(KovaError::Dimension("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !negligible(a.get(i, c), 1.0)) else {
                return Ok(F::zero());
            };
            if p != c {
                a.swap_rows(c, p);
                det = -det;
            }
            let d = a.get(c, c).clone();
            det = det * d.clone();
            for i in c + 1..n {
                if !a.get(i, c).is_zero() {
                    let f = a.get(i, c).clone() / d.clone();
                    a.axpy_row(i, c, &f);
                }
            }
        }
        Ok(det)
    }

    /// Basis of the right nullspace `{v : Av = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let rr = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![F::zero(); self.cols];
                v[fc] = F::one();
                for (row, &pc) in rr.pivots.iter().enumerate() {
                    v[pc] = -rr.reduced.get(row, fc).clone();
                }
                v
            })
            .collect()
    }

    /// Solves `A x = b` exactly, returning the full solution structure.
    pub fn solve(&self, b: &[F]) -> Result<LinearSolution<F>> {
        if b.len() != self.rows {
            return Err(KovaError::Dimension(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let rr = self.rref();
        let eb = rr.transform.mul_vec(b)?;
        let rank = rr.pivots.len();
        let scale = self.scale_hint().max(
            b.iter()
                .map(|x| x.to_complex().norm())
                .fold(0.0, f64::max),
        );
        for (i, v) in eb.iter().enumerate().skip(rank) {
            if !negligible(v, scale) {
                return Ok(LinearSolution::Inconsistent {
                    witness: rr.transform.row(i),
                });
            }
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &pc) in rr.pivots.iter().enumerate() {
            x[pc] = eb[row].clone();
        }
        let ns = self.nullspace();
        if ns.is_empty() {
            Ok(LinearSolution::Unique(x))
        } else {
            Ok(LinearSolution::Affine {
                particular: x,
                nullspace: ns,
            })
        }
    }

    /// Inverse, or `None` when singular.
    pub fn inverse(&self) -> Result<Option<Self>> {
        if !self.is_square() {
            return Err(KovaError::Dimension("inverse of non-square matrix".into()));
        }
        let rr = self.rref();
        if rr.pivots.len() < self.rows {
            return Ok(None);
        }
        Ok(Some(rr.transform))
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<String> = self.row(i).iter().map(Field::to_expr).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}
