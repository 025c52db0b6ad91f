//! Minimal dense linear algebra: row-major matrices, vectors, and a
//! Cholesky SPD solver. Just enough for normal equations, ridge systems,
//! and kernel matrices; nothing here tries to be fast beyond cache-friendly
//! loop order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pivot threshold below which a Cholesky factorization is rejected.
/// The solver fails rather than regularizing; callers own any jitter policy.
const CHOLESKY_PIVOT_MIN: f64 = 1e-12;

/// Dense vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector {
    pub(crate) data: Vec<f64>,
}

impl Vector {
    /// Constructs a vector, rejecting NaN and infinities.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "vector element",
            });
        }
        Ok(Vector { data })
    }

    pub fn zeros(n: usize) -> Self {
        Vector {
            data: vec![0.0; n],
        }
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                context: "dot product",
                left: self.len().to_string(),
                right: other.len().to_string(),
            });
        }
        Ok(dot(&self.data, &other.data))
    }

    pub fn norm2(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }
}

impl std::ops::Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.data
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.data
    }
}

/// Unchecked dot product over slices; callers guarantee equal lengths.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense row-major matrix of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    pub(crate) data: Vec<f64>,
}

impl Matrix {
    /// Constructs from a flat row-major buffer. Rejects non-finite elements
    /// and buffers whose length disagrees with rows*cols.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix buffer length",
                left: format!("{rows}x{cols}"),
                right: data.len().to_string(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix element",
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Constructs from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * p);
        for row in &rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    context: "ragged matrix rows",
                    left: p.to_string(),
                    right: row.len().to_string(),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::from_vec(n, p, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn shape(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    /// Standard matrix product. Errors when the inner dimensions disagree,
    /// naming both shapes.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data: out,
        })
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                left: self.shape(),
                right: v.len().to_string(),
            });
        }
        let data = (0..self.rows).map(|i| dot(self.row(i), v)).collect();
        Ok(Vector { data })
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data: out,
        }
    }

    /// Adds `value` to every diagonal entry. Square matrices only.
    pub(crate) fn add_diagonal(&mut self, value: f64) {
        debug_assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            self.data[i * self.cols + i] += value;
        }
    }
}

/// Solves a·w = b for symmetric positive definite `a` via Cholesky.
///
/// The input must be square and symmetric within 1e-9. A pivot at or below
/// 1e-12 aborts with a definiteness error telling the caller to add jitter;
/// this routine never regularizes on its own.
pub fn solve_spd(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.rows;
    if a.rows != a.cols {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "solve_spd right-hand side",
            left: a.shape(),
            right: b.len().to_string(),
        });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (a.get(i, j), a.get(j, i));
            let tolerance = 1e-9 * (1.0 + x.abs().max(y.abs()));
            if (x - y).abs() > tolerance {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    left: x,
                    right: y,
                    tolerance,
                });
            }
        }
    }

    // Lower-triangular factor, stored dense.
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d <= CHOLESKY_PIVOT_MIN {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let diag = d.sqrt();
        l[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / diag;
        }
    }

    // Forward solve L·z = b, then back solve Lᵀ·w = z.
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    let mut w = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * w[k];
        }
        w[i] = s / l[i * n + i];
    }
    Ok(Vector { data: w })
}
