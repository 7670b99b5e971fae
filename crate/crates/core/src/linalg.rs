//! Dense real matrices, a cyclic Jacobi symmetric eigensolver and singular
//! values through the Gram matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                module: "linalg",
                msg: format!("{} entries for a {rows}x{cols} matrix", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
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

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// `CᵀC`.
    pub fn gram(&self) -> SymMatrix {
        let t = self.transpose();
        // rows of t are columns of self
        SymMatrix::from_fn(self.cols, |i, j| dot(t.row(i), t.row(j)))
    }

    /// `CCᵀ`.
    pub fn outer_gram(&self) -> SymMatrix {
        SymMatrix::from_fn(self.rows, |i, j| dot(self.row(i), self.row(j)))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric matrix in packed lower-triangle storage, so `A_ij = A_ji` holds
/// by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    /// Calls `f(i, j)` for `j ≤ i` only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    fn idx(i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        i * (i + 1) / 2 + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[Self::idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[Self::idx(i, j)] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v *= c);
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOptions {
    /// Stop once the off-diagonal Frobenius norm is below `tol·‖A‖_F`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_sweeps: 60,
        }
    }
}

/// Eigenpairs sorted by descending eigenvalue; column `j` of `vectors`
/// belongs to `values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

pub fn sym_eigs(a: &SymMatrix) -> Result<Eigen> {
    sym_eigs_with(a, JacobiOptions::default())
}

pub fn sym_eigs_with(a: &SymMatrix, opts: JacobiOptions) -> Result<Eigen> {
    let (values, vt) = jacobi(a, opts, true)?;
    let vt = vt.expect("vectors requested");
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| vt[order[c] * n + r]);
    Ok(Eigen {
        values: sorted,
        vectors,
    })
}

/// Eigenvalues only, descending.
pub fn sym_eigvals(a: &SymMatrix) -> Result<Vec<f64>> {
    sym_eigvals_with(a, JacobiOptions::default())
}

pub fn sym_eigvals_with(a: &SymMatrix, opts: JacobiOptions) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi(a, opts, false)?;
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

// Cyclic Jacobi on a full copy with round-robin ordering: each sweep is
// split into rounds of disjoint pairs, so a round's column rotations can be
// applied row by row. Returns the diagonal and, optionally, the
// eigenvectors stored as rows.
fn jacobi(a: &SymMatrix, opts: JacobiOptions, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Dimension {
            module: "linalg",
            msg: "empty matrix".into(),
        });
    }
    if !a.is_finite() {
        return Err(Error::domain("linalg", "matrix has non-finite entries"));
    }
    let mut m = a.to_dense().data;
    let mut vt = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    });
    let norm = a.frobenius_sq().sqrt();
    if norm == 0.0 {
        return Ok((vec![0.0; n], vt));
    }
    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[i * n + j] * m[i * n + j];
            }
        }
        (2.0 * s).sqrt()
    };

    // tournament schedule over an even number of slots; slot `n` is a bye
    let slots = n + n % 2;
    let mut players: Vec<usize> = (0..slots).collect();
    let mut rots: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(slots / 2);

    for sweep in 0..opts.max_sweeps {
        let off = off_norm(&m);
        if off <= opts.tol * norm {
            return Ok(((0..n).map(|i| m[i * n + i]).collect(), vt));
        }
        for _round in 0..slots.saturating_sub(1) {
            rots.clear();
            for i in 0..slots / 2 {
                let (p, q) = (players[i], players[slots - 1 - i]);
                if p >= n || q >= n {
                    continue;
                }
                let (p, q) = if p < q { (p, q) } else { (q, p) };
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                rots.push((p, q, c, t * c));
            }
            for &(p, q, c, s) in &rots {
                rotate_rows(&mut m, n, p, q, c, s);
                if let Some(v) = vt.as_mut() {
                    rotate_rows(v, n, p, q, c, s);
                }
            }
            for row in m.chunks_exact_mut(n) {
                for &(p, q, c, s) in &rots {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
            for &(p, q, _, _) in &rots {
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
            }
            players[1..].rotate_right(1);
        }
    }
    let residual = off_norm(&m) / norm;
    if residual <= opts.tol {
        return Ok(((0..n).map(|i| m[i * n + i]).collect(), vt));
    }
    Err(Error::EigenNonConvergence {
        sweeps: opts.max_sweeps,
        residual,
    })
}

fn rotate_rows(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = m.split_at_mut(q * n);
    let rp = &mut head[p * n..(p + 1) * n];
    let rq = &mut tail[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Singular values of `c`, descending, from the eigenvalues of `CᵀC`
/// (or `CCᵀ`, whichever is smaller) with negative roundoff clamped to zero.
pub fn svd_coef_matrix(c: &Matrix) -> Result<Vec<f64>> {
    if !c.is_finite() {
        return Err(Error::domain("linalg", "matrix has non-finite entries"));
    }
    let g = if c.cols() <= c.rows() {
        c.gram()
    } else {
        c.outer_gram()
    };
    Ok(sym_eigvals(&g)?.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}

/// Clamps eigenvalues of a density matrix into `[0, 1]` and returns the
/// largest correction applied.
pub fn clamp_to_unit_interval(values: &mut [f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for v in values.iter_mut() {
        let c = v.clamp(0.0, 1.0);
        worst = worst.max((c - *v).abs());
        *v = c;
    }
    if worst > 0.0 {
        log::debug!("clamped density-matrix eigenvalues by up to {worst:e}");
    }
    worst
}
