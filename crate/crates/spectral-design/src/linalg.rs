//! Dense symmetric linear algebra for desk-scale problems (d up to a few
//! hundred). The eigensolver is a cyclic Jacobi iteration: deterministic,
//! dependency-free, and accurate to a small multiple of machine epsilon for
//! the matrix sizes this crate targets.

use crate::error::{Error, Result};

/// Convergence threshold for Jacobi sweeps, relative to the Frobenius norm
/// of the input: stop once the off-diagonal Frobenius norm falls below it.
const JACOBI_REL_TOL: f64 = 1e-12;

/// Hard cap on Jacobi sweeps. Convergence is quadratic; double-digit sweep
/// counts already indicate pathological input.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigenvalues of a PSD matrix may come out slightly negative; anything
/// above `-PSD_REL_TOL * max_abs(S)` is clamped to zero, anything below is
/// reported as `NotPsd`.
const PSD_REL_TOL: f64 = 1e-8;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat> {
        if rows.is_empty() {
            return Err(Error::DimensionZero);
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row 0 has {} entries but row {} has {}",
                    cols,
                    i,
                    r.len()
                )));
            }
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Mat { rows: rows.len(), cols, data })
    }

    /// Builds a matrix from column vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<f64>]) -> Mat {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for i in 0..rows {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn col_dot(&self, a: usize, b: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, a)] * self[(i, b)]).sum()
    }

    pub fn col_sq_norm(&self, j: usize) -> f64 {
        self.col_dot(j, j)
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Applies a plane rotation to columns `a` and `b` in place:
    /// `col_a <- c*col_a + s*col_b`, `col_b <- -s*col_a + c*col_b`.
    /// Right-multiplication by an orthogonal matrix, so X Xᵀ is preserved.
    pub fn rotate_cols(&mut self, a: usize, b: usize, c: f64, s: f64) {
        for i in 0..self.rows {
            let xa = self[(i, a)];
            let xb = self[(i, b)];
            self[(i, a)] = c * xa + s * xb;
            self[(i, b)] = -s * xa + c * xb;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric matrix with full row-major storage. Construction symmetrizes,
/// so `get(i, j) == get(j, i)` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Symmetrizes `entries` (row-major d*d) as (S + Sᵀ)/2.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<SymMatrix> {
        if dim == 0 {
            return Err(Error::DimensionZero);
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut data = entries;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (data[i * dim + j] + data[j * dim + i]);
                data[i * dim + j] = avg;
                data[j * dim + i] = avg;
            }
        }
        Ok(SymMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Result<SymMatrix> {
        SymMatrix::new(dim, vec![0.0; dim * dim])
    }

    pub fn diag(values: &[f64]) -> Result<SymMatrix> {
        let d = values.len();
        let mut m = SymMatrix::zeros(d)?;
        for (i, &v) in values.iter().enumerate() {
            m.data[i * d + i] = v;
        }
        Ok(m)
    }

    pub fn scaled_identity(dim: usize, value: f64) -> Result<SymMatrix> {
        SymMatrix::diag(&vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(SymMatrix { dim: self.dim, data })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_mat(&self) -> Mat {
        Mat { rows: self.dim, cols: self.dim, data: self.data.clone() }
    }

    /// Symmetrizes a square dense matrix.
    pub fn from_mat(m: &Mat) -> Result<SymMatrix> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        SymMatrix::new(m.rows(), m.data.clone())
    }
}

/// Eigendecomposition S = Q diag(t) Qᵀ with `t` ascending and Q orthonormal.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues in ascending order.
    pub t: Vec<f64>,
    /// Orthonormal eigenvectors, column j paired with t[j].
    pub q: Mat,
}

/// Eigendecomposition of a general symmetric matrix by cyclic Jacobi
/// rotations. Eigenvalues are returned ascending; no definiteness check.
pub fn eigh_symmetric(s: &SymMatrix) -> Spectrum {
    let d = s.dim();
    let mut b = s.to_mat();
    let mut q = Mat::identity(d);
    let tol = JACOBI_REL_TOL * s.frob_norm();

    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diag_frob(&b) <= tol {
            break;
        }
        for p in 0..d {
            for r in (p + 1)..d {
                let bpr = b[(p, r)];
                if bpr == 0.0 {
                    continue;
                }
                // tan of the rotation angle that annihilates b[p][r];
                // the smaller root keeps the rotation close to identity.
                let theta = (b[(r, r)] - b[(p, p)]) / (2.0 * bpr);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // B <- Jᵀ B J, applied as column then row updates.
                for i in 0..d {
                    let bip = b[(i, p)];
                    let bir = b[(i, r)];
                    b[(i, p)] = c * bip - sn * bir;
                    b[(i, r)] = sn * bip + c * bir;
                }
                for j in 0..d {
                    let bpj = b[(p, j)];
                    let brj = b[(r, j)];
                    b[(p, j)] = c * bpj - sn * brj;
                    b[(r, j)] = sn * bpj + c * brj;
                }
                for i in 0..d {
                    let qip = q[(i, p)];
                    let qir = q[(i, r)];
                    q[(i, p)] = c * qip - sn * qir;
                    q[(i, r)] = sn * qip + c * qir;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &bb| b[(a, a)].partial_cmp(&b[(bb, bb)]).unwrap());

    let t: Vec<f64> = order.iter().map(|&j| b[(j, j)]).collect();
    let mut q_sorted = Mat::zeros(d, d);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..d {
            q_sorted[(i, new_j)] = q[(i, old_j)];
        }
    }
    Spectrum { t, q: q_sorted }
}

/// Eigendecomposition of a PSD matrix, ascending eigenvalues.
///
/// Eigenvalues in `[-1e-8 * max_abs(S), 0)` are clamped to zero; anything
/// below that bound fails with `NotPsd`.
pub fn eigh_ascending(s: &SymMatrix) -> Result<Spectrum> {
    let mut spec = eigh_symmetric(s);
    let tol = PSD_REL_TOL * s.max_abs();
    for t in spec.t.iter_mut() {
        if *t < -tol {
            return Err(Error::NotPsd { eigenvalue: *t, tol });
        }
        if *t < 0.0 {
            *t = 0.0;
        }
    }
    Ok(spec)
}

/// Gram matrix X Xᵀ of a d x k matrix; exactly symmetric by construction.
pub fn gram(x: &Mat) -> SymMatrix {
    let d = x.rows();
    assert!(d >= 1, "gram requires at least one row");
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let mut acc = 0.0;
            for l in 0..x.cols() {
                acc += x[(i, l)] * x[(j, l)];
            }
            data[i * d + j] = acc;
            data[j * d + i] = acc;
        }
    }
    SymMatrix { dim: d, data }
}

fn off_diag_frob(b: &Mat) -> f64 {
    let d = b.rows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += b[(i, j)] * b[(i, j)];
            }
        }
    }
    acc.sqrt()
}
