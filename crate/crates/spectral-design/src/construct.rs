//! Turning a diagonal spectrum update into k unit-ball design vectors.
//!
//! Given a nonnegative target beta' with support at most k and mass at most
//! k, place sqrt(beta'_j) on axis j (one column per support element, zero
//! columns as padding) and equalize the squared column norms by plane
//! rotations on the right. Rotations preserve Y Yᵀ, and by the Schur-Horn
//! theorem the flat norm profile (s/k, ..., s/k) is reachable because it is
//! majorized by the column Gram spectrum. Each rotation pins one column at
//! the target exactly, so at most k - 1 rotations are needed.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Design vectors Z (d x k) realizing a diagonal Gram Z Zᵀ = diag(beta')
/// with all squared column norms equal to s/k.
#[derive(Debug, Clone)]
pub struct DesignVectors {
    pub z: Mat,
    /// Total mass: sum of squared column norms.
    pub s: f64,
}

/// Factors a compact allocation into equal-norm design columns.
///
/// Fails if the allocation has more than k nonzero entries
/// (`RankBudgetExceeded`) or mass beyond k unit columns
/// (`TraceBudgetExceeded`).
pub fn factor_diagonal(beta_prime: &[f64], k: usize) -> Result<DesignVectors> {
    assert!(k >= 1, "need at least one design vector");
    let d = beta_prime.len();
    assert!(d >= 1, "allocation must be nonempty");
    debug_assert!(beta_prime.iter().all(|&b| b >= 0.0), "allocation must be nonnegative");

    let support: Vec<usize> = (0..d).filter(|&j| beta_prime[j] > 0.0).collect();
    if support.len() > k {
        return Err(Error::RankBudgetExceeded { support: support.len(), k });
    }
    let s: f64 = beta_prime.iter().sum();
    if s > k as f64 * (1.0 + 1e-10) {
        return Err(Error::TraceBudgetExceeded { trace: s, k });
    }

    let mut y = Mat::zeros(d, k);
    for (col, &j) in support.iter().enumerate() {
        y[(j, col)] = beta_prime[j].sqrt();
    }
    let (z, _) = equalize(y);
    Ok(DesignVectors { z, s })
}

/// Equalizes squared column norms by plane rotations, preserving Y Yᵀ.
pub fn equalize_column_norms(y: Mat) -> Mat {
    equalize(y).0
}

/// Worker that also reports the number of rotations applied.
fn equalize(mut y: Mat) -> (Mat, usize) {
    let k = y.cols();
    let mut norms: Vec<f64> = (0..k).map(|j| y.col_sq_norm(j)).collect();
    let total: f64 = norms.iter().sum();
    let tau = total / k as f64;
    let tol = 1e-13 * total.max(1.0);
    let mut rotations = 0;

    for _ in 0..k {
        let (mut lo, mut hi) = (0, 0);
        for j in 1..k {
            if norms[j] < norms[lo] {
                lo = j;
            }
            if norms[j] > norms[hi] {
                hi = j;
            }
        }
        if norms[hi] - tau <= tol && tau - norms[lo] <= tol {
            break;
        }
        if norms[hi] - tau <= tol {
            // Conservation pins the residual spread below (k-1) * tol; no
            // rotation with a near-degenerate partner is worth the roundoff.
            break;
        }
        // Solve a + b x + e x^2 = 0 for x = tan(angle); the root of smaller
        // magnitude keeps the rotation closest to the identity. The rotated
        // low column lands on tau exactly; the partner absorbs the residual
        // so the running total never drifts.
        let a = norms[lo] - tau;
        let e = norms[hi] - tau;
        let b = 2.0 * y.col_dot(lo, hi);
        let disc = (b * b - 4.0 * a * e).sqrt();
        let q = -0.5 * (b + b.signum() * disc);
        let (x1, x2) = (q / e, a / q);
        let x = if x1.abs() <= x2.abs() { x1 } else { x2 };
        let c = 1.0 / (1.0 + x * x).sqrt();
        let sn = x * c;
        y.rotate_cols(lo, hi, c, sn);
        norms[hi] = norms[lo] + norms[hi] - tau;
        norms[lo] = tau;
        rotations += 1;
    }
    (y, rotations)
}

/// Axis-aligned isotropic design for k <= d: columns sqrt(s/k) e_i.
/// Gram is diagonal with k entries s/k; every column norm is equal by
/// construction.
pub fn isotropic_axis_design(s: f64, k: usize, d: usize) -> Result<DesignVectors> {
    if k == 0 || k > d {
        return Err(Error::BadRange(format!("axis design needs 1 <= k <= d, got k = {k}, d = {d}")));
    }
    if !(0.0..=k as f64).contains(&s) {
        return Err(Error::BadRange(format!("mass must satisfy 0 <= s <= k, got s = {s}")));
    }
    let scale = (s / k as f64).sqrt();
    let mut z = Mat::zeros(d, k);
    for i in 0..k {
        z[(i, i)] = scale;
    }
    Ok(DesignVectors { z, s })
}

/// Trigonometric tight-frame design for k >= d + 1: equally spaced angles
/// theta_i = 2 pi (i - 1) / k feed stacked sine/cosine coordinates so that
/// Z Zᵀ = (s/d) I_d exactly, with all squared column norms s/k.
/// Odd d prepends a constant coordinate sqrt(2)/2.
pub fn isotropic_fourier_design(s: f64, k: usize, d: usize) -> Result<DesignVectors> {
    if d == 0 || k <= d {
        return Err(Error::BadRange(format!(
            "trigonometric frame needs k >= d + 1, got k = {k}, d = {d}"
        )));
    }
    if !(0.0..=k as f64).contains(&s) {
        return Err(Error::BadRange(format!("mass must satisfy 0 <= s <= k, got s = {s}")));
    }
    let scale = (2.0 * s / (d as f64 * k as f64)).sqrt();
    let mut z = Mat::zeros(d, k);
    for i in 0..k {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
        let mut row = 0;
        if d % 2 == 1 {
            z[(row, i)] = scale * std::f64::consts::FRAC_1_SQRT_2;
            row += 1;
        }
        let mut freq = 1.0;
        while row < d {
            z[(row, i)] = scale * (freq * theta).sin();
            z[(row + 1, i)] = scale * (freq * theta).cos();
            row += 2;
            freq += 1.0;
        }
    }
    Ok(DesignVectors { z, s })
}
