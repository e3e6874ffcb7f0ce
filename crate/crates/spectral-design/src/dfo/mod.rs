//! Derivative-free minimization with designed evaluation points.
//!
//! Each iteration regresses a gradient estimate from noisy function
//! differences along a mix of reused directions (earlier evaluations near
//! the incumbent) and fresh probe directions. The fresh directions are where
//! the design machinery earns its keep: treating the reused directions' Gram
//! as the prior, an e-opt spectral design picks probes that prop up the
//! smallest Gram eigenvalue, which controls the gradient error bound.

mod minimize;
mod problems;
mod profile;

pub use minimize::dfo_minimize;
pub use problems::TestProblem;
pub use profile::{alpha_grid, data_profile, run_benchmark, RunRecord};

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigh_ascending, gram, Mat};

/// Gram eigenvalues below this are treated as zero directions: the normal
/// equations drop them, yielding the minimum-norm least-squares solution.
const GRAM_RANK_TOL: f64 = 1e-12;

/// How new-direction probes are chosen each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DesignMode {
    /// e-opt spectral design against the reused directions' Gram.
    Spectral,
    /// First k coordinate axes, ignoring what reuse already covers.
    Coordinate,
    /// Plain forward differences along all d axes; reuse is ignored.
    ForwardDiff,
}

impl DesignMode {
    pub fn name(&self) -> &'static str {
        match self {
            DesignMode::Spectral => "spectral",
            DesignMode::Coordinate => "coordinate",
            DesignMode::ForwardDiff => "forward-diff",
        }
    }
}

impl std::str::FromStr for DesignMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<DesignMode> {
        match s {
            "spectral" => Ok(DesignMode::Spectral),
            "coordinate" => Ok(DesignMode::Coordinate),
            "forward-diff" => Ok(DesignMode::ForwardDiff),
            other => Err(Error::BadRange(format!(
                "unknown design mode `{other}` (expected spectral, coordinate or forward-diff)"
            ))),
        }
    }
}

/// Tuning knobs for the minimization loop.
#[derive(Debug, Clone)]
pub struct DfoConfig {
    /// Bound on |noise| in each oracle call difference; must be positive.
    pub eps_abs: f64,
    /// Lipschitz constant (or an upper hint) of the objective gradient.
    pub lip_grad: f64,
    /// Reuse ball radius in units of the sampling radius delta.
    pub reuse_radius: f64,
    /// Oracle budget = budget_multiplier * (d + 1).
    pub budget_multiplier: usize,
    /// Probe selection strategy.
    pub design_mode: DesignMode,
}

/// Function oracle returning true value plus uniform noise in
/// [-sigma/2, sigma/2]. Noise is keyed by (instance key, call index) with a
/// counter-based generator, so two solvers calling the same instance see
/// identical noise streams wherever their call sequences coincide.
pub struct NoisyOracle {
    g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    sigma: f64,
    key: u64,
    calls: usize,
    best_true: Vec<f64>,
}

impl NoisyOracle {
    pub fn new(g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>, sigma: f64, key: u64) -> NoisyOracle {
        assert!(sigma >= 0.0, "noise width must be nonnegative");
        NoisyOracle { g, sigma, key, calls: 0, best_true: Vec::new() }
    }

    /// Noisy evaluation; also records the running best true value.
    pub fn eval(&mut self, y: &[f64]) -> f64 {
        let true_value = (self.g)(y);
        let noise = if self.sigma > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.key);
            // 16 words per call leaves room for future multi-draw noise.
            rng.set_word_pos(self.calls as u128 * 16);
            (rng.gen_range(0.0f64..1.0) - 0.5) * self.sigma
        } else {
            0.0
        };
        self.calls += 1;
        let best = self.best_true.last().map_or(true_value, |&b| b.min(true_value));
        self.best_true.push(best);
        true_value + noise
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    /// Best true objective seen after each call; nonincreasing.
    pub fn best_true_history(&self) -> &[f64] {
        &self.best_true
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Result of one minimization run.
#[derive(Debug, Clone)]
pub struct DfoRun {
    /// Best true objective after each oracle call (length = calls_used).
    pub best_true_history: Vec<f64>,
    pub calls_used: usize,
    pub final_point: Vec<f64>,
}

/// Least-squares gradient estimate with a rank-deficiency flag.
#[derive(Debug, Clone)]
pub struct GradientEstimate {
    pub gradient: Vec<f64>,
    /// Set when the direction Gram has an eigenvalue below 1e-12; the
    /// returned gradient is then the minimum-norm solution.
    pub rank_deficient: bool,
}

/// Gradient regression: minimize sum_i (delta * dirs_iᵀ g - (values_i -
/// center_value))² over g, solved through the direction Gram's spectral
/// pseudo-inverse. Exact for noiseless linear objectives with full-rank
/// directions.
pub fn ls_gradient(
    center_value: f64,
    dirs: &Mat,
    values: &[f64],
    delta: f64,
) -> Result<GradientEstimate> {
    let d = dirs.rows();
    let m = dirs.cols();
    if values.len() != m {
        return Err(Error::LengthMismatch { left: m, right: values.len() });
    }
    if m == 0 {
        return Err(Error::BadRange("gradient regression needs at least one direction".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::BadRange(format!("sampling radius must be positive, got {delta}")));
    }

    let mut rhs = vec![0.0; d];
    for (l, &v) in values.iter().enumerate() {
        let diff = (v - center_value) / delta;
        for i in 0..d {
            rhs[i] += dirs[(i, l)] * diff;
        }
    }

    let g = gram(dirs);
    let spec = eigh_ascending(&g)?;
    let rank_deficient = spec.t[0] < GRAM_RANK_TOL;

    let mut gradient = vec![0.0; d];
    for j in 0..d {
        if spec.t[j] < GRAM_RANK_TOL {
            continue;
        }
        let mut coeff = 0.0;
        for i in 0..d {
            coeff += spec.q[(i, j)] * rhs[i];
        }
        coeff /= spec.t[j];
        for i in 0..d {
            gradient[i] += coeff * spec.q[(i, j)];
        }
    }
    Ok(GradientEstimate { gradient, rank_deficient })
}

/// Sampling radius minimizing the gradient error bound
/// sqrt(q (L r² δ/2 + ε/δ)² + k (L δ/2 + ε/δ)²) over δ:
/// δ = sqrt(2ε/L) ((q + k) / (q r⁴ + k))^(1/4).
pub fn optimal_radius(cfg: &DfoConfig, q: usize, k: usize) -> f64 {
    assert!(cfg.eps_abs > 0.0, "eps_abs must be positive");
    assert!(cfg.lip_grad > 0.0, "lip_grad must be positive");
    assert!(k >= 1, "need at least one fresh direction");
    let base = (2.0 * cfg.eps_abs / cfg.lip_grad).sqrt();
    let (qf, kf) = (q as f64, k as f64);
    let r = cfg.reuse_radius;
    base * ((qf + kf) / (qf * r.powi(4) + kf)).powf(0.25)
}

/// Earlier evaluations within the closed ball of radius r * delta around y
/// (excluding y itself), rescaled into unit directions (p - y) / delta.
/// Returns the direction matrix (d x q) and the stored noisy values.
pub fn reuse_directions(
    history: &[(Vec<f64>, f64)],
    y: &[f64],
    delta: f64,
    r: f64,
) -> (Mat, Vec<f64>) {
    let d = y.len();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut values = Vec::new();
    for (p, v) in history {
        let dist_sq: f64 = p.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        let dist = dist_sq.sqrt();
        if dist > 0.0 && dist <= r * delta {
            cols.push(p.iter().zip(y).map(|(a, b)| (a - b) / delta).collect());
            values.push(*v);
        }
    }
    (Mat::from_cols(d, &cols), values)
}

/// Number of fresh probe directions: max(1, floor(d/2), d - rank(U)).
/// The d - rank(U) term guarantees the combined direction set can span,
/// which also keeps the e-opt spectral design feasible.
pub fn new_direction_count(d: usize, rank_u: usize) -> usize {
    1.max(d / 2).max(d.saturating_sub(rank_u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(eps: f64, lip: f64, r: f64) -> DfoConfig {
        DfoConfig {
            eps_abs: eps,
            lip_grad: lip,
            reuse_radius: r,
            budget_multiplier: 50,
            design_mode: DesignMode::Spectral,
        }
    }

    #[test]
    fn gradient_exact_for_linear_objective() {
        // g(y) = 3 y1 - 2 y2, axis directions, no noise.
        let center = 0.0;
        let dirs = Mat::identity(2);
        let delta = 0.1;
        let values = [3.0 * delta, -2.0 * delta];
        let est = ls_gradient(center, &dirs, &values, delta).unwrap();
        assert!((est.gradient[0] - 3.0).abs() < 1e-12);
        assert!((est.gradient[1] + 2.0).abs() < 1e-12);
        assert!(!est.rank_deficient);
    }

    #[test]
    fn gradient_minimum_norm_when_rank_deficient() {
        // Single direction e1 in d = 2: second coordinate is unobservable
        // and must come out zero.
        let dirs = Mat::from_cols(2, &[vec![1.0, 0.0]]);
        let delta = 0.5;
        let values = [2.0 * delta];
        let est = ls_gradient(0.0, &dirs, &values, delta).unwrap();
        assert!((est.gradient[0] - 2.0).abs() < 1e-12);
        assert_eq!(est.gradient[1], 0.0);
        assert!(est.rank_deficient);
    }

    #[test]
    fn gradient_of_quadratic_at_critical_point_respects_bound() {
        // g(y) = ||y||² at the origin: gradient 0, curvature L = 2. With a
        // tight frame of three unit directions the regression error is
        // bounded by lambda_min(Gram)^(-1/2) * sqrt(k) * (L delta / 2).
        let delta = 0.01;
        let frame = crate::construct::isotropic_fourier_design(3.0, 3, 2).unwrap().z;
        let values: Vec<f64> = (0..3)
            .map(|j| {
                let col = frame.col(j);
                let y: Vec<f64> = col.iter().map(|v| v * delta).collect();
                y.iter().map(|v| v * v).sum::<f64>()
            })
            .collect();
        let est = ls_gradient(0.0, &frame, &values, delta).unwrap();
        let err: f64 = est.gradient.iter().map(|v| v * v).sum::<f64>().sqrt();
        let lambda_min: f64 = 1.5;
        let bound = lambda_min.powf(-0.5) * (3.0f64).sqrt() * (2.0 * delta / 2.0);
        assert!(err <= bound, "{err} > {bound}");
    }

    #[test]
    fn gradient_rejects_mismatched_values() {
        let dirs = Mat::identity(2);
        match ls_gradient(0.0, &dirs, &[1.0], 0.1) {
            Err(Error::LengthMismatch { left, right }) => assert_eq!((left, right), (2, 1)),
            other => panic!("expected LengthMismatch, got {other:?}"),
        }
    }

    #[test]
    fn radius_without_reuse_is_the_classic_rule() {
        // q = 0: delta = sqrt(2 eps / L) regardless of the reuse radius.
        let c = cfg(2.0, 1.0, 100.0);
        assert!((optimal_radius(&c, 0, 3) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn radius_with_unit_reuse_ball_matches_base() {
        // r = 1 makes reused and fresh directions identical in the bound.
        let c = cfg(0.5, 2.0, 1.0);
        let base = (2.0 * 0.5 / 2.0f64).sqrt();
        assert!((optimal_radius(&c, 7, 2) - base).abs() < 1e-15);
    }

    #[test]
    fn radius_shrinks_with_wide_reuse() {
        // q = 4, k = 2, r = 2, eps = 1, L = 2: ((4+2)/(4*16+2))^(1/4) =
        // (1/11)^(1/4) ~ 0.5491.
        let c = cfg(1.0, 2.0, 2.0);
        let got = optimal_radius(&c, 4, 2);
        let want = (6.0f64 / 66.0).powf(0.25);
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.5491).abs() < 1e-4);
    }

    #[test]
    fn reuse_selects_closed_ball_and_excludes_center() {
        let y = vec![0.0, 0.0];
        let delta = 0.1;
        let history = vec![
            (vec![0.0, 0.0], 1.0),  // center: excluded
            (vec![0.2, 0.0], 2.0),  // distance 0.2 = r * delta: included (closed)
            (vec![0.0, 0.21], 3.0), // just outside
            (vec![-0.05, 0.0], 4.0),
        ];
        let (u, vals) = reuse_directions(&history, &y, delta, 2.0);
        assert_eq!(u.cols(), 2);
        assert_eq!(vals, vec![2.0, 4.0]);
        assert!((u[(0, 0)] - 2.0).abs() < 1e-15, "directions scaled by 1/delta");
        assert!((u[(0, 1)] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn direction_count_formula() {
        assert_eq!(new_direction_count(2, 0), 2);
        assert_eq!(new_direction_count(10, 10), 5);
        assert_eq!(new_direction_count(1, 1), 1);
        assert_eq!(new_direction_count(9, 2), 7, "span takes precedence");
    }

    #[test]
    fn oracle_noise_is_reproducible_and_bounded() {
        let g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(|_| 1.0);
        let mut o1 = NoisyOracle::new(g.clone(), 0.2, 42);
        let mut o2 = NoisyOracle::new(g.clone(), 0.2, 42);
        let mut o3 = NoisyOracle::new(g, 0.2, 43);
        let p = vec![0.0];
        let mut any_differs = false;
        for _ in 0..50 {
            let a = o1.eval(&p);
            let b = o2.eval(&p);
            let c = o3.eval(&p);
            assert_eq!(a, b, "same key, same call index, same noise");
            assert!((a - 1.0).abs() <= 0.1 + 1e-15, "noise within [-sigma/2, sigma/2]");
            if a != c {
                any_differs = true;
            }
        }
        assert!(any_differs, "different keys should decorrelate");
    }

    #[test]
    fn oracle_tracks_best_true_value() {
        let g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(|y: &[f64]| y[0]);
        let mut o = NoisyOracle::new(g, 0.0, 0);
        o.eval(&[3.0]);
        o.eval(&[5.0]);
        o.eval(&[1.0]);
        assert_eq!(o.best_true_history(), &[3.0, 3.0, 1.0]);
    }
}
