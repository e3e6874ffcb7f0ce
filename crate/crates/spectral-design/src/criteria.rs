//! Design criteria: symmetric convex functions of the spectrum, plus the
//! scalar search for the optimal total mass s* in [0, k].
//!
//! The mapped objective g(s) = f(t + beta(s)) is convex in s, so monotone
//! nonincreasing criteria spend the whole budget (s* = k) and everything
//! else is found by golden-section search on [0, k].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::waterfill::{allocate, feasibility, Caps};

/// Golden ratio conjugate (phi - 1), the interval shrink factor.
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Hard cap on golden-section iterations per search.
const MAX_GOLDEN_ITERS: u32 = 200;

/// Post-search safety grid: the search result must not lose to any of these.
const POST_CHECK_GRID: usize = 64;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// Sum of inverse eigenvalues (average estimator variance).
    AOpt,
    /// Negated log-determinant (confidence ellipsoid volume).
    DOpt,
    /// Inverse smallest eigenvalue (worst-direction variance).
    EOpt,
    /// Negated trace; finite everywhere and linear.
    NegSum,
    /// Signed power sum, see `Criterion::power_sum` for the sign convention.
    PowerSum(f64),
    /// Arbitrary user function; the caller vouches for symmetry + convexity.
    Custom(EvalFn),
}

/// A symmetric convex spectral criterion with the flags the optimizer needs.
#[derive(Clone)]
pub struct Criterion {
    name: String,
    kind: Kind,
    monotone_nonincreasing: bool,
    requires_positive: bool,
    lipschitz_hint: Option<f64>,
}

impl std::fmt::Debug for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Criterion")
            .field("name", &self.name)
            .field("monotone_nonincreasing", &self.monotone_nonincreasing)
            .field("requires_positive", &self.requires_positive)
            .finish()
    }
}

impl Criterion {
    /// Built-in criteria by name: `a-opt`, `d-opt`, `e-opt`, `neg-sum`.
    pub fn builtin(name: &str) -> Result<Criterion> {
        let (kind, monotone, positive) = match name {
            "a-opt" => (Kind::AOpt, true, true),
            "d-opt" => (Kind::DOpt, true, true),
            "e-opt" => (Kind::EOpt, true, true),
            "neg-sum" => (Kind::NegSum, true, false),
            other => return Err(Error::UnknownCriterion(other.to_string())),
        };
        Ok(Criterion {
            name: name.to_string(),
            kind,
            monotone_nonincreasing: monotone,
            requires_positive: positive,
            lipschitz_hint: None,
        })
    }

    /// Signed power sum: f(lambda) = sign * sum(lambda_j ^ p).
    ///
    /// The sign keeps f convex: +1 for p > 1 (increasing, so not monotone
    /// nonincreasing), -1 for 0 < p < 1 (concave sum, negated), and +1 for
    /// p < 0 (already convex and decreasing, but needs a positive spectrum;
    /// p = -1 recovers a-opt). Exponents 0 and 1 give constant or linear
    /// sums with no preferred sign and are rejected.
    pub fn power_sum(p: f64) -> Result<Criterion> {
        if !p.is_finite() || p == 0.0 || p == 1.0 {
            return Err(Error::BadRange(format!(
                "power-sum exponent must be finite and different from 0 and 1, got {p}"
            )));
        }
        Ok(Criterion {
            name: format!("power-sum({p})"),
            kind: Kind::PowerSum(p),
            monotone_nonincreasing: p < 1.0,
            requires_positive: p < 0.0,
            lipschitz_hint: None,
        })
    }

    /// Wraps a user-supplied symmetric convex function.
    pub fn custom(
        name: &str,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        monotone_nonincreasing: bool,
        requires_positive: bool,
        lipschitz_hint: Option<f64>,
    ) -> Criterion {
        Criterion {
            name: name.to_string(),
            kind: Kind::Custom(Arc::new(eval)),
            monotone_nonincreasing,
            requires_positive,
            lipschitz_hint,
        }
    }

    /// Evaluates the criterion; +inf outside the (positive) domain.
    /// Same criterion under a caller-chosen display name.
    pub fn with_name(mut self, name: &str) -> Criterion {
        self.name = name.to_string();
        self
    }

    pub fn eval(&self, lambda: &[f64]) -> f64 {
        if self.requires_positive && lambda.iter().any(|&l| l <= 0.0) {
            return f64::INFINITY;
        }
        match &self.kind {
            Kind::AOpt => lambda.iter().map(|&l| 1.0 / l).sum(),
            Kind::DOpt => -lambda.iter().map(|&l| l.ln()).sum::<f64>(),
            Kind::EOpt => 1.0 / lambda.iter().fold(f64::INFINITY, |m, &l| m.min(l)),
            Kind::NegSum => -lambda.iter().sum::<f64>(),
            Kind::PowerSum(p) => {
                let sign = if *p > 0.0 && *p < 1.0 { -1.0 } else { 1.0 };
                sign * lambda.iter().map(|&l| l.powf(*p)).sum::<f64>()
            }
            Kind::Custom(f) => f(lambda),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn monotone_nonincreasing(&self) -> bool {
        self.monotone_nonincreasing
    }

    pub fn requires_positive(&self) -> bool {
        self.requires_positive
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }
}

/// Outcome of the scalar budget search.
#[derive(Debug, Clone)]
pub struct BudgetSearchResult {
    /// Optimal total mass in [0, k].
    pub s_star: f64,
    /// g(s_star), recomputed at the returned point.
    pub value: f64,
    /// Golden-section iterations spent (0 on the monotone shortcut).
    pub iterations: u32,
}

/// Minimizes g(s) = f(t + beta(s)) over s in [0, k].
///
/// Monotone nonincreasing criteria take the shortcut s* = k. Otherwise a
/// golden-section search runs to interval width `tol_s` (convex g, so
/// unimodal), followed by a coarse-grid cross-check that re-polishes any
/// grid point that beats the search result.
pub fn optimize_budget(
    criterion: &Criterion,
    t: &[f64],
    caps: &Caps,
    tol_s: f64,
) -> Result<BudgetSearchResult> {
    feasibility(t, caps.k, criterion.requires_positive())?;
    if !(tol_s > 0.0) {
        return Err(Error::BadRange(format!("tol_s must be positive, got {tol_s}")));
    }
    let k = caps.k as f64;
    let g = |s: f64| {
        let beta = allocate(t, caps, s).beta;
        let filled: Vec<f64> = t.iter().zip(&beta).map(|(a, b)| a + b).collect();
        criterion.eval(&filled)
    };

    if criterion.monotone_nonincreasing() {
        return Ok(BudgetSearchResult { s_star: k, value: g(k), iterations: 0 });
    }

    let (mut s_star, mut iterations) = golden_section(&g, 0.0, k, tol_s);

    // Convexity makes golden section exact in theory; the grid guards the
    // result against plateaus of +inf and flat regions in practice.
    let step = k / (POST_CHECK_GRID - 1) as f64;
    let mut best_value = g(s_star);
    for i in 0..POST_CHECK_GRID {
        let si = step * i as f64;
        let vi = g(si);
        if vi < best_value {
            let (s_ref, it) = golden_section(&g, (si - step).max(0.0), (si + step).min(k), tol_s);
            iterations += it;
            let v_ref = g(s_ref);
            if v_ref < vi {
                s_star = s_ref;
                best_value = v_ref;
            } else {
                s_star = si;
                best_value = vi;
            }
        }
    }

    Ok(BudgetSearchResult { s_star, value: g(s_star), iterations })
}

/// Golden-section minimization of a unimodal extended-real function.
/// When both probes are +inf the window shrinks toward the right end,
/// where positivity-requiring criteria become finite.
fn golden_section(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol_s: f64) -> (f64, u32) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    let mut iterations = 0;

    while b - a > tol_s && iterations < MAX_GOLDEN_ITERS {
        if f1.is_infinite() && f2.is_infinite() {
            a = x2;
            x1 = b - GOLDEN * (b - a);
            x2 = a + GOLDEN * (b - a);
            f1 = g(x1);
            f2 = g(x2);
        } else if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = g(x2);
        }
        iterations += 1;
    }
    let s = if f1 <= f2 { x1 } else { x2 };
    (s, iterations)
}
