//! Water-filling over eigenvalue interlacing capacities.
//!
//! A rank-k update A + XXᵀ with unit-ball columns can raise the ascending
//! prior spectrum t only within Weyl interlacing bounds: the j-th eigenvalue
//! cannot exceed t_{j+min(d,k)} (unbounded once that index runs off the end).
//! Treating each eigenvalue as a bucket with floor t_j and cap u_j, pouring a
//! total mass s in lockstep produces the componentwise-minimal achievable
//! spectrum; its water level c(s) is the smallest level at which the poured
//! mass reaches s.

use crate::error::{Error, Result};

/// Relative tolerance used when deciding which spectrum entries count as
/// strictly positive (feasibility, numerical rank).
const SUPPORT_REL_TOL: f64 = 1e-10;

/// Per-bucket capacity: either a finite ceiling or no ceiling at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cap {
    Finite(f64),
    Unbounded,
}

impl Cap {
    pub fn is_finite(&self) -> bool {
        matches!(self, Cap::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Cap::Finite(u) => Some(*u),
            Cap::Unbounded => None,
        }
    }
}

/// Interlacing capacities for a budget of k design vectors over d buckets.
#[derive(Debug, Clone)]
pub struct Caps {
    /// Per-bucket cap, same length and order as the ascending spectrum.
    pub u: Vec<Cap>,
    /// min(d, k): number of buckets with unbounded caps (the top ones), and
    /// the maximum support size of any achievable lockstep allocation.
    pub dhat: usize,
    /// Number of design vectors; also the total mass budget (unit columns).
    pub k: usize,
}

/// Capacities from Weyl's inequalities: bucket j (0-based) caps at
/// t[j + min(d,k)] while that index exists, and is unbounded beyond.
pub fn weyl_caps(t: &[f64], k: usize) -> Caps {
    assert!(k >= 1, "budget k must be at least 1");
    assert!(!t.is_empty(), "spectrum must be nonempty");
    debug_assert!(t.windows(2).all(|w| w[0] <= w[1]), "spectrum must ascend");
    let d = t.len();
    let dhat = d.min(k);
    let u = (0..d)
        .map(|j| if j + dhat < d { Cap::Finite(t[j + dhat]) } else { Cap::Unbounded })
        .collect();
    Caps { u, dhat, k }
}

/// Total mass absorbed at water level c: sum of min((c - t_j)+, u_j - t_j).
pub fn fill_amount(t: &[f64], caps: &Caps, c: f64) -> f64 {
    t.iter()
        .zip(&caps.u)
        .map(|(&tj, cap)| {
            let rise = (c - tj).max(0.0);
            match cap {
                Cap::Finite(u) => rise.min(u - tj),
                Cap::Unbounded => rise,
            }
        })
        .sum()
}

/// Smallest level c >= t[0] at which `fill_amount` reaches s.
///
/// Exact breakpoint sweep: fill is piecewise linear in c with slope changes
/// only at floors and caps, so the crossing segment is found by scanning the
/// sorted breakpoints and interpolating once.
pub fn water_level(t: &[f64], caps: &Caps, s: f64) -> f64 {
    if s <= 0.0 {
        return t[0];
    }
    // (level, slope change): floors open a bucket, finite caps close one.
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * t.len());
    for (&tj, cap) in t.iter().zip(&caps.u) {
        events.push((tj, 1.0));
        if let Cap::Finite(u) = cap {
            events.push((*u, -1.0));
        }
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut level = t[0];
    let mut filled = 0.0;
    let mut slope = 0.0;
    for &(ev_level, delta) in &events {
        if ev_level > level {
            let next = filled + slope * (ev_level - level);
            if next >= s {
                return level + (s - filled) / slope;
            }
            filled = next;
            level = ev_level;
        }
        slope += delta;
    }
    // Beyond the last breakpoint exactly dhat unbounded buckets remain open.
    debug_assert!(slope > 0.0);
    level + (s - filled) / slope
}

/// Lockstep water-filling allocation at total mass s.
#[derive(Debug, Clone)]
pub struct Allocation {
    /// Total mass poured.
    pub s: f64,
    /// Water level c(s).
    pub c: f64,
    /// Per-bucket mass: beta_j = min((c - t_j)+, u_j - t_j), nudged so the
    /// components sum to s exactly up to roundoff.
    pub beta: Vec<f64>,
    /// Compact rewrite with support at most min(d, k); same multiset of
    /// filled levels t + beta, but mass concentrated on the lowest buckets.
    pub beta_compact: Vec<f64>,
}

/// Pours mass s over the buckets in lockstep and reports both the capped
/// allocation and its compact (rank-limited) rewrite.
pub fn allocate(t: &[f64], caps: &Caps, s: f64) -> Allocation {
    let c = water_level(t, caps, s);
    let mut beta: Vec<f64> = t
        .iter()
        .zip(&caps.u)
        .map(|(&tj, cap)| {
            let rise = (c - tj).max(0.0);
            match cap {
                Cap::Finite(u) => rise.min(u - tj),
                Cap::Unbounded => rise,
            }
        })
        .collect();

    // Interpolation roundoff lands on the marginal buckets: those strictly
    // between floor and cap, which is where the level actually sits.
    let total: f64 = beta.iter().sum();
    let residual = s.max(0.0) - total;
    if residual != 0.0 {
        let marginal: Vec<usize> = (0..beta.len())
            .filter(|&j| {
                beta[j] > 0.0
                    && match caps.u[j] {
                        Cap::Finite(u) => beta[j] < u - t[j],
                        Cap::Unbounded => true,
                    }
            })
            .collect();
        if !marginal.is_empty() {
            let share = residual / marginal.len() as f64;
            for &j in &marginal {
                beta[j] = (beta[j] + share).max(0.0);
                if let Cap::Finite(u) = caps.u[j] {
                    beta[j] = beta[j].min(u - t[j]);
                }
            }
        }
    }

    let beta_compact = compact_allocation(t, caps, c);
    Allocation { s, c, beta, beta_compact }
}

/// Compact rewrite of the lockstep allocation at level c: raise only the
/// lowest min(d, k) buckets, ignoring caps. Produces the same multiset of
/// filled levels as the capped allocation and has support at most min(d, k).
pub fn compact_allocation(t: &[f64], caps: &Caps, c: f64) -> Vec<f64> {
    t.iter()
        .enumerate()
        .map(|(j, &tj)| if j < caps.dhat { (c - tj).max(0.0) } else { 0.0 })
        .collect()
}

/// Number of spectrum entries above the relative positivity threshold.
pub fn spectrum_support(t: &[f64]) -> usize {
    let top = t.iter().fold(0.0f64, |m, &v| m.max(v));
    let zero_tol = SUPPORT_REL_TOL * top.max(1.0);
    t.iter().filter(|&&v| v > zero_tol).count()
}

/// A criterion that needs a strictly positive spectrum has a finite optimum
/// iff k covers the rank deficiency: k >= d - |support(t)|.
pub fn feasibility(t: &[f64], k: usize, requires_positive: bool) -> Result<()> {
    if !requires_positive {
        return Ok(());
    }
    let required = t.len() - spectrum_support(t);
    if k >= required {
        Ok(())
    } else {
        Err(Error::InfeasibleBudget { required, k })
    }
}
