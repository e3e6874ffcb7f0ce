//! Benchmark fan-out and data profiles.
//!
//! A data profile reports, for each method, the fraction of problem
//! instances solved to accuracy tau within alpha * (d + 1) oracle calls,
//! as a function of the budget ratio alpha. All methods must be run on the
//! identical instance grid so the fractions are comparable.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::{dfo_minimize, DesignMode, DfoConfig, DfoRun, NoisyOracle, TestProblem};
use crate::error::{Error, Result};

/// One solver run on one problem instance.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub problem: String,
    pub dim: usize,
    pub seed: u64,
    pub mode: DesignMode,
    pub run: DfoRun,
}

/// Evenly spaced budget ratios max_alpha / points, ..., max_alpha.
/// Zero is deliberately excluded: no call budget solves nothing.
pub fn alpha_grid(points: usize, max_alpha: f64) -> Vec<f64> {
    assert!(points >= 1, "grid needs at least one point");
    assert!(max_alpha > 0.0, "max alpha must be positive");
    (1..=points).map(|i| max_alpha * i as f64 / points as f64).collect()
}

/// Fraction of instances solved per mode at each budget ratio.
///
/// An instance (problem, dim, seed) counts as solved by a run within n calls
/// when its best true value after n calls reaches
/// target = tau * g(x0) + (1 - tau) * g_best, where g_best is the smallest
/// final value any mode achieved on that instance. The run passes ratio
/// alpha when its solving call count is at most alpha * (d + 1).
pub fn data_profile(
    records: &[RunRecord],
    tau: f64,
    alphas: &[f64],
) -> Result<BTreeMap<DesignMode, Vec<f64>>> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::BadRange(format!("tau must lie strictly in (0, 1), got {tau}")));
    }

    // Group runs by instance and check every mode covers the same grid.
    type InstanceKey = (String, usize, u64);
    let mut by_instance: BTreeMap<InstanceKey, Vec<&RunRecord>> = BTreeMap::new();
    let mut grids: BTreeMap<DesignMode, BTreeSet<InstanceKey>> = BTreeMap::new();
    for rec in records {
        let key = (rec.problem.clone(), rec.dim, rec.seed);
        if !grids.entry(rec.mode).or_default().insert(key.clone()) {
            return Err(Error::GridMismatch(format!(
                "duplicate run for {} d={} seed={} mode={}",
                rec.problem,
                rec.dim,
                rec.seed,
                rec.mode.name()
            )));
        }
        by_instance.entry(key).or_default().push(rec);
    }
    let modes: Vec<DesignMode> = grids.keys().copied().collect();
    if modes.is_empty() {
        return Err(Error::GridMismatch("no runs supplied".into()));
    }
    let reference = &grids[&modes[0]];
    for mode in &modes[1..] {
        if &grids[mode] != reference {
            return Err(Error::GridMismatch(format!(
                "modes {} and {} were run on different instance sets",
                modes[0].name(),
                mode.name()
            )));
        }
    }

    // Solving call count per run, or None when the target is never reached.
    let mut t_solve: BTreeMap<DesignMode, Vec<(usize, Option<usize>)>> =
        modes.iter().map(|&m| (m, Vec::new())).collect();
    for ((_, dim, _), runs) in &by_instance {
        let g0 = runs[0].run.best_true_history[0];
        let g_best = runs
            .iter()
            .map(|r| *r.run.best_true_history.last().expect("runs record >= 1 call"))
            .fold(f64::INFINITY, f64::min);
        let target = tau * g0 + (1.0 - tau) * g_best;
        for rec in runs {
            let calls = if g0 <= target {
                Some(0)
            } else {
                rec.run
                    .best_true_history
                    .iter()
                    .position(|&h| h <= target)
                    .map(|idx| idx + 1)
            };
            t_solve.get_mut(&rec.mode).expect("mode registered").push((*dim, calls));
        }
    }

    let total = by_instance.len() as f64;
    let mut curves = BTreeMap::new();
    for mode in modes {
        let solved_at = |alpha: f64| {
            let solved = t_solve[&mode]
                .iter()
                .filter(|(dim, calls)| {
                    calls.map_or(false, |n| n as f64 <= alpha * (*dim as f64 + 1.0))
                })
                .count();
            solved as f64 / total
        };
        curves.insert(mode, alphas.iter().map(|&a| solved_at(a)).collect());
    }
    Ok(curves)
}

/// Run every (problem, dim, seed, mode) combination and collect the records.
///
/// The noise stream is keyed by (problem, dim, seed) only — deliberately not
/// by mode — so competing modes face identical oracles call-for-call.
pub fn run_benchmark(
    sigma: f64,
    base_seed: u64,
    n_seeds: usize,
    budget_multiplier: usize,
    modes: &[DesignMode],
    dims: &[usize],
) -> Result<Vec<RunRecord>> {
    let mut jobs = Vec::new();
    for &problem in &TestProblem::all() {
        for &dim in dims {
            for offset in 0..n_seeds {
                for &mode in modes {
                    jobs.push((problem, dim, base_seed + offset as u64, mode));
                }
            }
        }
    }

    jobs.into_par_iter()
        .map(|(problem, dim, seed, mode)| {
            let cfg = DfoConfig {
                eps_abs: sigma.max(1e-12),
                lip_grad: problem.grad_lipschitz(dim),
                reuse_radius: 100.0,
                budget_multiplier,
                design_mode: mode,
            };
            let key = mix_key(problem.id(), dim as u64, seed);
            let g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> =
                Arc::new(move |y: &[f64]| problem.eval(y));
            let mut oracle = NoisyOracle::new(g, sigma, key);
            let run = dfo_minimize(&mut oracle, &problem.start(dim), &cfg)?;
            Ok(RunRecord { problem: problem.name().to_string(), dim, seed, mode, run })
        })
        .collect()
}

/// Bit-mixing hash of the instance coordinates (splitmix64 finalizer).
fn mix_key(problem_id: u64, dim: u64, seed: u64) -> u64 {
    let mut z = problem_id
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(dim.wrapping_mul(0xbf58476d1ce4e5b9))
        .wrapping_add(seed.wrapping_mul(0x94d049bb133111eb));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
