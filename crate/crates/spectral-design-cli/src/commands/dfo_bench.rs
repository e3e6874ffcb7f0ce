use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;

use spectral_design::dfo::{alpha_grid, data_profile, run_benchmark, DesignMode};

use crate::commands::effective_seed;
use crate::svg::fmt12;

/// Benchmark dimensions; chosen so the whole sweep stays desk-scale.
const DIMS: [usize; 3] = [2, 4, 8];

#[derive(Args, Debug)]
pub struct DfoBenchArgs {
    /// Oracle noise width (uniform in [-sigma/2, sigma/2]).
    #[arg(long)]
    pub sigma: f64,
    /// Data-profile accuracy in (0, 1).
    #[arg(long)]
    pub tau: f64,
    /// Independent seeds per problem instance.
    #[arg(long)]
    pub seeds: usize,
    /// Oracle budget = multiplier * (d + 1).
    #[arg(long, default_value_t = 50)]
    pub budget_multiplier: usize,
    /// Comma-separated subset of spectral, coordinate, forward-diff.
    #[arg(long, default_value = "spectral,coordinate,forward-diff")]
    pub modes: String,
    /// Base seed; the SPECTRAL_DESIGN_SEED env var overrides this.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Data-profile CSV output path; a per-run log lands next to it.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &DfoBenchArgs) -> Result<i32> {
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    if !(args.tau > 0.0 && args.tau < 1.0) {
        bail!("--tau must lie strictly in (0, 1), got {}", args.tau);
    }
    if !(args.sigma >= 0.0) {
        bail!("--sigma must be nonnegative, got {}", args.sigma);
    }
    let mut modes: Vec<DesignMode> = Vec::new();
    for part in args.modes.split(',') {
        let mode = DesignMode::from_str(part.trim())?;
        if !modes.contains(&mode) {
            modes.push(mode);
        }
    }
    if modes.is_empty() {
        bail!("--modes must name at least one mode");
    }
    let base_seed = effective_seed(args.seed)?;

    let records =
        run_benchmark(args.sigma, base_seed, args.seeds, args.budget_multiplier, &modes, &DIMS)?;
    let alphas = alpha_grid(200, args.budget_multiplier as f64);
    let curves = data_profile(&records, args.tau, &alphas)?;

    let mut profile_csv = String::from("method,alpha,fraction_solved\n");
    for (mode, curve) in &curves {
        for (alpha, fraction) in alphas.iter().zip(curve) {
            profile_csv.push_str(&format!("{},{},{}\n", mode.name(), fmt12(*alpha), fmt12(*fraction)));
        }
    }
    fs::write(&args.out, profile_csv).with_context(|| format!("writing {}", args.out.display()))?;

    let runs_path = per_run_log_path(&args.out);
    let mut runs_csv = String::from("problem,seed,method,calls,best_true\n");
    for rec in &records {
        let best = rec.run.best_true_history.last().copied().unwrap_or(f64::INFINITY);
        runs_csv.push_str(&format!(
            "{}_d{},{},{},{},{}\n",
            rec.problem,
            rec.dim,
            rec.seed,
            rec.mode.name(),
            rec.run.calls_used,
            fmt12(best)
        ));
    }
    fs::write(&runs_path, runs_csv)
        .with_context(|| format!("writing {}", runs_path.display()))?;

    for (mode, curve) in &curves {
        println!(
            "{}: fraction solved {} at budget ratio {}",
            mode.name(),
            fmt12(*curve.last().expect("grid is nonempty")),
            fmt12(*alphas.last().expect("grid is nonempty"))
        );
    }
    println!("wrote {} and {}", args.out.display(), runs_path.display());
    Ok(0)
}

/// profiles.csv -> profiles.runs.csv, independent of extension presence.
fn per_run_log_path(out: &PathBuf) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut path = out.clone();
    path.set_file_name(format!("{stem}.runs.csv"));
    path
}
