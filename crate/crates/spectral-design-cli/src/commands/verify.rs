use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use spectral_design::verify_design;

use crate::commands::{effective_seed, parse_criterion};
use crate::io::{read_matrix_csv, DesignDocument};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Prior matrix the design was computed for.
    #[arg(long)]
    pub input: PathBuf,
    /// Design document produced by the design command.
    #[arg(long)]
    pub design: PathBuf,
    /// Criterion to check the certificate against.
    #[arg(long)]
    pub criterion: String,
    /// Random competitor designs to sample.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Sampler seed; the SPECTRAL_DESIGN_SEED env var overrides this.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: &VerifyArgs) -> Result<i32> {
    let criterion = parse_criterion(&args.criterion)?;
    let a = read_matrix_csv(&args.input)?;
    let doc = DesignDocument::read(&args.design)?;
    let x = doc.design_matrix()?;
    let seed = effective_seed(args.seed)?;

    let report = verify_design(&a, &x, &criterion, args.samples, seed)?;
    println!("weyl_ok: {}", report.weyl_ok);
    println!("unit_ball_ok: {}", report.unit_ball_ok);
    println!("objective: {:.12e}", report.objective);
    println!("lower_bound: {:.12e}", report.lower_bound);
    println!("bound_gap: {:.12e}", report.bound_gap);
    println!("sampled_better_designs: {} of {}", report.sampled_better_designs, report.samples);

    let certified = report.weyl_ok
        && report.unit_ball_ok
        && report.bound_gap <= 1e-6
        && report.sampled_better_designs == 0;
    if certified {
        println!("certificate holds");
        Ok(0)
    } else {
        eprintln!("certificate check failed");
        Ok(3)
    }
}
