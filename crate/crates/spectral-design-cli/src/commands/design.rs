use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use spectral_design::{optimal_design, Error};

use crate::commands::parse_criterion;
use crate::io::{read_matrix_csv, DesignDocument};

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// Prior matrix: d lines of d comma-separated values.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of design vectors.
    #[arg(long)]
    pub k: usize,
    /// a-opt | d-opt | e-opt | neg-sum | custom:<file.json>.
    #[arg(
        long,
        long_help = "a-opt | d-opt | e-opt | neg-sum | custom:<file.json>.\n\
            A custom file holds {\"name\": ..., \"kind\": \"power-sum\", \"exponent\": p} \
            or {\"kind\": \"neg-sum\"}. Power sums evaluate sum lambda^p for p > 1 or \
            p < 0 and -sum lambda^p for 0 < p < 1, so the objective is convex either \
            way; p = -1 recovers a-opt."
    )]
    pub criterion: String,
    /// Certificate tolerance passed to the solver.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Output design document (JSON).
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(args: &DesignArgs) -> Result<i32> {
    let criterion = parse_criterion(&args.criterion)?;
    let a = read_matrix_csv(&args.input)?;
    match optimal_design(&a, args.k, &criterion, args.tol) {
        Ok(res) => {
            let doc = DesignDocument::from_result(criterion.name(), &res);
            doc.write(&args.output)?;
            println!(
                "wrote {}: objective {:.12e}, lower bound {:.12e}, s* = {:.12e}",
                args.output.display(),
                res.objective,
                res.lower_bound,
                res.s_star
            );
            Ok(0)
        }
        Err(err @ Error::InfeasibleBudget { .. }) => {
            eprintln!("infeasible: {err}");
            Ok(2)
        }
        Err(err) => Err(err.into()),
    }
}
