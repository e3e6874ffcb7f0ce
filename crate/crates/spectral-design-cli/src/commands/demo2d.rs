use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use spectral_design::{optimal_design, Error, SymMatrix};

use crate::commands::parse_criterion;
use crate::svg::{fmt12, render_demo2d};

#[derive(Args, Debug)]
pub struct Demo2dArgs {
    /// Prior observation points "x,y;x,y;..."; empty for a zero prior.
    #[arg(long, default_value = "")]
    pub prior: String,
    /// Number of design vectors.
    #[arg(long)]
    pub k: usize,
    /// Criterion; the classic two-dimensional figures use d-opt.
    #[arg(long, default_value = "d-opt")]
    pub criterion: String,
    /// SVG figure output path.
    #[arg(long)]
    pub svg: PathBuf,
    /// CSV output path (columns x, y, multiplicity).
    #[arg(long)]
    pub csv: PathBuf,
}

pub fn run(args: &Demo2dArgs) -> Result<i32> {
    if args.k == 0 {
        bail!("k must be at least 1");
    }
    let criterion = parse_criterion(&args.criterion)?;
    let points = parse_prior(&args.prior)?;

    // Rank-one accumulation of the prior observations.
    let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        xx += x * x;
        xy += x * y;
        yy += y * y;
    }
    let a = SymMatrix::new(2, vec![xx, xy, xy, yy]).expect("2x2 prior");

    let res = match optimal_design(&a, args.k, &criterion, 1e-8) {
        Ok(res) => res,
        Err(err @ Error::InfeasibleBudget { .. }) => {
            eprintln!("infeasible: {err}");
            return Ok(2);
        }
        Err(err) => return Err(err.into()),
    };

    let merged = merge_columns(&res);
    let mut csv = String::from("x,y,multiplicity\n");
    for &(x, y, count) in &merged {
        csv.push_str(&format!("{},{},{count}\n", fmt12(x), fmt12(y)));
    }
    fs::write(&args.csv, csv).with_context(|| format!("writing {}", args.csv.display()))?;
    fs::write(&args.svg, render_demo2d(&points, &merged))
        .with_context(|| format!("writing {}", args.svg.display()))?;

    println!(
        "wrote {} and {}: objective {:.12e} (lower bound {:.12e})",
        args.svg.display(),
        args.csv.display(),
        res.objective,
        res.lower_bound
    );
    Ok(0)
}

fn parse_prior(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for (idx, chunk) in text.split(';').enumerate() {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let Some((xs, ys)) = chunk.split_once(',') else {
            bail!("prior point {}: `{chunk}` is not of the form x,y", idx + 1);
        };
        let x: f64 = xs
            .trim()
            .parse()
            .with_context(|| format!("prior point {}: bad x `{}`", idx + 1, xs.trim()))?;
        let y: f64 = ys
            .trim()
            .parse()
            .with_context(|| format!("prior point {}: bad y `{}`", idx + 1, ys.trim()))?;
        points.push((x, y));
    }
    Ok(points)
}

/// Collapses design vectors within 1e-6 of each other into one labeled
/// point, the way the reference figures annotate repeated vectors.
fn merge_columns(res: &spectral_design::DesignResult) -> Vec<(f64, f64, usize)> {
    let mut merged: Vec<(f64, f64, usize)> = Vec::new();
    for j in 0..res.x_star.cols() {
        let (x, y) = (res.x_star[(0, j)], res.x_star[(1, j)]);
        match merged
            .iter_mut()
            .find(|(mx, my, _)| ((mx - x).powi(2) + (my - y).powi(2)).sqrt() <= 1e-6)
        {
            Some(entry) => entry.2 += 1,
            None => merged.push((x, y, 1)),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_parsing_accepts_empty_and_lists() {
        assert_eq!(parse_prior("").unwrap(), vec![]);
        assert_eq!(parse_prior("1,0;0.5,-0.25").unwrap(), vec![(1.0, 0.0), (0.5, -0.25)]);
        assert!(parse_prior("1;2").is_err());
        assert!(parse_prior("a,b").is_err());
    }
}
