pub mod demo2d;
pub mod design;
pub mod dfo_bench;
pub mod verify;

use std::fs;

use anyhow::{Context, Result};
use serde::Deserialize;

use spectral_design::Criterion;

/// Criterion spelled on the command line: a built-in name or
/// `custom:<file.json>` describing one of the supported custom families.
pub fn parse_criterion(spec: &str) -> Result<Criterion> {
    if let Some(path) = spec.strip_prefix("custom:") {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading criterion file {path}"))?;
        let custom: CustomCriterion = serde_json::from_str(&text)
            .with_context(|| format!("parsing criterion file {path}"))?;
        let (criterion, name) = match custom {
            CustomCriterion::PowerSum { name, exponent } => {
                (Criterion::power_sum(exponent)?, name)
            }
            CustomCriterion::NegSum { name } => (Criterion::builtin("neg-sum")?, name),
        };
        Ok(match name {
            Some(n) => criterion.with_name(&n),
            None => criterion,
        })
    } else {
        Ok(Criterion::builtin(spec)?)
    }
}

/// Power sums use sum lambda^p for p > 1 or p < 0 and -sum lambda^p for
/// 0 < p < 1, keeping the objective convex either way (p = -1 is a-opt).
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum CustomCriterion {
    PowerSum {
        #[serde(default)]
        name: Option<String>,
        exponent: f64,
    },
    NegSum {
        #[serde(default)]
        name: Option<String>,
    },
}

/// Seed from the flag, unless SPECTRAL_DESIGN_SEED overrides it.
pub fn effective_seed(flag: u64) -> Result<u64> {
    match std::env::var("SPECTRAL_DESIGN_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .with_context(|| format!("SPECTRAL_DESIGN_SEED=`{text}` is not an integer seed")),
        Err(_) => Ok(flag),
    }
}
