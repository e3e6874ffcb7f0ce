//! Matrix CSV ingestion and the JSON design document.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use spectral_design::{DesignResult, Mat, SymMatrix};

/// Reads a d x d matrix as d comma-separated lines. Parse failures name the
/// offending row and column; asymmetry beyond 1e-8 of the largest entry
/// names the cell.
pub fn read_matrix_csv(path: &Path) -> Result<SymMatrix> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading matrix {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (j, field) in line.split(',').enumerate() {
            let value: f64 = field.trim().parse().with_context(|| {
                format!("row {}, column {}: `{}` is not a number", i + 1, j + 1, field.trim())
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    let d = rows.len();
    ensure!(d >= 1, "matrix file {} has no rows", path.display());
    for (i, row) in rows.iter().enumerate() {
        ensure!(
            row.len() == d,
            "row {} has {} entries but the matrix has {} rows; it must be square",
            i + 1,
            row.len(),
            d
        );
    }

    let max_abs = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..d {
        for j in 0..i {
            let gap = (rows[i][j] - rows[j][i]).abs();
            if gap > 1e-8 * max_abs {
                bail!(
                    "matrix is not symmetric at cell ({}, {}): {} vs {}",
                    i + 1,
                    j + 1,
                    rows[i][j],
                    rows[j][i]
                );
            }
        }
    }

    let entries: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(SymMatrix::new(d, entries)?)
}

/// Serialized outcome of a design computation. Finite values round-trip
/// bit-identically through JSON (shortest-representation float encoding).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignDocument {
    pub d: usize,
    pub k: usize,
    pub criterion: String,
    pub objective: f64,
    pub lower_bound: f64,
    pub s_star: f64,
    pub eigenvalues_before: Vec<f64>,
    pub eigenvalues_after: Vec<f64>,
    /// Design matrix as d rows of k entries.
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
}

impl DesignDocument {
    pub fn from_result(criterion: &str, res: &DesignResult) -> DesignDocument {
        let d = res.x_star.rows();
        let k = res.x_star.cols();
        let x = (0..d).map(|i| (0..k).map(|j| res.x_star[(i, j)]).collect()).collect();
        DesignDocument {
            d,
            k,
            criterion: criterion.to_string(),
            objective: res.objective,
            lower_bound: res.lower_bound,
            s_star: res.s_star,
            eigenvalues_before: res.eigenvalues_before.clone(),
            eigenvalues_after: res.eigenvalues_after.clone(),
            x,
        }
    }

    /// Rebuilds the design matrix, checking the advertised shape.
    pub fn design_matrix(&self) -> Result<Mat> {
        ensure!(self.x.len() == self.d, "document says d={} but X has {} rows", self.d, self.x.len());
        for (i, row) in self.x.iter().enumerate() {
            ensure!(
                row.len() == self.k,
                "X row {} has {} entries but k={}",
                i + 1,
                row.len(),
                self.k
            );
        }
        ensure!(self.d >= 1, "design document has d=0");
        Ok(Mat::from_rows(&self.x)?)
    }

    pub fn read(path: &Path) -> Result<DesignDocument> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading design {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing design document {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing design {}", path.display()))
    }
}
