//! Shared random generators for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use rand::Rng;
use spectral_design::SymMatrix;

/// One standard normal draw (Box-Muller).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0f64..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random PSD prior G Gᵀ / d with standard normal G; full rank almost surely.
pub fn random_psd(rng: &mut impl Rng, d: usize) -> SymMatrix {
    let g: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| standard_normal(rng)).collect())
        .collect();
    let mut entries = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            entries[i * d + j] = (0..d).map(|l| g[i][l] * g[j][l]).sum::<f64>() / d as f64;
        }
    }
    SymMatrix::new(d, entries).expect("square positive block")
}

/// Random nonnegative ascending spectrum with a few exact zeros mixed in.
pub fn random_spectrum(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..d)
        .map(|_| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                let z = standard_normal(rng);
                z * z
            }
        })
        .collect();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t
}
