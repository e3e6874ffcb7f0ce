//! Provably optimal spectral experimental design.
//!
//! Given a positive semidefinite prior `A` and a budget of `k` design
//! vectors constrained to the unit ball, this crate computes a design `X`
//! minimizing any symmetric convex criterion of the eigenvalues of
//! `A + X Xᵀ` — exactly, not approximately. The route is:
//!
//! 1. reduce to the eigenvalues `t` of the prior and per-eigenvalue caps
//!    implied by interlacing ([`waterfill::weyl_caps`]),
//! 2. water-fill mass `s` across the spectrum under those caps
//!    ([`waterfill::allocate`]) and search the convex trace budget
//!    ([`criteria::optimize_budget`]),
//! 3. factor the optimal spectrum shift into unit-norm columns by plane
//!    rotations ([`construct::factor_diagonal`]).
//!
//! Each step is tight, so the relaxation value is also a certificate: the
//! constructed design attains it to rounding error
//! ([`designer::optimal_design`], [`designer::verify_design`]).
//!
//! The [`dfo`] module applies the machinery to derivative-free
//! minimization, where designed probe directions condition a regression
//! gradient estimate.

pub mod construct;
pub mod criteria;
pub mod designer;
pub mod dfo;
pub mod error;
pub mod linalg;
pub mod waterfill;

pub use construct::{
    equalize_column_norms, factor_diagonal, isotropic_axis_design, isotropic_fourier_design,
    DesignVectors,
};
pub use criteria::{optimize_budget, BudgetSearchResult, Criterion};
pub use designer::{majorizes, optimal_design, verify_design, DesignResult, VerifyReport};
pub use error::{Error, Result};
pub use linalg::{eigh_ascending, gram, Mat, Spectrum, SymMatrix};
pub use waterfill::{allocate, feasibility, water_level, weyl_caps, Allocation, Cap, Caps};
