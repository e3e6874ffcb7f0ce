//! Crate-wide error type. Variants are shared across modules so pipeline
//! stages can propagate each other's failures without wrapping.

/// Errors raised by the design pipeline and the derivative-free loop.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A matrix or spectrum with zero dimension was supplied.
    #[error("dimension must be at least 1")]
    DimensionZero,

    /// Shapes of two operands do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Two slices that must have equal length do not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// The symmetric input has an eigenvalue below the PSD tolerance.
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} < -{tol:e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    /// Criterion name not recognized by `Criterion::builtin`.
    #[error("unknown criterion `{0}` (expected a-opt, d-opt, e-opt or neg-sum)")]
    UnknownCriterion(String),

    /// The criterion needs a positive spectrum but the budget cannot deliver
    /// one: finite value requires k >= d - |support(t)|.
    #[error(
        "infeasible budget: criterion requires a positive spectrum, which needs \
         k >= d - |support(t)| = {required}, but k = {k}"
    )]
    InfeasibleBudget { required: usize, k: usize },

    /// Target spectrum update has more nonzero entries than design vectors.
    #[error("rank budget exceeded: allocation has support {support} > k = {k}")]
    RankBudgetExceeded { support: usize, k: usize },

    /// Target spectrum update carries more mass than k unit-norm columns can.
    #[error("trace budget exceeded: allocation mass {trace} > k = {k}")]
    TraceBudgetExceeded { trace: f64, k: usize },

    /// A scalar or integer argument is outside its documented range.
    #[error("argument out of range: {0}")]
    BadRange(String),

    /// The oracle budget cannot cover one center and one gradient estimate.
    #[error("budget too small: need at least d + 2 = {required} oracle calls, got {budget}")]
    BudgetTooSmall { required: usize, budget: usize },

    /// Benchmark runs do not share a common instance grid across methods.
    #[error("instance grids differ across methods: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
