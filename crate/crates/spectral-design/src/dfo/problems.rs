//! Built-in smooth test problems for the benchmark harness, each with a
//! standard start point and a gradient-Lipschitz hint near that start.

/// Desk-scale smooth minimization problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestProblem {
    /// sum y_i^2; minimum 0 at the origin.
    Sphere,
    /// Chained Rosenbrock; minimum 0 at the all-ones point.
    Rosenbrock,
    /// Quadratic with log-spaced curvatures spanning condition number 1e4.
    IllConditioned,
    /// Sum-of-squares trigonometric bowl 2 sum (1 - cos y_i); minimum 0.
    Trigonometric,
    /// Quadratic with a cubic regularizer (1/3)||y||^3.
    CubicQuadratic,
}

impl TestProblem {
    pub fn all() -> [TestProblem; 5] {
        [
            TestProblem::Sphere,
            TestProblem::Rosenbrock,
            TestProblem::IllConditioned,
            TestProblem::Trigonometric,
            TestProblem::CubicQuadratic,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestProblem::Sphere => "sphere",
            TestProblem::Rosenbrock => "rosenbrock",
            TestProblem::IllConditioned => "ill-conditioned",
            TestProblem::Trigonometric => "trigonometric",
            TestProblem::CubicQuadratic => "cubic-quadratic",
        }
    }

    /// Stable numeric id used to key noise streams.
    pub fn id(&self) -> u64 {
        match self {
            TestProblem::Sphere => 1,
            TestProblem::Rosenbrock => 2,
            TestProblem::IllConditioned => 3,
            TestProblem::Trigonometric => 4,
            TestProblem::CubicQuadratic => 5,
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let d = y.len();
        match self {
            TestProblem::Sphere => y.iter().map(|v| v * v).sum(),
            TestProblem::Rosenbrock => {
                let mut acc = 0.0;
                for i in 0..d.saturating_sub(1) {
                    let gap = y[i + 1] - y[i] * y[i];
                    let off = 1.0 - y[i];
                    acc += 100.0 * gap * gap + off * off;
                }
                if d == 1 {
                    let off = 1.0 - y[0];
                    acc = off * off;
                }
                acc
            }
            TestProblem::IllConditioned => y
                .iter()
                .enumerate()
                .map(|(i, v)| Self::curvature(i, d) * v * v)
                .sum(),
            TestProblem::Trigonometric => 2.0 * y.iter().map(|v| 1.0 - v.cos()).sum::<f64>(),
            TestProblem::CubicQuadratic => {
                let quad: f64 = y
                    .iter()
                    .enumerate()
                    .map(|(i, v)| 0.5 * Self::spread(i, d) * v * v)
                    .sum();
                let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                quad + norm.powi(3) / 3.0
            }
        }
    }

    /// Log-spaced coefficient in [1, 1e4] for the ill-conditioned quadratic.
    fn curvature(i: usize, d: usize) -> f64 {
        if d == 1 {
            return 1.0;
        }
        10f64.powf(4.0 * i as f64 / (d - 1) as f64)
    }

    /// Linearly spaced coefficient in [1, 10] for the cubic quadratic.
    fn spread(i: usize, d: usize) -> f64 {
        if d == 1 {
            return 1.0;
        }
        1.0 + 9.0 * i as f64 / (d - 1) as f64
    }

    /// Conventional start point.
    pub fn start(&self, d: usize) -> Vec<f64> {
        match self {
            TestProblem::Sphere | TestProblem::IllConditioned => vec![1.0; d],
            TestProblem::Rosenbrock => {
                (0..d).map(|i| if i % 2 == 0 { -1.2 } else { 1.0 }).collect()
            }
            TestProblem::Trigonometric => vec![0.5; d],
            TestProblem::CubicQuadratic => vec![1.0; d],
        }
    }

    /// Upper hint on the gradient Lipschitz constant near the start region.
    pub fn grad_lipschitz(&self, d: usize) -> f64 {
        match self {
            TestProblem::Sphere => 2.0,
            TestProblem::Rosenbrock => 2000.0,
            TestProblem::IllConditioned => 2e4,
            TestProblem::Trigonometric => 2.0,
            TestProblem::CubicQuadratic => 10.0 + 2.0 * ((d as f64).sqrt() + 1.0),
        }
    }
}
