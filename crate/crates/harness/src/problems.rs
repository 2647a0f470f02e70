//! Problem builders for the reference experiments.

use std::f64::consts::PI;
use subdiff::special::gamma;
use subdiff::{ProblemSpec, Result, SpatialGrid};

/// Manufactured 1D problem on Ω = (0, π):
///
///   ∂_t^α u = u_xx + sqrt(1 + u²) + g(x, t),  exact u = t^σ sin x,
///
/// with the source derived analytically,
///   g = [Γ(σ+1)/Γ(σ+1−α) t^{σ−α} + t^σ] sin x − sqrt(1 + t^{2σ} sin²x).
pub fn example1_problem(alpha: f64, sigma: f64, m: usize, t_final: f64) -> Result<ProblemSpec> {
    let grid = SpatialGrid::new(1, PI, m)?;
    let gr = gamma(sigma + 1.0) / gamma(sigma + 1.0 - alpha);
    Ok(ProblemSpec {
        alpha,
        grid,
        t_final,
        f: Box::new(|u| (1.0 + u * u).sqrt()),
        df: Box::new(|u| u / (1.0 + u * u).sqrt()),
        u0: Box::new(|_| 0.0),
        source: Some(Box::new(move |x, t| {
            let s = x[0].sin();
            (gr * t.powf(sigma - alpha) + t.powf(sigma)) * s
                - (1.0 + t.powf(2.0 * sigma) * s * s).sqrt()
        })),
        exact: Some(Box::new(move |x, t| t.powf(sigma) * x[0].sin())),
    })
}

/// The four nonlinear cases with H¹₀ ∩ H² initial data (σ = α regime). No
/// exact solution: errors are taken against fine-step references.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example2Case {
    /// d=1, f = sqrt(1+u²), u0 = x(1−x)
    A,
    /// d=1, f = u − u³, u0 = sin(πx)
    B,
    /// d=2, f = sqrt(1+u²), u0 = sin(πx)sin(πy)
    C,
    /// d=2, f = u − u³, u0 = x(1−x)y(1−y)
    D,
}

impl Example2Case {
    pub fn dim(&self) -> usize {
        match self {
            Example2Case::A | Example2Case::B => 1,
            Example2Case::C | Example2Case::D => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Example2Case::A => "a",
            Example2Case::B => "b",
            Example2Case::C => "c",
            Example2Case::D => "d",
        }
    }
}

pub fn example2_problem(
    case: Example2Case,
    alpha: f64,
    m: usize,
    t_final: f64,
) -> Result<ProblemSpec> {
    let grid = SpatialGrid::new(case.dim(), 1.0, m)?;
    let (f, df): (subdiff::stepper::ScalarFn, subdiff::stepper::ScalarFn) = match case {
        Example2Case::A | Example2Case::C => (
            Box::new(|u| (1.0 + u * u).sqrt()),
            Box::new(|u| u / (1.0 + u * u).sqrt()),
        ),
        Example2Case::B | Example2Case::D => (
            Box::new(|u| u - u * u * u),
            Box::new(|u| 1.0 - 3.0 * u * u),
        ),
    };
    let u0: subdiff::stepper::SpaceFn = match case {
        Example2Case::A => Box::new(|x| x[0] * (1.0 - x[0])),
        Example2Case::B => Box::new(|x| (PI * x[0]).sin()),
        Example2Case::C => Box::new(|x| (PI * x[0]).sin() * (PI * x[1]).sin()),
        Example2Case::D => Box::new(|x| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1])),
    };
    Ok(ProblemSpec {
        alpha,
        grid,
        t_final,
        f,
        df,
        u0,
        source: None,
        exact: None,
    })
}
