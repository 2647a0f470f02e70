//! Fully discrete schemes for the nonlinear subdiffusion equation
//!
//!   ∂_t^α u − Δu = f(u) + g(x, t),   u|_{∂Ω} = 0,   u(·, 0) = u₀,
//!
//! advanced by the L1 operator in time and δ² in space. Each step solves
//!
//!   (τ^{−α}/Γ(2−α)) a₀ U^n − Δ_h U^n − f(U^n) − g^n
//!       = (τ^{−α}/Γ(2−α)) [a_{n−1} U⁰ + Σ_{j=1..n−1} (a_{n−j−1} − a_{n−j}) U^j],
//!
//! either exactly by Newton iteration (fully implicit) or with one Newton
//! step frozen at U^{n−1} (linearized). The whole history enters every step;
//! a trajectory advance is O(N² · dof).

use crate::error::{Error, Result};
use crate::grid::{self, Field, SpatialGrid};
use crate::l1::{check_alpha, L1Weights};
use crate::special::gamma;

pub type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceFn = Box<dyn Fn(&[f64; 2]) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Box<dyn Fn(&[f64; 2], f64) -> f64 + Send + Sync>;

/// Continuous problem description: order, domain, nonlinearity with its
/// derivative, initial data, optional manufactured source and exact solution.
pub struct ProblemSpec {
    pub alpha: f64,
    pub grid: SpatialGrid,
    pub t_final: f64,
    pub f: ScalarFn,
    pub df: ScalarFn,
    pub u0: SpaceFn,
    pub source: Option<SpaceTimeFn>,
    pub exact: Option<SpaceTimeFn>,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "final time must be positive, got {}",
                self.t_final
            )));
        }
        // Dirichlet compatibility: u0 must vanish on the boundary (sampled;
        // round-off from expressions like sin(pi x) at x = L is tolerated)
        let l = self.grid.edge_len();
        let samples: &[[f64; 2]] = if self.grid.dim() == 1 {
            &[[0.0, 0.0], [l, 0.0]]
        } else {
            &[
                [0.0, 0.5 * l],
                [l, 0.5 * l],
                [0.5 * l, 0.0],
                [0.5 * l, l],
                [0.0, 0.0],
                [l, l],
            ]
        };
        let interior_scale = (self.u0)(&[0.5 * l, 0.5 * l]).abs().max(1.0);
        for s in samples {
            if (self.u0)(s).abs() > 1e-12 * interior_scale {
                return Err(Error::InvalidParameter(format!(
                    "initial data does not vanish on the boundary (u0({:?}) = {:.3e})",
                    s,
                    (self.u0)(s)
                )));
            }
        }
        Ok(())
    }

    fn source_at(&self, coords: &[f64; 2], t: f64) -> f64 {
        match &self.source {
            Some(g) => g(coords, t),
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeVariant {
    FullyImplicit,
    NewtonLinearized,
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub variant: SchemeVariant,
    pub n_steps: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl SchemeConfig {
    pub fn new(variant: SchemeVariant, n_steps: usize) -> SchemeConfig {
        SchemeConfig {
            variant,
            n_steps,
            newton_tol: 1e-12,
            newton_max_iter: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidParameter("newton_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// Full time history U⁰..U^N. The nonlocal convolution needs every level, so
/// the trajectory owns them all.
pub struct SolutionTrajectory {
    fields: Vec<Field>,
    tau: f64,
}

impl SolutionTrajectory {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of stored levels, N + 1.
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn field(&self, n: usize) -> &Field {
        &self.fields[n]
    }

    pub fn last(&self) -> &Field {
        self.fields.last().expect("trajectory holds at least U^0")
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }
}

/// c = τ^{−α} / Γ(2−α), the coefficient multiplying a₀ U^n.
fn l1_coefficient(alpha: f64, tau: f64) -> f64 {
    tau.powf(-alpha) / gamma(2.0 - alpha)
}

/// Columns below this size never pay off under rayon dispatch.
#[cfg(feature = "parallel")]
const PAR_MIN_WORK: usize = 1 << 16;

/// Accumulates a_{n−1} U⁰ + Σ_{j=1..n−1} (a_{n−j−1} − a_{n−j}) U^j over the
/// column range starting at `lo`. Identical arithmetic per entry regardless
/// of how the range is split, so the parallel path is bit-stable.
fn accumulate_history_range(
    history: &[Field],
    n: usize,
    weights: &L1Weights,
    lo: usize,
    out: &mut [f64],
) {
    let an1 = weights.get(n - 1);
    let u0 = &history[0].values()[lo..lo + out.len()];
    for (o, &u) in out.iter_mut().zip(u0) {
        *o = an1 * u;
    }
    for j in 1..n {
        let w = weights.diff(n - j);
        let uj = &history[j].values()[lo..lo + out.len()];
        for (o, &u) in out.iter_mut().zip(uj) {
            *o += w * u;
        }
    }
}

/// History side of the step-n system:
/// c · [a_{n−1} U⁰ + Σ_{j=1..n−1} (a_{n−j−1} − a_{n−j}) U^j].
///
/// This convolution dominates the O(N²·dof) cost of a trajectory; it is
/// data-parallel over columns when the `parallel` feature is enabled and the
/// step is large enough to amortize the dispatch.
fn history_rhs(history: &[Field], n: usize, weights: &L1Weights, c: f64) -> Vec<f64> {
    let dof = history[0].values().len();
    let mut hist = vec![0.0; dof];

    #[cfg(feature = "parallel")]
    {
        if n * dof >= PAR_MIN_WORK && dof >= 256 && rayon::current_num_threads() > 1 {
            use rayon::prelude::*;
            let chunk = dof.div_ceil(rayon::current_num_threads() * 2).max(128);
            hist.par_chunks_mut(chunk).enumerate().for_each(|(ci, out)| {
                accumulate_history_range(history, n, weights, ci * chunk, out);
            });
            for v in hist.iter_mut() {
                *v *= c;
            }
            return hist;
        }
    }

    accumulate_history_range(history, n, weights, 0, &mut hist);
    for v in hist.iter_mut() {
        *v *= c;
    }
    hist
}

fn check_history(history: &[Field], n: usize, problem: &ProblemSpec) -> Result<()> {
    if n == 0 || history.len() < n {
        return Err(Error::InvalidParameter(format!(
            "step {n} needs the history through level {}",
            n.saturating_sub(1)
        )));
    }
    if history[0].grid() != problem.grid {
        return Err(Error::InvalidParameter(
            "history grid does not match the problem grid".into(),
        ));
    }
    Ok(())
}

/// One fully implicit step: solves the nonlinear system for U^n by Newton
/// iteration with initial guess U^{n−1}, terminating when the max-norm
/// update drops below `newton_tol`.
pub fn step_implicit(
    history: &[Field],
    n: usize,
    problem: &ProblemSpec,
    config: &SchemeConfig,
) -> Result<Field> {
    let tau = problem.t_final / config.n_steps as f64;
    let weights = L1Weights::new(problem.alpha, n.max(1))?;
    step_implicit_inner(history, n, problem, config, tau, &weights)
}

fn step_implicit_inner(
    history: &[Field],
    n: usize,
    problem: &ProblemSpec,
    config: &SchemeConfig,
    tau: f64,
    weights: &L1Weights,
) -> Result<Field> {
    check_history(history, n, problem)?;
    let grid = problem.grid;
    let dof = grid.dof();
    let c = l1_coefficient(problem.alpha, tau);
    let hist = history_rhs(history, n, weights, c);
    let tn = n as f64 * tau;
    let g: Vec<f64> = (0..dof)
        .map(|i| problem.source_at(&grid.coords(i), tn))
        .collect();

    let mut u = history[n - 1].values().to_vec();
    let mut lap = vec![0.0; dof];
    let mut residual = vec![0.0; dof];
    let mut diag = vec![0.0; dof];
    let mut last_update = f64::INFINITY;
    for _ in 0..config.newton_max_iter {
        grid::apply_laplacian_into(grid, &u, &mut lap);
        for i in 0..dof {
            residual[i] = -(c * u[i] - lap[i] - (problem.f)(u[i]) - g[i] - hist[i]);
            diag[i] = (problem.df)(u[i]);
        }
        let delta = grid::solve_reaction_shifted(grid, c, Some(&diag), &residual)?;
        last_update = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if !last_update.is_finite() {
            return Err(Error::NonFinite("Newton update"));
        }
        for i in 0..dof {
            u[i] += delta[i];
        }
        if last_update <= config.newton_tol {
            return Field::new(grid, u);
        }
    }
    Err(Error::NewtonDiverged {
        max_iter: config.newton_max_iter,
        last_update,
    })
}

/// One Newton-linearized step: f(U^n) is replaced by
/// f(U^{n−1}) + f'(U^{n−1})(U^n − U^{n−1}), giving a single linear solve.
pub fn step_linearized(
    history: &[Field],
    n: usize,
    problem: &ProblemSpec,
    config: &SchemeConfig,
) -> Result<Field> {
    let tau = problem.t_final / config.n_steps as f64;
    let weights = L1Weights::new(problem.alpha, n.max(1))?;
    step_linearized_inner(history, n, problem, config, tau, &weights)
}

fn step_linearized_inner(
    history: &[Field],
    n: usize,
    problem: &ProblemSpec,
    _config: &SchemeConfig,
    tau: f64,
    weights: &L1Weights,
) -> Result<Field> {
    check_history(history, n, problem)?;
    let grid = problem.grid;
    let dof = grid.dof();
    let c = l1_coefficient(problem.alpha, tau);
    let mut rhs = history_rhs(history, n, weights, c);
    let tn = n as f64 * tau;
    let prev = history[n - 1].values();
    let mut diag = vec![0.0; dof];
    for i in 0..dof {
        let up = prev[i];
        let dfu = (problem.df)(up);
        rhs[i] += problem.source_at(&grid.coords(i), tn) + (problem.f)(up) - dfu * up;
        diag[i] = dfu;
    }
    let u = grid::solve_reaction_shifted(grid, c, Some(&diag), &rhs)?;
    Field::new(grid, u)
}

/// Advances the configured scheme from the sampled initial data through
/// t = t_final. Errors are annotated with the failing step index.
pub fn solve(problem: &ProblemSpec, config: &SchemeConfig) -> Result<SolutionTrajectory> {
    problem.validate()?;
    config.validate()?;
    let n_steps = config.n_steps;
    let tau = problem.t_final / n_steps as f64;
    let weights = L1Weights::new(problem.alpha, n_steps.max(1))?;
    let mut fields = Vec::with_capacity(n_steps + 1);
    fields.push(Field::from_fn(problem.grid, |c| (problem.u0)(c))?);
    for n in 1..=n_steps {
        let next = match config.variant {
            SchemeVariant::FullyImplicit => {
                step_implicit_inner(&fields, n, problem, config, tau, &weights)
            }
            SchemeVariant::NewtonLinearized => {
                step_linearized_inner(&fields, n, problem, config, tau, &weights)
            }
        }
        .map_err(|e| e.at_step(n))?;
        fields.push(next);
    }
    Ok(SolutionTrajectory { fields, tau })
}
