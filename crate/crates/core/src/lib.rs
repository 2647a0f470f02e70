//! Solver library for nonlinear time-fractional subdiffusion equations
//!
//!   ∂_t^α u − Δu = f(u),   α ∈ (0, 1),
//!
//! discretized by the L1 scheme on a uniform time mesh and central
//! differences on uniform tensor grids (d ∈ {1, 2}, homogeneous Dirichlet).
//! Alongside the solver the crate carries the numerical verification
//! machinery for the scheme's sharp pointwise-in-time error analysis:
//!
//! * [`l1`] — L1 weights a_i, the discrete Caputo operator, and the
//!   complementary weights p_n with their summation identities;
//! * [`special`] — Mittag-Leffler functions and exact Caputo derivatives of
//!   power profiles (the oracles);
//! * [`grid`] — δ² Laplacian and the per-step direct solvers;
//! * [`stepper`] — the fully implicit and Newton-linearized schemes;
//! * [`truncation`] — pointwise truncation-error measurements against the
//!   sharp bound τ^{σ−α} n^{−κ};
//! * [`gronwall`] — the refined discrete fractional Grönwall inequality,
//!   its worst-case equality oracle, and the propagation-matrix properties.
//!
//! All types are immutable after construction and operations are pure
//! functions, so sweeps parallelize from the outside (see the harness crate
//! and its `parallel` feature).
//!
//! ```
//! use subdiff::{solve, ProblemSpec, SchemeConfig, SchemeVariant, SpatialGrid};
//!
//! // linear 1D problem with a sine eigenmode as initial data
//! let problem = ProblemSpec {
//!     alpha: 0.5,
//!     grid: SpatialGrid::new(1, 1.0, 32)?,
//!     t_final: 1.0,
//!     f: Box::new(|u| -u),
//!     df: Box::new(|_| -1.0),
//!     u0: Box::new(|x| (std::f64::consts::PI * x[0]).sin()),
//!     source: None,
//!     exact: None,
//! };
//! let traj = solve(&problem, &SchemeConfig::new(SchemeVariant::FullyImplicit, 64))?;
//! assert_eq!(traj.len(), 65);
//! // subdiffusion decays, but slower than classical heat flow
//! assert!(traj.last().max_norm() < traj.field(0).max_norm());
//! # Ok::<(), subdiff::Error>(())
//! ```

// Validation sites use `!(x > 0.0)` on purpose: the negation rejects NaN
// along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod dd;

pub mod error;
pub mod grid;
pub mod gronwall;
pub mod l1;
pub mod special;
pub mod stepper;
pub mod truncation;

pub use error::{Error, Result};
pub use grid::{apply_laplacian, solve_shifted_system, Field, SpatialGrid};
pub use gronwall::{
    gronwall_envelope, propagation_matrix_checks, worst_case_sequence, GronwallParams,
    PropagationMatrixReport,
};
pub use l1::{discrete_caputo, ComplementaryWeights, L1Weights};
pub use special::{caputo_of_power, gamma, mittag_leffler, recip_gamma};
pub use stepper::{
    solve, step_implicit, step_linearized, ProblemSpec, SchemeConfig, SchemeVariant,
    SolutionTrajectory,
};
pub use truncation::{empirical_order, truncation_errors, RegularityProfile, TruncationReport};
