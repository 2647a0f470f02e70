//! Verification suites: weight identities, truncation sharpness, Grönwall
//! envelope domination, and spatial-operator invariants. Each suite returns
//! a serializable report; any violation makes the harness exit nonzero.

use crate::config::StudyConfig;
use crate::error::{HarnessError, Result};
use crate::par::map_cells;
use serde::Serialize;
use std::fmt::Write as _;
use subdiff::special::gamma;
use subdiff::{
    apply_laplacian, gronwall_envelope, propagation_matrix_checks, truncation_errors,
    worst_case_sequence, ComplementaryWeights, Field, GronwallParams, L1Weights,
    RegularityProfile, SpatialGrid,
};

/// Aggregated outcome of a verification suite run: the JSON report, an
/// optional CSV side-product, and the overall verdict.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub json: String,
    pub side_csv: Option<String>,
    pub pass: bool,
    pub violations: Vec<String>,
}

/// Runs the invariant grid of the selected module (truncation, gronwall,
/// spatial operator, or kernel) and reports violations; callers map a failed
/// outcome to a nonzero exit status.
pub fn run_verification_suites(config: &StudyConfig) -> Result<SuiteOutcome> {
    use crate::config::StudyKind;
    match config.study {
        StudyKind::Truncation => {
            let suite = run_truncation_suite(config)?;
            Ok(SuiteOutcome {
                json: to_json(&suite)?,
                side_csv: Some(truncation_csv(config)?),
                pass: suite.pass,
                violations: suite
                    .cells
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| {
                        format!(
                            "sup ratio unstable at alpha={} sigma={} (factor {:.3})",
                            c.alpha, c.sigma, c.max_doubling_factor
                        )
                    })
                    .collect(),
            })
        }
        StudyKind::Gronwall => {
            let suite = run_gronwall_suite(config)?;
            Ok(SuiteOutcome {
                json: to_json(&suite)?,
                side_csv: None,
                pass: suite.pass,
                violations: suite.violations.clone(),
            })
        }
        StudyKind::Spatial => {
            let suite = run_spatial_operator_suite()?;
            let violations = if suite.pass {
                Vec::new()
            } else {
                vec![format!("spatial operator invariants violated: {suite:?}")]
            };
            Ok(SuiteOutcome {
                json: to_json(&suite)?,
                side_csv: None,
                pass: suite.pass,
                violations,
            })
        }
        StudyKind::Kernel => {
            let suite = run_kernel_suite(config)?;
            let violations = suite
                .cells
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("weight identities violated at alpha={}", c.alpha))
                .collect();
            Ok(SuiteOutcome {
                json: to_json(&suite)?,
                side_csv: Some(kernel_weights_csv(config)?),
                pass: suite.pass,
                violations,
            })
        }
        _ => Err(HarnessError::Config(format!(
            "{:?} is a convergence study, not a verification suite",
            config.study
        ))),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| HarnessError::Config(format!("report serialization failed: {e}")))
}

// ---------------------------------------------------------------------------
// kernel suite: complementary-weight identities and convolution bounds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ConvolutionBoundCheck {
    pub gamma_exponent: f64,
    pub sup_head: f64,
    pub sup_tail: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelAlphaReport {
    pub alpha: f64,
    pub n_max: usize,
    pub weights_monotone: bool,
    pub weights_tail_bound: bool,
    pub p_positive_and_bounded: bool,
    pub summation_identity_max_dev: f64,
    pub prefix_bound_max_excess: f64,
    pub convolution_bounds: Vec<ConvolutionBoundCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub identity_tolerance: f64,
    pub cells: Vec<KernelAlphaReport>,
    pub pass: bool,
}

pub const KERNEL_IDENTITY_TOL: f64 = 1e-10;

fn kernel_alpha_report(alpha: f64, n_max: usize) -> Result<KernelAlphaReport> {
    let a = L1Weights::new(alpha, n_max).map_err(solver_err("kernel", alpha))?;
    let p = ComplementaryWeights::new(alpha, n_max).map_err(solver_err("kernel", alpha))?;

    let mut weights_monotone = a.get(0) == 1.0;
    for i in 0..n_max {
        weights_monotone &= a.get(i) > a.get(i + 1) && a.get(i + 1) > 0.0;
    }
    let mut weights_tail_bound = true;
    for i in 1..=n_max {
        weights_tail_bound &= a.get(i) < (1.0 - alpha) * (i as f64).powf(-alpha);
    }

    // 0 < p_n < (n+1)^{alpha-1}
    let mut p_ok = p.get(0) == 1.0;
    for n in 1..=n_max {
        p_ok &= p.get(n) > 0.0 && p.get(n) < ((n + 1) as f64).powf(alpha - 1.0);
    }

    // summation identity: sum_{j=k..n} p_{n-j} a_{j-k} = 1, k in {1, ceil(n/2), n}
    let mut max_dev = 0.0f64;
    for n in 1..=n_max {
        for &k in &[1usize, n.div_ceil(2), n] {
            let mut s = 0.0;
            for j in k..=n {
                s += p.get(n - j) * a.get(j - k);
            }
            max_dev = max_dev.max((s - 1.0).abs());
        }
    }

    // prefix bound: Γ(2-α) Σ_{j=1..n} p_{n-j} <= n^α/Γ(1+α)
    let g2 = gamma(2.0 - alpha);
    let g1 = gamma(1.0 + alpha);
    let mut prefix = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    for n in 1..=n_max {
        prefix += p.get(n - 1);
        max_excess = max_excess.max(g2 * prefix - (n as f64).powf(alpha) / g1);
    }

    // normalized convolution sums stop growing (the last doubling
    // stays within 10% of the sup over [16, n_max/2])
    let mut convolution_bounds = Vec::new();
    for &ge in &[1.2f64, 1.5, 0.2, 0.5] {
        let ratio = |n: usize| -> f64 {
            let s: f64 = (1..=n).map(|j| p.get(n - j) * (j as f64).powf(-ge)).sum();
            if ge > 1.0 {
                s / (n as f64).powf(alpha - 1.0)
            } else {
                s / ((n as f64).powf(alpha - ge) * gamma(1.0 - ge) / gamma(1.0 - ge + alpha))
            }
        };
        let half = n_max / 2;
        let sup_head = (16..=half).map(ratio).fold(0.0f64, f64::max);
        let sup_tail = (half + 1..=n_max).map(ratio).fold(0.0f64, f64::max);
        convolution_bounds.push(ConvolutionBoundCheck {
            gamma_exponent: ge,
            sup_head,
            sup_tail,
            pass: sup_tail <= 1.10 * sup_head,
        });
    }

    let pass = weights_monotone
        && weights_tail_bound
        && p_ok
        && max_dev < KERNEL_IDENTITY_TOL
        && max_excess <= KERNEL_IDENTITY_TOL
        && convolution_bounds.iter().all(|c| c.pass);
    Ok(KernelAlphaReport {
        alpha,
        n_max,
        weights_monotone,
        weights_tail_bound,
        p_positive_and_bounded: p_ok,
        summation_identity_max_dev: max_dev,
        prefix_bound_max_excess: max_excess,
        convolution_bounds,
        pass,
    })
}

pub fn run_kernel_suite(config: &StudyConfig) -> Result<KernelReport> {
    let n_max = config.ns[0];
    let cells = map_cells(config.alphas.clone(), |alpha| {
        kernel_alpha_report(alpha, n_max)
    });
    let cells: Vec<KernelAlphaReport> = cells.into_iter().collect::<Result<_>>()?;
    let pass = cells.iter().all(|c| c.pass);
    Ok(KernelReport {
        identity_tolerance: KERNEL_IDENTITY_TOL,
        cells,
        pass,
    })
}

/// Long-format CSV of the weight sequences (alpha, i, a_i, p_i).
pub fn kernel_weights_csv(config: &StudyConfig) -> Result<String> {
    let n_max = config.ns[0];
    let mut out = String::from("alpha,i,a_i,p_i\n");
    for &alpha in &config.alphas {
        let a = L1Weights::new(alpha, n_max).map_err(solver_err("kernel", alpha))?;
        let p = ComplementaryWeights::new(alpha, n_max).map_err(solver_err("kernel", alpha))?;
        for i in 0..=n_max {
            let _ = writeln!(out, "{alpha},{i},{:.17e},{:.17e}", a.get(i), p.get(i));
        }
    }
    Ok(out)
}

fn solver_err(suite: &'static str, alpha: f64) -> impl Fn(subdiff::Error) -> HarnessError {
    move |source| HarnessError::Solver {
        cell: format!("{suite} alpha={alpha}"),
        source,
    }
}

// ---------------------------------------------------------------------------
// truncation suite: sharp-bound stability across mesh doublings
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TruncationCellReport {
    pub alpha: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub sup_ratio_by_n: Vec<(usize, f64)>,
    /// max over consecutive N of sup(N')/sup(N); sharpness demands < 2
    pub max_doubling_factor: f64,
    /// overall spread sup/inf; the ratio must not collapse either
    pub spread: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationSuiteReport {
    pub cells: Vec<TruncationCellReport>,
    pub pass: bool,
}

pub fn run_truncation_suite(config: &StudyConfig) -> Result<TruncationSuiteReport> {
    let mut grid = Vec::new();
    for &alpha in &config.alphas {
        for &sigma in &config.sigmas {
            grid.push((alpha, sigma));
        }
    }
    let t_final = config.t_finals[0];
    let ns = config.ns.clone();
    let cells = map_cells(grid, |(alpha, sigma)| -> Result<TruncationCellReport> {
        let profile = RegularityProfile::new(sigma).map_err(|source| HarnessError::Solver {
            cell: format!("truncation alpha={alpha} sigma={sigma}"),
            source,
        })?;
        let mut sups = Vec::with_capacity(ns.len());
        let mut kappa = 0.0;
        for &n in &ns {
            let rep = truncation_errors(alpha, &profile, n, t_final).map_err(|source| {
                HarnessError::Solver {
                    cell: format!("truncation alpha={alpha} sigma={sigma} N={n}"),
                    source,
                }
            })?;
            kappa = rep.kappa;
            sups.push((n, rep.sup_ratio()));
        }
        let mut max_factor = 0.0f64;
        for w in sups.windows(2) {
            let f = (w[1].1 / w[0].1).max(w[0].1 / w[1].1);
            max_factor = max_factor.max(f);
        }
        let hi = sups.iter().map(|s| s.1).fold(0.0f64, f64::max);
        let lo = sups.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let spread = hi / lo;
        let pass = max_factor < 2.0 && hi > 1e-3 * lo.max(1e-300) && hi > 0.0;
        Ok(TruncationCellReport {
            alpha,
            sigma,
            kappa,
            sup_ratio_by_n: sups,
            max_doubling_factor: max_factor,
            spread,
            pass,
        })
    });
    let cells: Vec<TruncationCellReport> = cells.into_iter().collect::<Result<_>>()?;
    let pass = cells.iter().all(|c| c.pass);
    Ok(TruncationSuiteReport { cells, pass })
}

/// Long-format CSV of the per-level defects (alpha, sigma, N, n, r_n, ratio).
pub fn truncation_csv(config: &StudyConfig) -> Result<String> {
    let mut out = String::from("alpha,sigma,N,n,r_n,bound_ratio\n");
    let t_final = config.t_finals[0];
    for &alpha in &config.alphas {
        for &sigma in &config.sigmas {
            let profile = RegularityProfile::new(sigma).map_err(|source| HarnessError::Solver {
                cell: format!("truncation alpha={alpha} sigma={sigma}"),
                source,
            })?;
            for &n_steps in &config.ns {
                let rep =
                    truncation_errors(alpha, &profile, n_steps, t_final).map_err(|source| {
                        HarnessError::Solver {
                            cell: format!("truncation alpha={alpha} sigma={sigma} N={n_steps}"),
                            source,
                        }
                    })?;
                for n in 1..=n_steps {
                    let _ = writeln!(
                        out,
                        "{alpha},{sigma},{n_steps},{n},{:.10e},{:.10e}",
                        rep.r[n - 1],
                        rep.bound_ratio[n - 1]
                    );
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Grönwall suite: envelope domination grid + matrix properties
// ---------------------------------------------------------------------------

pub const GRONWALL_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const GRONWALL_TAUS: [f64; 3] = [0.001, 0.005, 0.01];

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeCellReport {
    pub alpha: f64,
    pub lambda: f64,
    pub tau: f64,
    pub y0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub eta: f64,
    pub n_max: usize,
    /// max over n of y_n / envelope_n; domination means <= 1
    pub max_ratio: f64,
    /// envelope constant that would have sufficed for this cell
    pub empirical_min_c: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixPropertyReport {
    pub property: String,
    pub max_ratio: f64,
    pub declared: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixCellReport {
    pub alpha: f64,
    pub lambda: f64,
    pub tau: f64,
    pub n: usize,
    pub nilpotent: bool,
    pub properties: Vec<MatrixPropertyReport>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GronwallSuiteReport {
    pub envelope_const: f64,
    pub envelope_cells: Vec<EnvelopeCellReport>,
    pub empirical_min_c_overall: f64,
    pub matrix_cells: Vec<MatrixCellReport>,
    pub violations: Vec<String>,
    pub pass: bool,
}

pub fn run_gronwall_suite(config: &StudyConfig) -> Result<GronwallSuiteReport> {
    let n_max = config.ns[0].min(512);
    let mut grid = Vec::new();
    for &alpha in &config.alphas {
        for &lambda in &GRONWALL_LAMBDAS {
            for &tau in &GRONWALL_TAUS {
                for mask in 1u32..16 {
                    grid.push((alpha, lambda, tau, mask));
                }
            }
        }
    }
    let envelope_results = map_cells(grid, |(alpha, lambda, tau, mask)| {
        envelope_cell(alpha, lambda, tau, mask, n_max)
    });
    let mut violations = Vec::new();
    let mut envelope_cells = Vec::new();
    for r in envelope_results {
        let cell = r?;
        if !cell.pass {
            violations.push(format!(
                "envelope violated at alpha={} lambda={} tau={} (y0,mu1,mu2,eta)=({},{},{},{}): max ratio {:.4}",
                cell.alpha, cell.lambda, cell.tau, cell.y0, cell.mu1, cell.mu2, cell.eta, cell.max_ratio
            ));
        }
        envelope_cells.push(cell);
    }
    let empirical_min_c_overall = envelope_cells
        .iter()
        .map(|c| c.empirical_min_c)
        .fold(0.0f64, f64::max);

    let mut matrix_grid = Vec::new();
    for &alpha in &config.alphas {
        for &lambda in &GRONWALL_LAMBDAS {
            for &tau in &GRONWALL_TAUS {
                matrix_grid.push((alpha, lambda, tau));
            }
        }
    }
    let matrix_results = map_cells(matrix_grid, |(alpha, lambda, tau)| {
        propagation_matrix_checks(alpha, lambda, tau, n_max).map_err(|source| {
            HarnessError::Solver {
                cell: format!("matrix-checks alpha={alpha} lambda={lambda} tau={tau}"),
                source,
            }
        })
    });
    let mut matrix_cells = Vec::new();
    for r in matrix_results {
        let rep = r?;
        let cell = MatrixCellReport {
            alpha: rep.alpha,
            lambda: rep.lambda,
            tau: rep.tau,
            n: rep.n,
            nilpotent: rep.nilpotent,
            properties: rep
                .checks
                .iter()
                .map(|c| MatrixPropertyReport {
                    property: c.property.to_string(),
                    max_ratio: c.max_ratio,
                    declared: c.declared,
                    pass: c.pass,
                })
                .collect(),
            pass: rep.pass,
        };
        if !cell.pass {
            for p in cell.properties.iter().filter(|p| !p.pass) {
                violations.push(format!(
                    "matrix property {} violated at alpha={} lambda={} tau={}: ratio {:.4} > declared {:.4}",
                    p.property, cell.alpha, cell.lambda, cell.tau, p.max_ratio, p.declared
                ));
            }
            if !cell.nilpotent {
                violations.push(format!(
                    "nilpotency violated at alpha={} lambda={} tau={}",
                    cell.alpha, cell.lambda, cell.tau
                ));
            }
        }
        matrix_cells.push(cell);
    }

    let pass = violations.is_empty();
    Ok(GronwallSuiteReport {
        envelope_const: subdiff::gronwall::DEFAULT_ENVELOPE_CONST,
        envelope_cells,
        empirical_min_c_overall,
        matrix_cells,
        violations,
        pass,
    })
}

fn envelope_cell(
    alpha: f64,
    lambda: f64,
    tau: f64,
    mask: u32,
    n_max: usize,
) -> Result<EnvelopeCellReport> {
    let y0 = f64::from(mask & 1);
    let mu1 = f64::from(mask >> 1 & 1);
    let mu2 = f64::from(mask >> 2 & 1);
    let eta = f64::from(mask >> 3 & 1);
    let params =
        GronwallParams::new(alpha, lambda, mu1, mu2, eta, 1.5, 0.5, tau, y0).map_err(|source| {
            match source {
                // an inapplicable cell is a configuration problem, not a solve
                subdiff::Error::TauAboveThreshold { .. } => HarnessError::Config(format!(
                    "gronwall cell alpha={alpha} lambda={lambda}: {source}"
                )),
                _ => HarnessError::Solver {
                    cell: format!("gronwall alpha={alpha} lambda={lambda} tau={tau}"),
                    source,
                },
            }
        })?;
    let y = worst_case_sequence(&params, n_max).map_err(|source| HarnessError::Solver {
        cell: format!("gronwall alpha={alpha} lambda={lambda} tau={tau}"),
        source,
    })?;
    let mut max_ratio = 0.0f64;
    for (n, &yn) in y.iter().enumerate().skip(1) {
        let env = gronwall_envelope(&params, n).map_err(|source| HarnessError::Solver {
            cell: format!("gronwall alpha={alpha} lambda={lambda} tau={tau} n={n}"),
            source,
        })?;
        max_ratio = max_ratio.max(yn / env);
    }
    Ok(EnvelopeCellReport {
        alpha,
        lambda,
        tau,
        y0,
        mu1,
        mu2,
        eta,
        n_max,
        max_ratio,
        empirical_min_c: params.envelope_const * max_ratio,
        pass: max_ratio <= 1.0,
    })
}

// ---------------------------------------------------------------------------
// spatial-operator suite: symmetry, semidefiniteness, truncation order
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SpatialOperatorReport {
    pub symmetry_max_dev: f64,
    pub semidefinite_ok: bool,
    pub truncation_orders: Vec<f64>,
    pub pass: bool,
}

pub fn run_spatial_operator_suite() -> Result<SpatialOperatorReport> {
    let mut symmetry_max_dev = 0.0f64;
    let mut semidefinite_ok = true;
    for dim in [1usize, 2] {
        let grid = SpatialGrid::new(dim, 1.0, 17).map_err(generic_err("spatial-suite"))?;
        let u = noise_field(grid, 11);
        let v = noise_field(grid, 29);
        let lu = apply_laplacian(&u);
        let lv = apply_laplacian(&v);
        let a = dot(&lu, &v);
        let b = dot(&u, &lv);
        symmetry_max_dev = symmetry_max_dev.max((a - b).abs() / a.abs().max(b.abs()));
        semidefinite_ok &= dot(&lu, &u) <= 0.0;
    }

    let mut errs = Vec::new();
    for &m in &[8usize, 16, 32, 64] {
        let grid =
            SpatialGrid::new(1, std::f64::consts::PI, m).map_err(generic_err("spatial-suite"))?;
        let u = Field::from_fn(grid, |c| c[0].sin()).map_err(generic_err("spatial-suite"))?;
        let lap = apply_laplacian(&u);
        let err = (0..grid.dof())
            .map(|i| (lap.values()[i] + u.values()[i]).abs())
            .fold(0.0f64, f64::max);
        errs.push(err);
    }
    let truncation_orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let orders_ok = truncation_orders.iter().all(|o| (o - 2.0).abs() < 0.05);

    let pass = symmetry_max_dev < 1e-12 && semidefinite_ok && orders_ok;
    Ok(SpatialOperatorReport {
        symmetry_max_dev,
        semidefinite_ok,
        truncation_orders,
        pass,
    })
}

fn generic_err(suite: &'static str) -> impl Fn(subdiff::Error) -> HarnessError {
    move |source| HarnessError::Solver {
        cell: suite.to_string(),
        source,
    }
}

fn noise_field(grid: SpatialGrid, seed: u64) -> Field {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
    Field::new(
        grid,
        (0..grid.dof())
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect(),
    )
    .expect("finite noise values")
}

fn dot(a: &Field, b: &Field) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum()
}
