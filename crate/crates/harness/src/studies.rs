//! Convergence studies: manufactured-solution sweeps (temporal, t -> 0, and
//! spatial refinement) and the fine-reference nonlinear sweeps.

use crate::config::{StudyConfig, StudyKind};
use crate::error::{HarnessError, Result};
use crate::par::map_cells;
use crate::problems::{example1_problem, example2_problem, Example2Case};
use crate::report::{
    decade_rate, expected_rate, log2_rate, mesh_rate, CellRecord, ConvergenceReport, RateRegime,
};
use subdiff::{solve, Field, SchemeConfig, SolutionTrajectory};

fn scheme_config(config: &StudyConfig, n_steps: usize) -> SchemeConfig {
    SchemeConfig::new(config.variant.into(), n_steps)
}

fn solve_cell(
    problem: &subdiff::ProblemSpec,
    cfg: &SchemeConfig,
    cell: String,
) -> Result<SolutionTrajectory> {
    solve(problem, cfg).map_err(|source| HarnessError::Solver { cell, source })
}

fn final_error_vs_exact(traj: &SolutionTrajectory, problem: &subdiff::ProblemSpec) -> f64 {
    let exact = problem
        .exact
        .as_ref()
        .expect("manufactured problems carry their exact solution");
    let t = problem.t_final;
    let reference = Field::from_fn(problem.grid, |x| exact(x, t))
        .expect("exact solution is finite on the grid");
    traj.last().max_norm_diff(&reference)
}

/// Temporal study of the manufactured problem (errors at the final time per
/// N, or per t_N when several final times are configured).
pub fn run_example1(config: &StudyConfig) -> Result<ConvergenceReport> {
    let to_zero = config.t_finals.len() > 1;
    if to_zero && config.ns.len() != 1 {
        return Err(HarnessError::Config(
            "the t -> 0 protocol fixes one N and varies t_final".into(),
        ));
    }
    let m = config.ms[0];

    // cells in emission order
    let mut cells = Vec::new();
    for &alpha in &config.alphas {
        for &sigma in &config.sigmas {
            for &t_final in &config.t_finals {
                for &n in &config.ns {
                    cells.push((alpha, sigma, t_final, n));
                }
            }
        }
    }
    let variant = config.variant;
    let errors = map_cells(cells.clone(), |(alpha, sigma, t_final, n)| -> Result<f64> {
        let problem = example1_problem(alpha, sigma, m, t_final).map_err(|source| {
            HarnessError::Solver {
                cell: format!("example1 alpha={alpha} sigma={sigma}"),
                source,
            }
        })?;
        let traj = solve_cell(
            &problem,
            &scheme_config(config, n),
            format!("example1 alpha={alpha} sigma={sigma} N={n} T={t_final}"),
        )?;
        Ok(final_error_vs_exact(&traj, &problem))
    });

    let regime = if to_zero {
        RateRegime::TemporalToZero
    } else {
        RateRegime::TemporalFinalTime
    };
    let mut records = Vec::with_capacity(cells.len());
    for (i, ((alpha, sigma, t_final, n), err)) in cells.iter().zip(errors).enumerate() {
        let err = err?;
        let rate = if i > 0 {
            let (pa, ps, pt, pn) = cells[i - 1];
            let prev: &CellRecord = &records[i - 1];
            if pa == *alpha && ps == *sigma {
                if to_zero && pn == *n {
                    Some(decade_rate(prev.max_error, err, pt, *t_final))
                } else if !to_zero && *n == 2 * pn {
                    Some(log2_rate(prev.max_error, err))
                } else {
                    None
                }
            } else {
                None
            }
        } else {
            None
        };
        records.push(CellRecord {
            alpha: *alpha,
            sigma: *sigma,
            n_steps: *n,
            m,
            t_final: *t_final,
            variant,
            max_error: err,
            rate,
            expected_rate: expected_rate(*alpha, *sigma, regime),
        });
    }
    Ok(ConvergenceReport { records })
}

/// Factor between the finest configured N and the reference run.
pub const REFERENCE_REFINEMENT: usize = 64;

/// Nonlinear sweeps without an exact solution: each (alpha, t_final) series
/// is measured against a trajectory with 64x the finest configured N.
pub fn run_example2(config: &StudyConfig, case: Example2Case) -> Result<ConvergenceReport> {
    let to_zero = config.t_finals.len() > 1;
    if to_zero && config.ns.len() != 1 {
        return Err(HarnessError::Config(
            "the t -> 0 protocol fixes one N and varies t_final".into(),
        ));
    }
    let m = config.ms[0];
    let n_finest = *config.ns.last().expect("validated non-empty");
    let n_ref = REFERENCE_REFINEMENT * n_finest;
    let variant = config.variant;

    // one series per (alpha, t_final): reference + the N ladder
    let mut series = Vec::new();
    for &alpha in &config.alphas {
        for &t_final in &config.t_finals {
            series.push((alpha, t_final));
        }
    }
    let results = map_cells(series.clone(), |(alpha, t_final)| -> Result<Vec<f64>> {
        let label = |n: usize| {
            format!(
                "example2{} alpha={alpha} N={n} T={t_final}",
                case.label()
            )
        };
        let problem = example2_problem(case, alpha, m, t_final).map_err(|source| {
            HarnessError::Solver {
                cell: label(0),
                source,
            }
        })?;
        let reference = solve_cell(&problem, &scheme_config(config, n_ref), label(n_ref))?;
        let mut errs = Vec::with_capacity(config.ns.len());
        for &n in &config.ns {
            let traj = solve_cell(&problem, &scheme_config(config, n), label(n))?;
            errs.push(traj.last().max_norm_diff(reference.last()));
        }
        Ok(errs)
    });

    let regime = if to_zero {
        RateRegime::TemporalToZero
    } else {
        RateRegime::TemporalFinalTime
    };
    let mut records = Vec::new();
    for ((alpha, t_final), errs) in series.iter().zip(results) {
        let errs = errs?;
        for (k, (&n, &err)) in config.ns.iter().zip(&errs).enumerate() {
            // sigma = alpha for the H¹₀ ∩ H² initial data of these cases
            let rate = if to_zero {
                let prev = records.last().map(|r: &CellRecord| (r.alpha, r.t_final, r.max_error));
                match prev {
                    Some((pa, pt, pe)) if pa == *alpha => {
                        Some(decade_rate(pe, err, pt, *t_final))
                    }
                    _ => None,
                }
            } else if k > 0 {
                Some(log2_rate(errs[k - 1], err))
            } else {
                None
            };
            records.push(CellRecord {
                alpha: *alpha,
                sigma: *alpha,
                n_steps: n,
                m,
                t_final: *t_final,
                variant,
                max_error: err,
                rate,
                expected_rate: expected_rate(*alpha, *alpha, regime),
            });
        }
    }
    Ok(ConvergenceReport { records })
}

/// Spatial refinement at fixed N: the temporal error is identical across M,
/// so each run is measured against the restriction of a fine-mesh reference
/// (m_ref), which cancels it and exposes the clean h² decay.
pub fn run_spatial(config: &StudyConfig) -> Result<ConvergenceReport> {
    let n = config.ns[0];
    let t_final = config.t_finals[0];
    let m_ref = config.m_ref;
    let variant = config.variant;

    let mut series = Vec::new();
    for &alpha in &config.alphas {
        for &sigma in &config.sigmas {
            series.push((alpha, sigma));
        }
    }
    let results = map_cells(series.clone(), |(alpha, sigma)| -> Result<Vec<f64>> {
        let label = |m: usize| format!("spatial alpha={alpha} sigma={sigma} M={m}");
        let problem_ref = example1_problem(alpha, sigma, m_ref, t_final).map_err(|source| {
            HarnessError::Solver {
                cell: label(m_ref),
                source,
            }
        })?;
        let reference = solve_cell(&problem_ref, &scheme_config(config, n), label(m_ref))?;
        let ref_values = reference.last().values();
        let mut errs = Vec::with_capacity(config.ms.len());
        for &m in &config.ms {
            let problem = example1_problem(alpha, sigma, m, t_final).map_err(|source| {
                HarnessError::Solver {
                    cell: label(m),
                    source,
                }
            })?;
            let traj = solve_cell(&problem, &scheme_config(config, n), label(m))?;
            let stride = m_ref / m;
            let worst = traj
                .last()
                .values()
                .iter()
                .enumerate()
                .map(|(i, &v)| (v - ref_values[(i + 1) * stride - 1]).abs())
                .fold(0.0f64, f64::max);
            errs.push(worst);
        }
        Ok(errs)
    });

    let mut records = Vec::new();
    for ((alpha, sigma), errs) in series.iter().zip(results) {
        let errs = errs?;
        for (k, (&m, &err)) in config.ms.iter().zip(&errs).enumerate() {
            let rate = (k > 0).then(|| mesh_rate(errs[k - 1], err, config.ms[k - 1], m));
            records.push(CellRecord {
                alpha: *alpha,
                sigma: *sigma,
                n_steps: n,
                m,
                t_final,
                variant,
                max_error: err,
                rate,
                expected_rate: expected_rate(*alpha, *sigma, RateRegime::Spatial),
            });
        }
    }
    Ok(ConvergenceReport { records })
}

/// Dispatches the convergence studies (the verification suites live in
/// [`crate::verify`]).
pub fn run_convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    match config.study {
        StudyKind::Example1 => run_example1(config),
        StudyKind::Example2a => run_example2(config, Example2Case::A),
        StudyKind::Example2b => run_example2(config, Example2Case::B),
        StudyKind::Example2c => run_example2(config, Example2Case::C),
        StudyKind::Example2d => run_example2(config, Example2Case::D),
        StudyKind::Spatial => run_spatial(config),
        _ => Err(HarnessError::Config(format!(
            "{:?} is a verification suite, not a convergence study",
            config.study
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Variant;

    fn mini_example1() -> StudyConfig {
        StudyConfig {
            ms: vec![32],
            ns: vec![10, 20],
            alphas: vec![0.4],
            sigmas: vec![0.4],
            ..StudyConfig::default_for(StudyKind::Example1)
        }
    }

    #[test]
    fn example1_mini_run_has_sane_rate() {
        let rep = run_example1(&mini_example1()).unwrap();
        assert_eq!(rep.records.len(), 2);
        assert!(rep.records[0].rate.is_none());
        let rate = rep.records[1].rate.unwrap();
        assert!((0.7..1.4).contains(&rate), "rate {rate}");
        assert!((rep.records[1].expected_rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example1_to_zero_protocol_needs_single_n() {
        let cfg = StudyConfig {
            t_finals: vec![1e-3, 1e-4],
            ..mini_example1()
        };
        assert!(matches!(
            run_example1(&cfg),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn example1_to_zero_rates_follow_sigma() {
        let cfg = StudyConfig {
            ns: vec![10],
            t_finals: vec![1e-3, 1e-4, 1e-5],
            ms: vec![64],
            alphas: vec![0.6],
            sigmas: vec![0.8],
            ..StudyConfig::default_for(StudyKind::Example1)
        };
        let rep = run_example1(&cfg).unwrap();
        assert_eq!(rep.records.len(), 3);
        for r in &rep.records[1..] {
            let rate = r.rate.unwrap();
            assert!((rate - 0.8).abs() < 0.05, "decade rate {rate}");
        }
    }

    #[test]
    fn example2_mini_rate_near_one() {
        let cfg = StudyConfig {
            alphas: vec![0.4],
            ns: vec![10, 20],
            ms: vec![32],
            ..StudyConfig::default_for(StudyKind::Example2a)
        };
        let rep = run_example2(&cfg, Example2Case::A).unwrap();
        let rate = rep.records[1].rate.unwrap();
        assert!((0.8..1.3).contains(&rate), "rate {rate}");
        assert!((rep.records[1].expected_rate - 1.0).abs() < 1e-12);
        assert_eq!(rep.records[1].sigma, 0.4);
    }

    #[test]
    fn spatial_mini_rate_near_two() {
        let cfg = StudyConfig {
            alphas: vec![0.4],
            sigmas: vec![1.2],
            ns: vec![64],
            ms: vec![8, 16],
            m_ref: 96,
            variant: Variant::Implicit,
            ..StudyConfig::default_for(StudyKind::Spatial)
        };
        let rep = run_spatial(&cfg).unwrap();
        let rate = rep.records[1].rate.unwrap();
        assert!((rate - 2.0).abs() < 0.1, "rate {rate}");
    }

    #[test]
    fn linearized_variant_runs_and_stays_close_to_implicit() {
        let mut cfg = mini_example1();
        let imp = run_example1(&cfg).unwrap();
        cfg.variant = Variant::Linearized;
        let lin = run_example1(&cfg).unwrap();
        for (a, b) in imp.records.iter().zip(&lin.records) {
            let scale = a.max_error.max(1e-12);
            assert!((a.max_error - b.max_error).abs() < 0.2 * scale);
        }
    }
}
