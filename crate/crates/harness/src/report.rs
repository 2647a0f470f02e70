//! Convergence records, rate conventions, and CSV/JSON emission.

use crate::config::Variant;
use serde::Serialize;
use std::fmt::Write as _;

/// Which error regime a study measures; fixes the expected-order dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateRegime {
    /// Fixed final time: τ^{σ+1−α} for σ < 1, τ^{2−α} for σ > 1.
    TemporalFinalTime,
    /// t_N -> 0 at fixed N: the error decays like t_N^σ.
    TemporalToZero,
    /// Fixed time grid, refined space: h².
    Spatial,
}

/// Expected convergence order for (α, σ) under the given regime.
pub fn expected_rate(alpha: f64, sigma: f64, regime: RateRegime) -> f64 {
    match regime {
        RateRegime::Spatial => 2.0,
        RateRegime::TemporalToZero => sigma,
        RateRegime::TemporalFinalTime => {
            if sigma < 1.0 {
                sigma + 1.0 - alpha
            } else {
                2.0 - alpha
            }
        }
    }
}

/// One sweep cell of a convergence study.
#[derive(Debug, Clone, Serialize)]
pub struct CellRecord {
    pub alpha: f64,
    pub sigma: f64,
    pub n_steps: usize,
    pub m: usize,
    pub t_final: f64,
    pub variant: Variant,
    pub max_error: f64,
    /// Empirical order against the previous cell of the same series; absent
    /// on the first cell.
    pub rate: Option<f64>,
    pub expected_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub records: Vec<CellRecord>,
}

impl ConvergenceReport {
    /// CSV with the fixed schema
    /// `alpha,sigma,N,M,tN,variant,max_error,rate,expected_rate`;
    /// floats carry six significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,sigma,N,M,tN,variant,max_error,rate,expected_rate\n");
        for r in &self.records {
            let rate = r.rate.map(fmt_sig6).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                fmt_sig6(r.alpha),
                fmt_sig6(r.sigma),
                r.n_steps,
                r.m,
                fmt_sig6(r.t_final),
                r.variant,
                fmt_sig6(r.max_error),
                rate,
                fmt_sig6(r.expected_rate),
            );
        }
        out
    }

    /// Finest-pair rate of the series selected by `key`, in series order.
    pub fn finest_rate(&self, key: impl Fn(&CellRecord) -> bool) -> Option<f64> {
        self.records
            .iter()
            .rev()
            .filter(|r| key(r))
            .find_map(|r| r.rate)
    }
}

/// Six significant digits, scientific.
pub fn fmt_sig6(x: f64) -> String {
    format!("{x:.5e}")
}

/// log₂ rate of an error drop under N doubling.
pub fn log2_rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Generalized spatial order between mesh resolutions m_prev < m_cur.
pub fn mesh_rate(e_prev: f64, e_cur: f64, m_prev: usize, m_cur: usize) -> f64 {
    (e_prev / e_cur).ln() / (m_cur as f64 / m_prev as f64).ln()
}

/// Per-decade rate between consecutive final times of a t -> 0 ladder.
pub fn decade_rate(e_prev: f64, e_cur: f64, t_prev: f64, t_cur: f64) -> f64 {
    (e_prev / e_cur).log10() / (t_prev / t_cur).log10()
}

/// Least-squares slope of log₁₀(e) against log₁₀(t): the documented "Rate"
/// convention for the t -> 0 tables.
pub fn decade_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, e) in points {
        let x = t.log10();
        let y = e.log10();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_rate_regime_table() {
        // sigma < 1 at final time: sigma + 1 - alpha
        assert!((expected_rate(0.4, 0.4, RateRegime::TemporalFinalTime) - 1.0).abs() < 1e-15);
        assert!((expected_rate(0.4, 0.6, RateRegime::TemporalFinalTime) - 1.2).abs() < 1e-15);
        // sigma > 1 at final time: 2 - alpha
        assert!((expected_rate(0.4, 1.2, RateRegime::TemporalFinalTime) - 1.6).abs() < 1e-15);
        assert!((expected_rate(0.6, 1.8, RateRegime::TemporalFinalTime) - 1.4).abs() < 1e-15);
        // t -> 0: sigma (alpha for the sigma = alpha problems)
        assert!((expected_rate(0.6, 0.8, RateRegime::TemporalToZero) - 0.8).abs() < 1e-15);
        assert!((expected_rate(0.8, 0.8, RateRegime::TemporalToZero) - 0.8).abs() < 1e-15);
        // space: always 2
        assert_eq!(expected_rate(0.4, 0.4, RateRegime::Spatial), 2.0);
    }

    #[test]
    fn rate_helpers() {
        assert!((log2_rate(4e-2, 2e-2) - 1.0).abs() < 1e-12);
        assert!((mesh_rate(9e-3, 1e-3, 8, 24) - 2.0).abs() < 1e-12);
        assert!((decade_rate(1e-3, 1e-5, 1e-4, 1e-5) - 2.0).abs() < 1e-12);
        // perfect power law e = t^1.8
        let pts: Vec<(f64, f64)> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&t: &f64| (t, t.powf(1.8)))
            .collect();
        assert!((decade_slope(&pts) - 1.8).abs() < 1e-10);
    }

    #[test]
    fn csv_formatting_is_stable() {
        let rep = ConvergenceReport {
            records: vec![CellRecord {
                alpha: 0.4,
                sigma: 0.4,
                n_steps: 10,
                m: 1000,
                t_final: 1.0,
                variant: Variant::Implicit,
                max_error: 1.12e-2,
                rate: None,
                expected_rate: 1.0,
            }],
        };
        let csv = rep.to_csv();
        assert!(csv.starts_with("alpha,sigma,N,M,tN,variant,max_error,rate,expected_rate\n"));
        assert!(csv.contains("4.00000e-1,4.00000e-1,10,1000,1.00000e0,implicit,1.12000e-2,,1.00000e0"));
    }
}
