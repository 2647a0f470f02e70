//! Measures the L1 truncation defect r_n = D_τ^α u^n − ∂_t^α u(t_n) for the
//! prescribed-regularity profiles u(t) = t^σ and normalizes it against the
//! sharp pointwise bound
//!
//!   |r_n| ≲ τ^{σ−α} n^{−κ},   κ = min(1+α, 2−σ) for σ < 1,  κ = 2−σ for σ > 1.
//!
//! The spatial factor is dropped: it cancels between the discrete and exact
//! operators, so the scalar profile isolates the temporal error exactly.

use crate::error::{Error, Result};
use crate::l1::{check_alpha, L1Weights};
use crate::special::{caputo_of_power, gamma};

/// A power-law regularity profile u(t) = t^σ with σ ∈ (0,1) ∪ (1,2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityProfile {
    sigma: f64,
}

impl RegularityProfile {
    pub fn new(sigma: f64) -> Result<RegularityProfile> {
        if sigma.is_finite() && sigma > 0.0 && sigma != 1.0 && sigma <= 2.0 {
            Ok(RegularityProfile { sigma })
        } else {
            Err(Error::InvalidSigma(sigma))
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sample(&self, t: f64) -> f64 {
        t.powf(self.sigma)
    }
}

/// The bound exponent κ of the pointwise truncation estimate.
pub fn bound_exponent(alpha: f64, sigma: f64) -> f64 {
    if sigma < 1.0 {
        (1.0 + alpha).min(2.0 - sigma)
    } else {
        2.0 - sigma
    }
}

/// Truncation errors |r_n| for n = 1..N and their ratios against
/// τ^{σ−α} n^{−κ}.
#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub alpha: f64,
    pub sigma: f64,
    pub n_steps: usize,
    pub tau: f64,
    pub kappa: f64,
    /// |r_n| for n = 1..N (index 0 holds r_1).
    pub r: Vec<f64>,
    /// |r_n| / (τ^{σ−α} n^{−κ}), same indexing.
    pub bound_ratio: Vec<f64>,
}

impl TruncationReport {
    pub fn sup_ratio(&self) -> f64 {
        self.bound_ratio.iter().cloned().fold(0.0, f64::max)
    }
}

/// Evaluates r_n = |D_τ^α u^n − ∂_t^α u(t_n)| for u_j = t_j^σ over the whole
/// mesh. Direct evaluation, O(N²).
pub fn truncation_errors(
    alpha: f64,
    profile: &RegularityProfile,
    n_steps: usize,
    t_final: f64,
) -> Result<TruncationReport> {
    check_alpha(alpha)?;
    if n_steps < 2 {
        return Err(Error::InvalidParameter(
            "truncation sweep needs N >= 2".into(),
        ));
    }
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_final must be positive, got {t_final}"
        )));
    }
    let sigma = profile.sigma();
    let tau = t_final / n_steps as f64;
    let weights = L1Weights::new(alpha, n_steps)?;
    let u: Vec<f64> = (0..=n_steps).map(|j| profile.sample(j as f64 * tau)).collect();
    let du: Vec<f64> = (1..=n_steps).map(|j| u[j] - u[j - 1]).collect();
    let pref = tau.powf(-alpha) / gamma(2.0 - alpha);
    let kappa = bound_exponent(alpha, sigma);
    let scale = tau.powf(sigma - alpha);

    let mut r = Vec::with_capacity(n_steps);
    let mut bound_ratio = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let mut s = 0.0;
        for j in 1..=n {
            s += weights.get(n - j) * du[j - 1];
        }
        let exact = caputo_of_power(alpha, sigma, n as f64 * tau)?;
        let rn = (pref * s - exact).abs();
        r.push(rn);
        bound_ratio.push(rn / (scale * (n as f64).powf(-kappa)));
    }
    if bound_ratio.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::NonFinite("truncation bound ratio"));
    }
    Ok(TruncationReport {
        alpha,
        sigma,
        n_steps,
        tau,
        kappa,
        r,
        bound_ratio,
    })
}

/// Finest-pair empirical order log₂(e_N / e_{2N}) from a doubling ladder of
/// (N, error) pairs sorted by N.
pub fn empirical_order(errors_by_n: &[(usize, f64)]) -> Result<f64> {
    if errors_by_n.len() < 2 {
        return Err(Error::InvalidParameter(
            "empirical order needs at least two N values".into(),
        ));
    }
    for w in errors_by_n.windows(2) {
        if w[1].0 != 2 * w[0].0 {
            return Err(Error::InvalidParameter(format!(
                "N sequence must double at every step, got {} -> {}",
                w[0].0, w[1].0
            )));
        }
    }
    let k = errors_by_n.len();
    let (_, coarse) = errors_by_n[k - 2];
    let (_, fine) = errors_by_n[k - 1];
    Ok((coarse / fine).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_validation() {
        assert!(RegularityProfile::new(1.0).is_err());
        assert!(RegularityProfile::new(0.0).is_err());
        assert!(RegularityProfile::new(-0.5).is_err());
        assert!(RegularityProfile::new(2.2).is_err());
        assert!(RegularityProfile::new(2.0).is_ok()); // smooth end included
        assert!(RegularityProfile::new(0.4).is_ok());
    }

    #[test]
    fn kappa_cases() {
        assert_eq!(bound_exponent(0.5, 0.5), 1.5); // min(1.5, 1.5)
        assert_eq!(bound_exponent(0.4, 0.4), 1.4); // min(1.4, 1.6)
        assert_eq!(bound_exponent(0.6, 0.2), 1.6); // min(1.6, 1.8)
        assert!((bound_exponent(0.4, 1.8) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn sup_ratio_stable_under_doubling() {
        // sigma = alpha = 0.5: bound exponent 1.5; the sup over n of the
        // normalized defect is flat across N (oracle: 0.2320 at every N)
        let profile = RegularityProfile::new(0.5).unwrap();
        let mut sups = Vec::new();
        for &n in &[64usize, 128, 256, 512] {
            let rep = truncation_errors(0.5, &profile, n, 1.0).unwrap();
            sups.push(rep.sup_ratio());
        }
        let hi = sups.iter().cloned().fold(0.0f64, f64::max);
        let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 2.0, "sups {sups:?}");
        assert!(hi > 1e-3, "ratio should not collapse: {sups:?}");
    }

    #[test]
    fn first_step_error_scales_like_tau_to_sigma_minus_alpha() {
        // Case A of the bound: |r_1| <= C tau^{sigma-alpha}; the regression
        // slope across N doublings is sigma - alpha within 0.05
        for &(alpha, sigma) in &[(0.4, 0.8), (0.5, 0.5), (0.4, 1.8)] {
            let profile = RegularityProfile::new(sigma).unwrap();
            let mut r1 = Vec::new();
            for &n in &[64usize, 128, 256, 512] {
                let rep = truncation_errors(alpha, &profile, n, 1.0).unwrap();
                r1.push(rep.r[0]);
            }
            for k in 0..r1.len() - 1 {
                let slope = (r1[k] / r1[k + 1]).log2();
                assert!(
                    (slope - (sigma - alpha)).abs() < 0.05,
                    "alpha={alpha} sigma={sigma}: slope {slope}"
                );
            }
        }
    }

    #[test]
    fn smooth_end_uses_the_sigma_above_one_branch() {
        // sigma = 1.8, alpha = 0.4: kappa = 0.2, sup stable
        let profile = RegularityProfile::new(1.8).unwrap();
        let mut sups = Vec::new();
        for &n in &[64usize, 128, 256, 512] {
            let rep = truncation_errors(0.4, &profile, n, 1.0).unwrap();
            assert!((rep.kappa - 0.2).abs() < 1e-12);
            sups.push(rep.sup_ratio());
        }
        let hi = sups.iter().cloned().fold(0.0f64, f64::max);
        let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 2.0);
    }

    #[test]
    fn sigma_two_maximum_error_scales_like_tau_two_minus_alpha() {
        let profile = RegularityProfile::new(2.0).unwrap();
        for &alpha in &[0.4, 0.6] {
            let mut max_r = Vec::new();
            for &n in &[64usize, 128, 256] {
                let rep = truncation_errors(alpha, &profile, n, 1.0).unwrap();
                max_r.push(rep.r.iter().cloned().fold(0.0f64, f64::max));
            }
            for k in 0..max_r.len() - 1 {
                let slope = (max_r[k] / max_r[k + 1]).log2();
                assert!(
                    (slope - (2.0 - alpha)).abs() < 0.05,
                    "alpha={alpha}: slope {slope}"
                );
            }
        }
    }

    #[test]
    fn defect_decreases_monotonically_for_rough_profiles() {
        for &(alpha, sigma) in &[(0.5, 0.5), (0.4, 0.8), (0.6, 0.4)] {
            let profile = RegularityProfile::new(sigma).unwrap();
            let rep = truncation_errors(alpha, &profile, 256, 1.0).unwrap();
            for n in 0..rep.r.len() - 1 {
                assert!(
                    rep.r[n + 1] < rep.r[n],
                    "alpha={alpha} sigma={sigma}: |r| not decreasing at n={}",
                    n + 1
                );
            }
        }
    }

    #[test]
    fn empirical_order_examples() {
        let exact_halving = [(10usize, 4e-2), (20, 2e-2)];
        assert!((empirical_order(&exact_halving).unwrap() - 1.0).abs() < 1e-12);

        let no_decay = [(10usize, 1e-2), (20, 1e-2)];
        assert!(empirical_order(&no_decay).unwrap().abs() < 1e-12);

        // finest pair of the (alpha=0.4, sigma=0.6) ladder: 3.63e-4 -> 1.53e-4
        let ladder = [
            (10usize, 5.13e-3),
            (20, 2.10e-3),
            (40, 8.70e-4),
            (80, 3.63e-4),
            (160, 1.53e-4),
        ];
        let rate = empirical_order(&ladder).unwrap();
        assert!((rate - (3.63e-4f64 / 1.53e-4).log2()).abs() < 1e-12);
        assert!((rate - 1.25).abs() < 0.01);
    }

    #[test]
    fn empirical_order_rejects_non_doubling() {
        assert!(empirical_order(&[(10usize, 1.0)]).is_err());
        assert!(empirical_order(&[(10usize, 1.0), (30, 0.5)]).is_err());
    }

    #[test]
    fn truncation_rejects_bad_parameters() {
        let p = RegularityProfile::new(0.5).unwrap();
        assert!(truncation_errors(1.5, &p, 64, 1.0).is_err());
        assert!(truncation_errors(0.5, &p, 1, 1.0).is_err());
        assert!(truncation_errors(0.5, &p, 64, 0.0).is_err());
    }

    #[test]
    fn inner_convolution_is_bitwise_discrete_caputo() {
        // the sweep's fused loop must agree with the public operator exactly
        use crate::l1::{discrete_caputo, L1Weights};
        let alpha = 0.5;
        let sigma = 0.7;
        let n_steps = 64;
        let profile = RegularityProfile::new(sigma).unwrap();
        let rep = truncation_errors(alpha, &profile, n_steps, 1.0).unwrap();
        let w = L1Weights::new(alpha, n_steps).unwrap();
        let tau = rep.tau;
        let u: Vec<f64> = (0..=n_steps).map(|j| (j as f64 * tau).powf(sigma)).collect();
        for n in [1usize, 2, 17, 64] {
            let d = discrete_caputo(&u[..=n], &w, tau).unwrap();
            let exact = caputo_of_power(alpha, sigma, n as f64 * tau).unwrap();
            assert_eq!(rep.r[n - 1], (d - exact).abs(), "n = {n}");
        }
    }
}
