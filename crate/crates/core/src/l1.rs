//! The L1 discretization kernel for the Caputo derivative of order
//! α ∈ (0, 1) on a uniform mesh t_n = nτ:
//!
//!   D_τ^α u^n = τ^{−α}/Γ(2−α) · Σ_{j=1..n} a_{n−j} (u^j − u^{j−1}),
//!   a_i = (i+1)^{1−α} − i^{1−α},
//!
//! together with the complementary sequence {p_n} that inverts the L1
//! convolution (Σ_{j=k..n} p_{n−j} a_{j−k} = 1) and underlies every discrete
//! Grönwall bound in this crate.

use crate::error::{Error, Result};
use crate::special::gamma;

/// The L1 weight sequence a_i = (i+1)^{1−α} − i^{1−α}, i = 0..=n_max.
///
/// a_0 = 1 exactly, the sequence decreases strictly to zero, and
/// a_i < (1−α) i^{−α} for i ≥ 1.
#[derive(Debug, Clone)]
pub struct L1Weights {
    alpha: f64,
    a: Vec<f64>,
}

impl L1Weights {
    pub fn new(alpha: f64, n_max: usize) -> Result<L1Weights> {
        check_alpha(alpha)?;
        if n_max == 0 {
            return Err(Error::InvalidParameter(
                "L1 weights need n_max >= 1".into(),
            ));
        }
        let e = 1.0 - alpha;
        let a = (0..=n_max)
            .map(|i| ((i + 1) as f64).powf(e) - (i as f64).powf(e))
            .collect();
        Ok(L1Weights { alpha, a })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Largest covered index, i.e. `a` holds indices 0..=n_max.
    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    pub fn get(&self, i: usize) -> f64 {
        self.a[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    /// Difference coefficient a_{i−1} − a_i (positive by monotonicity).
    pub fn diff(&self, i: usize) -> f64 {
        self.a[i - 1] - self.a[i]
    }
}

/// Applies the discrete Caputo operator to a scalar history u[0..=n]:
/// returns D_τ^α u^n.
pub fn discrete_caputo(history: &[f64], weights: &L1Weights, tau: f64) -> Result<f64> {
    if history.len() < 2 {
        return Err(Error::InvalidParameter(
            "discrete_caputo needs a history through n >= 1".into(),
        ));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "discrete_caputo needs tau > 0, got {tau}"
        )));
    }
    let n = history.len() - 1;
    if weights.n_max() < n - 1 {
        return Err(Error::WeightCoverage {
            have: history.len(),
            needed: n - 1,
            cover: weights.n_max(),
        });
    }
    let alpha = weights.alpha;
    let mut sum = 0.0;
    for j in 1..=n {
        sum += weights.get(n - j) * (history[j] - history[j - 1]);
    }
    Ok(tau.powf(-alpha) / gamma(2.0 - alpha) * sum)
}

/// The complementary weights p_n defined by
///   p_0 = 1,  p_n = Σ_{j=1..n} (a_{j−1} − a_j) p_{n−j},
/// evaluated by the direct O(n²) recursion.
#[derive(Debug, Clone)]
pub struct ComplementaryWeights {
    alpha: f64,
    p: Vec<f64>,
}

impl ComplementaryWeights {
    pub fn new(alpha: f64, n_max: usize) -> Result<ComplementaryWeights> {
        let w = L1Weights::new(alpha, n_max.max(1))?;
        let mut p = vec![0.0; n_max + 1];
        p[0] = 1.0;
        for n in 1..=n_max {
            let mut s = 0.0;
            for j in 1..=n {
                s += w.diff(j) * p[n - j];
            }
            p[n] = s;
        }
        Ok(ComplementaryWeights { alpha, p })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.p.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.p[n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::caputo_of_power;
    use proptest::prelude::*;

    #[test]
    fn a0_is_exactly_one() {
        for &alpha in &[0.1, 0.35, 0.5, 0.72, 0.9] {
            let w = L1Weights::new(alpha, 8).unwrap();
            assert_eq!(w.get(0), 1.0);
        }
    }

    #[test]
    fn frozen_weight_values() {
        // sqrt(2) - 1 and 4^0.6 - 3^0.6, mpmath 50 digits
        let w = L1Weights::new(0.5, 4).unwrap();
        assert!((w.get(1) - 0.41421356237309504880).abs() < 1e-15);
        let w = L1Weights::new(0.4, 4).unwrap();
        assert!((w.get(3) - 0.36421466506230726207).abs() < 1e-15);
    }

    #[test]
    fn weights_decrease_strictly_and_obey_tail_bound() {
        for &alpha in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let w = L1Weights::new(alpha, 2048).unwrap();
            for i in 0..2048 {
                assert!(w.get(i) > w.get(i + 1), "a_{i} <= a_{}", i + 1);
                assert!(w.get(i + 1) > 0.0);
            }
            for i in 1..=2048 {
                let bound = (1.0 - alpha) * (i as f64).powf(-alpha);
                assert!(w.get(i) < bound, "tail bound at i={i}, alpha={alpha}");
            }
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(L1Weights::new(0.0, 4).is_err());
        assert!(L1Weights::new(1.0, 4).is_err());
        assert!(L1Weights::new(-0.3, 4).is_err());
        assert!(L1Weights::new(1.5, 4).is_err());
        assert!(L1Weights::new(f64::NAN, 4).is_err());
        assert!(L1Weights::new(0.5, 0).is_err());
        assert!(ComplementaryWeights::new(0.5, 0).is_ok()); // p_0 alone is fine
        assert!(ComplementaryWeights::new(1.2, 8).is_err());
    }

    #[test]
    fn caputo_of_constant_history_is_exactly_zero() {
        let w = L1Weights::new(0.37, 64).unwrap();
        let hist = vec![4.2; 65];
        for n in 1..=64 {
            let d = discrete_caputo(&hist[..=n], &w, 0.05).unwrap();
            assert_eq!(d, 0.0, "n = {n}");
        }
    }

    #[test]
    fn caputo_of_linear_history_telescopes() {
        // u_j = t_j: the increments are all tau, Σ a_{n-j} telescopes to
        // n^{1-alpha}, and the discrete operator is exact for linear data.
        for &alpha in &[0.25, 0.5, 0.8] {
            let tau = 0.03;
            let n = 41;
            let w = L1Weights::new(alpha, n).unwrap();
            let hist: Vec<f64> = (0..=n).map(|j| j as f64 * tau).collect();
            let d = discrete_caputo(&hist, &w, tau).unwrap();
            let expected =
                tau.powf(1.0 - alpha) * (n as f64).powf(1.0 - alpha) / gamma(2.0 - alpha);
            assert!((d - expected).abs() < 1e-13 * expected);
            let exact = caputo_of_power(alpha, 1.0, n as f64 * tau).unwrap();
            assert!((d - exact).abs() < 1e-13 * exact);
        }
    }

    #[test]
    fn caputo_of_power_profile_within_truncation_bound() {
        // sigma = alpha = 0.4, tau = 0.1, n = 10: exact Caputo is the
        // constant Γ(1.4); oracle run puts |r_10| at 3.90e-3, well inside
        // the pointwise bound tau^{σ-α} n^{-min(1+α,2-σ)} = 10^{-1.4}.
        let w = L1Weights::new(0.4, 10).unwrap();
        let hist: Vec<f64> = (0..=10).map(|j| (j as f64 * 0.1).powf(0.4)).collect();
        let d = discrete_caputo(&hist, &w, 0.1).unwrap();
        let exact = 0.88726381750307528922; // Γ(1.4)
        assert!((d - exact).abs() < 10.0f64.powf(-1.4));
        assert!((d - 0.89116448210300088).abs() < 1e-12);
    }

    #[test]
    fn caputo_rejects_short_history_and_uncovered_weights() {
        let w = L1Weights::new(0.5, 3).unwrap();
        assert!(discrete_caputo(&[1.0], &w, 0.1).is_err());
        let hist = vec![0.0; 6]; // n = 5 needs a_4
        assert!(matches!(
            discrete_caputo(&hist, &w, 0.1),
            Err(Error::WeightCoverage { .. })
        ));
        assert!(discrete_caputo(&[0.0, 1.0], &w, 0.0).is_err());
    }

    #[test]
    fn complementary_frozen_values() {
        let p = ComplementaryWeights::new(0.5, 3).unwrap();
        assert_eq!(p.get(0), 1.0);
        // 2 - sqrt(2)
        assert!((p.get(1) - 0.58578643762690495120).abs() < 1e-15);
        // exact surds: p_2 = 5 - 2*sqrt(2) - sqrt(3)
        let surd = 5.0 - 2.0 * 2.0f64.sqrt() - 3.0f64.sqrt();
        assert!((p.get(2) - surd).abs() < 1e-14);
        assert!((p.get(2) - 0.43952206768493260887).abs() < 1e-14);
    }

    #[test]
    fn p0_is_one_for_any_alpha() {
        for &alpha in &[0.1, 0.5, 0.9] {
            assert_eq!(ComplementaryWeights::new(alpha, 4).unwrap().get(0), 1.0);
        }
    }

    /// Complementary-weight identities on a reduced grid; the harness verification
    /// suite runs the full alpha grid through n = 2048.
    #[test]
    fn complementary_weight_identities_small_grid() {
        for &alpha in &[0.2, 0.5, 0.8] {
            let n_max = 256;
            let p = ComplementaryWeights::new(alpha, n_max).unwrap();
            let a = L1Weights::new(alpha, n_max).unwrap();
            for n in 1..=n_max {
                // (i) 0 < p_n < (n+1)^{alpha-1}
                assert!(p.get(n) > 0.0);
                assert!(p.get(n) < ((n + 1) as f64).powf(alpha - 1.0));
                // (ii) sum_{j=k..n} p_{n-j} a_{j-k} = 1 at k in {1, n/2, n}
                for &k in &[1, n.div_ceil(2), n] {
                    let s: f64 = (k..=n).map(|j| p.get(n - j) * a.get(j - k)).sum();
                    assert!((s - 1.0).abs() < 1e-10, "alpha={alpha} n={n} k={k}: {s}");
                }
            }
            // (iii) Γ(2-α) Σ_{j=1..n} p_{n-j} <= n^α / Γ(1+α); the sum over
            // j of p_{n-j} is the prefix sum p_0 + ... + p_{n-1}
            let g2 = gamma(2.0 - alpha);
            let g1 = gamma(1.0 + alpha);
            let mut prefix = 0.0;
            for n in 1..=n_max {
                prefix += p.get(n - 1);
                assert!(
                    g2 * prefix <= (n as f64).powf(alpha) / g1 + 1e-10,
                    "alpha={alpha} n={n}"
                );
            }
        }
    }

    /// Discretized convolution bounds: the normalized sums stay bounded;
    /// operationally the ratio stops growing (last doubling <= 10% above the
    /// sup over [16, 1024]).
    #[test]
    fn convolution_bound_ratios_bounded() {
        let n_max = 2048;
        for &alpha in &[0.3, 0.5, 0.7] {
            let p = ComplementaryWeights::new(alpha, n_max).unwrap();
            for &gam in &[1.2f64, 1.5, 0.2, 0.5] {
                let ratio = |n: usize| -> f64 {
                    let s: f64 = (1..=n)
                        .map(|j| p.get(n - j) * (j as f64).powf(-gam))
                        .sum();
                    if gam > 1.0 {
                        s / (n as f64).powf(alpha - 1.0)
                    } else {
                        s / ((n as f64).powf(alpha - gam) * gamma(1.0 - gam)
                            / gamma(1.0 - gam + alpha))
                    }
                };
                let sup_head: f64 = (16..=1024).map(ratio).fold(0.0, f64::max);
                let sup_tail: f64 = (1025..=n_max).map(ratio).fold(0.0, f64::max);
                assert!(
                    sup_tail <= 1.10 * sup_head,
                    "alpha={alpha} gamma={gam}: head sup {sup_head:.4} tail sup {sup_tail:.4}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_weights_monotone_and_identity(alpha in 0.05f64..0.95, n in 2usize..220) {
            let w = L1Weights::new(alpha, n).unwrap();
            for i in 0..n {
                prop_assert!(w.get(i) > w.get(i + 1));
            }
            let p = ComplementaryWeights::new(alpha, n).unwrap();
            // summation identity at k = 1
            let s: f64 = (1..=n).map(|j| p.get(n - j) * w.get(j - 1)).sum();
            prop_assert!((s - 1.0).abs() < 1e-10);
        }

        #[test]
        fn prop_caputo_of_constant_is_zero(alpha in 0.05f64..0.95, c in -1e3f64..1e3, n in 1usize..80) {
            let w = L1Weights::new(alpha, n).unwrap();
            let hist = vec![c; n + 1];
            prop_assert_eq!(discrete_caputo(&hist, &w, 0.01).unwrap(), 0.0);
        }
    }
}
