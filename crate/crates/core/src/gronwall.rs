//! The refined discrete fractional Grönwall inequality and its numerical
//! verification. For non-negative sequences satisfying
//!
//!   D_τ^α y_n ≤ λ y_n + μ₁ n^{−σ₁} + μ₂ n^{−σ₂} + η,   σ₁ > 1, σ₂ < 1,
//!
//! with τ below τ* = (2Γ(2−α)λ)^{−1/α}, the solution is dominated by a
//! Mittag-Leffler envelope
//!
//!   y_n ≤ C [ y₀ E_{α,1}(w t_n^α) + μ₁ τ^α n^{α−1} E_{α,α}(w t_n^α)
//!           + μ₂ τ^α n^{α−σ₂} E_{α,1−σ₂}(w t_n^α) + η τ^α n^α E_{α,1}(w t_n^α) ],
//!
//! where w = 2Γ(2−α)λ. The canonical verification oracle is the sequence
//! achieving equality in the hypothesis: it dominates every admissible
//! sequence (the recursion has positive coefficients), so checking the
//! envelope against it checks it against all of them.

use crate::error::{Error, Result};
use crate::l1::{check_alpha, ComplementaryWeights, L1Weights};
use crate::special::{gamma, mittag_leffler};

/// σ₁ used by the matrix property checks (the μ₁-forcing decay).
pub const MATRIX_CHECK_SIGMA1: f64 = 1.5;
/// σ₂ used by the matrix property checks (the μ₂-forcing decay).
pub const MATRIX_CHECK_SIGMA2: f64 = 0.5;

/// Default multiplicative envelope constant. The factor-2 absorptions in the
/// derivation motivate 4; the verified empirical minimum over the acceptance
/// grid is ~2.85.
pub const DEFAULT_ENVELOPE_CONST: f64 = 4.0;

const ZETA_THREE_HALVES: f64 = 2.612375348685488;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallParams {
    pub alpha: f64,
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub eta: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub tau: f64,
    pub y0: f64,
    /// Envelope constant C (configuration knob, default 4).
    pub envelope_const: f64,
}

impl GronwallParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        lambda: f64,
        mu1: f64,
        mu2: f64,
        eta: f64,
        sigma1: f64,
        sigma2: f64,
        tau: f64,
        y0: f64,
    ) -> Result<GronwallParams> {
        let p = GronwallParams {
            alpha,
            lambda,
            mu1,
            mu2,
            eta,
            sigma1,
            sigma2,
            tau,
            y0,
            envelope_const: DEFAULT_ENVELOPE_CONST,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_envelope_const(mut self, c: f64) -> GronwallParams {
        self.envelope_const = c;
        self
    }

    /// τ* = (2Γ(2−α)λ)^{−1/α}; the bound applies strictly below it.
    pub fn tau_star(&self) -> f64 {
        (2.0 * gamma(2.0 - self.alpha) * self.lambda).powf(-1.0 / self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.mu1 < 0.0 || self.mu2 < 0.0 || self.eta < 0.0 || self.y0 < 0.0 {
            return Err(Error::InvalidParameter(
                "mu1, mu2, eta, y0 must be non-negative".into(),
            ));
        }
        if !(self.sigma1 > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma1 must exceed 1, got {}",
                self.sigma1
            )));
        }
        if !(self.sigma2 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be below 1, got {}",
                self.sigma2
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        let tau_star = self.tau_star();
        if self.tau >= tau_star {
            return Err(Error::TauAboveThreshold {
                tau: self.tau,
                tau_star,
            });
        }
        Ok(())
    }
}

/// The Mittag-Leffler envelope at level n.
pub fn gronwall_envelope(params: &GronwallParams, n: usize) -> Result<f64> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("envelope needs n >= 1".into()));
    }
    let alpha = params.alpha;
    let w = 2.0 * gamma(2.0 - alpha) * params.lambda;
    let tn = n as f64 * params.tau;
    let z = w * tn.powf(alpha);
    let nf = n as f64;
    let ta = params.tau.powf(alpha);
    let e1 = mittag_leffler(alpha, 1.0, z)?;
    let ea = mittag_leffler(alpha, alpha, z)?;
    let es = mittag_leffler(alpha, 1.0 - params.sigma2, z)?;
    Ok(params.envelope_const
        * (params.y0 * e1
            + params.mu1 * ta * nf.powf(alpha - 1.0) * ea
            + params.mu2 * ta * nf.powf(alpha - params.sigma2) * es
            + params.eta * ta * nf.powf(alpha) * e1))
}

/// The sequence achieving equality in the Grönwall hypothesis:
///
///   (τ^{−α}/Γ(2−α)) Σ_{j=1..n} a_{n−j}(y_j − y_{j−1})
///       = λ y_n + μ₁ n^{−σ₁} + μ₂ n^{−σ₂} + η,
///
/// solved level by level (one scalar division per step; well-posed because
/// τ < τ* keeps the diagonal coefficient above λ).
pub fn worst_case_sequence(params: &GronwallParams, n_max: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let alpha = params.alpha;
    let c = params.tau.powf(-alpha) / gamma(2.0 - alpha);
    if c <= params.lambda {
        return Err(Error::TauAboveThreshold {
            tau: params.tau,
            tau_star: params.tau_star(),
        });
    }
    let weights = L1Weights::new(alpha, n_max.max(1))?;
    let mut y = Vec::with_capacity(n_max + 1);
    y.push(params.y0);
    for n in 1..=n_max {
        let mut hist = weights.get(n - 1) * y[0];
        for j in 1..n {
            hist += weights.diff(n - j) * y[j];
        }
        let nf = n as f64;
        let forcing = params.mu1 * nf.powf(-params.sigma1)
            + params.mu2 * nf.powf(-params.sigma2)
            + params.eta;
        y.push((c * hist + forcing) / (c - params.lambda));
    }
    Ok(y)
}

/// Outcome of one componentwise matrix-property comparison: the largest
/// observed LHS/RHS ratio against its declared admissible constant.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub property: &'static str,
    pub max_ratio: f64,
    pub declared: f64,
    pub worst_index: usize,
    pub pass: bool,
}

/// Report of the propagation-matrix properties for
/// J = 2Γ(2−α)λτ^α · [p_{j−i}]_{j>i} (strictly upper triangular, n×n).
#[derive(Debug, Clone)]
pub struct PropagationMatrixReport {
    pub alpha: f64,
    pub lambda: f64,
    pub tau: f64,
    pub n: usize,
    pub sigma1: f64,
    pub sigma2: f64,
    pub nilpotent: bool,
    pub checks: Vec<PropertyCheck>,
    pub pass: bool,
}

/// y = J x via the p-convolution; entry i of Jx is w Σ_{m≥1} p_m x_{i+m}.
fn j_apply(p: &[f64], w: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for m in 1..n - i {
            s += p[m] * x[i + m];
        }
        *o = w * s;
    }
    out
}

fn componentwise_ratio(lhs: &[f64], rhs: &[f64]) -> (f64, usize) {
    let mut worst = 0.0;
    let mut worst_index = 0;
    for i in 0..lhs.len() {
        if rhs[i] > 0.0 {
            let r = lhs[i] / rhs[i];
            if r > worst {
                worst = r;
                worst_index = i;
            }
        }
    }
    (worst, worst_index)
}

/// Verifies the propagation-matrix properties numerically.
///
/// The componentwise bounds are checked against declared constants: the
/// induction behind property (ii) silently passes through the hidden
/// constant of the convolution estimate, whose continuum value is exactly
/// 1/Γ(2−α) per power of J; the partial-sum envelopes (iii)/(v)/(vi) and the
/// single-application bound (iv) get their small-argument leading constants
/// with modest headroom. Empirical maxima are recorded in the report.
pub fn propagation_matrix_checks(
    alpha: f64,
    lambda: f64,
    tau: f64,
    n: usize,
) -> Result<PropagationMatrixReport> {
    check_alpha(alpha)?;
    if !(lambda > 0.0) || !(tau > 0.0) {
        return Err(Error::InvalidParameter(
            "matrix checks need lambda > 0 and tau > 0".into(),
        ));
    }
    if n == 0 || n > 512 {
        return Err(Error::InvalidParameter(format!(
            "matrix checks support 1 <= n <= 512, got {n}"
        )));
    }
    let sigma1 = MATRIX_CHECK_SIGMA1;
    let sigma2 = MATRIX_CHECK_SIGMA2;
    let g2 = gamma(2.0 - alpha);
    let w = 2.0 * g2 * lambda * tau.powf(alpha);
    let p = ComplementaryWeights::new(alpha, n)?;
    let pv = p.as_slice();

    // component i corresponds to mesh index k = n - i
    let kf = |i: usize| (n - i) as f64;
    let z1: Vec<f64> = (0..n).map(|i| kf(i).powf(-sigma1)).collect();
    let z2: Vec<f64> = (0..n).map(|i| kf(i).powf(-sigma2)).collect();
    let z3 = vec![1.0; n];

    let mut checks = Vec::new();

    // (i) nilpotency: each application of J shifts the support up one row,
    // so n applications annihilate any vector exactly (structural zeros).
    let mut v = z3.clone();
    for _ in 0..n {
        v = j_apply(pv, w, &v);
    }
    let nilpotent = v.iter().all(|&x| x == 0.0);

    // (ii) J^m Z2 <= Γ(1−σ₂) w^m / Γ(1−σ₂+mα) · (k^{mα−σ₂}) per component,
    // admissible excess (1/Γ(2−α))^m
    let mut jm = z2.clone();
    for m in 1..=3usize {
        jm = j_apply(pv, w, &jm);
        let claim: Vec<f64> = (0..n)
            .map(|i| {
                gamma(1.0 - sigma2) * w.powi(m as i32)
                    / gamma(1.0 - sigma2 + m as f64 * alpha)
                    * kf(i).powf(m as f64 * alpha - sigma2)
            })
            .collect();
        let (ratio, idx) = componentwise_ratio(&jm, &claim);
        let declared = (1.0 / g2).powi(m as i32);
        checks.push(PropertyCheck {
            property: match m {
                1 => "ii_m1",
                2 => "ii_m2",
                _ => "ii_m3",
            },
            max_ratio: ratio,
            declared,
            worst_index: idx,
            pass: ratio <= declared,
        });
    }

    // (iv) J Z1 <= C · w (k^{α−1}): splitting the convolution at k/2 and
    // bounding p_m < (m+1)^{α−1} gives the admissible constant 2^{1−α}ζ(σ₁)
    let jz1 = j_apply(pv, w, &z1);
    let claim_iv: Vec<f64> = (0..n).map(|i| w * kf(i).powf(alpha - 1.0)).collect();
    let (ratio_iv, idx_iv) = componentwise_ratio(&jz1, &claim_iv);
    let declared_iv = (2.0f64).powf(1.0 - alpha) * ZETA_THREE_HALVES;
    checks.push(PropertyCheck {
        property: "iv",
        max_ratio: ratio_iv,
        declared: declared_iv,
        worst_index: idx_iv,
        pass: ratio_iv <= declared_iv,
    });

    // partial sums Σ_{j>=1} J^j Z against their Mittag-Leffler envelopes
    let partial_sum = |z: &[f64]| -> Vec<f64> {
        let mut acc = vec![0.0; n];
        let mut v = z.to_vec();
        for _ in 1..=n {
            v = j_apply(pv, w, &v);
            if v.iter().all(|&x| x == 0.0) {
                break;
            }
            for i in 0..n {
                acc[i] += v[i];
            }
        }
        acc
    };
    let ml_at = |beta: f64, i: usize| -> Result<f64> {
        let tk = kf(i) * tau;
        mittag_leffler(alpha, beta, 2.0 * g2 * lambda * tk.powf(alpha))
    };

    // (iii) Σ J^j Z2 <= C τ^α (k^{α−σ₂} E_{α,1−σ₂}(w t_k^α))
    let s2 = partial_sum(&z2);
    let mut claim3 = vec![0.0; n];
    for (i, c3) in claim3.iter_mut().enumerate() {
        *c3 = tau.powf(alpha) * kf(i).powf(alpha - sigma2) * ml_at(1.0 - sigma2, i)?;
    }
    let (ratio3, idx3) = componentwise_ratio(&s2, &claim3);
    // small-argument leading constant: the j = 1 layer against E ≥ 1/Γ(1−σ₂)
    let declared3 =
        1.1 * 2.0 * lambda * gamma(1.0 - sigma2).powi(2) / gamma(1.0 - sigma2 + alpha);
    checks.push(PropertyCheck {
        property: "iii",
        max_ratio: ratio3,
        declared: declared3,
        worst_index: idx3,
        pass: ratio3 <= declared3,
    });

    // (v) Σ J^j Z1 <= C · 2Γ(2−α)λ τ^α (k^{α−1} E_{α,α}(w t_k^α))
    let s1 = partial_sum(&z1);
    let mut claim5 = vec![0.0; n];
    for (i, c5) in claim5.iter_mut().enumerate() {
        *c5 = 2.0 * g2 * lambda * tau.powf(alpha) * kf(i).powf(alpha - 1.0) * ml_at(alpha, i)?;
    }
    let (ratio5, idx5) = componentwise_ratio(&s1, &claim5);
    // the (iv) constant against E_{α,α} ≥ 1/Γ(α); the higher layers add up
    // to ~15% beyond the first at moderate arguments (grid sup 4.00 at
    // alpha = 0.8), hence the 1.35 headroom
    let declared5 = 1.35 * (2.0f64).powf(1.0 - alpha) * ZETA_THREE_HALVES * gamma(alpha);
    checks.push(PropertyCheck {
        property: "v",
        max_ratio: ratio5,
        declared: declared5,
        worst_index: idx5,
        pass: ratio5 <= declared5,
    });

    // (vi) Σ J^j Z3 <= C τ^α (k^α E_{α,1}(w t_k^α))
    let s3 = partial_sum(&z3);
    let mut claim6 = vec![0.0; n];
    for (i, c6) in claim6.iter_mut().enumerate() {
        *c6 = tau.powf(alpha) * kf(i).powf(alpha) * ml_at(1.0, i)?;
    }
    let (ratio6, idx6) = componentwise_ratio(&s3, &claim6);
    let declared6 = 1.15 * 2.0 * lambda / gamma(1.0 + alpha);
    checks.push(PropertyCheck {
        property: "vi",
        max_ratio: ratio6,
        declared: declared6,
        worst_index: idx6,
        pass: ratio6 <= declared6,
    });

    let pass = nilpotent && checks.iter().all(|c| c.pass);
    Ok(PropagationMatrixReport {
        alpha,
        lambda,
        tau,
        n,
        sigma1,
        sigma2,
        nilpotent,
        checks,
        pass,
    })
}
