//! The truncated-logarithm sharpness sequence u_k, parametrized by log k.
//!
//! k itself is never formed: scans reach k = 10^{2^{40}} and beyond, and only
//! log k and log log k enter the formulas.

use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::error::{bail, Result};
use crate::math::{alpha_n, factorial, ln_ball_volume, log_phi, sphere_area};
use crate::quad::GaussRule;
use crate::radial::Norms;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserParams {
    pub n: usize,
    pub log_k: f64,
    /// R_k = (log k)^{1/(2n)} / log log k.
    pub r_k: f64,
    /// Value on the inner ball, (log k)^{(n−1)/n} / ω_{n−1}^{1/n}.
    pub peak: f64,
}

impl MoserParams {
    pub fn from_k(n: usize, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            bail!(InvalidParameter, "k must be finite and positive, got {k}");
        }
        Self::from_log_k(n, k.ln())
    }

    pub fn from_log_k(n: usize, log_k: f64) -> Result<Self> {
        if n < 2 {
            bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
        }
        if !(log_k > 2.0 && log_k.is_finite()) {
            bail!(
                InvalidParameter,
                "need k > e^2 (log k > 2), got log k = {log_k}"
            );
        }
        let nf = n as f64;
        let r_k = log_k.powf(1.0 / (2.0 * nf)) / log_k.ln();
        let peak = log_k.powf((nf - 1.0) / nf) / sphere_area(n).powf(1.0 / nf);
        Ok(Self {
            n,
            log_k,
            r_k,
            peak,
        })
    }

    /// ln of the inner radius R_k/k.
    pub fn ln_inner_radius(&self) -> f64 {
        self.r_k.ln() - self.log_k
    }

    fn slope(&self) -> f64 {
        let nf = self.n as f64;
        self.log_k.powf(-1.0 / nf) / sphere_area(self.n).powf(1.0 / nf)
    }
}

pub fn moser_function(p: &MoserParams, r: f64) -> f64 {
    if r >= p.r_k {
        return 0.0;
    }
    if r <= 0.0 || r.ln() <= p.ln_inner_radius() {
        return p.peak;
    }
    p.slope() * (p.r_k / r).ln()
}

/// u_k′(r) away from the two kinks.
pub fn moser_derivative(p: &MoserParams, r: f64) -> f64 {
    if r >= p.r_k || r <= 0.0 || r.ln() <= p.ln_inner_radius() {
        0.0
    } else {
        -p.slope() / r
    }
}

/// r u_k′(r) as a function of s = log r, defined for radii too small to form.
pub fn moser_log_derivative(p: &MoserParams, s: f64) -> f64 {
    if s >= p.r_k.ln() || s <= p.ln_inner_radius() {
        0.0
    } else {
        -p.slope()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserNorms {
    pub norms: Norms,
    /// ‖∇u_k‖ₙⁿ by Gauss–Legendre quadrature of the analytic derivative.
    pub grad_pow_quad: f64,
    /// ‖u_k‖ₙⁿ · log k / R_kⁿ.
    pub ratio: f64,
}

/// ‖u_k‖ₙⁿ from the two branch integrals in closed form.
pub fn moser_lp_pow(p: &MoserParams) -> f64 {
    let n = p.n;
    let nf = n as f64;
    let inner = (p.log_k.powf(nf - 1.0).ln() + nf * p.ln_inner_radius()).exp() / nf;
    // ∫ r^{n−1} log(R/r)ⁿ dr over (R/k, R) = Rⁿ γ(n+1, n log k) / n^{n+1}
    let x = nf * p.log_k;
    let mut ln_fact = 0.0;
    let mut upper = 0.0;
    for j in 0..=n {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        upper += (j as f64 * x.ln() - ln_fact - x).exp();
    }
    let lower_gamma = factorial(n) * (1.0 - upper);
    let middle = p.r_k.powf(nf) / p.log_k * lower_gamma / nf.powf(nf + 1.0);
    inner + middle
}

pub fn moser_norms(p: &MoserParams) -> MoserNorms {
    let n = p.n;
    let omega = sphere_area(n);
    let lo = p.ln_inner_radius();
    let hi = p.r_k.ln();
    let rule = GaussRule::new(16);
    let grad_pow_quad = rule.composite(
        |s| omega * moser_log_derivative(p, s).abs().powi(n as i32),
        lo,
        hi,
        64,
    );
    let lp_pow = moser_lp_pow(p);
    MoserNorms {
        norms: Norms::from_powers(n, lp_pow, 1.0),
        grad_pow_quad,
        ratio: lp_pow * p.log_k / p.r_k.powf(n as f64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessPoint {
    pub log_k: f64,
    /// ln of the inner-ball contribution for u_k scaled to unit Sobolev norm.
    pub log_value: f64,
    /// Same with the exponent factor (1 + α‖u‖ₙⁿ) to the first power.
    pub log_value_first_power: f64,
    /// ½ log log k − n log log log k.
    pub prediction: f64,
}

impl SharpnessPoint {
    pub fn residual(&self) -> f64 {
        self.log_value - self.prediction
    }
}

/// Exponent α_n (v_k(0))^{n/(n−1)} (1+α‖v_k‖ₙⁿ)^{1/(n−1)} for v_k = u_k/‖u_k‖_{W^{1,n}},
/// and its first-power variant.
pub fn normalized_peak_exponents(p: &MoserParams, alpha: f64) -> (f64, f64) {
    let n = p.n;
    let nf = n as f64;
    let l = moser_lp_pow(p);
    let l_hat = l / (1.0 + l);
    let base = alpha_n(n) * p.peak.powf(nf / (nf - 1.0)) / (1.0 + l).powf(1.0 / (nf - 1.0));
    (
        base * (1.0 + alpha * l_hat).powf(1.0 / (nf - 1.0)),
        base * (1.0 + alpha * l_hat),
    )
}

pub fn sharpness_point(n: usize, alpha: f64, log_k: f64) -> Result<SharpnessPoint> {
    let p = MoserParams::from_log_k(n, log_k)?;
    let (e, e1) = normalized_peak_exponents(&p, alpha);
    let ln_vol = ln_ball_volume(n, p.ln_inner_radius());
    let lll = log_k.ln().ln();
    Ok(SharpnessPoint {
        log_k,
        log_value: log_phi(n, e) + ln_vol,
        log_value_first_power: log_phi(n, e1) + ln_vol,
        prediction: 0.5 * log_k.ln() - n as f64 * lll,
    })
}

pub fn sharpness_scan(n: usize, alpha: f64, log_k_list: &[f64]) -> Result<Vec<SharpnessPoint>> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        bail!(
            InvalidParameter,
            "alpha must be finite and non-negative, got {alpha}"
        );
    }
    if log_k_list.windows(2).any(|w| w[1] <= w[0]) {
        bail!(InvalidParameter, "k list must be strictly increasing");
    }
    log_k_list
        .iter()
        .map(|&lk| sharpness_point(n, alpha, lk))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let p = MoserParams::from_k(2, 1e6).unwrap();
        assert!((p.r_k - 0.7342).abs() < 1e-4);
        assert!((moser_function(&p, 0.0) - 1.4828).abs() < 1e-4);
        assert_eq!(moser_function(&p, p.r_k), 0.0);
        assert!(MoserParams::from_k(2, 5.0).is_err());
    }

    #[test]
    fn continuity_at_inner_radius() {
        let p = MoserParams::from_k(3, 1e12).unwrap();
        let r = p.ln_inner_radius().exp();
        let a = moser_function(&p, r * (1.0 + 1e-12));
        assert!((a - p.peak).abs() < 1e-9 * p.peak);
    }

    #[test]
    fn gradient_is_normalized() {
        for n in 2..5 {
            for lk in [10.0, 40.0, 1e3] {
                let p = MoserParams::from_log_k(n, lk).unwrap();
                let g = moser_norms(&p).grad_pow_quad;
                assert!((g - 1.0).abs() < 1e-12, "n={n} lk={lk} g={g}");
            }
        }
    }
}
