//! The critical and subcritical functionals and their multipliers.

use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::error::{bail, Result};
use crate::math::{alpha_n, conj, ksum, log_phi, log_sum_exp, phi_prime_unchecked, phi_unchecked};
use crate::radial::{norms, Norms, RadialFunction};

/// Per-node exponents above this switch the sum to log space.
pub const LOG_SPACE_THRESHOLD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TMParams {
    pub n: usize,
    /// Coupling α on ‖u‖ₙⁿ.
    pub alpha: f64,
    /// Exponent β ≤ α_n.
    pub beta: f64,
    pub alpha_n: f64,
}

impl TMParams {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            bail!(
                InvalidParameter,
                "alpha must be finite and non-negative, got {alpha}"
            );
        }
        let an = alpha_n(n);
        if !(beta > 0.0 && beta <= an * (1.0 + 1e-12)) {
            bail!(
                InvalidParameter,
                "beta must lie in (0, alpha_n = {an}], got {beta}"
            );
        }
        Ok(Self {
            n,
            alpha,
            beta: beta.min(an),
            alpha_n: an,
        })
    }

    /// β = α_n.
    pub fn critical(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, alpha, alpha_n(n))
    }

    /// β = frac · α_n.
    pub fn with_fraction(n: usize, alpha: f64, frac: f64) -> Result<Self> {
        Self::new(n, alpha, frac * alpha_n(n))
    }

    pub fn is_subcritical(&self) -> bool {
        self.beta < self.alpha_n
    }

    /// β(1 + α L)^{1/(n−1)} for L = ‖u‖ₙⁿ.
    pub fn exponent(&self, lp_pow: f64) -> f64 {
        self.beta * (1.0 + self.alpha * lp_pow).powf(1.0 / (self.n as f64 - 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalValue {
    /// ∫_{B_R} Φ(…); may be +∞ when only `log_value` is representable.
    pub value: f64,
    pub log_value: f64,
    pub exponent_used: f64,
    pub norms: Norms,
    /// Bound on the contribution from |x| > R, never added to `value`.
    pub tail_estimate: f64,
}

pub fn tm_functional(u: &RadialFunction, params: &TMParams) -> Result<FunctionalValue> {
    if u.n() != params.n {
        bail!(
            InvalidInput,
            "function lives in dimension {} but params in {}",
            u.n(),
            params.n
        );
    }
    let nm = norms(u);
    let exponent = params.exponent(nm.lp_pow);
    let (value, log_value) = integrate_phi(u, params.n, exponent);
    let tail_estimate = tail_estimate(u, params.n, exponent, &nm);
    Ok(FunctionalValue {
        value,
        log_value,
        exponent_used: exponent,
        norms: nm,
        tail_estimate,
    })
}

/// Σ w_i Φ(c|u_i|^{n/(n−1)}) and its log, switching to log-sum-exp for big exponents.
pub(crate) fn integrate_phi(u: &RadialFunction, n: usize, c: f64) -> (f64, f64) {
    let p = conj(n);
    let w = u.grid().weights();
    let e: Vec<f64> = u.values().iter().map(|v| c * v.abs().powf(p)).collect();
    let emax = e.iter().copied().fold(0.0, f64::max);
    if emax <= LOG_SPACE_THRESHOLD {
        let v = ksum(e.iter().zip(w).map(|(&ei, &wi)| wi * phi_unchecked(n, ei)));
        (v, v.ln())
    } else {
        let terms: Vec<f64> = e
            .iter()
            .zip(w)
            .filter(|(&ei, &wi)| ei > 0.0 && wi > 0.0)
            .map(|(&ei, &wi)| wi.ln() + log_phi(n, ei))
            .collect();
        let lv = log_sum_exp(&terms);
        (lv.exp(), lv)
    }
}

fn tail_estimate(u: &RadialFunction, n: usize, exponent: f64, nm: &Norms) -> f64 {
    let u_r = *u.values().last().unwrap_or(&0.0);
    if u_r <= 0.0 {
        return 0.0;
    }
    // Φ(t)/t^{n−1} increases in t, so beyond R where u ≤ u(R):
    // Φ(e u^{n/(n−1)}) ≤ c e^{n−1} uⁿ with c = Φ(t_R)/t_R^{n−1}, t_R = e u(R)^{n/(n−1)};
    // ∫_{|x|>R} uⁿ is at most what is left of the unit Sobolev budget.
    let t_r = exponent * u_r.powf(conj(n));
    let c = phi_unchecked(n, t_r) / t_r.powi(n as i32 - 1);
    let budget = (1.0 - nm.sobolev_pow()).max(0.0);
    c * exponent.powi(n as i32 - 1) * budget
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multipliers {
    pub alpha_k: f64,
    pub mu_k: f64,
    pub gamma_k: f64,
    pub lambda_k: f64,
}

impl Multipliers {
    /// Multipliers for a given ‖u‖ₙⁿ and λ.
    pub fn from_parts(params: &TMParams, lp_pow: f64, lambda_k: f64) -> Self {
        let al = params.alpha * lp_pow;
        Self {
            alpha_k: params.exponent(lp_pow),
            mu_k: (1.0 + al) / (1.0 + 2.0 * al),
            gamma_k: params.alpha / (1.0 + 2.0 * al),
            lambda_k,
        }
    }
}

pub fn multipliers(u: &RadialFunction, params: &TMParams) -> Result<Multipliers> {
    if u.n() != params.n {
        bail!(
            InvalidInput,
            "function lives in dimension {} but params in {}",
            u.n(),
            params.n
        );
    }
    let lp = u.lp_pow(params.n as f64);
    let ak = params.exponent(lp);
    Ok(Multipliers::from_parts(params, lp, lambda(u, params.n, ak)))
}

/// λ = Σ w_i u_i^{n/(n−1)} Φ′(α_k u_i^{n/(n−1)}).
pub(crate) fn lambda(u: &RadialFunction, n: usize, alpha_k: f64) -> f64 {
    let p = conj(n);
    let w = u.grid().weights();
    ksum(u.values().iter().zip(w).map(|(v, wi)| {
        let s = v.abs().powf(p);
        wi * s * phi_prime_unchecked(n, alpha_k * s)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridKind};
    use alloc::sync::Arc;

    #[test]
    fn zero_function() {
        let g = Arc::new(make_grid(2, 1.0, 64, GridKind::Uniform).unwrap());
        let u = RadialFunction::zero(g);
        let p = TMParams::critical(2, 0.3).unwrap();
        let f = tm_functional(&u, &p).unwrap();
        assert_eq!(f.value, 0.0);
        let m = multipliers(&u, &p).unwrap();
        assert_eq!(m.lambda_k, 0.0);
    }

    #[test]
    fn multiplier_formulas() {
        let p = TMParams::new(2, 0.0, 5.0).unwrap();
        let m = Multipliers::from_parts(&p, 0.7, 1.0);
        assert_eq!((m.mu_k, m.gamma_k, m.alpha_k), (1.0, 0.0, 5.0));
        let p = TMParams::new(2, 1.0, 5.0).unwrap();
        let m = Multipliers::from_parts(&p, 1.0, 1.0);
        assert!((m.mu_k - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.gamma_k - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_supercritical_beta() {
        assert!(TMParams::new(2, 0.0, 13.0).is_err());
        assert!(TMParams::new(2, -0.1, 1.0).is_err());
    }

    #[test]
    fn huge_exponents_stay_finite_in_logs() {
        let g = Arc::new(make_grid(2, 1.0, 64, GridKind::Uniform).unwrap());
        let u = RadialFunction::from_fn(g, |r| 30.0 * (1.0 - r)).unwrap();
        let p = TMParams::critical(2, 0.0).unwrap();
        let f = tm_functional(&u, &p).unwrap();
        assert!(f.log_value.is_finite() && f.log_value > 700.0);
    }
}
