//! The blow-up limit ψ(r) = −n log(1 + c_n r^{n/(n−1)}).

use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::error::{bail, Result};
use crate::math::{alpha_n, conj, sphere_area, spow};
use crate::quad::GaussRule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleProfile {
    pub n: usize,
    /// c_n = (ω_{n−1}/n)^{1/(n−1)}.
    pub c_n: f64,
}

impl BubbleProfile {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
        }
        let nf = n as f64;
        Ok(Self {
            n,
            c_n: (sphere_area(n) / nf).powf(1.0 / (nf - 1.0)),
        })
    }

    pub fn psi(&self, r: f64) -> f64 {
        -(self.n as f64) * (self.c_n * r.abs().powf(conj(self.n))).ln_1p()
    }

    pub fn psi_prime(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let p = conj(self.n);
        let t = self.c_n * r.powf(p);
        -(self.n as f64) * p * t / (r * (1.0 + t))
    }

    /// ω_{n−1} r^{n−1}|ψ′|^{n−2}ψ′.
    pub fn flux(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        sphere_area(self.n) * r.powf(nf - 1.0) * spow(self.psi_prime(r), nf - 1.0)
    }
}

/// ∫_{ℝⁿ} e^ψ dx, by Gauss–Legendre in log r with the two power-law tails added analytically.
pub fn bubble_integral(n: usize) -> Result<f64> {
    let b = BubbleProfile::new(n)?;
    let nf = n as f64;
    let omega = sphere_area(n);
    let p = conj(n);
    let f = |s: f64| {
        let r = s.exp();
        omega * r.powf(nf) * (1.0 + b.c_n * r.powf(p)).powf(-nf)
    };
    let s_lo = -40.0 / nf;
    let s_hi = 40.0 * (nf - 1.0) / nf;
    let body = GaussRule::new(20).composite(f, s_lo, s_hi, 400);
    // near 0: integrand ≈ ω rⁿ(1 − n c_n r^p); near ∞: ≈ ω c_n^{−n} r^{n−np}(1 − n/(c_n r^p))
    let r_lo = s_lo.exp();
    let lower = omega * (r_lo.powf(nf) / nf - nf * b.c_n * r_lo.powf(nf + p) / (nf + p));
    let r_hi = s_hi.exp();
    let q = nf * p - nf;
    let upper =
        omega * b.c_n.powf(-nf) * (r_hi.powf(-q) / q - nf / b.c_n * r_hi.powf(-q - p) / (q + p));
    Ok(lower + body + upper)
}

/// Max over r of |−Δₙψ − (nα_n/(n−1))^{n−1}e^ψ| / the right-hand side,
/// with −Δₙψ from centered differences of the analytic flux at relative step `rel_step`.
pub fn bubble_ode_residual_with_step(n: usize, r_list: &[f64], rel_step: f64) -> Result<f64> {
    let b = BubbleProfile::new(n)?;
    if r_list.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        bail!(InvalidParameter, "radii must be finite and positive");
    }
    let nf = n as f64;
    let omega = sphere_area(n);
    let k = (nf * alpha_n(n) / (nf - 1.0)).powf(nf - 1.0);
    let mut worst: f64 = 0.0;
    for &r in r_list {
        let h = rel_step * r;
        let df = (b.flux(r + h) - b.flux(r - h)) / (2.0 * h);
        let lhs = -df / (omega * r.powf(nf - 1.0));
        let rhs = k * b.psi(r).exp();
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    Ok(worst)
}

pub fn bubble_ode_residual(n: usize, r_list: &[f64]) -> Result<f64> {
    bubble_ode_residual_with_step(n, r_list, 1e-4)
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn closed_form_values() {
        let b = BubbleProfile::new(2).unwrap();
        assert_eq!(b.psi(0.0), 0.0);
        assert!((b.psi(1.0) + 2.0 * (1.0 + PI).ln()).abs() < 1e-14);
        let b3 = BubbleProfile::new(3).unwrap();
        assert!((b3.c_n - (4.0 * PI / 3.0).sqrt()).abs() < 1e-14);
        assert!((b3.psi(1.0) + 3.0 * (1.0 + b3.c_n).ln()).abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_difference() {
        for n in 2..6 {
            let b = BubbleProfile::new(n).unwrap();
            for &r in &[0.01, 0.3, 2.0, 9.0] {
                let h = 1e-6 * r;
                let fd = (b.psi(r + h) - b.psi(r - h)) / (2.0 * h);
                assert!((fd - b.psi_prime(r)).abs() < 1e-6 * b.psi_prime(r).abs());
            }
        }
    }

    #[test]
    fn unit_mass() {
        for n in 2..7 {
            let v = bubble_integral(n).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "n={n} v={v}");
        }
    }
}
