//! Dimension constants and the truncated exponential.

#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::error::{bail, Result};

/// Surface area ω_{n−1} of the unit sphere S^{n−1} ⊂ ℝⁿ (ω₁ = 2π, ω₂ = 4π).
pub fn sphere_area(n: usize) -> f64 {
    use core::f64::consts::PI;
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

/// Critical exponent α_n = n ω_{n−1}^{1/(n−1)}.
pub fn alpha_n(n: usize) -> f64 {
    let n_f = n as f64;
    n_f * sphere_area(n).powf(1.0 / (n_f - 1.0))
}

/// Hölder conjugate n/(n−1), the power of |u| in the exponent.
pub fn conj(n: usize) -> f64 {
    n as f64 / (n as f64 - 1.0)
}

/// Volume of the ball of radius r in ℝⁿ.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    sphere_area(n) / n as f64 * r.powi(n as i32)
}

/// Natural log of the ball volume, usable when r^n under- or overflows.
pub fn ln_ball_volume(n: usize, ln_r: f64) -> f64 {
    (sphere_area(n) / n as f64).ln() + n as f64 * ln_r
}

pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|j| 1.0 / j as f64).sum()
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, j| acc * j as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Σ_{j<m} t^j/j!.
pub fn exp_partial(m: usize, t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 0..m {
        if j > 0 {
            term *= t / j as f64;
        }
        sum += term;
    }
    sum
}

/// Σ_{j≥m} t^j/j! summed as a positive series.
pub fn exp_tail_series(m: usize, t: f64) -> f64 {
    if t == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mut term = 1.0;
    for j in 1..=m {
        term *= t / j as f64;
    }
    let mut sum = 0.0;
    let mut j = m;
    loop {
        sum += term;
        j += 1;
        term *= t / j as f64;
        if term <= f64::EPSILON * 0.25 * sum || j > m + 2000 {
            break;
        }
    }
    sum
}

/// Σ_{j≥m} t^j/j! with the series below `switch` and e^t minus the head above.
pub fn exp_tail(m: usize, t: f64, switch: f64) -> f64 {
    if t < switch {
        exp_tail_series(m, t)
    } else {
        t.exp() - exp_partial(m, t)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        bail!(
            InvalidInput,
            "argument must be a non-negative number, got {t}"
        );
    }
    Ok(())
}

/// Φ(t) = e^t − Σ_{j=0}^{n−2} t^j/j!.
pub fn phi(n: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(phi_unchecked(n, t))
}

/// Φ′(t) = Σ_{j≥n−2} t^j/j!.
pub fn phi_prime(n: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(phi_prime_unchecked(n, t))
}

#[inline]
pub(crate) fn phi_unchecked(n: usize, t: f64) -> f64 {
    exp_tail(n - 1, t, n as f64)
}

#[inline]
pub(crate) fn phi_prime_unchecked(n: usize, t: f64) -> f64 {
    exp_tail(n - 2, t, n as f64)
}

/// Φ*(t) = e^t − Σ_{j=0}^{n−1} t^j/j!.
pub fn phi_star(n: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(exp_tail(n, t, n as f64 + 1.0))
}

/// ln Σ_{j≥m} t^j/j! without overflow for large t.
pub fn ln_exp_tail(m: usize, t: f64, switch: f64) -> f64 {
    if t == 0.0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if t < 600.0 {
        return exp_tail(m, t, switch).ln();
    }
    // head/e^t is tiny here; keep it in logs since t^j alone may overflow
    let ln_head = ln_exp_partial(m, t);
    t + (-(ln_head - t).exp()).ln_1p()
}

fn ln_exp_partial(m: usize, t: f64) -> f64 {
    if m == 0 {
        return f64::NEG_INFINITY;
    }
    let ln_t = t.ln();
    let mut ln_terms = alloc::vec::Vec::with_capacity(m);
    let mut ln_fact = 0.0;
    for j in 0..m {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        ln_terms.push(j as f64 * ln_t - ln_fact);
    }
    log_sum_exp(&ln_terms)
}

/// ln Φ(t).
pub fn log_phi(n: usize, t: f64) -> f64 {
    ln_exp_tail(n - 1, t, n as f64)
}

/// ln Φ′(t).
pub fn log_phi_prime(n: usize, t: f64) -> f64 {
    ln_exp_tail(n - 2, t, n as f64)
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Neumaier-compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn ksum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut k = KahanSum::default();
    for x in xs {
        k.add(x);
    }
    k.value()
}

/// Sign-preserving power |x|^{q−1}·x, zero at zero.
#[inline]
pub fn spow(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(q - 1.0) * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((alpha_n(2) - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
    }

    #[test]
    fn phi_small_values() {
        assert_eq!(phi(2, 0.0).unwrap(), 0.0);
        assert!((phi(2, 1.0).unwrap() - (core::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!((phi(3, 2.0).unwrap() - (2.0f64.exp() - 3.0)).abs() < 1e-14);
        assert_eq!(phi_prime(2, 0.0).unwrap(), 1.0);
        assert_eq!(phi_prime(3, 0.0).unwrap(), 0.0);
        assert!(phi(2, -1.0).is_err());
        assert!(phi(2, f64::NAN).is_err());
    }

    #[test]
    fn log_phi_matches_direct_and_survives_overflow() {
        for n in 2..7 {
            for &t in &[0.01, 1.0, 10.0, 300.0, 599.0, 601.0] {
                let d = phi(n, t).unwrap().ln();
                assert!(
                    (log_phi(n, t) - d).abs() <= 1e-13 * d.abs().max(1.0),
                    "n={n} t={t}"
                );
            }
            let big = log_phi(n, 1.0e6);
            assert!((big - 1.0e6).abs() < 1e-6);
        }
    }

    #[test]
    fn binomial_and_factorial() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(7, 0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
    }
}
