use proptest::prelude::*;
use tmlab_core::math::{exp_tail, log_phi, log_phi_prime, log_sum_exp, phi, phi_prime, phi_star};

/// Plain 100-term power series of e^t with the first `skip` terms removed.
fn series_tail(skip: usize, t: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    for j in 0..100 {
        if j > 0 {
            term *= t / j as f64;
        }
        if j >= skip {
            acc += term;
        }
    }
    acc
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn phi_reference_values() {
    for n in 2..8 {
        assert_eq!(phi(n, 0.0).unwrap(), 0.0);
    }
    assert!(rel(phi(2, 1.0).unwrap(), series_tail(1, 1.0)) < 1e-15);
    assert!((phi(2, 1.0).unwrap() - 1.718_281_8).abs() < 1e-7);
    assert!(rel(phi(3, 2.0).unwrap(), series_tail(2, 2.0)) < 1e-15);
    assert!((phi(3, 2.0).unwrap() - 4.389_056_1).abs() < 1e-7);
    assert_eq!(phi_prime(2, 0.0).unwrap(), 1.0);
    assert_eq!(phi_prime(3, 0.0).unwrap(), 0.0);
    assert!(phi(2, -1.0).is_err());
    assert!(phi_prime(3, f64::NAN).is_err());
}

#[test]
fn huge_arguments_in_log_space() {
    // ln Φ(t) → t for large t, and the log form never overflows.
    for n in 2..6 {
        let t = 1e5;
        assert!(rel(log_phi(n, t), t) < 1e-12);
        assert!(log_phi_prime(n, 2e3).is_finite());
    }
    let xs = [1000.0, 1000.0];
    assert!((log_sum_exp(&xs) - (1000.0 + 2f64.ln())).abs() < 1e-12);
}

proptest! {
    #[test]
    fn abstract_identity(n in 2usize..=6, t in 0.0f64..50.0) {
        // Φ(t) = Φ*(t) + t^{n−1}/(n−1)!
        let lhs = phi(n, t).unwrap();
        let fact: f64 = (1..n).map(|j| j as f64).product();
        let rhs = phi_star(n, t).unwrap() + t.powi(n as i32 - 1) / fact;
        prop_assert!(rel(lhs, rhs) < 1e-12, "n={} t={} {} {}", n, t, lhs, rhs);
    }

    #[test]
    fn series_and_direct_agree(n in 2usize..=6, x in 0.25f64..4.0) {
        let t = x * n as f64;
        let series = exp_tail(n - 1, t, f64::INFINITY);
        let direct = exp_tail(n - 1, t, 0.0);
        prop_assert!(rel(series, direct) < 1e-12, "n={} t={} {} {}", n, t, series, direct);
        prop_assert!(rel(phi(n, t).unwrap(), series_tail(n - 1, t)) < 1e-13);
    }

    #[test]
    fn chain_inequality(n in 2usize..=8, t in 0.0f64..200.0) {
        let f = phi(n, t).unwrap();
        let fp = phi_prime(n, t).unwrap();
        prop_assert!(f <= t * fp * (1.0 + 1e-14));
    }

    #[test]
    fn monotone(n in 2usize..=6, t in 0.0f64..100.0, dt in 1e-6f64..1.0) {
        prop_assert!(phi(n, t + dt).unwrap() > phi(n, t).unwrap());
        prop_assert!(phi_prime(n, t + dt).unwrap() >= phi_prime(n, t).unwrap());
    }

    #[test]
    fn log_form_matches(n in 2usize..=6, t in 1e-3f64..600.0) {
        prop_assert!((log_phi(n, t) - phi(n, t).unwrap().ln()).abs() < 1e-12 * log_phi(n, t).abs().max(1.0));
        prop_assert!((log_phi_prime(n, t) - phi_prime(n, t).unwrap().ln()).abs() < 1e-12 * log_phi_prime(n, t).abs().max(1.0));
    }
}
