use std::f64::consts::{E, PI};

use tmlab_core::greens::{e_binomial, solve_green_with};
use tmlab_core::math::harmonic;
use tmlab_core::{
    capacity_identity_check, carleson_chang_bound, extract_a, solve_green, GreenOptions, SourceTerm,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// For n = 2 the equation is linear: G = K₀(√(1−α) r)/(2π), so A = (log 2 − γ − ½ log(1−α))/(2π).
fn closed_form_a(alpha: f64) -> f64 {
    (2f64.ln() - EULER_GAMMA - 0.5 * (1.0 - alpha).ln()) / (2.0 * PI)
}

#[test]
fn two_dimensional_constant_matches_bessel_asymptotics() {
    // (R_max, tolerance): forcing G(R_max) ≈ 0 costs about G_true(R_max)/I₀(κR_max) in A
    for (rmax, tol) in [(8.0, 1e-5), (12.0, 1e-8)] {
        for alpha in [0.0, 0.2] {
            let g = solve_green(2, alpha, 1e-6, rmax, 1e-5).unwrap();
            assert!(
                g.flux_residual < 1e-5,
                "alpha={alpha} flux {}",
                g.flux_residual
            );
            assert!(
                (g.a - closed_form_a(alpha)).abs() < tol,
                "alpha={alpha} A={} vs {}",
                g.a,
                closed_form_a(alpha)
            );
            // ‖G‖₂² = ∫ K₀(κr)² r dr / (2π) = 1/(4π(1−α))
            let l2 = g.ln_norm.powi(2);
            assert!(
                (l2 - 1.0 / (4.0 * PI * (1.0 - alpha))).abs() < 10.0 * tol,
                "{l2}"
            );
            assert!(*g.values.last().unwrap() <= 1e-6 && *g.values.last().unwrap() >= 0.0);
        }
    }
    assert!((closed_form_a(0.0) - 0.018_451_073_777_171_8).abs() < 1e-15);
    assert!((closed_form_a(0.2) - 0.036_208_273_382_540).abs() < 1e-14);
}

#[test]
fn refinement_stability() {
    for alpha in [0.0, 0.2] {
        let base = solve_green(2, alpha, 1e-6, 8.0, 1e-5).unwrap().a;
        let half_r0 = solve_green(2, alpha, 5e-7, 8.0, 1e-5).unwrap().a;
        let double_rmax = solve_green(2, alpha, 1e-6, 16.0, 1e-5).unwrap().a;
        assert!((half_r0 - base).abs() < 1e-3 && (double_rmax - base).abs() < 1e-3);
    }
}

#[test]
fn three_dimensional_solve() {
    let g = solve_green(3, 0.3, 1e-6, 8.0, 1e-5).unwrap();
    assert!(g.flux_residual < 1e-5 && g.a.is_finite());
    for w in g.values.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn pure_log_hook() {
    let mut o = GreenOptions::new(1e-6, 4.0, 1e-8);
    o.source = SourceTerm::Off;
    o.fixed_a = Some(0.7);
    for n in [2, 3] {
        let g = solve_green_with(n, 0.0, &o).unwrap();
        assert!(g.flux.iter().all(|f| (f + 1.0).abs() < 1e-8));
        let fit = extract_a(&g, (1e-5, 1e-2)).unwrap();
        assert!((fit.a - 0.7).abs() < 1e-8);
    }
    o.fixed_a = None;
    assert!(solve_green_with(2, 0.0, &o).is_err());
}

#[test]
fn fit_window_behaviour() {
    let g = solve_green(2, 0.0, 1e-6, 8.0, 1e-5).unwrap();
    let wide = extract_a(&g, (1e-5, 1e-3)).unwrap();
    let half = extract_a(&g, (1e-5, 5e-4)).unwrap();
    assert!((wide.a - half.a).abs() < 1e-3);
    assert!(extract_a(&g, (1e-7, 1e-3)).is_err());
    assert!(extract_a(&g, (1e-3, 0.5)).is_err());
    // deviation shrinks roughly like r^n log^n r across a window scan
    let hs = [4e-2, 2e-2, 1e-2];
    let devs: Vec<f64> = hs
        .iter()
        .map(|&h| extract_a(&g, (1e-5, h)).unwrap().max_dev)
        .collect();
    for i in 0..2 {
        let model = (hs[i] * hs[i].ln()).powi(2) / (hs[i + 1] * hs[i + 1].ln()).powi(2);
        let ratio = devs[i] / devs[i + 1];
        assert!(
            ratio > model / 3.0 && ratio < model * 3.0,
            "ratio {ratio} model {model}"
        );
    }
}

#[test]
fn capacity_identity() {
    let g = solve_green(2, 0.0, 1e-6, 8.0, 1e-5).unwrap();
    let c = capacity_identity_check(&g, 0.5).unwrap();
    assert!(c.residual_b < 1e-4, "{c:?}");
    for d in [0.1, 0.2, 0.5] {
        let c = capacity_identity_check(&g, d).unwrap();
        assert!(c.lhs.is_finite() && c.residual_a.is_finite());
        assert!(c.residual_b < 1e-4);
    }
}

#[test]
fn rejects_alpha_at_least_one() {
    assert!(solve_green(2, 1.0, 1e-6, 8.0, 1e-5).is_err());
    assert!(solve_green(2, -0.1, 1e-6, 8.0, 1e-5).is_err());
}

#[test]
fn threshold_constants() {
    let b = carleson_chang_bound(2, 0.0).unwrap();
    assert!((b.cc_bound - PI * E).abs() < 1e-12);
    assert!((b.cc_ball - 11.681_326_876_263_36).abs() < 1e-10);
    assert!((b.cc_ball - PI * (1.0 + E)).abs() < 1e-10);
    let b3 = carleson_chang_bound(3, 0.0).unwrap();
    assert!((b3.cc_ball - 22.96).abs() < 5e-3);
    assert_eq!(b3.e, -1.5);
    for n in 2..=8 {
        assert!((e_binomial(n) + harmonic(n - 1)).abs() < 1e-12);
    }
    let mut prev = 0.0;
    for i in 0..20 {
        let v = carleson_chang_bound(2, -0.5 + 0.05 * i as f64)
            .unwrap()
            .cc_bound;
        assert!(v > prev);
        prev = v;
    }
    assert!(carleson_chang_bound(1, 0.0).is_err());
    assert!(
        (carleson_chang_bound(2, closed_form_a(0.0))
            .unwrap()
            .cc_bound
            - 10.768_152_306_510_3)
            .abs()
            < 1e-10
    );
}
