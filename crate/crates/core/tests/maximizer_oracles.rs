use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use tmlab_core::math::alpha_n;
use tmlab_core::maximizer::{el_residual_of, energy_outside, maximize_from, CapBest};
use tmlab_core::{
    blowup_rescale, cap_family_best, concentration_report, decreasing_rearrangement, make_grid,
    maximize_subcritical, moser_function, tm_functional, GridKind, MaximizerOptions,
    MaximizerState, MoserParams, RadialFunction, RadialGrid, TMParams,
};

fn geometric(r: f64, m: usize) -> Arc<RadialGrid> {
    Arc::new(make_grid(2, r, m, GridKind::Geometric { r0: 1e-5 * r }).unwrap())
}

fn solve(alpha: f64, frac: f64, grid: Arc<RadialGrid>, seed: u64) -> MaximizerState {
    let p = TMParams::with_fraction(2, alpha, frac).unwrap();
    maximize_subcritical(
        &p,
        grid,
        &MaximizerOptions {
            seed,
            ..Default::default()
        },
    )
    .unwrap()
}

fn cap_best(p: &TMParams, g: &Arc<RadialGrid>) -> CapBest {
    let r = g.outer_radius();
    let radii: Vec<f64> = (1..=40).map(|i| r * i as f64 / 40.0).collect();
    let heights: Vec<f64> = (0..40)
        .map(|j| 0.05 + 20.0 * (j as f64 / 39.0).powi(2))
        .collect();
    cap_family_best(p, g, &radii, &heights).unwrap()
}

/// The discrete Euler–Lagrange system for n = 2 written out directly:
/// −(K∇u)ᵢ + wᵢuᵢ = (μ/λ) wᵢ uᵢ e^{α_k uᵢ²} + γ wᵢ uᵢ on the free nodes.
fn el_system(g: &RadialGrid, alpha: f64, beta: f64, u: &[f64]) -> Vec<f64> {
    let m = g.intervals();
    let w = g.weights();
    let mut full = u.to_vec();
    full.push(0.0);
    let l: f64 = full.iter().zip(w).map(|(v, w)| w * v * v).sum();
    let ak = beta * (1.0 + alpha * l);
    let lam: f64 = full
        .iter()
        .zip(w)
        .map(|(v, w)| w * v * v * (ak * v * v).exp())
        .sum();
    let mu = (1.0 + alpha * l) / (1.0 + 2.0 * alpha * l);
    let gamma = alpha / (1.0 + 2.0 * alpha * l);
    (0..m)
        .map(|i| {
            let right = g.stiffness(i) * (full[i + 1] - full[i]);
            let left = if i > 0 {
                g.stiffness(i - 1) * (full[i] - full[i - 1])
            } else {
                0.0
            };
            let v = full[i];
            left - right + w[i] * v - mu / lam * w[i] * v * (ak * v * v).exp() - gamma * w[i] * v
        })
        .collect()
}

/// Damped Newton with a central-difference Jacobian.
fn newton(g: &RadialGrid, alpha: f64, beta: f64, start: &[f64]) -> Vec<f64> {
    let m = start.len();
    let mut u = start.to_vec();
    for _ in 0..50 {
        let f = el_system(g, alpha, beta, &u);
        let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-15 {
            break;
        }
        let mut jac = DMatrix::zeros(m, m);
        for j in 0..m {
            let h = 1e-7 * u[j].abs().max(1e-3);
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let (fp, fm) = (
                el_system(g, alpha, beta, &up),
                el_system(g, alpha, beta, &dn),
            );
            for i in 0..m {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let step = jac
            .lu()
            .solve(&DVector::from_vec(f.clone()))
            .expect("singular Jacobian");
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a - t * b).collect();
            let tn = el_system(g, alpha, beta, &trial)
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            if tn < norm || t < 1e-6 {
                u = trial;
                break;
            }
            t *= 0.5;
        }
    }
    u
}

#[test]
fn residual_vanishes_at_exact_discrete_solution() {
    for alpha in [0.0, 0.4] {
        let g = geometric(4.0, 64);
        let beta = 0.5 * alpha_n(2);
        let st = solve(alpha, 0.5, g.clone(), 0);
        let start = &st.u.values()[..64];
        let sol = newton(&g, alpha, beta, start);
        let mut vals = sol.clone();
        vals.push(0.0);
        let u = RadialFunction::new(g.clone(), vals).unwrap();
        let p = TMParams::new(2, alpha, beta).unwrap();
        let r = el_residual_of(&u, &p).unwrap();
        assert!(r < 1e-8, "alpha={alpha}: {r}");
        // a critical point of the constrained problem sits on the constraint
        assert!((u.sobolev_pow() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn residual_discriminates_non_solutions() {
    let g = geometric(4.0, 128);
    let p = TMParams::with_fraction(2, 0.0, 0.5).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..5 {
        let mut vals: Vec<f64> = (0..=128).map(|_| rng.gen::<f64>()).collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        vals[128] = 0.0;
        let u = RadialFunction::new(g.clone(), vals)
            .unwrap()
            .normalized()
            .unwrap();
        assert!(el_residual_of(&u, &p).unwrap() > 0.1);
    }
    assert!(el_residual_of(&RadialFunction::zero(g), &p).is_err());
}

#[test]
fn half_critical_beta_beats_tent_and_caps() {
    let g = geometric(4.0, 256);
    let p = TMParams::with_fraction(2, 0.0, 0.5).unwrap();
    let st = solve(0.0, 0.5, g.clone(), 0);
    assert!(st.converged);
    assert!(st.el_residual < 1e-3);
    assert!(st.functional.value >= st.history[0]);
    assert!(st.functional.value >= cap_best(&p, &g).value);
}

#[test]
fn state_invariants() {
    for alpha in [0.0, 0.5, 1.0] {
        let st = solve(alpha, 0.9, geometric(8.0, 256), 0);
        let m = st.multipliers;
        assert!((st.u.sobolev_pow() - 1.0).abs() < 1e-8);
        assert!(m.lambda_k > 0.0);
        assert!(m.gamma_k >= 0.0 && m.gamma_k <= alpha);
        assert!(m.mu_k >= 0.5 && m.mu_k <= 1.0);
        assert!(st.r_k_identity_defect() < 1e-10);
        assert!(st.u.is_non_increasing() && *st.u.values().last().unwrap() == 0.0);
        assert!(st.history.windows(2).all(|w| w[1] >= w[0]));
        // already radially decreasing, so rearranging changes nothing
        let p = TMParams::with_fraction(2, alpha, 0.9).unwrap();
        let re = decreasing_rearrangement(&st.u).unwrap();
        let f = tm_functional(&re, &p).unwrap().value;
        assert!((f - st.functional.value).abs() <= 1e-12 * f);
    }
}

#[test]
fn moser_start_does_not_lose_value() {
    let mp = MoserParams::from_k(2, 1e6).unwrap();
    let g = Arc::new(make_grid(2, mp.r_k, 256, GridKind::Geometric { r0: mp.r_k * 1e-5 }).unwrap());
    let start = RadialFunction::from_fn(g, |r| moser_function(&mp, r))
        .unwrap()
        .normalized()
        .unwrap();
    let p = TMParams::with_fraction(2, 0.0, 0.9).unwrap();
    let before = tm_functional(&start, &p).unwrap().value;
    let st = maximize_from(&p, &start, &MaximizerOptions::default()).unwrap();
    assert!(st.functional.value >= before);
}

#[test]
fn small_grid_dominates_cap_family_for_all_seeds() {
    let g = Arc::new(make_grid(2, 4.0, 31, GridKind::Uniform).unwrap());
    let p = TMParams::with_fraction(2, 0.3, 0.8).unwrap();
    let best = cap_best(&p, &g);
    for seed in 0..5 {
        let st = maximize_subcritical(
            &p,
            g.clone(),
            &MaximizerOptions {
                seed,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            st.functional.value >= best.value,
            "seed {seed}: {} < {}",
            st.functional.value,
            best.value
        );
    }
}

#[test]
fn deterministic_given_seed() {
    let a = solve(0.5, 0.9, geometric(8.0, 128), 3);
    let b = solve(0.5, 0.9, geometric(8.0, 128), 3);
    assert_eq!(a.u.values(), b.u.values());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn rejects_bad_parameters() {
    let p = TMParams::critical(2, 0.0).unwrap();
    assert!(maximize_subcritical(&p, geometric(4.0, 64), &MaximizerOptions::default()).is_err());
    let p = TMParams::with_fraction(2, 0.0, 0.5).unwrap();
    let bad = MaximizerOptions {
        patience: 0,
        ..Default::default()
    };
    assert!(maximize_subcritical(&p, geometric(4.0, 64), &bad).is_err());
}

#[test]
fn blowup_continuation() {
    let x: Vec<f64> = (0..=100).map(|i| 0.02 * i as f64).collect();
    let mut prev: Option<(f64, f64, f64)> = None;
    let mut ratios = Vec::new();
    for frac in [0.9, 0.95, 0.99] {
        let st = solve(0.0, frac, geometric(8.0, 512), 0);
        let b = blowup_rescale(&st, &x).unwrap();
        assert_eq!(b.phi[0], 1.0);
        assert_eq!(b.psi[0], 0.0);
        assert!(b.psi.windows(2).all(|w| w[1] <= w[0]));
        let rep = concentration_report(&st, &[2.0, 8.0]);
        assert_eq!(rep.rows[1].1, 0.0);
        let cur = (st.c_k, b.sup_distance, rep.rows[0].1);
        if let Some(p) = prev {
            assert!(cur.0 > p.0, "c_k {cur:?} after {p:?}");
            assert!(cur.1 < p.1, "sup distance {cur:?} after {p:?}");
            assert!(cur.2 < p.2, "outside energy {cur:?} after {p:?}");
        }
        prev = Some(cur);
        ratios.push(rep.lambda_over_c);
    }
    // λ_k/c_k grows once the maximizer has concentrated (β ≥ 0.95 α_n here)
    assert!(ratios[2] > ratios[1], "{ratios:?}");
}

#[test]
fn outside_energy_of_whole_ball_is_total() {
    let st = solve(0.0, 0.5, geometric(4.0, 128), 0);
    assert_eq!(energy_outside(&st.u, 4.0), 0.0);
    assert!((energy_outside(&st.u, 0.0) - 1.0).abs() < 1e-12);
}
