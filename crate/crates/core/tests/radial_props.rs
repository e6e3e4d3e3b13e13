use std::sync::Arc;

use proptest::prelude::*;
use tmlab_core::math::alpha_n;
use tmlab_core::{
    decay_bound, decreasing_rearrangement, make_grid, nlap_flux, GridKind, RadialFunction,
    RadialGrid,
};

/// Relative slack allowed on the discrete Pólya–Szegő comparison.
const POLYA_SZEGO_TOL: f64 = 1e-9;

fn grid(n: usize, m: usize, kind: GridKind) -> Arc<RadialGrid> {
    Arc::new(make_grid(n, 2.0, m, kind).unwrap())
}

/// Non-negative sum of bumps tapered to vanish at R; generally not monotone.
fn bumps(g: Arc<RadialGrid>, shape: &[(f64, f64, f64)]) -> RadialFunction {
    let r_out = g.outer_radius();
    RadialFunction::from_fn(g, |r| {
        (1.0 - r / r_out)
            * shape
                .iter()
                .map(|&(a, c, w)| a * (-((r - c) / w).powi(2)).exp())
                .sum::<f64>()
    })
    .unwrap()
}

fn bump_spec() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0f64..3.0, 0.0f64..2.0, 0.05f64..1.0), 1..6)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rearrangement_is_equimeasurable(n in 2usize..=4, shape in bump_spec()) {
        let u = bumps(grid(n, 256, GridKind::EqualVolume), &shape);
        let s = decreasing_rearrangement(&u).unwrap();
        prop_assert!(s.is_non_increasing());
        for p in [1.0, n as f64, 2.0 * n as f64] {
            prop_assert!(rel(s.lp_pow(p), u.lp_pow(p)) < 1e-10, "p={}", p);
        }
    }

    #[test]
    fn rearrangement_does_not_raise_gradient(n in 2usize..=4, shape in bump_spec()) {
        let u = bumps(grid(n, 256, GridKind::EqualVolume), &shape);
        let s = decreasing_rearrangement(&u).unwrap();
        prop_assert!(s.grad_pow() <= u.grad_pow() * (1.0 + POLYA_SZEGO_TOL), "{} > {}", s.grad_pow(), u.grad_pow());
    }

    #[test]
    fn decay_bound_holds(n in 2usize..=4, incs in prop::collection::vec(0.0f64..1.0, 129), scale in 0.01f64..1.0) {
        // decreasing profile built from the boundary inwards
        let g = grid(n, 128, GridKind::Uniform);
        let mut vals = vec![0.0; 129];
        for i in (0..128).rev() {
            vals[i] = vals[i + 1] + incs[i] * incs[i].powi(3);
        }
        let raw = RadialFunction::new(g.clone(), vals).unwrap();
        if raw.is_zero() {
            return Ok(());
        }
        let u = raw.scaled(scale / raw.lp_norm(n as f64));
        let norm = u.lp_norm(n as f64);
        prop_assert!(norm <= 1.0 + 1e-12);
        for (i, &l) in g.nodes().iter().enumerate().skip(1) {
            let b = decay_bound(norm, n, l).unwrap();
            prop_assert!(u.values()[i] <= b * (1.0 + 1e-12), "node {} u={} bound={}", i, u.values()[i], b);
        }
    }

    #[test]
    fn rearrangement_on_uniform_grids_is_decreasing(shape in bump_spec()) {
        let u = bumps(grid(2, 200, GridKind::Uniform), &shape);
        let s = decreasing_rearrangement(&u).unwrap();
        prop_assert!(s.is_non_increasing());
        prop_assert!(rel(s.lp_pow(2.0), u.lp_pow(2.0)) < 1e-2);
    }
}

#[test]
fn log_profile_has_unit_flux() {
    for n in 2..=5 {
        let a = n as f64 / alpha_n(n);
        let g = Arc::new(make_grid(n, 3.0, 500, GridKind::Geometric { r0: 1e-7 }).unwrap());
        let u = RadialFunction::from_fn(g, |r| -a * r.ln()).unwrap();
        for i in 1..500 {
            let f = nlap_flux(&u, i).unwrap();
            assert!((f + 1.0).abs() < 1e-8, "n={n} node {i}: {f}");
        }
    }
}

#[test]
fn grid_validation() {
    assert!(make_grid(2, 1.0, 8, GridKind::Uniform).is_err());
    assert!(make_grid(1, 1.0, 64, GridKind::Uniform).is_err());
    assert!(make_grid(2, f64::NAN, 64, GridKind::Uniform).is_err());
    assert!(make_grid(2, 1.0, 64, GridKind::Geometric { r0: 2.0 }).is_err());
    let g = make_grid(3, 1.5, 64, GridKind::EqualVolume).unwrap();
    let total: f64 = g.weights().iter().sum();
    assert!(rel(total, g.volume()) < 1e-13);
}
