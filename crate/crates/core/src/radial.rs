//! Radial profiles, their norms, rearrangement, flux and truncation.

use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::error::{bail, Result};
use crate::grid::{make_grid, GridKind, RadialGrid};
use crate::math::{ksum, sphere_area, spow};

/// Samples u_i on a shared grid, with derivative samples u′_i.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            bail!(
                InvalidInput,
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            );
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            bail!(InvalidInput, "sample {i} is not finite");
        }
        let derivs = derivatives(&grid, &values);
        Ok(Self {
            grid,
            values,
            derivs,
        })
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(grid: Arc<RadialGrid>, mut f: F) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let values = alloc::vec![0.0; grid.len()];
        let derivs = values.clone();
        Self {
            grid,
            values,
            derivs,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|v| v * c).collect();
        let derivs = self.derivs.iter().map(|v| v * c).collect();
        Self {
            grid: self.grid.clone(),
            values,
            derivs,
        }
    }

    pub fn peak(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Piecewise-linear value at r; constant u_0 inside r_0 and u_M beyond R.
    pub fn eval(&self, r: f64) -> f64 {
        interp(self.grid.nodes(), &self.values, r)
    }

    /// Σ w_i |u_i|^p.
    pub fn lp_pow(&self, p: f64) -> f64 {
        let w = self.grid.weights();
        ksum(self.values.iter().zip(w).map(|(u, w)| w * u.abs().powf(p)))
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_pow(p).powf(1.0 / p)
    }

    /// ‖∇u‖ₙⁿ of the piecewise-linear interpolant.
    pub fn grad_pow(&self) -> f64 {
        let n = self.n() as i32;
        ksum(
            (0..self.grid.intervals()).map(|j| {
                self.grid.stiffness(j) * (self.values[j + 1] - self.values[j]).abs().powi(n)
            }),
        )
    }

    pub fn sobolev_pow(&self) -> f64 {
        self.grad_pow() + self.lp_pow(self.n() as f64)
    }

    /// Rescales to unit W^{1,n} norm. Fails on the zero function.
    pub fn normalized(&self) -> Result<Self> {
        let s = self.sobolev_pow();
        if !(s > 0.0 && s.is_finite()) {
            bail!(
                InvalidInput,
                "cannot normalize a function with Sobolev energy {s}"
            );
        }
        Ok(self.scaled(s.powf(-1.0 / self.n() as f64)))
    }
}

pub(crate) fn interp(x: &[f64], y: &[f64], r: f64) -> f64 {
    let m = x.len() - 1;
    if r <= x[0] {
        return y[0];
    }
    if r >= x[m] {
        return y[m];
    }
    let j = x.partition_point(|&xi| xi <= r) - 1;
    let t = (r - x[j]) / (x[j + 1] - x[j]);
    y[j] + t * (y[j + 1] - y[j])
}

/// Derivative at x[k] of the quadratic through (x[a..a+3], y[a..a+3]).
fn lagrange3(x: &[f64], y: &[f64], a: usize, k: usize) -> f64 {
    let (x0, x1, x2) = (x[a], x[a + 1], x[a + 2]);
    let t = x[k];
    y[a] * ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2))
        + y[a + 1] * ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2))
        + y[a + 2] * ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1))
}

fn derivatives(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let r = grid.nodes();
    let m = r.len() - 1;
    let log = grid.log_coords();
    let x: Vec<f64> = if log {
        r.iter().map(|v| v.ln()).collect()
    } else {
        r.to_vec()
    };
    let mut d = alloc::vec![0.0; m + 1];
    for (k, dk) in d.iter_mut().enumerate() {
        let a = k.saturating_sub(1).min(m - 2);
        let v = lagrange3(&x, u, a, k);
        *dk = if log { v / r[k] } else { v };
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub lp_n: f64,
    pub grad_n: f64,
    pub sobolev: f64,
    /// (1 − sobolevⁿ)^{−1/(n−1)} below the unit sphere, +∞ on or above it.
    pub lions_q: f64,
    /// ‖u‖ₙⁿ, kept to avoid re-raising lp_n.
    pub lp_pow: f64,
    pub grad_pow: f64,
}

impl Norms {
    pub fn from_powers(n: usize, lp_pow: f64, grad_pow: f64) -> Self {
        let nf = n as f64;
        let sob_pow = lp_pow + grad_pow;
        let lions_q = if sob_pow < 1.0 {
            (1.0 - sob_pow).powf(-1.0 / (nf - 1.0))
        } else {
            f64::INFINITY
        };
        Self {
            lp_n: lp_pow.powf(1.0 / nf),
            grad_n: grad_pow.powf(1.0 / nf),
            sobolev: sob_pow.powf(1.0 / nf),
            lions_q,
            lp_pow,
            grad_pow,
        }
    }

    pub fn sobolev_pow(&self) -> f64 {
        self.lp_pow + self.grad_pow
    }
}

pub fn norms(u: &RadialFunction) -> Norms {
    Norms::from_powers(u.n(), u.lp_pow(u.n() as f64), u.grad_pow())
}

/// Grid-level decreasing rearrangement.
///
/// On equal-volume grids the samples are sorted, which is exactly
/// equimeasurable. Other grids are resampled to an auxiliary equal-volume
/// grid, sorted there and interpolated back.
pub fn decreasing_rearrangement(u: &RadialFunction) -> Result<RadialFunction> {
    if let Some(i) = u.values.iter().position(|&v| v < 0.0) {
        bail!(
            InvalidInput,
            "rearrangement needs u ≥ 0; sample {i} is {}",
            u.values[i]
        );
    }
    if u.is_non_increasing() {
        return Ok(u.clone());
    }
    let grid = u.grid();
    if grid.kind() == GridKind::EqualVolume {
        return u.with_values(sort_equal_volume(&u.values));
    }
    let m_aux = (32 * grid.intervals()).max(4096);
    let aux = make_grid(grid.n(), grid.outer_radius(), m_aux, GridKind::EqualVolume)?;
    let samples: Vec<f64> = aux.nodes().iter().map(|&r| u.eval(r)).collect();
    let sorted = sort_equal_volume(&samples);
    let values = grid
        .nodes()
        .iter()
        .map(|&r| interp(aux.nodes(), &sorted, r))
        .collect();
    u.with_values(values)
}

fn sort_equal_volume(v: &[f64]) -> Vec<f64> {
    let m = v.len() - 1;
    let mut s: Vec<f64> = v[..m].to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let last = v[m].min(s[m - 1]);
    s.push(last);
    s
}

/// Pointwise bound u(L) ≤ (n‖u‖ₙⁿ/(ω_{n−1}Lⁿ))^{1/n} for decreasing radial u.
pub fn decay_bound(norm_ln: f64, n: usize, l: f64) -> Result<f64> {
    if !(l > 0.0 && l.is_finite()) {
        bail!(InvalidParameter, "radius L must be positive, got {l}");
    }
    if n < 2 {
        bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
    }
    let nf = n as f64;
    Ok((nf * norm_ln.powf(nf) / (sphere_area(n) * l.powf(nf))).powf(1.0 / nf))
}

/// Radial n-flux ω_{n−1} r^{n−1}|u′|^{n−2}u′ at an interior node.
pub fn nlap_flux(u: &RadialFunction, i: usize) -> Result<f64> {
    let m = u.grid().intervals();
    if i == 0 || i >= m {
        bail!(
            InvalidParameter,
            "flux node index must lie in 1..={}, got {i}",
            m - 1
        );
    }
    let n = u.n();
    let r = u.grid().nodes()[i];
    Ok(u.grid().omega() * r.powi(n as i32 - 1) * spow(u.derivs[i], n as f64 - 1.0))
}

/// min(u, t).
pub fn truncate_level(u: &RadialFunction, t: f64) -> Result<RadialFunction> {
    if !(t >= 0.0) {
        bail!(
            InvalidParameter,
            "truncation level must be non-negative, got {t}"
        );
    }
    u.with_values(u.values.iter().map(|&v| v.min(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::alpha_n;
    use core::f64::consts::PI;

    fn grid(n: usize, r: f64, m: usize, kind: GridKind) -> Arc<RadialGrid> {
        Arc::new(make_grid(n, r, m, kind).unwrap())
    }

    #[test]
    fn zero_function_norms() {
        let u = RadialFunction::zero(grid(3, 1.0, 64, GridKind::Uniform));
        let nm = norms(&u);
        assert_eq!(nm.lp_n, 0.0);
        assert_eq!(nm.grad_n, 0.0);
        assert_eq!(nm.lions_q, 1.0);
    }

    #[test]
    fn tent_norms() {
        let u =
            RadialFunction::from_fn(grid(2, 1.0, 4000, GridKind::Uniform), |r| 1.0 - r).unwrap();
        let nm = norms(&u);
        assert!((nm.grad_pow - PI).abs() < 1e-12);
        assert!((nm.lp_pow - PI / 6.0).abs() < 1e-6);
        let sob = (7.0 * PI / 6.0).sqrt();
        assert!((nm.sobolev - sob).abs() < 1e-6);
        let sob_exact = (nm.grad_pow + nm.lp_pow).sqrt();
        assert!((nm.sobolev.powi(2) - sob_exact.powi(2)).abs() < 1e-12 * sob_exact.powi(2));
    }

    #[test]
    fn lions_exponent() {
        let nm = Norms::from_powers(2, 0.25, 0.25);
        assert!((nm.lions_q - 2.0).abs() < 1e-14);
        assert!(Norms::from_powers(2, 0.5, 0.5).lions_q.is_infinite());
    }

    #[test]
    fn decay_bound_values() {
        let b = decay_bound(1.0, 2, 1.0).unwrap();
        assert!((b - (1.0 / PI).sqrt()).abs() < 1e-15);
        assert_eq!(decay_bound(0.0, 4, 2.0).unwrap(), 0.0);
        let b3 = decay_bound(1.0, 3, 2.0).unwrap();
        assert!((b3 - (3.0 / (4.0 * PI * 8.0)).powf(1.0 / 3.0)).abs() < 1e-15);
        assert!(decay_bound(1.0, 2, 0.0).is_err());
    }

    #[test]
    fn log_profile_flux() {
        for n in 2..6 {
            let a = n as f64 / alpha_n(n);
            let g = grid(n, 1.0, 200, GridKind::Geometric { r0: 1e-6 });
            let u = RadialFunction::from_fn(g, |r| -a * r.ln()).unwrap();
            for i in 1..200 {
                let f = nlap_flux(&u, i).unwrap();
                assert!((f + 1.0).abs() < 1e-10, "n={n} i={i} f={f}");
            }
            assert!(nlap_flux(&u, 0).is_err());
        }
        let c = RadialFunction::from_fn(grid(2, 1.0, 32, GridKind::Uniform), |_| 3.0).unwrap();
        assert!((1..32).all(|i| nlap_flux(&c, i).unwrap() == 0.0));
    }

    #[test]
    fn rearrangement_basics() {
        let g = grid(2, 1.0, 64, GridKind::EqualVolume);
        let dec = RadialFunction::from_fn(g.clone(), |r| 1.0 - r).unwrap();
        assert_eq!(
            decreasing_rearrangement(&dec).unwrap().values(),
            dec.values()
        );
        let inc = RadialFunction::from_fn(g.clone(), |r| r).unwrap();
        let s = decreasing_rearrangement(&inc).unwrap();
        assert!(s.is_non_increasing());
        let neg = RadialFunction::from_fn(g, |r| r - 0.5).unwrap();
        assert!(decreasing_rearrangement(&neg).is_err());
    }

    #[test]
    fn truncation() {
        let g = grid(2, 1.0, 64, GridKind::Uniform);
        let u = RadialFunction::from_fn(g, |r| 2.0 * (1.0 - r)).unwrap();
        assert_eq!(truncate_level(&u, 5.0).unwrap().values(), u.values());
        assert!(truncate_level(&u, 0.0).unwrap().is_zero());
        assert!(truncate_level(&u, -1.0).is_err());
        let t = truncate_level(&u, 1.0).unwrap();
        assert!(t.sobolev_pow() <= u.sobolev_pow());
    }
}
