//! Radial Green function of −Δₙ G = δ₀ + (α−1)G^{n−1} by shooting in s = log r.
//!
//! The unknowns are G and the flux F = ω_{n−1} r^{n−1}|G′|^{n−2}G′. The Dirac
//! mass enters as F ≈ −1 at r_0, corrected by the source integrated over B_{r_0}
//! along the log asymptotic. The constant A in G ≈ −(n/α_n) log r + A is the
//! shooting parameter, bisected until G decays to [0, 10⁻⁶] at R_max.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::error::{bail, Error, Result};
use crate::grid::{make_grid, GridKind, RadialGrid};
use crate::math::{alpha_n, binomial, harmonic, sphere_area, spow};
use crate::quad::GaussRule;

/// Upper end of the accepted decay window for G(R_max).
pub const DECAY_TARGET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceTerm {
    On,
    /// Drops (α−1)G^{n−1}; the exact solution is then −(n/α_n) log r + A.
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenOptions {
    pub r0: f64,
    pub rmax: f64,
    /// Required flux-law defect.
    pub tol: f64,
    pub m_start: usize,
    pub m_max: usize,
    pub source: SourceTerm,
    /// Skip the bisection and integrate once with this A (used with `SourceTerm::Off`).
    pub fixed_a: Option<f64>,
}

impl GreenOptions {
    pub fn new(r0: f64, rmax: f64, tol: f64) -> Self {
        Self {
            r0,
            rmax,
            tol,
            m_start: 2000,
            m_max: 128_000,
            source: SourceTerm::On,
            fixed_a: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GreenFunction {
    pub n: usize,
    pub alpha: f64,
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub flux: Vec<f64>,
    dg_ds: Vec<f64>,
    df_ds: Vec<f64>,
    pub a: f64,
    /// Max over nodes of |ω r^{n−1}|G′|^{n−1} − (1 + (α−1)ω∫_0^r G^{n−1}s^{n−1}ds)|,
    /// from sampled G only.
    pub flux_residual: f64,
    pub rmax: f64,
    /// ‖G‖ₙ over B_{R_max}.
    pub ln_norm: f64,
    pub source: SourceTerm,
    pub bisection_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Low,
    High,
    Accept,
}

struct Setup {
    n: usize,
    nf: f64,
    omega: f64,
    coef: f64,
    s0: f64,
    h: f64,
    m: usize,
    slope: f64,
    i0: f64,
    j0: f64,
    source: bool,
}

impl Setup {
    fn rhs(&self, s: f64, y: &[f64; 4]) -> [f64; 4] {
        let r = s.exp();
        let rn = r.powf(self.nf);
        let gp = spow(
            y[1] / (self.omega * r.powf(self.nf - 1.0)),
            1.0 / (self.nf - 1.0),
        );
        let src = self.omega * spow(y[0], self.nf - 1.0) * rn;
        [
            r * gp,
            if self.source { self.coef * src } else { 0.0 },
            src,
            self.omega * y[0].abs().powf(self.nf) * rn,
        ]
    }

    fn rk4(&self, s: f64, y: &[f64; 4]) -> [f64; 4] {
        let h = self.h;
        let add = |a: &[f64; 4], b: &[f64; 4], c: f64| {
            [
                a[0] + c * b[0],
                a[1] + c * b[1],
                a[2] + c * b[2],
                a[3] + c * b[3],
            ]
        };
        let k1 = self.rhs(s, y);
        let k2 = self.rhs(s + 0.5 * h, &add(y, &k1, 0.5 * h));
        let k3 = self.rhs(s + 0.5 * h, &add(y, &k2, 0.5 * h));
        let k4 = self.rhs(s + h, &add(y, &k3, h));
        let mut out = *y;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }

    fn initial(&self, a: f64) -> [f64; 4] {
        let g0 = -self.slope * self.s0 + a;
        let f0 = if self.source {
            -1.0 + self.coef * self.i0
        } else {
            -1.0
        };
        [g0, f0, 0.0, 0.0]
    }

    /// Integrates to R_max, or until the trajectory is classified.
    fn shoot(&self, a: f64, mut keep: Option<&mut Vec<[f64; 4]>>) -> Shot {
        let mut y = self.initial(a);
        if let Some(k) = keep.as_deref_mut() {
            k.clear();
            k.push(y);
        }
        let check = self.source;
        for i in 0..self.m {
            let s = self.s0 + i as f64 * self.h;
            y = self.rk4(s, &y);
            if let Some(k) = keep.as_deref_mut() {
                k.push(y);
            }
            if check {
                if !(y[0] >= 0.0) {
                    return Shot::Low;
                }
                if y[1] >= 0.0 {
                    return Shot::High;
                }
            }
        }
        if !check || y[0] <= DECAY_TARGET {
            Shot::Accept
        } else {
            Shot::High
        }
    }
}

/// Integral of the log asymptotic over the inner ball: (∫ ω G^{n−1} r^{n−1}, ∫ ω |G|ⁿ r^{n−1}).
fn inner_ball_integrals(n: usize, a: f64, r0: f64) -> (f64, f64) {
    let nf = n as f64;
    let omega = sphere_area(n);
    let slope = nf / alpha_n(n);
    let rule = GaussRule::new(16);
    let hi = r0.ln();
    let lo = hi - 60.0 / nf;
    let i0 = rule.composite(
        |s| omega * spow(-slope * s + a, nf - 1.0) * (nf * s).exp(),
        lo,
        hi,
        32,
    );
    let j0 = rule.composite(
        |s| omega * (-slope * s + a).abs().powf(nf) * (nf * s).exp(),
        lo,
        hi,
        32,
    );
    (i0, j0)
}

pub fn solve_green(n: usize, alpha: f64, r0: f64, rmax: f64, tol: f64) -> Result<GreenFunction> {
    solve_green_with(n, alpha, &GreenOptions::new(r0, rmax, tol))
}

pub fn solve_green_with(n: usize, alpha: f64, opts: &GreenOptions) -> Result<GreenFunction> {
    if n < 2 {
        bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
    }
    if !(0.0..1.0).contains(&alpha) {
        bail!(InvalidParameter, "alpha must lie in [0, 1), got {alpha}");
    }
    if !(opts.r0 > 0.0 && opts.r0 < 1.0 && opts.rmax > 1.0 && opts.rmax.is_finite()) {
        bail!(
            InvalidParameter,
            "need 0 < r0 < 1 < Rmax, got r0 = {}, Rmax = {}",
            opts.r0,
            opts.rmax
        );
    }
    if !(opts.tol > 0.0) {
        bail!(
            InvalidParameter,
            "tolerance must be positive, got {}",
            opts.tol
        );
    }
    if opts.source == SourceTerm::Off && opts.fixed_a.is_none() {
        bail!(
            InvalidParameter,
            "the source-free hook needs a fixed constant A"
        );
    }
    let mut m = opts.m_start.max(16);
    let mut last_defect = f64::INFINITY;
    loop {
        let g = solve_at(n, alpha, opts, m)?;
        if g.flux_residual < opts.tol {
            return Ok(g);
        }
        last_defect = last_defect.min(g.flux_residual);
        m *= 2;
        if m > opts.m_max {
            bail!(
                Numerical,
                "flux-law defect {last_defect:e} still above {:e} with {} steps",
                opts.tol,
                m / 2
            );
        }
    }
}

fn solve_at(n: usize, alpha: f64, opts: &GreenOptions, m: usize) -> Result<GreenFunction> {
    let nf = n as f64;
    let source = opts.source == SourceTerm::On;
    let s0 = opts.r0.ln();
    let mut setup = Setup {
        n,
        nf,
        omega: sphere_area(n),
        coef: 1.0 - alpha,
        s0,
        h: (opts.rmax.ln() - s0) / m as f64,
        m,
        slope: nf / alpha_n(n),
        i0: 0.0,
        j0: 0.0,
        source,
    };
    let mut traj = Vec::with_capacity(m + 1);
    let (a, steps) = match opts.fixed_a {
        Some(a) => {
            let (i0, j0) = inner_ball_integrals(n, a, opts.r0);
            setup.i0 = i0;
            setup.j0 = j0;
            setup.shoot(a, Some(&mut traj));
            (a, 0)
        }
        None => bisect(&mut setup, opts.r0, &mut traj)?,
    };
    let grid = make_grid(n, opts.rmax, m, GridKind::Geometric { r0: opts.r0 })?;
    let mut values = Vec::with_capacity(m + 1);
    let mut flux = Vec::with_capacity(m + 1);
    let mut dg_ds = Vec::with_capacity(m + 1);
    let mut df_ds = Vec::with_capacity(m + 1);
    for (i, y) in traj.iter().enumerate() {
        let d = setup.rhs(s0 + i as f64 * setup.h, y);
        values.push(y[0]);
        flux.push(y[1]);
        dg_ds.push(d[0]);
        df_ds.push(d[1]);
    }
    let ln_pow = setup.j0 + traj[m][3];
    let src_coef = if source { 1.0 - alpha } else { 0.0 };
    let flux_residual = flux_defect(&grid, &values, setup.i0, src_coef);
    Ok(GreenFunction {
        n,
        alpha,
        grid,
        values,
        flux,
        dg_ds,
        df_ds,
        a,
        flux_residual,
        rmax: opts.rmax,
        ln_norm: ln_pow.powf(1.0 / nf),
        source: opts.source,
        bisection_steps: steps,
    })
}

fn bisect(setup: &mut Setup, r0: f64, traj: &mut Vec<[f64; 4]>) -> Result<(f64, usize)> {
    let mut trace: Vec<(f64, Shot)> = Vec::new();
    let n = setup.n;
    let classify = |setup: &mut Setup, a: f64, trace: &mut Vec<(f64, Shot)>| {
        let (i0, j0) = inner_ball_integrals(n, a, r0);
        setup.i0 = i0;
        setup.j0 = j0;
        let s = setup.shoot(a, None);
        trace.push((a, s));
        s
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut expansions = 0;
    loop {
        let sl = classify(setup, lo, &mut trace);
        let sh = classify(setup, hi, &mut trace);
        if sl == Shot::Accept {
            hi = lo;
            break;
        }
        if sh == Shot::Accept {
            lo = hi;
            break;
        }
        if sl == Shot::Low && sh == Shot::High {
            break;
        }
        let w = hi - lo;
        if sl != Shot::Low {
            lo -= 2.0 * w;
        }
        if sh != Shot::High {
            hi += 2.0 * w;
        }
        expansions += 1;
        if expansions > 40 {
            return Err(bracket_error("could not bracket A", &trace));
        }
    }
    let mut steps = 0;
    while lo < hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(bracket_error(
                "bracket collapsed without an accepted trajectory",
                &trace,
            ));
        }
        steps += 1;
        match classify(setup, mid, &mut trace) {
            Shot::Low => lo = mid,
            Shot::High => hi = mid,
            Shot::Accept => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let (i0, j0) = inner_ball_integrals(n, lo, r0);
    setup.i0 = i0;
    setup.j0 = j0;
    setup.shoot(lo, Some(traj));
    Ok((lo, steps))
}

fn bracket_error(msg: &str, trace: &[(f64, Shot)]) -> Error {
    let mut s = String::from(msg);
    s.push_str("; last trials:");
    for (a, shot) in trace.iter().rev().take(8) {
        s.push_str(&format!(" A={a:.17e}:{shot:?}"));
    }
    Error::Numerical(s)
}

/// Flux law defect from the samples alone: 3-point derivatives in log r against
/// the cumulative trapezoid of the source.
fn flux_defect(grid: &RadialGrid, g: &[f64], i0: f64, src_coef: f64) -> f64 {
    let n = grid.n();
    let nf = n as f64;
    let omega = grid.omega();
    let r = grid.nodes();
    let m = r.len() - 1;
    let h = (r[m] / r[0]).ln() / m as f64;
    let src: Vec<f64> = (0..=m)
        .map(|i| omega * spow(g[i], nf - 1.0) * r[i].powf(nf))
        .collect();
    let mut cum = i0;
    let mut worst: f64 = 0.0;
    for i in 0..=m {
        if i > 0 {
            cum += 0.5 * h * (src[i - 1] + src[i]);
        }
        let dgds = if i == 0 {
            (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h)
        } else if i == m {
            (3.0 * g[m] - 4.0 * g[m - 1] + g[m - 2]) / (2.0 * h)
        } else {
            (g[i + 1] - g[i - 1]) / (2.0 * h)
        };
        let lhs = omega * r[i].powf(nf - 1.0) * (dgds / r[i]).abs().powf(nf - 1.0);
        let rhs = 1.0 - src_coef * cum;
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

impl GreenFunction {
    pub fn r0(&self) -> f64 {
        self.grid.nodes()[0]
    }

    fn locate(&self, r: f64) -> Option<(usize, f64, f64)> {
        let nodes = self.grid.nodes();
        let m = nodes.len() - 1;
        if r < nodes[0] || r > nodes[m] {
            return None;
        }
        let s = r.ln();
        let s0 = nodes[0].ln();
        let h = (nodes[m].ln() - s0) / m as f64;
        let j = (((s - s0) / h).floor() as usize).min(m - 1);
        let t = (s - (s0 + j as f64 * h)) / h;
        Some((j, t.clamp(0.0, 1.0), h))
    }

    fn hermite(y: &[f64], dy: &[f64], j: usize, t: f64, h: f64) -> f64 {
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y[j]
            + (t3 - 2.0 * t2 + t) * h * dy[j]
            + (-2.0 * t3 + 3.0 * t2) * y[j + 1]
            + (t3 - t2) * h * dy[j + 1]
    }

    /// G(r): the log asymptotic inside r_0, cubic Hermite in log r on the grid, 0 beyond R_max.
    pub fn eval(&self, r: f64) -> f64 {
        match self.locate(r) {
            Some((j, t, h)) => Self::hermite(&self.values, &self.dg_ds, j, t, h),
            None if r < self.r0() => -(self.n as f64) / alpha_n(self.n) * r.ln() + self.a,
            None => 0.0,
        }
    }

    /// Flux F(r) = ω r^{n−1}|G′|^{n−2}G′.
    pub fn eval_flux(&self, r: f64) -> f64 {
        match self.locate(r) {
            Some((j, t, h)) => Self::hermite(&self.flux, &self.df_ds, j, t, h),
            None if r < self.r0() => self.flux[0],
            None => self.flux[self.flux.len() - 1],
        }
    }

    pub fn eval_deriv(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        spow(
            self.eval_flux(r) / (self.grid.omega() * r.powf(nf - 1.0)),
            1.0 / (nf - 1.0),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AFit {
    pub a: f64,
    /// Max |G(r) + (n/α_n) log r − A| over the window.
    pub max_dev: f64,
    /// max_dev / (r_hiⁿ |log r_hi|ⁿ).
    pub c_fit: f64,
    /// r_hiⁿ |log r_hi|ⁿ.
    pub remainder_scale: f64,
    pub nodes_used: usize,
}

/// Fitting fails when the deviation exceeds this multiple of the remainder model.
pub const FIT_FAILURE_FACTOR: f64 = 10.0;

pub fn extract_a(g: &GreenFunction, window: (f64, f64)) -> Result<AFit> {
    let (lo, hi) = window;
    if !(lo >= g.r0() && lo < hi && hi <= 0.1) {
        bail!(
            InvalidParameter,
            "fit window must satisfy r0 <= r_lo < r_hi <= 0.1, got ({lo}, {hi})"
        );
    }
    let slope = g.n as f64 / alpha_n(g.n);
    let devs: Vec<f64> = g
        .grid
        .nodes()
        .iter()
        .zip(&g.values)
        .filter(|(&r, _)| r >= lo && r <= hi)
        .map(|(&r, &v)| v + slope * r.ln())
        .collect();
    if devs.is_empty() {
        bail!(
            InvalidParameter,
            "no grid nodes inside the fit window ({lo}, {hi})"
        );
    }
    let a = devs.iter().sum::<f64>() / devs.len() as f64;
    let max_dev = devs.iter().map(|d| (d - a).abs()).fold(0.0, f64::max);
    let nf = g.n as f64;
    let remainder_scale = hi.powf(nf) * hi.ln().abs().powf(nf);
    if max_dev > FIT_FAILURE_FACTOR * remainder_scale {
        bail!(
            Numerical,
            "window deviation {max_dev:e} exceeds {FIT_FAILURE_FACTOR} x remainder scale {remainder_scale:e}"
        );
    }
    Ok(AFit {
        a,
        max_dev,
        c_fit: max_dev / remainder_scale,
        remainder_scale,
        nodes_used: devs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub a: f64,
    /// (ω_{n−1}/n) exp(α_n A + 1 + ½ + … + 1/(n−1)).
    pub cc_bound: f64,
    /// |B₁|(1 + exp(1 + ½ + … + 1/(n−1))).
    pub cc_ball: f64,
    /// −(1 + ½ + … + 1/(n−1)).
    pub e: f64,
    /// Σ_{k=0}^{n−2} C(n−1,k)(−1)^{n−1−k}/(n−k−1).
    pub e_binomial: f64,
}

pub fn e_binomial(n: usize) -> f64 {
    (0..=n.saturating_sub(2))
        .map(|k| {
            let sign = if (n - 1 - k).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            binomial(n - 1, k) * sign / (n - k - 1) as f64
        })
        .sum()
}

pub fn carleson_chang_bound(n: usize, a: f64) -> Result<BoundReport> {
    if n < 2 {
        bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
    }
    let h = harmonic(n - 1);
    let vol = sphere_area(n) / n as f64;
    Ok(BoundReport {
        a,
        cc_bound: vol * (alpha_n(n) * a + h).exp(),
        cc_ball: vol * (1.0 + h.exp()),
        e: -h,
        e_binomial: e_binomial(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityCheck {
    pub delta: f64,
    /// ∫_{|x|>δ} |∇G|ⁿ + (1−α)∫_{|x|>δ} Gⁿ.
    pub lhs: f64,
    /// ω_{n−1}|G′(δ)|^{n−1}δ^{n−1}.
    pub rhs_a: f64,
    /// G(δ) ω_{n−1}|G′(δ)|^{n−1}δ^{n−1}.
    pub rhs_b: f64,
    pub residual_a: f64,
    pub residual_b: f64,
}

pub fn capacity_identity_check(g: &GreenFunction, delta: f64) -> Result<CapacityCheck> {
    if !(delta >= g.r0() && delta < g.rmax) {
        bail!(
            InvalidParameter,
            "delta must lie in [r0, Rmax), got {delta}"
        );
    }
    let nf = g.n as f64;
    let omega = g.grid.omega();
    let (lo, hi) = (delta.ln(), g.rmax.ln());
    let cells = g.grid.intervals();
    let h = (hi - g.r0().ln()) / cells as f64;
    let panels = (((hi - lo) / h).ceil() as usize).max(1);
    let lhs = GaussRule::new(6).composite(
        |s| {
            let r = s.exp();
            let gv = g.eval(r);
            let gp = g.eval_deriv(r);
            omega * r.powf(nf) * (gp.abs().powf(nf) + (1.0 - g.alpha) * gv.abs().powf(nf))
        },
        lo,
        hi,
        panels,
    );
    let rhs_a = g.eval_flux(delta).abs();
    let rhs_b = g.eval(delta) * rhs_a;
    Ok(CapacityCheck {
        delta,
        lhs,
        rhs_a,
        rhs_b,
        residual_a: ((lhs - rhs_a) / lhs).abs(),
        residual_b: ((lhs - rhs_b) / lhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, PI};

    #[test]
    fn bound_constants() {
        let b = carleson_chang_bound(2, 0.0).unwrap();
        assert!((b.cc_bound - PI * E).abs() < 1e-13);
        assert!((b.cc_ball - PI * (1.0 + E)).abs() < 1e-13);
        let b3 = carleson_chang_bound(3, 0.0).unwrap();
        assert!((b3.cc_ball - 4.0 * PI / 3.0 * (1.0 + 1.5f64.exp())).abs() < 1e-12);
        assert!((b3.e + 1.5).abs() < 1e-15);
        for n in 2..=8 {
            assert!((e_binomial(n) + harmonic(n - 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_log_hook() {
        let mut o = GreenOptions::new(1e-6, 4.0, 1e-8);
        o.source = SourceTerm::Off;
        o.fixed_a = Some(0.7);
        o.m_start = 400;
        let g = solve_green_with(2, 0.0, &o).unwrap();
        assert!(g.flux.iter().all(|f| (f + 1.0).abs() < 1e-12));
        let fit = extract_a(&g, (1e-5, 1e-2)).unwrap();
        assert!((fit.a - 0.7).abs() < 1e-10);
    }

    #[test]
    fn rejects_alpha_one() {
        assert!(solve_green(2, 1.0, 1e-6, 10.0, 1e-5).is_err());
    }
}
