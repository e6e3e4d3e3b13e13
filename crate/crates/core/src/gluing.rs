//! Test family u_ε: a truncated bubble glued to the scaled Green function.
//!
//! Inside |x| ≤ Rε (R = −log ε)
//!   u_ε = [C − C^{−1/(n−1)}((n−1)/α_n · log(1 + c_n(r/ε)^{n/(n−1)}) − B_ε)] / D,
//!   D = (1 + α C^{−n/(n−1)} ‖G‖ₙⁿ)^{1/n},
//! outside u_ε = G / (C^{n/(n−1)} + α‖G‖ₙⁿ)^{1/n}, with
//!   α_n C^{n/(n−1)} = (n−1)E + log(ω_{n−1}/n) − n log ε + α_n A,  B_ε = −(n−1)E/α_n.
//! The lower-order correction in C is dropped. B_ε is moved by its own
//! lower-order correction so that the branches meet exactly at Rε (a jump
//! would carry grid-dependent gradient energy); the mismatch of the uncorrected
//! B_ε is reported. The profile is then rescaled to unit Sobolev norm on the grid.

use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::bubble::BubbleProfile;
use crate::error::{bail, Result};
use crate::functional::{tm_functional, TMParams};
use crate::greens::{carleson_chang_bound, GreenFunction};
use crate::grid::{make_grid, GridKind};
use crate::math::{alpha_n, conj, harmonic, sphere_area};
use crate::radial::RadialFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluingParams {
    pub epsilon: f64,
    /// Cut radius in units of ε: R = −log ε.
    pub r_cut: f64,
    pub c: f64,
    pub b_eps: f64,
    /// B_ε after enforcing continuity at Rε; this one builds the profile.
    pub b_eps_matched: f64,
    pub e: f64,
    pub a: f64,
    pub green_ln_norm: f64,
    /// |inner − outer| / outer at |x| = Rε with the uncorrected B_ε.
    pub mismatch: f64,
    /// Sobolev norm before the final rescale.
    pub pre_sobolev: f64,
    /// |pre_sobolevⁿ − 1|, the size of the dropped corrections.
    pub phi_err: f64,
}

/// Grid used for u_ε: geometric from ε·`inner_factor` to the Green function's R_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluingGrid {
    pub inner_factor: f64,
    pub intervals: usize,
}

impl Default for GluingGrid {
    fn default() -> Self {
        Self {
            inner_factor: 1e-4,
            intervals: 20_000,
        }
    }
}

pub fn gluing_family(
    n: usize,
    alpha: f64,
    green: &GreenFunction,
    epsilon: f64,
) -> Result<(RadialFunction, GluingParams)> {
    gluing_family_on(n, alpha, green, epsilon, GluingGrid::default())
}

pub fn gluing_family_on(
    n: usize,
    alpha: f64,
    green: &GreenFunction,
    epsilon: f64,
    grid_opts: GluingGrid,
) -> Result<(RadialFunction, GluingParams)> {
    if green.n != n || (green.alpha - alpha).abs() > 1e-15 {
        bail!(
            Dependency,
            "Green function solved for (n={}, alpha={}) but requested (n={n}, alpha={alpha})",
            green.n,
            green.alpha
        );
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        bail!(
            InvalidParameter,
            "epsilon must lie in (0, 1), got {epsilon}"
        );
    }
    let nf = n as f64;
    let p = conj(n);
    let an = alpha_n(n);
    let omega = sphere_area(n);
    let e = -harmonic(n - 1);
    let r_cut = -epsilon.ln();
    let cp = ((nf - 1.0) * e + (omega / nf).ln() - nf * epsilon.ln() + an * green.a) / an;
    if !(cp > 0.0) {
        bail!(
            InvalidParameter,
            "epsilon = {epsilon} too large: C^(n/(n-1)) = {cp} is not positive"
        );
    }
    let junction = r_cut * epsilon;
    if junction >= green.rmax {
        bail!(
            InvalidParameter,
            "junction radius {junction} lies beyond the Green domain"
        );
    }
    let c = cp.powf(1.0 / p);
    let b_eps = -(nf - 1.0) * e / an;
    let gn = green.ln_norm.powf(nf);
    let d_inner = (1.0 + alpha * gn / cp).powf(1.0 / nf);
    let d_outer = (cp + alpha * gn).powf(1.0 / nf);
    let c_shift = c.powf(-1.0 / (nf - 1.0));
    let bubble = BubbleProfile::new(n)?;
    let lg = |r: f64| (bubble.c_n * (r / epsilon).powf(p)).ln_1p();
    let inner_with = |r: f64, b: f64| (c - c_shift * ((nf - 1.0) / an * lg(r) - b)) / d_inner;
    let outer = |r: f64| green.eval(r) / d_outer;
    let o = outer(junction);
    let b_matched = (o * d_inner - c) / c_shift + (nf - 1.0) / an * lg(junction);
    let inner = |r: f64| inner_with(r, b_matched);

    let r0 = epsilon * grid_opts.inner_factor;
    let grid = Arc::new(make_grid(
        n,
        green.rmax,
        grid_opts.intervals,
        GridKind::Geometric { r0 },
    )?);
    let raw = RadialFunction::from_fn(grid, |r| {
        if r <= junction {
            inner(r)
        } else {
            outer(r).max(0.0)
        }
    })?;
    let pre = raw.sobolev_pow();
    let u = raw.normalized()?;
    let params = GluingParams {
        epsilon,
        r_cut,
        c,
        b_eps,
        b_eps_matched: b_matched,
        e,
        a: green.a,
        green_ln_norm: green.ln_norm,
        mismatch: ((inner_with(junction, b_eps) - o) / o).abs(),
        pre_sobolev: pre.powf(1.0 / nf),
        phi_err: (pre - 1.0).abs(),
    };
    Ok((u, params))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub epsilon: f64,
    pub functional: f64,
    pub bound: f64,
    pub gap: f64,
    pub mismatch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    pub rows: Vec<GapRow>,
    pub best_gap: f64,
    pub best_epsilon: f64,
}

pub fn gap_row(
    n: usize,
    alpha: f64,
    green: &GreenFunction,
    epsilon: f64,
    grid_opts: GluingGrid,
) -> Result<GapRow> {
    let (u, sp) = gluing_family_on(n, alpha, green, epsilon, grid_opts)?;
    let f = tm_functional(&u, &TMParams::critical(n, alpha)?)?;
    let bound = carleson_chang_bound(n, green.a)?.cc_bound;
    Ok(GapRow {
        epsilon,
        functional: f.value,
        bound,
        gap: f.value - bound,
        mismatch: sp.mismatch,
    })
}

pub fn existence_gap(
    n: usize,
    alpha: f64,
    green: &GreenFunction,
    epsilon_list: &[f64],
) -> Result<ExistenceReport> {
    let rows = epsilon_list
        .iter()
        .map(|&eps| gap_row(n, alpha, green, eps, GluingGrid::default()))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(rows))
}

pub fn summarize(rows: Vec<GapRow>) -> ExistenceReport {
    let (best_gap, best_epsilon) = rows.iter().fold((f64::NEG_INFINITY, f64::NAN), |acc, r| {
        if r.gap > acc.0 {
            (r.gap, r.epsilon)
        } else {
            acc
        }
    });
    ExistenceReport {
        rows,
        best_gap,
        best_epsilon,
    }
}
