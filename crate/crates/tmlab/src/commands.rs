//! One function per subcommand; each turns a validated config into a record.

use std::sync::Arc;

use rayon::prelude::*;
use tmlab_core::bubble::{bubble_ode_residual, log_spaced, BubbleProfile};
use tmlab_core::gluing::{gap_row, summarize, GluingGrid};
use tmlab_core::math::{ln_ball_volume, log_phi};
use tmlab_core::maximizer::{energy_outside, maximize_from};
use tmlab_core::moser::{moser_norms, sharpness_scan};
use tmlab_core::{
    blowup_rescale, bubble_integral, capacity_identity_check, carleson_chang_bound,
    concentration_report, extract_a, make_grid, maximize_subcritical, moser_function, solve_green,
    tm_functional, GridKind, MaximizerOptions, MaximizerState, MoserParams, RadialFunction,
    RadialGrid, TMParams,
};

use crate::config::*;
use crate::error::{CliError, Result};
use crate::profile::read_profile;
use crate::record::{Provenance, ResultRecord};

/// ln of the inner-ball part of the functional for u_k at unit Sobolev norm, from
/// the closed-form norms: ln |B_{R_k/k}| + ln Φ(β(1+αL̂)^{1/(n−1)} v(0)^{n/(n−1)}).
pub fn moser_inner_log_bound(mp: &MoserParams, params: &TMParams) -> f64 {
    let nf = mp.n as f64;
    let l = moser_norms(mp).norms.lp_pow;
    let s = 1.0 + l;
    let v0 = mp.peak / s.powf(1.0 / nf);
    let t = params.exponent(l / s) * v0.powf(nf / (nf - 1.0));
    log_phi(mp.n, t) + ln_ball_volume(mp.n, mp.ln_inner_radius())
}

pub fn cmd_eval(cfg: &EvalConfig, prov: Provenance) -> Result<ResultRecord> {
    let params = TMParams::with_fraction(cfg.n, cfg.alpha, cfg.beta_fraction)?;
    let mut rec = ResultRecord::new("eval", cfg, prov);
    let grid = || -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(cfg.grid.build(
            cfg.n,
            cfg.radius,
            cfg.intervals,
            cfg.r0_factor,
        )?))
    };
    let u = match cfg.profile {
        Profile::Zero => RadialFunction::zero(grid()?),
        Profile::Tent => {
            RadialFunction::from_fn(grid()?, |r| 1.0 - r / cfg.radius)?.normalized()?
        }
        Profile::BubbleCap => {
            let b = BubbleProfile::new(cfg.n)?;
            let edge = b.psi(cfg.radius / cfg.epsilon);
            RadialFunction::from_fn(grid()?, |r| (b.psi(r / cfg.epsilon) - edge).max(0.0))?
                .normalized()?
        }
        Profile::Moser => {
            let mp = match cfg.log_k {
                Some(lk) => MoserParams::from_log_k(cfg.n, lk)?,
                None => MoserParams::from_k(cfg.n, cfg.k)?,
            };
            rec.scalar("log_k", mp.log_k).scalar("r_k", mp.r_k);
            rec.scalar("log_lower_bound", moser_inner_log_bound(&mp, &params));
            let ln_inner = mp.ln_inner_radius();
            if ln_inner < f64::MIN_POSITIVE.ln() + 10.0 {
                rec.notes
                    .push("inner radius below the f64 range: grid evaluation skipped".into());
                return Ok(rec);
            }
            // geometric grid with a node exactly on the inner kink
            let g = make_grid(
                cfg.n,
                mp.r_k,
                cfg.intervals,
                GridKind::Geometric { r0: ln_inner.exp() },
            )?;
            RadialFunction::from_fn(Arc::new(g), |r| moser_function(&mp, r))?.normalized()?
        }
        Profile::File => {
            let path = cfg.file.as_ref().expect("validated");
            let s = read_profile(path)?;
            let g = RadialGrid::from_nodes(cfg.n, s.r)?;
            let u = RadialFunction::new(Arc::new(g), s.u)?;
            if cfg.normalize {
                u.normalized()?
            } else {
                u
            }
        }
    };
    let f = tm_functional(&u, &params)?;
    rec.scalar("value", f.value)
        .scalar("log_value", f.log_value)
        .scalar("exponent", f.exponent_used)
        .scalar("tail_estimate", f.tail_estimate)
        .scalar("lp_norm", f.norms.lp_n)
        .scalar("lp_pow", f.norms.lp_pow)
        .scalar("grad_norm", f.norms.grad_n)
        .scalar("sobolev_norm", f.norms.sobolev);
    Ok(rec)
}

pub fn cmd_sharpness(cfg: &SharpnessConfig, prov: Provenance) -> Result<ResultRecord> {
    let lks: Vec<f64> = cfg
        .log10_k
        .iter()
        .map(|x| x * std::f64::consts::LN_10)
        .collect();
    let pts = sharpness_scan(cfg.n, cfg.alpha, &lks)?;
    let mut rec = ResultRecord::new("sharpness", cfg, prov);
    rec.set_columns(&[
        "log10_k",
        "log_k",
        "log_lower_bound",
        "log_lower_bound_first_power",
        "prediction",
        "residual",
    ]);
    for (x, p) in cfg.log10_k.iter().zip(&pts) {
        rec.push_row(&[
            *x,
            p.log_k,
            p.log_value,
            p.log_value_first_power,
            p.prediction,
            p.residual(),
        ]);
    }
    Ok(rec)
}

fn better(a: MaximizerState, b: MaximizerState) -> MaximizerState {
    if b.functional.value > a.functional.value {
        b
    } else {
        a
    }
}

pub fn cmd_maximize(cfg: &MaximizeConfig, prov: Provenance) -> Result<ResultRecord> {
    let grid = Arc::new(
        cfg.grid
            .build(cfg.n, cfg.radius, cfg.intervals, cfg.r0_factor)?,
    );
    let base = MaximizerOptions {
        seed: prov.seed,
        starts: cfg.starts,
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        patience: cfg.patience,
        step0: cfg.step0,
        backtrack: cfg.backtrack,
        ..Default::default()
    };
    let x: Vec<f64> = (0..=100).map(|i| 0.02 * i as f64).collect();
    let mut rec = ResultRecord::new("maximize", cfg, prov);
    rec.set_columns(&[
        "beta_fraction",
        "beta",
        "value",
        "c_k",
        "r_k",
        "lambda_k",
        "el_residual",
        "outside_energy",
        "psi_sup_distance",
        "lambda_over_c",
        "converged",
        "iterations",
    ]);
    let mut prev: Option<MaximizerState> = None;
    for &frac in &cfg.beta_fractions {
        let params = TMParams::with_fraction(cfg.n, cfg.alpha, frac)?;
        let fresh: Vec<MaximizerState> = (0..cfg.seeds as u64)
            .into_par_iter()
            .map(|s| {
                let opts = MaximizerOptions {
                    seed: base.seed.wrapping_add(s),
                    ..base.clone()
                };
                maximize_subcritical(&params, grid.clone(), &opts)
            })
            .collect::<tmlab_core::Result<_>>()?;
        let mut best = fresh.into_iter().reduce(better).expect("at least one seed");
        if let Some(p) = &prev {
            best = better(best, maximize_from(&params, &p.u, &base)?);
        }
        if !best.converged {
            rec.failures
                .push(format!("beta_fraction {frac}: maximizer did not converge"));
        }
        let psi = blowup_rescale(&best, &x)
            .map(|b| b.sup_distance)
            .unwrap_or(f64::NAN);
        let conc = concentration_report(&best, &[cfg.delta]);
        rec.push_row(&[
            frac,
            params.beta,
            best.functional.value,
            best.c_k,
            best.r_k,
            best.multipliers.lambda_k,
            best.el_residual,
            energy_outside(&best.u, cfg.delta),
            psi,
            conc.lambda_over_c,
            if best.converged { 1.0 } else { 0.0 },
            best.iterations as f64,
        ]);
        prev = Some(best);
    }
    Ok(rec)
}

pub fn cmd_green(cfg: &GreenConfig, prov: Provenance) -> Result<ResultRecord> {
    let solve = |r0: f64, rmax: f64| solve_green(cfg.n, cfg.alpha, r0, rmax, cfg.tol);
    let (g, refined) = if cfg.refine {
        let (g, (h, d)) = rayon::join(
            || solve(cfg.r0, cfg.rmax),
            || {
                rayon::join(
                    || solve(0.5 * cfg.r0, cfg.rmax),
                    || solve(cfg.r0, 2.0 * cfg.rmax),
                )
            },
        );
        (g?, Some((h?.a, d?.a)))
    } else {
        (solve(cfg.r0, cfg.rmax)?, None)
    };
    let fit = extract_a(&g, (cfg.fit_window[0], cfg.fit_window[1]))?;
    let mut rec = ResultRecord::new("green", cfg, prov);
    rec.scalar("a", g.a)
        .scalar("a_fit", fit.a)
        .scalar("fit_max_dev", fit.max_dev)
        .scalar("flux_residual", g.flux_residual)
        .scalar("ln_norm", g.ln_norm)
        .scalar("bisection_steps", g.bisection_steps as f64)
        .scalar("nodes", g.values.len() as f64);
    if let Some((a_half, a_double)) = refined {
        rec.scalar("a_half_r0", a_half)
            .scalar("delta_a_r0", a_half - g.a)
            .scalar("a_double_rmax", a_double)
            .scalar("delta_a_rmax", a_double - g.a);
    }
    rec.set_columns(&["delta", "lhs", "rhs_a", "rhs_b", "residual_a", "residual_b"]);
    for &d in &cfg.deltas {
        let c = capacity_identity_check(&g, d)?;
        rec.push_row(&[c.delta, c.lhs, c.rhs_a, c.rhs_b, c.residual_a, c.residual_b]);
    }
    Ok(rec)
}

pub fn cmd_bound(cfg: &BoundConfig, prov: Provenance) -> Result<ResultRecord> {
    let a = match cfg.a {
        Some(a) => a,
        None => solve_green(cfg.n, cfg.alpha, cfg.r0, cfg.rmax, cfg.tol)?.a,
    };
    let b = carleson_chang_bound(cfg.n, a)?;
    let mut rec = ResultRecord::new("bound", cfg, prov);
    rec.scalar("a", b.a)
        .scalar("cc_bound", b.cc_bound)
        .scalar("cc_ball", b.cc_ball)
        .scalar("e", b.e)
        .scalar("e_binomial", b.e_binomial);
    Ok(rec)
}

pub fn cmd_existence(cfg: &ExistenceConfig, prov: Provenance) -> Result<ResultRecord> {
    let green = solve_green(cfg.n, cfg.alpha, cfg.r0, cfg.rmax, cfg.tol)?;
    let grid = GluingGrid {
        intervals: cfg.intervals,
        ..Default::default()
    };
    let rows = cfg
        .epsilon_list()
        .par_iter()
        .map(|&e| gap_row(cfg.n, cfg.alpha, &green, e, grid))
        .collect::<tmlab_core::Result<Vec<_>>>()?;
    let rep = summarize(rows);
    let mut rec = ResultRecord::new("existence", cfg, prov);
    rec.scalar("a", green.a)
        .scalar("bound", carleson_chang_bound(cfg.n, green.a)?.cc_bound)
        .scalar("best_gap", rep.best_gap)
        .scalar("best_epsilon", rep.best_epsilon);
    rec.set_columns(&["epsilon", "functional", "bound", "gap", "mismatch"]);
    for r in &rep.rows {
        rec.push_row(&[r.epsilon, r.functional, r.bound, r.gap, r.mismatch]);
    }
    if rep.best_gap.is_nan() || rep.best_gap <= 0.0 {
        rec.notes
            .push("no epsilon in the scan beats the concentration threshold".into());
    }
    Ok(rec)
}

pub fn cmd_bubble(cfg: &BubbleConfig, prov: Provenance) -> Result<ResultRecord> {
    let b = BubbleProfile::new(cfg.n)?;
    let integral = bubble_integral(cfg.n)?;
    let rs = if cfg.count == 1 {
        vec![cfg.r_min]
    } else {
        log_spaced(cfg.r_min, cfg.r_max, cfg.count)
    };
    let mut rec = ResultRecord::new("bubble", cfg, prov);
    rec.set_columns(&["r", "psi", "psi_prime", "residual"]);
    let mut worst: f64 = 0.0;
    for &r in &rs {
        let res = bubble_ode_residual(cfg.n, &[r])?;
        worst = worst.max(res);
        rec.push_row(&[r, b.psi(r), b.psi_prime(r), res]);
    }
    rec.scalar("integral", integral)
        .scalar("integral_error", (integral - 1.0).abs())
        .scalar("ode_residual", worst);
    Ok(rec)
}

pub(crate) fn numerical(msg: impl Into<String>) -> CliError {
    CliError::Numerical(msg.into())
}
