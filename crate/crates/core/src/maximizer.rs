//! Subcritical maximization of I^α_β on B_R under ‖u‖_{W^{1,n}} = 1.
//!
//! Each step solves the linearized n-Laplacian system A(u)v = ∇J(u), where
//! A(u) has conductances K_j|Δu_j|^{n−2} and masses w_i|u_i|^{n−2} (so that
//! ∇N = n A(u)u for the discrete constraint N), then moves along the arc
//! normalize((1−t)u + t v̂) with backtracking on t. At an Euler–Lagrange point
//! v is parallel to u, so the iteration is stationary exactly there.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bubble::BubbleProfile;
use crate::error::{bail, Result};
use crate::functional::{
    integrate_phi, lambda, tm_functional, FunctionalValue, Multipliers, TMParams,
};
use crate::grid::RadialGrid;
use crate::math::{conj, ksum, phi_prime_unchecked};
use crate::quad::GaussRule;
use crate::radial::{decreasing_rearrangement, interp, RadialFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizerOptions {
    pub max_iters: usize,
    /// Relative functional increase regarded as stagnation.
    pub tol: f64,
    /// Number of consecutive stagnant steps required to stop.
    pub patience: usize,
    /// First trial step on the arc (1 = jump to the preconditioned direction).
    pub step0: f64,
    /// Step reduction factor in the line search.
    pub backtrack: f64,
    pub min_step: f64,
    pub seed: u64,
    /// Relative amplitude of the seeded perturbation of the initial tent.
    pub perturbation: f64,
    /// Support radius of the widest initial tent as a fraction of R.
    pub init_width: f64,
    /// Number of tent starts, each 4× narrower than the last; the best result is kept.
    pub starts: usize,
    /// Narrower re-tries per start when the iterate collapses to zero.
    pub max_restarts: usize,
}

impl Default for MaximizerOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol: 1e-12,
            patience: 10,
            step0: 1.0,
            backtrack: 0.5,
            min_step: 1e-10,
            seed: 0,
            perturbation: 0.02,
            init_width: 0.5,
            starts: 3,
            max_restarts: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaximizerState {
    pub u: RadialFunction,
    /// u(0).
    pub c_k: f64,
    pub multipliers: Multipliers,
    /// r_kⁿ = λ_k / (μ_k c_k^{n/(n−1)} e^{α_k c_k^{n/(n−1)}}).
    pub r_k: f64,
    pub functional: FunctionalValue,
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Functional value after every accepted step.
    pub history: Vec<f64>,
    pub restarts: usize,
    pub log: Vec<String>,
}

impl MaximizerState {
    /// |r_kⁿ μ_k c_k^{n/(n−1)} e^{α_k c_k^{n/(n−1)}} / λ_k − 1|.
    pub fn r_k_identity_defect(&self) -> f64 {
        let n = self.u.n() as f64;
        let m = &self.multipliers;
        let cp = self.c_k.powf(conj(self.u.n()));
        let ln_lhs = n * self.r_k.ln() + m.mu_k.ln() + cp.ln() + m.alpha_k * cp;
        (ln_lhs - m.lambda_k.ln()).exp_m1().abs()
    }
}

struct Problem<'a> {
    grid: &'a RadialGrid,
    params: &'a TMParams,
    n: usize,
    nf: f64,
    p: f64,
    m: usize,
}

impl<'a> Problem<'a> {
    fn new(grid: &'a RadialGrid, params: &'a TMParams) -> Self {
        let n = params.n;
        Self {
            grid,
            params,
            n,
            nf: n as f64,
            p: conj(n),
            m: grid.intervals(),
        }
    }

    fn lp_pow(&self, u: &[f64]) -> f64 {
        ksum(
            u.iter()
                .zip(self.grid.weights())
                .map(|(v, w)| w * v.abs().powf(self.nf)),
        )
    }

    fn energy(&self, u: &[f64]) -> f64 {
        let n = self.n as i32;
        let grad =
            ksum((0..self.m).map(|j| self.grid.stiffness(j) * (u[j + 1] - u[j]).abs().powi(n)));
        grad + self.lp_pow(u)
    }

    fn normalize(&self, u: &mut [f64]) -> bool {
        let e = self.energy(u);
        if !(e > 0.0 && e.is_finite()) {
            return false;
        }
        let s = e.powf(-1.0 / self.nf);
        u.iter_mut().for_each(|v| *v *= s);
        true
    }

    fn value(&self, u: &RadialFunction) -> f64 {
        let l = self.lp_pow(u.values());
        integrate_phi(u, self.n, self.params.exponent(l)).0
    }

    /// ∇J_i = (n/(n−1)) α_k w_i [Φ′(e_i) u_i^{1/(n−1)} + αλ/(1+αL) u_i^{n−1}].
    fn gradient(&self, u: &RadialFunction) -> Vec<f64> {
        let l = self.lp_pow(u.values());
        let ak = self.params.exponent(l);
        let lam = lambda(u, self.n, ak);
        let coup = self.params.alpha * lam / (1.0 + self.params.alpha * l);
        let w = self.grid.weights();
        u.values()
            .iter()
            .zip(w)
            .map(|(&v, &wi)| {
                let v = v.max(0.0);
                let s = v.powf(self.p);
                self.p
                    * ak
                    * wi
                    * (phi_prime_unchecked(self.n, ak * s) * v.powf(self.p - 1.0)
                        + coup * v.powf(self.nf - 1.0))
            })
            .collect()
    }

    /// Tridiagonal coefficients (diag, off) of the linearized operator on nodes 0..M−1.
    fn operator(&self, u: &[f64], linear: bool) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let q = self.nf - 2.0;
        let gmax = (0..m).map(|j| (u[j + 1] - u[j]).abs()).fold(0.0, f64::max);
        let umax = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let (gf, uf) = (1e-8 * gmax.max(1e-300), 1e-8 * umax.max(1e-300));
        let cond: Vec<f64> = (0..m)
            .map(|j| {
                let k = self.grid.stiffness(j);
                if linear || q == 0.0 {
                    k
                } else {
                    k * (u[j + 1] - u[j]).abs().max(gf).powf(q)
                }
            })
            .collect();
        let w = self.grid.weights();
        let mut diag = alloc::vec![0.0; m];
        let mut off = alloc::vec![0.0; m.saturating_sub(1)];
        for i in 0..m {
            let mass = if linear || q == 0.0 {
                w[i]
            } else {
                w[i] * u[i].abs().max(uf).powf(q)
            };
            diag[i] = mass + cond[i] + if i > 0 { cond[i - 1] } else { 0.0 };
            if i + 1 < m {
                off[i] = -cond[i];
            }
        }
        (diag, off)
    }
}

/// Solves the symmetric tridiagonal system in place (Thomas algorithm).
fn solve_tridiag(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = alloc::vec![0.0; m];
    let mut d = alloc::vec![0.0; m];
    c[0] = if m > 1 { off[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let den = diag[i] - off[i - 1] * c[i - 1];
        c[i] = if i + 1 < m { off[i] / den } else { 0.0 };
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / den;
    }
    let mut x = d;
    for i in (0..m - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    x
}

fn initial_tent(grid: &RadialGrid, width: f64, opts: &MaximizerOptions) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let rho = width;
    let m = grid.intervals();
    let mut u: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| {
            let xi = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
            (1.0 - r / rho).max(0.0) * (1.0 + opts.perturbation * xi)
        })
        .collect();
    u[m] = 0.0;
    u
}

fn validate(params: &TMParams, grid: &RadialGrid, opts: &MaximizerOptions) -> Result<()> {
    if !params.is_subcritical() {
        bail!(
            InvalidParameter,
            "maximization needs beta < alpha_n; approach the critical exponent by continuation in beta"
        );
    }
    if grid.n() != params.n {
        bail!(
            InvalidInput,
            "grid dimension {} differs from params dimension {}",
            grid.n(),
            params.n
        );
    }
    if !(opts.step0 > 0.0 && opts.step0 <= 1.0 && opts.backtrack > 0.0 && opts.backtrack < 1.0) {
        bail!(
            InvalidParameter,
            "need 0 < step0 <= 1 and 0 < backtrack < 1"
        );
    }
    if !(opts.tol >= 0.0) || opts.patience == 0 || opts.max_iters == 0 || opts.starts == 0 {
        bail!(
            InvalidParameter,
            "need tol >= 0 and patience, max_iters, starts >= 1"
        );
    }
    Ok(())
}

pub fn maximize_subcritical(
    params: &TMParams,
    grid: Arc<RadialGrid>,
    opts: &MaximizerOptions,
) -> Result<MaximizerState> {
    validate(params, &grid, opts)?;
    let mut log = Vec::new();
    let mut best: Option<MaximizerState> = None;
    let mut restarts = 0;
    for k in 0..opts.starts {
        let width = opts.init_width * grid.outer_radius() * 0.25f64.powi(k as i32);
        match run_from_tent(params, &grid, width, opts, &mut log)? {
            Some(st) => {
                restarts += st.restarts;
                log.push(format!(
                    "start {k} (tent radius {width:e}): value {:.12e}",
                    st.functional.value
                ));
                if best
                    .as_ref()
                    .is_none_or(|b| st.functional.value > b.functional.value)
                {
                    best = Some(st);
                }
            }
            None => log.push(format!("start {k} (tent radius {width:e}): degenerated")),
        }
    }
    match best {
        Some(mut st) => {
            st.restarts = restarts;
            st.log = log;
            Ok(st)
        }
        None => bail!(
            Numerical,
            "all {} starts degenerated after restarts",
            opts.starts
        ),
    }
}

/// One start: a tent of the given radius, narrowed on collapse up to `max_restarts` times.
fn run_from_tent(
    params: &TMParams,
    grid: &Arc<RadialGrid>,
    width: f64,
    opts: &MaximizerOptions,
    log: &mut Vec<String>,
) -> Result<Option<MaximizerState>> {
    let mut width = width.max(grid.nodes()[2]);
    for restarts in 0..=opts.max_restarts {
        let u = RadialFunction::new(grid.clone(), initial_tent(grid, width, opts))?;
        if let Some(mut st) = ascend(params, u, opts)? {
            st.restarts = restarts;
            log.append(&mut st.log);
            return Ok(Some(st));
        }
        width *= 0.5;
        log.push(format!(
            "restart {}: iterate degenerated; narrower tent of radius {width:e}",
            restarts + 1
        ));
    }
    Ok(None)
}

/// Ascent from a caller-supplied non-negative start (normalized first).
pub fn maximize_from(
    params: &TMParams,
    start: &RadialFunction,
    opts: &MaximizerOptions,
) -> Result<MaximizerState> {
    validate(params, start.grid(), opts)?;
    if start.values().iter().any(|&v| v < 0.0) {
        bail!(InvalidInput, "starting profile must be non-negative");
    }
    match ascend(params, start.clone(), opts)? {
        Some(st) => Ok(st),
        None => bail!(Numerical, "iterates degenerated from the supplied start"),
    }
}

fn feasible(
    pb: &Problem,
    u: &RadialFunction,
    mut vals: Vec<f64>,
) -> Result<Option<RadialFunction>> {
    let m = pb.m;
    vals.iter_mut().for_each(|v| *v = v.max(0.0));
    vals[m] = 0.0;
    let mut f = u.with_values(vals)?;
    if !f.is_non_increasing() {
        f = decreasing_rearrangement(&f)?;
    }
    let mut vals = f.into_values();
    vals[m] = 0.0;
    if !pb.normalize(&mut vals) {
        return Ok(None);
    }
    Ok(Some(u.with_values(vals)?))
}

/// Returns None when the iterate collapses to zero.
fn ascend(
    params: &TMParams,
    start: RadialFunction,
    opts: &MaximizerOptions,
) -> Result<Option<MaximizerState>> {
    let grid = start.grid_arc().clone();
    let pb = Problem::new(&grid, params);
    let m = pb.m;
    let mut u = match feasible(&pb, &start, start.values().to_vec())? {
        Some(u) => u,
        None => return Ok(None),
    };
    let mut j = pb.value(&u);
    let mut history = alloc::vec![j];
    let mut stagnant = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut log = Vec::new();
    while iterations < opts.max_iters {
        iterations += 1;
        let g = pb.gradient(&u);
        let (diag, off) = pb.operator(u.values(), false);
        let mut v = solve_tridiag(&diag, &off, &g[..m]);
        v.push(0.0);
        if !pb.normalize(&mut v) {
            return Ok(None);
        }
        let mut t = opts.step0;
        let mut accepted = None;
        while t >= opts.min_step {
            let trial: Vec<f64> = u
                .values()
                .iter()
                .zip(&v)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect();
            if let Some(cand) = feasible(&pb, &u, trial)? {
                let jc = pb.value(&cand);
                if jc > j {
                    accepted = Some((cand, jc));
                    break;
                }
            }
            t *= opts.backtrack;
        }
        match accepted {
            Some((cand, jc)) => {
                let rel = (jc - j) / j;
                u = cand;
                j = jc;
                history.push(j);
                stagnant = if rel < opts.tol { stagnant + 1 } else { 0 };
                if stagnant >= opts.patience {
                    converged = true;
                    break;
                }
            }
            None => {
                // no ascent along the arc down to min_step: stationary at working precision
                log.push(format!("line search exhausted at iteration {iterations}"));
                converged = true;
                break;
            }
        }
    }
    if u.peak() <= 0.0 {
        return Ok(None);
    }
    finish(params, u, iterations, converged, history, log).map(Some)
}

fn finish(
    params: &TMParams,
    u: RadialFunction,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
    log: Vec<String>,
) -> Result<MaximizerState> {
    let n = params.n;
    let nf = n as f64;
    let functional = tm_functional(&u, params)?;
    let l = functional.norms.lp_pow;
    let ak = params.exponent(l);
    let mult = Multipliers::from_parts(params, l, lambda(&u, n, ak));
    let c_k = u.values()[0];
    let cp = c_k.powf(conj(n));
    let ln_rn = mult.lambda_k.ln() - mult.mu_k.ln() - cp.ln() - mult.alpha_k * cp;
    let r_k = (ln_rn / nf).exp();
    let el = el_residual_of(&u, params)?;
    Ok(MaximizerState {
        u,
        c_k,
        multipliers: mult,
        r_k,
        functional,
        el_residual: el,
        iterations,
        converged,
        history,
        restarts: 0,
        log,
    })
}

pub fn el_residual(state: &MaximizerState, params: &TMParams) -> Result<f64> {
    el_residual_of(&state.u, params)
}

/// Weak Euler–Lagrange residual in the discrete H^{-1} norm, relative to the right-hand side.
///
/// ρ_i = (1/n)∂N/∂u_i − (μ/λ) w_i u_i^{1/(n−1)}Φ′(α_k u_i^{n/(n−1)}) − γ w_i u_i^{n−1}
/// over the free nodes, measured as √(ρᵀA⁻¹ρ) with A the linear stiffness-plus-mass matrix.
pub fn el_residual_of(u: &RadialFunction, params: &TMParams) -> Result<f64> {
    if u.is_zero() {
        bail!(InvalidInput, "residual undefined for u = 0");
    }
    if u.n() != params.n {
        bail!(
            InvalidInput,
            "function dimension {} differs from params dimension {}",
            u.n(),
            params.n
        );
    }
    let grid = u.grid();
    let pb = Problem::new(grid, params);
    let m = pb.m;
    let (nf, p) = (pb.nf, pb.p);
    let vals = u.values();
    let l = pb.lp_pow(vals);
    let ak = params.exponent(l);
    let mult = Multipliers::from_parts(params, l, lambda(u, params.n, ak));
    let w = grid.weights();
    let flux: Vec<f64> = (0..m)
        .map(|j| {
            let d = vals[j + 1] - vals[j];
            grid.stiffness(j) * d.abs().powf(nf - 2.0) * d
        })
        .collect();
    let mut rho = alloc::vec![0.0; m];
    let mut rhs = alloc::vec![0.0; m];
    for i in 0..m {
        let v = vals[i].max(0.0);
        let lhs = -flux[i]
            + if i > 0 { flux[i - 1] } else { 0.0 }
            + w[i] * vals[i].abs().powf(nf - 2.0) * vals[i];
        let f = mult.mu_k / mult.lambda_k
            * w[i]
            * v.powf(p - 1.0)
            * phi_prime_unchecked(params.n, ak * v.powf(p))
            + mult.gamma_k * w[i] * v.powf(nf - 1.0);
        rho[i] = lhs - f;
        rhs[i] = f;
    }
    let (diag, off) = pb.operator(vals, true);
    let dual = |r: &[f64]| {
        let z = solve_tridiag(&diag, &off, r);
        ksum(r.iter().zip(&z).map(|(a, b)| a * b)).max(0.0).sqrt()
    };
    let denom = dual(&rhs);
    if !(denom > 0.0) {
        bail!(Numerical, "right-hand side vanishes; residual undefined");
    }
    Ok(dual(&rho) / denom)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupRescaling {
    pub r_k: f64,
    pub x: Vec<f64>,
    /// m_k(x) = u(r_k x).
    pub m: Vec<f64>,
    pub phi: Vec<f64>,
    /// (n/(n−1)) α_k c_k^{1/(n−1)} (m_k − c_k).
    pub psi: Vec<f64>,
    pub bubble: Vec<f64>,
    /// max over x of |ψ_k − ψ|.
    pub sup_distance: f64,
    /// Some r_k x fell beyond R; those samples use u(R).
    pub truncated: bool,
}

pub fn blowup_rescale(state: &MaximizerState, x_grid: &[f64]) -> Result<BlowupRescaling> {
    let c = state.c_k;
    if !(c > 0.0) {
        bail!(InvalidInput, "blow-up rescaling needs c_k > 0");
    }
    let n = state.u.n();
    let bubble = BubbleProfile::new(n)?;
    let coef = conj(n) * state.multipliers.alpha_k * c.powf(1.0 / (n as f64 - 1.0));
    let r_out = state.u.grid().outer_radius();
    let nodes = state.u.grid().nodes();
    let vals = state.u.values();
    let mut out = BlowupRescaling {
        r_k: state.r_k,
        x: x_grid.to_vec(),
        m: Vec::with_capacity(x_grid.len()),
        phi: Vec::with_capacity(x_grid.len()),
        psi: Vec::with_capacity(x_grid.len()),
        bubble: Vec::with_capacity(x_grid.len()),
        sup_distance: 0.0,
        truncated: false,
    };
    for &x in x_grid {
        let r = state.r_k * x.abs();
        if r > r_out {
            out.truncated = true;
        }
        let mk = interp(nodes, vals, r);
        let psi = coef * (mk - c);
        let b = bubble.psi(x);
        out.sup_distance = out.sup_distance.max((psi - b).abs());
        out.m.push(mk);
        out.phi.push(mk / c);
        out.psi.push(psi);
        out.bubble.push(b);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    /// (δ, ∫_{|x|>δ} |∇u|ⁿ + |u|ⁿ).
    pub rows: Vec<(f64, f64)>,
    pub lambda_over_c: f64,
    /// c_k^{n/(n−1)} / λ_k.
    pub c_pow_over_lambda: f64,
}

/// Sobolev energy outside B_δ, with the same quadrature as the grid norms.
pub fn energy_outside(u: &RadialFunction, delta: f64) -> f64 {
    let grid = u.grid();
    let r = grid.nodes();
    let v = u.values();
    let n = grid.n();
    let nf = n as f64;
    let omega = grid.omega();
    let rule = GaussRule::new(4);
    let mut acc = crate::math::KahanSum::default();
    if delta < r[0] {
        // the constant inner piece carries no gradient
        let lo = delta.max(0.0);
        acc.add(omega / nf * (r[0].powf(nf) - lo.powf(nf)) * v[0].abs().powf(nf));
    }
    for j in 0..grid.intervals() {
        let (a, b) = (r[j], r[j + 1]);
        if b <= delta {
            continue;
        }
        let lo = a.max(delta);
        let frac = if lo > a {
            (b.powf(nf) - lo.powf(nf)) / (b.powf(nf) - a.powf(nf))
        } else {
            1.0
        };
        acc.add(frac * grid.stiffness(j) * (v[j + 1] - v[j]).abs().powf(nf));
        // interpolate uⁿ rather than u, matching the grid's mass weights
        let (pa, pb) = (v[j].abs().powf(nf), v[j + 1].abs().powf(nf));
        let slope = (pb - pa) / (b - a);
        acc.add(rule.panel(
            &mut |s| omega * s.powf(nf - 1.0) * (pa + slope * (s - a)),
            lo,
            b,
        ));
    }
    acc.value()
}

pub fn concentration_report(state: &MaximizerState, delta_list: &[f64]) -> ConcentrationReport {
    let lam = state.multipliers.lambda_k;
    ConcentrationReport {
        rows: delta_list
            .iter()
            .map(|&d| (d, energy_outside(&state.u, d)))
            .collect(),
        lambda_over_c: lam / state.c_k,
        c_pow_over_lambda: state.c_k.powf(conj(state.u.n())) / lam,
    }
}

/// The truncated-log cap min(h, log(ρ/r))₊, rescaled to unit Sobolev norm.
pub fn cap_profile(grid: Arc<RadialGrid>, rho: f64, height: f64) -> Result<RadialFunction> {
    if !(rho > 0.0 && height > 0.0) {
        bail!(
            InvalidParameter,
            "cap needs rho > 0 and height > 0, got ({rho}, {height})"
        );
    }
    RadialFunction::from_fn(grid, |r| {
        if r >= rho {
            0.0
        } else {
            (rho / r.max(f64::MIN_POSITIVE)).ln().min(height)
        }
    })?
    .normalized()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapBest {
    pub value: f64,
    pub rho: f64,
    pub height: f64,
}

/// Brute-force maximum of the functional over the cap family on a (ρ, h) lattice.
pub fn cap_family_best(
    params: &TMParams,
    grid: &Arc<RadialGrid>,
    radii: &[f64],
    heights: &[f64],
) -> Result<CapBest> {
    let mut best = CapBest {
        value: f64::NEG_INFINITY,
        rho: f64::NAN,
        height: f64::NAN,
    };
    for &rho in radii {
        for &height in heights {
            let u = cap_profile(grid.clone(), rho, height)?;
            let value = tm_functional(&u, params)?.value;
            if value > best.value {
                best = CapBest { value, rho, height };
            }
        }
    }
    if !best.value.is_finite() {
        bail!(InvalidInput, "empty cap lattice");
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridKind};

    #[test]
    fn tridiagonal_solver() {
        let diag = [4.0, 4.0, 4.0];
        let off = [-1.0, -1.0];
        let x = solve_tridiag(&diag, &off, &[3.0, 2.0, 3.0]);
        for (a, b) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_critical_beta() {
        let g = Arc::new(make_grid(2, 4.0, 64, GridKind::Uniform).unwrap());
        let p = TMParams::critical(2, 0.0).unwrap();
        assert!(maximize_subcritical(&p, g, &MaximizerOptions::default()).is_err());
    }

    #[test]
    fn outside_energy_vanishes_at_boundary() {
        let g = Arc::new(make_grid(2, 2.0, 64, GridKind::Uniform).unwrap());
        let u = RadialFunction::from_fn(g, |r| 2.0 - r).unwrap();
        assert_eq!(energy_outside(&u, 2.0), 0.0);
        let total = u.sobolev_pow();
        assert!((energy_outside(&u, 0.0) - total).abs() < 1e-12 * total);
    }
}
