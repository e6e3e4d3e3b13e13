//! Radial meshes on [0, R] with n-dimensional volume weights.
//!
//! A sample vector u_i is read as the piecewise-linear interpolant on
//! [r_0, R], continued as the constant u_0 on the inner ball B_{r_0}. The
//! weights integrate that interpolant against ω_{n−1} r^{n−1} exactly, so
//! Σ w_i = |B_R| to rounding on every grid. Equal-volume grids instead use the
//! shell-midpoint rule (one node per shell of volume |B_R|/M), which makes
//! sorting an exact rearrangement.

use alloc::vec::Vec;
#[allow(unused_imports)] // resolves to inherent f64 methods when std is in the build graph
use num_traits::Float;

use crate::error::{bail, Result};
use crate::math::{ball_volume, binomial, sphere_area};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    Uniform,
    /// Constant ratio r_{i+1}/r_i from r_0 up to R.
    Geometric {
        r0: f64,
    },
    /// r_i = R((i+½)/M)^{1/n} for i < M and r_M = R; each shell has volume |B_R|/M.
    EqualVolume,
    /// Caller-supplied nodes.
    Custom,
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    n: usize,
    kind: GridKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    omega: f64,
}

/// Builds a grid with M intervals (M + 1 nodes).
pub fn make_grid(n: usize, r_outer: f64, m: usize, kind: GridKind) -> Result<RadialGrid> {
    if n < 2 {
        bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
    }
    if !(r_outer.is_finite() && r_outer > 0.0) {
        bail!(
            InvalidParameter,
            "outer radius must be finite and positive, got {r_outer}"
        );
    }
    if m < 16 {
        bail!(InvalidParameter, "need at least 16 intervals, got {m}");
    }
    let mf = m as f64;
    let nodes: Vec<f64> = match kind {
        GridKind::Uniform => (0..=m).map(|i| r_outer * i as f64 / mf).collect(),
        GridKind::Geometric { r0 } => {
            if !(r0.is_finite() && r0 > 0.0 && r0 < r_outer) {
                bail!(
                    InvalidParameter,
                    "geometric grid needs 0 < r0 < R, got r0 = {r0}"
                );
            }
            let ln_q = (r_outer / r0).ln() / mf;
            let mut v: Vec<f64> = (0..=m).map(|i| r0 * (ln_q * i as f64).exp()).collect();
            v[m] = r_outer;
            v
        }
        GridKind::EqualVolume => {
            let inv = 1.0 / n as f64;
            let mut v: Vec<f64> = (0..m)
                .map(|i| r_outer * ((i as f64 + 0.5) / mf).powf(inv))
                .collect();
            v.push(r_outer);
            v
        }
        GridKind::Custom => bail!(
            InvalidParameter,
            "custom grids are built with RadialGrid::from_nodes"
        ),
    };
    RadialGrid::build(n, kind, nodes)
}

/// Geometric grid specified by its ratio q = r_{i+1}/r_i instead of r_0.
pub fn make_geometric_ratio(n: usize, r_outer: f64, m: usize, ratio: f64) -> Result<RadialGrid> {
    if !(ratio.is_finite() && ratio > 1.0) {
        bail!(
            InvalidParameter,
            "geometric ratio must exceed 1, got {ratio}"
        );
    }
    let r0 = r_outer / ratio.powi(m as i32);
    make_grid(n, r_outer, m, GridKind::Geometric { r0 })
}

impl RadialGrid {
    pub fn from_nodes(n: usize, nodes: Vec<f64>) -> Result<Self> {
        if n < 2 {
            bail!(InvalidParameter, "dimension n must be at least 2, got {n}");
        }
        if nodes.len() < 3 {
            bail!(
                InvalidInput,
                "a grid needs at least 3 nodes, got {}",
                nodes.len()
            );
        }
        if !(nodes[0] >= 0.0) || nodes.iter().any(|r| !r.is_finite()) {
            bail!(InvalidInput, "nodes must be finite and non-negative");
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            bail!(InvalidInput, "nodes must be strictly increasing");
        }
        Self::build(n, GridKind::Custom, nodes)
    }

    fn build(n: usize, kind: GridKind, nodes: Vec<f64>) -> Result<Self> {
        let omega = sphere_area(n);
        let m = nodes.len() - 1;
        let weights = if kind == GridKind::EqualVolume {
            let w = ball_volume(n, nodes[m]) / m as f64;
            let mut v = alloc::vec![w; m];
            v.push(0.0);
            v
        } else {
            product_trapezoid(n, omega, &nodes)
        };
        Ok(Self {
            n,
            kind,
            nodes,
            weights,
            omega,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of intervals M; there are M + 1 nodes.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn outer_radius(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn volume(&self) -> f64 {
        ball_volume(self.n, self.outer_radius())
    }

    /// Volume of the shell r_j < |x| < r_{j+1}.
    pub fn shell_volume(&self, j: usize) -> f64 {
        let n = self.n as i32;
        let (a, b) = (self.nodes[j], self.nodes[j + 1]);
        // b^n − a^n without cancellation for thin shells
        let h = b - a;
        let mut s = 0.0;
        for k in 0..n {
            s += a.powi(n - 1 - k) * b.powi(k);
        }
        self.omega / self.n as f64 * h * s
    }

    /// Stiffness K_j with ∫_{shell j} |∇u|ⁿ = K_j |u_{j+1} − u_j|ⁿ for the linear interpolant.
    pub fn stiffness(&self, j: usize) -> f64 {
        let h = self.nodes[j + 1] - self.nodes[j];
        self.shell_volume(j) / h.powi(self.n as i32)
    }

    /// Whether derivatives are taken in s = log r (geometric grids).
    pub(crate) fn log_coords(&self) -> bool {
        matches!(self.kind, GridKind::Geometric { .. })
    }
}

fn product_trapezoid(n: usize, omega: f64, nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len() - 1;
    let mut w = alloc::vec![0.0; m + 1];
    let d = n - 1;
    let coef: Vec<f64> = (0..=d).map(|k| binomial(d, k)).collect();
    for j in 0..m {
        let a = nodes[j];
        let h = nodes[j + 1] - a;
        let (mut left, mut right) = (0.0, 0.0);
        for (k, c) in coef.iter().enumerate() {
            let base = c * a.powi((d - k) as i32) * h.powi(k as i32 + 1);
            let k1 = k as f64 + 1.0;
            let k2 = k as f64 + 2.0;
            left += base / (k1 * k2);
            right += base / k2;
        }
        w[j] += omega * left;
        w[j + 1] += omega * right;
    }
    w[0] += ball_volume(n, nodes[0]);
    w
}
