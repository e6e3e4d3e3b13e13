//! Radial numerics for the Trudinger–Moser functional with an L^n-norm coupling.
//!
//! Everything here is `no_std` with `alloc`. Integrals over balls in ℝⁿ reduce
//! to weighted sums over a [`RadialGrid`]; the functional itself, the analytic
//! test families, the subcritical maximizer and the Green-function shooter are
//! built on top of that one quadrature.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bubble;
pub mod error;
pub mod functional;
pub mod gluing;
pub mod greens;
pub mod grid;
pub mod math;
pub mod maximizer;
pub mod moser;
pub mod quad;
pub mod radial;

pub use bubble::{bubble_integral, bubble_ode_residual, BubbleProfile};
pub use error::{Error, Result};
pub use functional::{multipliers, tm_functional, FunctionalValue, Multipliers, TMParams};
pub use gluing::{existence_gap, gluing_family, GluingParams};
pub use greens::{
    capacity_identity_check, carleson_chang_bound, extract_a, solve_green, BoundReport,
    GreenFunction, GreenOptions, SourceTerm,
};
pub use grid::{make_grid, GridKind, RadialGrid};
pub use maximizer::{
    blowup_rescale, cap_family_best, concentration_report, el_residual, maximize_subcritical,
    BlowupRescaling, MaximizerOptions, MaximizerState,
};
pub use moser::{moser_function, moser_norms, sharpness_scan, MoserParams};
pub use radial::{
    decay_bound, decreasing_rearrangement, nlap_flux, norms, truncate_level, Norms, RadialFunction,
};
