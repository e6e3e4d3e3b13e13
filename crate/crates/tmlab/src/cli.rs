//! Argument parsing. Every command flag mirrors a config field and wins over the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::*;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "tmlab",
    version,
    about = "Numerical experiments for the Trudinger-Moser functional with an L^n-norm term"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonFlags {
    /// TOML file with top-level run settings and one [section] per command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file. With csv the JSON record goes next to it with a .json extension.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Significant digits in CSV and JSON output [default: 12].
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Worker threads for scans [default: all cores].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the functional on a built-in or file profile.
    #[command(
        after_help = "CSV columns: one row holding every scalar, sorted by name: \
exponent, grad_norm, log_value, lp_norm, lp_pow, sobolev_norm, tail_estimate, value; \
moser adds log_k, log_lower_bound, r_k.\n\
Profile files: header `r,u`, strictly increasing r >= 0, u >= 0."
    )]
    Eval(EvalFlags),
    /// Log-space lower bounds along the truncated-log sequence.
    #[command(
        after_help = "CSV columns: log10_k, log_k, log_lower_bound, log_lower_bound_first_power, prediction, residual"
    )]
    Sharpness(SharpnessFlags),
    /// Subcritical maximizers with continuation in beta.
    #[command(
        after_help = "CSV columns: beta_fraction, beta, value, c_k, r_k, lambda_k, el_residual, \
outside_energy, converged, iterations"
    )]
    Maximize(MaximizeFlags),
    /// Green function, its constant A and the capacity identity.
    #[command(after_help = "CSV columns: delta, lhs, rhs_a, rhs_b, residual_a, residual_b")]
    Green(GreenFlags),
    /// Concentration threshold constants.
    #[command(after_help = "CSV columns: one row: a, cc_ball, cc_bound, e, e_binomial")]
    Bound(BoundFlags),
    /// Test-family values against the concentration threshold over an epsilon scan.
    #[command(after_help = "CSV columns: epsilon, functional, bound, gap, mismatch")]
    Existence(ExistenceFlags),
    /// Mass and ODE residual of the limiting bubble.
    #[command(after_help = "CSV columns: r, psi, psi_prime, residual")]
    Bubble(BubbleFlags),
}

#[derive(Debug, Args)]
pub struct EvalFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta_fraction: Option<f64>,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub intervals: Option<usize>,
    #[arg(long, value_enum)]
    pub grid: Option<GridChoice>,
    #[arg(long)]
    pub r0_factor: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub log_k: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct SharpnessFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated exponents x with k = 10^x.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub log10_k: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct MaximizeFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated β/α_n values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub beta_fractions: Option<Vec<f64>>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub intervals: Option<usize>,
    #[arg(long, value_enum)]
    pub grid: Option<GridChoice>,
    #[arg(long)]
    pub r0_factor: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub step0: Option<f64>,
    #[arg(long)]
    pub backtrack: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GreenFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Two radii lo,hi.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub fit_window: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    #[arg(long)]
    pub refine: bool,
}

#[derive(Debug, Args)]
pub struct BoundFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExistenceFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub eps_min: Option<f64>,
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long)]
    pub eps_count: Option<usize>,
    #[arg(long)]
    pub intervals: Option<usize>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BubbleFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
}

macro_rules! overlay {
    ($cfg:ident, $fl:ident; $($f:ident),* $(; opt $($o:ident),*)?) => {
        $( if let Some(v) = $fl.$f.clone() { $cfg.$f = v; } )*
        $( $( if let Some(v) = $fl.$o.clone() { $cfg.$o = Some(v); } )* )?
    };
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum Resolved {
    Eval(EvalConfig),
    Sharpness(SharpnessConfig),
    Maximize(MaximizeConfig),
    Green(GreenConfig),
    Bound(BoundConfig),
    Existence(ExistenceConfig),
    Bubble(BubbleConfig),
}

impl Resolved {
    pub fn validate(&self) -> Result<()> {
        match self {
            Resolved::Eval(c) => c.validate(),
            Resolved::Sharpness(c) => c.validate(),
            Resolved::Maximize(c) => c.validate(),
            Resolved::Green(c) => c.validate(),
            Resolved::Bound(c) => c.validate(),
            Resolved::Existence(c) => c.validate(),
            Resolved::Bubble(c) => c.validate(),
        }
    }

    /// Rebuilds and validates a config from a record's command and config fields.
    pub fn from_record(command: &str, config: &serde_json::Value) -> Result<Self> {
        fn de<T: for<'de> serde::Deserialize<'de>>(v: &serde_json::Value) -> Result<T> {
            T::deserialize(v)
                .map_err(|e| crate::error::CliError::Validation(format!("record config: {e}")))
        }
        let r = match command {
            "eval" => Resolved::Eval(de(config)?),
            "sharpness" => Resolved::Sharpness(de(config)?),
            "maximize" => Resolved::Maximize(de(config)?),
            "green" => Resolved::Green(de(config)?),
            "bound" => Resolved::Bound(de(config)?),
            "existence" => Resolved::Existence(de(config)?),
            "bubble" => Resolved::Bubble(de(config)?),
            other => {
                return Err(crate::error::CliError::Validation(format!(
                    "unknown command {other:?}"
                )))
            }
        };
        r.validate()?;
        Ok(r)
    }
}

impl Cli {
    /// Merges defaults, the config file and flags (in that order of precedence, lowest first).
    pub fn resolve(&self) -> Result<(Common, Resolved)> {
        let file = match &self.common.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let mut common = file.common.clone();
        let cf = &self.common;
        if let Some(s) = cf.seed {
            common.seed = s;
        }
        if let Some(p) = cf.precision {
            common.precision = p;
        }
        if let Some(f) = cf.format {
            common.format = f;
        }
        if cf.threads.is_some() {
            common.threads = cf.threads;
        }
        common.validate()?;

        let resolved = match &self.command {
            Command::Eval(fl) => {
                let mut c: EvalConfig = file.section("eval")?;
                overlay!(c, fl; n, alpha, beta_fraction, profile, radius, intervals, grid, r0_factor, k, epsilon; opt log_k, file);
                c.normalize |= fl.normalize;
                Resolved::Eval(c)
            }
            Command::Sharpness(fl) => {
                let mut c: SharpnessConfig = file.section("sharpness")?;
                overlay!(c, fl; n, alpha, log10_k);
                Resolved::Sharpness(c)
            }
            Command::Maximize(fl) => {
                let mut c: MaximizeConfig = file.section("maximize")?;
                overlay!(c, fl; n, alpha, beta_fractions, radius, intervals, grid, r0_factor, delta, seeds, starts, max_iters, tol, patience, step0, backtrack);
                Resolved::Maximize(c)
            }
            Command::Green(fl) => {
                let mut c: GreenConfig = file.section("green")?;
                overlay!(c, fl; n, alpha, r0, rmax, tol, deltas);
                if let Some(w) = &fl.fit_window {
                    c.fit_window = [w[0], w[1]];
                }
                c.refine |= fl.refine;
                Resolved::Green(c)
            }
            Command::Bound(fl) => {
                let mut c: BoundConfig = file.section("bound")?;
                overlay!(c, fl; n, alpha, r0, rmax, tol; opt a);
                Resolved::Bound(c)
            }
            Command::Existence(fl) => {
                let mut c: ExistenceConfig = file.section("existence")?;
                overlay!(c, fl; n, alpha, eps_min, eps_max, eps_count, intervals, r0, rmax, tol; opt epsilons);
                Resolved::Existence(c)
            }
            Command::Bubble(fl) => {
                let mut c: BubbleConfig = file.section("bubble")?;
                overlay!(c, fl; n, r_min, r_max, count);
                Resolved::Bubble(c)
            }
        };
        resolved.validate()?;
        Ok((common, resolved))
    }
}
