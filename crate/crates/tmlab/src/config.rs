//! Per-command run configurations, their defaults and validation.
//!
//! A config file is TOML: optional top-level `seed`, `precision`, `format`,
//! `threads` and one table per subcommand (`[eval]`, `[maximize]`, ...) whose
//! keys are the field names below. Command-line flags override both.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tmlab_core::{GridKind, RadialGrid};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GridChoice {
    Uniform,
    /// Geometric from r0_factor·R up to R.
    Geometric,
    EqualVolume,
}

impl GridChoice {
    pub fn build(
        self,
        n: usize,
        radius: f64,
        intervals: usize,
        r0_factor: f64,
    ) -> tmlab_core::Result<RadialGrid> {
        let kind = match self {
            GridChoice::Uniform => GridKind::Uniform,
            GridChoice::Geometric => GridKind::Geometric {
                r0: r0_factor * radius,
            },
            GridChoice::EqualVolume => GridKind::EqualVolume,
        };
        tmlab_core::make_grid(n, radius, intervals, kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    /// (1 − r/R) scaled to unit Sobolev norm.
    Tent,
    /// Truncated-log sequence member u_k on B_{R_k}, unit Sobolev norm.
    Moser,
    /// Bubble ψ(r/ε) − ψ(R/ε) cut at the boundary, unit Sobolev norm.
    BubbleCap,
    /// Samples read from a two-column CSV (r, u).
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Common {
    pub seed: u64,
    pub precision: usize,
    pub format: Format,
    pub threads: Option<usize>,
}

impl Default for Common {
    fn default() -> Self {
        Self {
            seed: 0,
            precision: 12,
            format: Format::Csv,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub n: usize,
    pub alpha: f64,
    /// β as a fraction of α_n; 1 is the critical functional.
    pub beta_fraction: f64,
    pub profile: Profile,
    /// Ball radius for tent, bubble-cap and zero (moser uses R_k).
    pub radius: f64,
    pub intervals: usize,
    pub grid: GridChoice,
    pub r0_factor: f64,
    /// Moser parameter; `log_k` wins when both are given.
    pub k: f64,
    pub log_k: Option<f64>,
    /// Bubble-cap concentration scale.
    pub epsilon: f64,
    pub file: Option<PathBuf>,
    /// Rescale a file profile to unit Sobolev norm before evaluating.
    pub normalize: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n: 2,
            alpha: 0.0,
            beta_fraction: 1.0,
            profile: Profile::Tent,
            radius: 1.0,
            intervals: 4000,
            grid: GridChoice::Geometric,
            r0_factor: 1e-6,
            k: 1e6,
            log_k: None,
            epsilon: 0.05,
            file: None,
            normalize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessConfig {
    pub n: usize,
    pub alpha: f64,
    /// k = 10^x for each listed x; k itself is never formed.
    pub log10_k: Vec<f64>,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        Self {
            n: 2,
            alpha: 1.0,
            log10_k: (3..=9).map(|j| 2f64.powi(j)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximizeConfig {
    pub n: usize,
    pub alpha: f64,
    /// β/α_n values, run in the given order with warm starts.
    pub beta_fractions: Vec<f64>,
    pub radius: f64,
    pub intervals: usize,
    pub grid: GridChoice,
    pub r0_factor: f64,
    /// Radius outside which the remaining energy is reported.
    pub delta: f64,
    /// Independent seeds per β (seed, seed+1, ...); the best run is kept.
    pub seeds: usize,
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub patience: usize,
    /// First trial step on the constraint arc.
    pub step0: f64,
    /// Step reduction factor of the line search.
    pub backtrack: f64,
}

impl Default for MaximizeConfig {
    fn default() -> Self {
        let o = tmlab_core::MaximizerOptions::default();
        Self {
            n: 2,
            alpha: 0.0,
            beta_fractions: vec![0.9, 0.95, 0.99],
            radius: 8.0,
            intervals: 512,
            grid: GridChoice::Geometric,
            r0_factor: 1e-5,
            delta: 2.0,
            seeds: 1,
            starts: o.starts,
            max_iters: o.max_iters,
            tol: o.tol,
            patience: o.patience,
            step0: o.step0,
            backtrack: o.backtrack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreenConfig {
    pub n: usize,
    pub alpha: f64,
    pub r0: f64,
    pub rmax: f64,
    pub tol: f64,
    /// Radii (lo, hi) used to fit the constant A.
    pub fit_window: [f64; 2],
    /// Radii at which the capacity identity is checked.
    pub deltas: Vec<f64>,
    /// Re-solve with r0/2 and 2·rmax and report the change in A.
    pub refine: bool,
}

impl Default for GreenConfig {
    fn default() -> Self {
        Self {
            n: 2,
            alpha: 0.0,
            r0: 1e-6,
            rmax: 8.0,
            tol: 1e-5,
            fit_window: [1e-5, 1e-3],
            deltas: vec![0.1, 0.2, 0.5],
            refine: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundConfig {
    pub n: usize,
    /// Use this A instead of solving for the Green function.
    pub a: Option<f64>,
    pub alpha: f64,
    pub r0: f64,
    pub rmax: f64,
    pub tol: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        let g = GreenConfig::default();
        Self {
            n: 2,
            a: None,
            alpha: 0.0,
            r0: g.r0,
            rmax: g.rmax,
            tol: g.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExistenceConfig {
    pub n: usize,
    pub alpha: f64,
    /// Explicit ε list; when absent, `eps_count` log-spaced values in [eps_min, eps_max].
    pub epsilons: Option<Vec<f64>>,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_count: usize,
    pub intervals: usize,
    pub r0: f64,
    pub rmax: f64,
    pub tol: f64,
}

impl Default for ExistenceConfig {
    fn default() -> Self {
        let g = GreenConfig::default();
        Self {
            n: 2,
            alpha: 0.0,
            epsilons: None,
            eps_min: 1e-8,
            eps_max: 1e-2,
            eps_count: 7,
            intervals: tmlab_core::gluing::GluingGrid::default().intervals,
            r0: g.r0,
            rmax: g.rmax,
            tol: g.tol,
        }
    }
}

impl ExistenceConfig {
    pub fn epsilon_list(&self) -> Vec<f64> {
        match &self.epsilons {
            Some(v) => v.clone(),
            None if self.eps_count == 1 => vec![self.eps_min],
            None => tmlab_core::bubble::log_spaced(self.eps_min, self.eps_max, self.eps_count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BubbleConfig {
    pub n: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl Default for BubbleConfig {
    fn default() -> Self {
        Self {
            n: 2,
            r_min: 1e-2,
            r_max: 10.0,
            count: 50,
        }
    }
}

fn ensure(ok: bool, field: &str, what: impl Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{field}: {what}")))
    }
}

fn dim(cmd: &str, n: usize) -> Result<()> {
    ensure(
        n >= 2,
        &format!("{cmd}.n"),
        format!("dimension must be at least 2, got {n}"),
    )
}

fn alpha(cmd: &str, a: f64) -> Result<()> {
    ensure(
        a.is_finite() && a >= 0.0,
        &format!("{cmd}.alpha"),
        format!("must be finite and non-negative, got {a}"),
    )
}

fn positive(field: &str, x: f64) -> Result<()> {
    ensure(
        x.is_finite() && x > 0.0,
        field,
        format!("must be finite and positive, got {x}"),
    )
}

fn grid_size(field: &str, m: usize) -> Result<()> {
    ensure(
        m >= 16,
        field,
        format!("need at least 16 intervals, got {m}"),
    )
}

fn green_domain(cmd: &str, r0: f64, rmax: f64, tol: f64) -> Result<()> {
    positive(&format!("{cmd}.r0"), r0)?;
    ensure(
        rmax.is_finite() && rmax > r0,
        &format!("{cmd}.rmax"),
        format!("must exceed r0 = {r0}, got {rmax}"),
    )?;
    positive(&format!("{cmd}.tol"), tol)
}

pub trait Validate {
    fn validate(&self) -> Result<()>;
}

impl Validate for Common {
    fn validate(&self) -> Result<()> {
        ensure(
            (1..=17).contains(&self.precision),
            "precision",
            format!("must lie in 1..=17, got {}", self.precision),
        )?;
        ensure(self.threads != Some(0), "threads", "must be at least 1")
    }
}

impl Validate for EvalConfig {
    fn validate(&self) -> Result<()> {
        dim("eval", self.n)?;
        alpha("eval", self.alpha)?;
        let b = self.beta_fraction;
        ensure(
            b > 0.0 && b <= 1.0,
            "eval.beta_fraction",
            format!("must lie in (0, 1], got {b}"),
        )?;
        match self.profile {
            Profile::Moser => match self.log_k {
                Some(lk) => ensure(
                    lk.is_finite() && lk > 2.0,
                    "eval.log_k",
                    format!("must exceed 2, got {lk}"),
                )?,
                None => ensure(
                    self.k.is_finite() && self.k.ln() > 2.0,
                    "eval.k",
                    format!("must exceed e^2, got {}", self.k),
                )?,
            },
            Profile::File => ensure(
                self.file.is_some(),
                "eval.file",
                "required when profile = \"file\"",
            )?,
            Profile::BubbleCap => {
                positive("eval.epsilon", self.epsilon)?;
                positive("eval.radius", self.radius)?;
            }
            Profile::Zero | Profile::Tent => positive("eval.radius", self.radius)?,
        }
        if !matches!(self.profile, Profile::File) {
            grid_size("eval.intervals", self.intervals)?;
            let f = self.r0_factor;
            ensure(
                f > 0.0 && f < 1.0,
                "eval.r0_factor",
                format!("must lie in (0, 1), got {f}"),
            )?;
        }
        Ok(())
    }
}

impl Validate for SharpnessConfig {
    fn validate(&self) -> Result<()> {
        dim("sharpness", self.n)?;
        alpha("sharpness", self.alpha)?;
        ensure(
            !self.log10_k.is_empty(),
            "sharpness.log10_k",
            "list is empty",
        )?;
        for (i, &x) in self.log10_k.iter().enumerate() {
            // log k > 2 is needed for log log k > 0 and R_k to make sense
            ensure(
                x.is_finite() && x * std::f64::consts::LN_10 > 2.0,
                &format!("sharpness.log10_k[{i}]"),
                format!("need k > e^2, got 10^{x}"),
            )?;
        }
        ensure(
            self.log10_k.windows(2).all(|w| w[1] > w[0]),
            "sharpness.log10_k",
            "must be strictly increasing",
        )
    }
}

impl Validate for MaximizeConfig {
    fn validate(&self) -> Result<()> {
        dim("maximize", self.n)?;
        alpha("maximize", self.alpha)?;
        ensure(
            !self.beta_fractions.is_empty(),
            "maximize.beta_fractions",
            "list is empty",
        )?;
        for (i, &b) in self.beta_fractions.iter().enumerate() {
            ensure(
                b > 0.0 && b < 1.0,
                &format!("maximize.beta_fractions[{i}]"),
                format!("must lie in (0, 1), got {b}"),
            )?;
        }
        positive("maximize.radius", self.radius)?;
        grid_size("maximize.intervals", self.intervals)?;
        let f = self.r0_factor;
        ensure(
            f > 0.0 && f < 1.0,
            "maximize.r0_factor",
            format!("must lie in (0, 1), got {f}"),
        )?;
        ensure(
            self.delta.is_finite() && self.delta >= 0.0,
            "maximize.delta",
            format!("must be non-negative, got {}", self.delta),
        )?;
        ensure(self.seeds >= 1, "maximize.seeds", "must be at least 1")?;
        ensure(self.starts >= 1, "maximize.starts", "must be at least 1")?;
        ensure(
            self.patience >= 1,
            "maximize.patience",
            "must be at least 1",
        )?;
        ensure(
            self.max_iters >= 1,
            "maximize.max_iters",
            "must be at least 1",
        )?;
        positive("maximize.tol", self.tol)?;
        ensure(
            self.step0 > 0.0 && self.step0 <= 1.0,
            "maximize.step0",
            format!("must lie in (0, 1], got {}", self.step0),
        )?;
        ensure(
            self.backtrack > 0.0 && self.backtrack < 1.0,
            "maximize.backtrack",
            format!("must lie in (0, 1), got {}", self.backtrack),
        )
    }
}

impl Validate for GreenConfig {
    fn validate(&self) -> Result<()> {
        dim("green", self.n)?;
        alpha("green", self.alpha)?;
        ensure(
            self.alpha < 1.0,
            "green.alpha",
            format!("the Green function needs alpha < 1, got {}", self.alpha),
        )?;
        green_domain("green", self.r0, self.rmax, self.tol)?;
        let [lo, hi] = self.fit_window;
        ensure(
            lo > 0.0 && hi > lo,
            "green.fit_window",
            format!("need 0 < lo < hi, got [{lo}, {hi}]"),
        )?;
        for (i, &d) in self.deltas.iter().enumerate() {
            ensure(
                d > self.r0 && d < self.rmax,
                &format!("green.deltas[{i}]"),
                format!("must lie in (r0, rmax), got {d}"),
            )?;
        }
        Ok(())
    }
}

impl Validate for BoundConfig {
    fn validate(&self) -> Result<()> {
        dim("bound", self.n)?;
        match self.a {
            Some(a) => ensure(a.is_finite(), "bound.a", format!("must be finite, got {a}")),
            None => {
                alpha("bound", self.alpha)?;
                ensure(
                    self.alpha < 1.0,
                    "bound.alpha",
                    format!("solving for A needs alpha < 1, got {}", self.alpha),
                )?;
                green_domain("bound", self.r0, self.rmax, self.tol)
            }
        }
    }
}

impl Validate for ExistenceConfig {
    fn validate(&self) -> Result<()> {
        dim("existence", self.n)?;
        alpha("existence", self.alpha)?;
        ensure(
            self.alpha < 1.0,
            "existence.alpha",
            format!("needs alpha < 1, got {}", self.alpha),
        )?;
        green_domain("existence", self.r0, self.rmax, self.tol)?;
        grid_size("existence.intervals", self.intervals)?;
        match &self.epsilons {
            Some(v) => {
                ensure(!v.is_empty(), "existence.epsilons", "list is empty")?;
                for (i, &e) in v.iter().enumerate() {
                    ensure(
                        e > 0.0 && e < 1.0,
                        &format!("existence.epsilons[{i}]"),
                        format!("must lie in (0, 1), got {e}"),
                    )?;
                }
            }
            None => {
                ensure(
                    self.eps_count >= 1,
                    "existence.eps_count",
                    "ε list is empty",
                )?;
                ensure(
                    self.eps_min > 0.0 && self.eps_max < 1.0 && self.eps_min <= self.eps_max,
                    "existence.eps_min",
                    format!(
                        "need 0 < eps_min <= eps_max < 1, got [{}, {}]",
                        self.eps_min, self.eps_max
                    ),
                )?;
            }
        }
        Ok(())
    }
}

impl Validate for BubbleConfig {
    fn validate(&self) -> Result<()> {
        dim("bubble", self.n)?;
        positive("bubble.r_min", self.r_min)?;
        ensure(
            self.r_max >= self.r_min && self.r_max.is_finite(),
            "bubble.r_max",
            format!("must be at least r_min, got {}", self.r_max),
        )?;
        ensure(self.count >= 1, "bubble.count", "must be at least 1")
    }
}

/// Parsed config file: the top-level run settings and the raw per-command tables.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub common: Common,
    tables: toml::Table,
}

pub const COMMANDS: [&str; 7] = [
    "eval",
    "sharpness",
    "maximize",
    "green",
    "bound",
    "existence",
    "bubble",
];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Validation(e.message().to_string()))?;
        let mut top = toml::Table::new();
        let mut tables = toml::Table::new();
        for (k, v) in table {
            match v {
                toml::Value::Table(t) => {
                    if !COMMANDS.contains(&k.as_str()) {
                        return Err(CliError::Validation(format!("unknown section [{k}]")));
                    }
                    tables.insert(k, toml::Value::Table(t));
                }
                other => {
                    top.insert(k, other);
                }
            }
        }
        let common = Common::deserialize(toml::Value::Table(top))
            .map_err(|e| CliError::Validation(e.message().to_string()))?;
        Ok(Self { common, tables })
    }

    /// The section for `cmd` with defaults filled in; missing sections give the defaults.
    pub fn section<T: for<'de> Deserialize<'de> + Default>(&self, cmd: &str) -> Result<T> {
        match self.tables.get(cmd) {
            None => Ok(T::default()),
            Some(v) => T::deserialize(v.clone())
                .map_err(|e| CliError::Validation(format!("[{cmd}] {}", e.message()))),
        }
    }
}
