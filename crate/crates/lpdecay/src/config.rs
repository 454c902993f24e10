//! Experiment files.
//!
//! An experiment is a TOML document. Unknown keys anywhere are rejected.
//!
//! ```toml
//! name = "powerlaw"
//! claim = "heat decay, low-frequency mass and dyadic lower bounds agree"
//! seed = 7
//! analyses = ["equivalence", "blocks"]
//!
//! [recipe]
//! kind = "power_law"
//! dim = 2
//! kappa = 0.5
//! cutoff = 1.0
//!
//! [windows]
//! time = [1e2, 1e8]
//! ```
//!
//! Tables and their defaults:
//!
//! * `[windows]`: `time = [1e2, 1e8]` (heat samples and fits),
//!   `samples_per_decade = 10`, `blocks = [-40, 10]`,
//!   `splitting = [10.0, 1e6]`.
//! * `[ladders]`: `rho = [1e-8, 1e-2]`, `rho_points = 25`, `sigma` (the
//!   exponent grid, default `0.25, 0.5, ..., 4`).
//! * `[params]`: `besov_index`, `v_alpha`, `sigma` (claimed squared-norm
//!   rate), `stride = 1`, `block_mode = "sharp"`, `ratio_cap = 10`,
//!   `residual_cap = 0.1`, `mass_ratio_cap = 10`, `liminf_tolerance = 0.1`.
//! * `[nse]`: required by the `nse` analysis, see [`NseParams`].
//! * `[expect]`: optional expected outcomes, each one a pass/fail check.

use std::path::{Path, PathBuf};

use lpdecay_core::dyadic::BlockMode;
use lpdecay_core::fit::{EquivalenceOptions, FitOptions};
use lpdecay_core::math::log_space;
use lpdecay_core::synthesis::SynthesisRecipe;
use lpdecay_core::Verdict;
use serde::{Deserialize, Serialize};

use crate::error::{Error, IoContext, Result};
use crate::nse::Integrator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Blocks,
    Besov,
    Membership,
    Heat,
    Splitting,
    Nse,
    Certify,
    Equivalence,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Blocks => "blocks",
            Analysis::Besov => "besov",
            Analysis::Membership => "membership",
            Analysis::Heat => "heat",
            Analysis::Splitting => "splitting",
            Analysis::Nse => "nse",
            Analysis::Certify => "certify",
            Analysis::Equivalence => "equivalence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// The statement the experiment checks.
    #[serde(default)]
    pub claim: String,
    /// Seeds the random-phase NSE datum.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub recipe: SynthesisRecipe,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub windows: Windows,
    #[serde(default)]
    pub ladders: Ladders,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub nse: Option<NseParams>,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Windows {
    pub time: [f64; 2],
    pub samples_per_decade: usize,
    pub blocks: [i32; 2],
    pub splitting: [f64; 2],
}

impl Default for Windows {
    fn default() -> Self {
        Windows {
            time: [1e2, 1e8],
            samples_per_decade: 10,
            blocks: [-40, 10],
            splitting: [10.0, 1e6],
        }
    }
}

impl Windows {
    /// `samples_per_decade` log-spaced times on `window`, end points included.
    pub fn times(&self, window: [f64; 2]) -> Vec<f64> {
        let decades = (window[1] / window[0]).log10();
        let count = (decades * self.samples_per_decade as f64).round() as usize + 1;
        log_space(window[0], window[1], count.max(2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ladders {
    pub rho: [f64; 2],
    pub rho_points: usize,
    /// Candidate squared-norm exponents.
    pub sigma: Vec<f64>,
}

impl Default for Ladders {
    fn default() -> Self {
        let d = EquivalenceOptions::default();
        Ladders {
            rho: [1e-8, 1e-2],
            rho_points: 25,
            sigma: d.sigma_grid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Index `b` of the ratios `2^{-bj}||Delta_j u||` for the Besov and
    /// `A` tests.
    pub besov_index: Option<f64>,
    /// `alpha` of the `V_alpha` test (ratios at index `2 alpha`).
    pub v_alpha: Option<f64>,
    /// Claimed squared-norm rate, used to compensate splitting and
    /// derivative curves.
    pub sigma: Option<f64>,
    pub stride: usize,
    pub block_mode: BlockMode,
    pub ratio_cap: f64,
    pub residual_cap: f64,
    pub mass_ratio_cap: f64,
    pub liminf_tolerance: f64,
}

impl Default for Params {
    fn default() -> Self {
        let f = FitOptions::default();
        Params {
            besov_index: None,
            v_alpha: None,
            sigma: None,
            stride: 1,
            block_mode: BlockMode::Sharp,
            ratio_cap: f.ratio_cap,
            residual_cap: f.residual_cap,
            mass_ratio_cap: 10.0,
            liminf_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NseData {
    /// [`crate::nse::anisotropic_data`] with the recipe's amplitude.
    Anisotropic,
    /// [`crate::nse::small_data`] with the recipe's amplitude and `seed`.
    Random,
    /// [`crate::nse::exact_mode_field`] at `mode`.
    ExactMode,
}

/// Navier-Stokes run on the box `[0, 2 pi / k0)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NseParams {
    pub n: usize,
    #[serde(default = "default_k0")]
    pub k0: f64,
    /// Defaults to the validity horizon `0.1 / k0^2`.
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "default_data")]
    pub data: NseData,
    /// `||u0||` (`amplitude` of the vorticity for exact modes).
    #[serde(default = "default_norm")]
    pub norm: f64,
    #[serde(default = "default_mode")]
    pub mode: [i64; 2],
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    /// Unsquared rate for the difference and gradient checks.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_t_first")]
    pub t_first: f64,
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub dt_max: Option<f64>,
    #[serde(default)]
    pub growth: Option<f64>,
    #[serde(default)]
    pub cfl: Option<f64>,
}

fn default_k0() -> f64 {
    0.01
}
fn default_data() -> NseData {
    NseData::Anisotropic
}
fn default_norm() -> f64 {
    0.1
}
fn default_mode() -> [i64; 2] {
    [3, 4]
}
fn default_integrator() -> Integrator {
    Integrator::IfRk4
}
fn default_t_first() -> f64 {
    1e-2
}
fn default_per_decade() -> usize {
    20
}

/// Expected outcomes. Every field that is set becomes a check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Expect {
    pub verdict: Option<Verdict>,
    pub sigma: Option<f64>,
    pub sigma_tolerance: Option<f64>,
    /// Common value of the three equivalence conditions.
    pub conditions: Option<bool>,
    pub besov_divergent: Option<bool>,
    pub in_besov: Option<bool>,
    pub in_script_a: Option<bool>,
    pub in_v_alpha: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).at(path)?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if self.name.trim().is_empty() {
            return bad("name must not be empty".into());
        }
        if self.analyses.is_empty() {
            return bad("no analyses requested".into());
        }
        let w = &self.windows;
        for (label, win) in [("time", w.time), ("splitting", w.splitting)] {
            if !(win[0] > 0.0 && win[1] > win[0]) {
                return bad(format!("windows.{label} must satisfy 0 < t1 < t2"));
            }
        }
        if w.samples_per_decade == 0 {
            return bad("windows.samples_per_decade must be positive".into());
        }
        if w.blocks[0] > w.blocks[1] {
            return bad("windows.blocks must satisfy j_min <= j_max".into());
        }
        let l = &self.ladders;
        if !(l.rho[0] > 0.0 && l.rho[1] > l.rho[0]) || l.rho_points < 2 {
            return bad("ladders.rho must satisfy 0 < rho1 < rho2 with at least 2 points".into());
        }
        if l.sigma.is_empty() || l.sigma.iter().any(|s| !(*s > 0.0)) {
            return bad("ladders.sigma must hold positive exponents".into());
        }
        let p = &self.params;
        for (label, v) in [("besov_index", p.besov_index), ("v_alpha", p.v_alpha), ("sigma", p.sigma)] {
            if v.is_some_and(|x| !(x > 0.0)) {
                return bad(format!("params.{label} must be positive"));
            }
        }
        if p.stride == 0 {
            return bad("params.stride must be at least 1".into());
        }
        if self.analyses.contains(&Analysis::Besov) && p.besov_index.is_none() {
            return bad("the besov analysis needs params.besov_index".into());
        }
        if self.analyses.contains(&Analysis::Membership) && p.besov_index.is_none() && p.v_alpha.is_none() {
            return bad("the membership analysis needs params.besov_index or params.v_alpha".into());
        }
        if self.analyses.contains(&Analysis::Nse) {
            let Some(nse) = &self.nse else {
                return bad("the nse analysis needs an [nse] table".into());
            };
            if self.recipe.dim() != 2 {
                return bad("the nse analysis needs a two-dimensional recipe".into());
            }
            if nse.n < 16 || !nse.n.is_power_of_two() {
                return bad(format!("nse.n = {} must be a power of two, at least 16", nse.n));
            }
            if !(nse.k0 > 0.0) || !(nse.norm > 0.0) || !(nse.t_first > 0.0) || nse.per_decade == 0 {
                return bad("nse.k0, nse.norm, nse.t_first and nse.per_decade must be positive".into());
            }
        }
        Ok(())
    }

    /// Equivalence options assembled from the windows, ladders and caps.
    pub fn equivalence_options(&self) -> EquivalenceOptions {
        EquivalenceOptions {
            sigma_grid: self.ladders.sigma.clone(),
            rho_ladder: log_space(self.ladders.rho[0], self.ladders.rho[1], self.ladders.rho_points),
            time_window: (self.windows.time[0], self.windows.time[1]),
            samples_per_decade: self.windows.samples_per_decade,
            block_window: (self.windows.blocks[0], self.windows.blocks[1]),
            stride: self.params.stride,
            block_mode: self.params.block_mode,
            mass_ratio_cap: self.params.mass_ratio_cap,
            fit: self.fit_options(),
        }
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            ratio_cap: self.params.ratio_cap,
            residual_cap: self.params.residual_cap,
            ..FitOptions::default()
        }
    }
}
