//! The experiment pipeline behind `lpdecay run`.
//!
//! Analyses run in parallel, each on its own copy of the datum, and hand
//! back their artifacts as bytes; the runner alone writes files. A
//! `manifest.json` is written for every run that got far enough to know its
//! output directory, including runs that fail.

use std::path::{Path, PathBuf};
use std::time::Instant;

use lpdecay_core::dyadic::{self, DyadicSpectrum};
use lpdecay_core::fit::{self, Exponent};
use lpdecay_core::grid::Grid;
use lpdecay_core::heat;
use lpdecay_core::synthesis::{make_v_alpha_perturbation, PerturbationReport, SynthesisRecipe};
use lpdecay_core::RadialSpectralProfile;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Analysis, ExperimentConfig, NseData};
use crate::error::{Error, IoContext, Result};
use crate::io;
use crate::nse::{self, SimConfig};

/// Exit code of a run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit code of a run in which some check failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit code of a run that could not be carried out.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the `output_dir` of the config.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisRecord {
    pub analysis: Analysis,
    pub runtime_s: f64,
    pub artifacts: Vec<String>,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub lpdecay: String,
    pub lpdecay_core: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub name: Option<String>,
    pub config_path: PathBuf,
    pub config_sha256: Option<String>,
    pub seed: Option<u64>,
    pub versions: Versions,
    pub threads: usize,
    pub analyses: Vec<AnalysisRecord>,
    pub runtime_s: f64,
    pub exit_code: i32,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output_dir: Option<PathBuf>,
    pub manifest: Manifest,
}

impl RunOutcome {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.manifest.analyses.iter().flat_map(|a| a.checks.iter())
    }
}

/// Output directory used when neither the command line nor the config
/// names one: `lpdecay-out/<config file stem>`.
pub fn default_output_dir(config_path: &Path) -> PathBuf {
    let stem = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    PathBuf::from("lpdecay-out").join(stem)
}

pub fn run(config_path: &Path, opts: &RunOptions) -> RunOutcome {
    let start = Instant::now();
    let mut manifest = Manifest {
        name: None,
        config_path: config_path.to_path_buf(),
        config_sha256: None,
        seed: None,
        versions: Versions {
            lpdecay: env!("CARGO_PKG_VERSION").into(),
            lpdecay_core: lpdecay_core::VERSION.into(),
        },
        threads: rayon::current_num_threads(),
        analyses: Vec::new(),
        runtime_s: 0.0,
        exit_code: EXIT_ERROR,
        error: None,
    };
    let mut output_dir = opts.output_dir.clone();
    let result = execute(config_path, &mut manifest, &mut output_dir);
    manifest.exit_code = match &result {
        Err(e) => {
            manifest.error = Some(e.to_string());
            EXIT_ERROR
        }
        Ok(()) if manifest.analyses.iter().any(|a| a.error.is_some()) => EXIT_ERROR,
        Ok(()) if manifest.analyses.iter().flat_map(|a| &a.checks).all(|c| c.passed) => EXIT_PASS,
        Ok(()) => EXIT_FAIL,
    };
    manifest.runtime_s = start.elapsed().as_secs_f64();
    if let Some(dir) = &output_dir {
        let written = std::fs::create_dir_all(dir)
            .at(dir)
            .and_then(|_| io::to_json(&manifest))
            .and_then(|text| io::write_text(&dir.join("manifest.json"), &text));
        if let Err(e) = written {
            manifest.error.get_or_insert_with(|| e.to_string());
            manifest.exit_code = EXIT_ERROR;
        }
    }
    RunOutcome {
        exit_code: manifest.exit_code,
        output_dir,
        manifest,
    }
}

fn execute(
    config_path: &Path,
    manifest: &mut Manifest,
    output_dir: &mut Option<PathBuf>,
) -> Result<()> {
    let bytes = match std::fs::read(config_path) {
        Ok(b) => b,
        Err(e) => {
            output_dir.get_or_insert_with(|| default_output_dir(config_path));
            return Err(Error::Io {
                path: config_path.to_path_buf(),
                source: e,
            });
        }
    };
    manifest.config_sha256 = Some(hex::encode(Sha256::digest(&bytes)));
    let parsed = std::str::from_utf8(&bytes)
        .map_err(|e| Error::ConfigInvalid(e.to_string()))
        .and_then(ExperimentConfig::from_toml);
    let cfg = match parsed {
        Ok(c) => c,
        Err(e) => {
            output_dir.get_or_insert_with(|| default_output_dir(config_path));
            return Err(e);
        }
    };
    manifest.name = Some(cfg.name.clone());
    manifest.seed = Some(cfg.seed);
    let dir = output_dir
        .get_or_insert_with(|| cfg.output_dir.clone().unwrap_or_else(|| default_output_dir(config_path)))
        .clone();
    std::fs::create_dir_all(&dir).at(&dir)?;

    let datum = Datum::build(&cfg.recipe)?;
    io::write_text(&dir.join("recipe.json"), &io::to_json(&datum.descriptor())?)?;

    let outputs: Vec<(Analysis, f64, Result<Output>)> = cfg
        .analyses
        .par_iter()
        .map(|&a| {
            let t0 = Instant::now();
            let out = run_analysis(a, &cfg, &datum);
            (a, t0.elapsed().as_secs_f64(), out)
        })
        .collect();
    for (analysis, runtime_s, out) in outputs {
        let mut record = AnalysisRecord {
            analysis,
            runtime_s,
            artifacts: Vec::new(),
            checks: Vec::new(),
            error: None,
        };
        match out {
            Ok(out) => {
                for (file, contents) in out.artifacts {
                    std::fs::write(dir.join(&file), contents).at(&dir.join(&file))?;
                    record.artifacts.push(file);
                }
                record.checks = out.checks;
            }
            Err(e) => record.error = Some(format!("{}: {e}", analysis.name())),
        }
        manifest.analyses.push(record);
    }
    Ok(())
}

/// The synthesized datum and, for perturbations, the construction report.
struct Datum {
    recipe: SynthesisRecipe,
    profile: RadialSpectralProfile,
    perturbation: Option<PerturbationReport>,
}

impl Datum {
    fn build(recipe: &SynthesisRecipe) -> Result<Self> {
        let (profile, perturbation) = match recipe {
            SynthesisRecipe::VAlphaPerturbation {
                source,
                alpha,
                epsilon,
                j0,
            } => {
                let p = make_v_alpha_perturbation(&source.build()?, *alpha, *epsilon, *j0)?;
                (p.field, Some(p.report))
            }
            other => (other.build()?, None),
        };
        Ok(Datum {
            recipe: recipe.clone(),
            profile,
            perturbation,
        })
    }

    fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({ "recipe": self.recipe, "profile": self.profile })
    }
}

#[derive(Default)]
struct Output {
    artifacts: Vec<(String, Vec<u8>)>,
    checks: Vec<Check>,
}

impl Output {
    fn file(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.artifacts.push((name.to_string(), contents.into()));
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = io::to_json(value)?;
        self.file(name, text);
        Ok(())
    }

    fn expect<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, want: Option<T>, got: T) {
        if let Some(w) = want {
            let ok = w == got;
            self.checks.push(Check::new(name, ok, format!("expected {w:?}, got {got:?}")));
        }
    }
}

fn blocks(cfg: &ExperimentConfig, d: &Datum) -> Result<DyadicSpectrum> {
    let [lo, hi] = cfg.windows.blocks;
    Ok(dyadic::dyadic_blocks_with(&d.profile, lo, hi, cfg.params.block_mode)?)
}

fn run_analysis(a: Analysis, cfg: &ExperimentConfig, d: &Datum) -> Result<Output> {
    let mut out = Output::default();
    let p = &cfg.params;
    let e = &cfg.expect;
    match a {
        Analysis::Blocks => {
            let s = blocks(cfg, d)?;
            let mut buf = Vec::new();
            io::write_blocks_csv(&mut buf, &s, p.besov_index)?;
            out.file("blocks.csv", buf);
        }
        Analysis::Besov => {
            let index = p.besov_index.expect("validated");
            let r = dyadic::besov_seminorm(&blocks(cfg, d)?, index);
            out.expect("besov_divergent", e.besov_divergent, r.divergent);
            out.json("besov.json", &r)?;
        }
        Analysis::Membership => {
            let s = blocks(cfg, d)?;
            if let Some(index) = p.besov_index {
                let m = dyadic::script_a_membership(&s, index, p.stride);
                out.expect("in_besov", e.in_besov, m.in_besov);
                out.expect("in_script_a", e.in_script_a, m.in_script_a);
                out.json("membership.json", &m)?;
            }
            if let Some(alpha) = p.v_alpha {
                let v = dyadic::v_alpha_membership(&s, alpha);
                out.checks.push(Check::new(
                    "v_alpha_inside_script_a",
                    !v.in_v_alpha || v.in_script_a,
                    format!("in_v_alpha {}, in_script_a {}", v.in_v_alpha, v.in_script_a),
                ));
                out.expect("in_v_alpha", e.in_v_alpha, v.in_v_alpha);
                out.json("v_alpha.json", &v)?;
            }
            if let Some(r) = &d.perturbation {
                out.checks.push(Check::new(
                    "perturbation_unchanged_above_j0",
                    r.unchanged_above_j0,
                    format!("j0 = {}", r.j0),
                ));
                out.checks.push(Check::new(
                    "perturbation_lower_bound",
                    r.all_lower_guaranteed,
                    format!("c = {} (c_n = {})", r.c_guaranteed, r.c_n),
                ));
                out.json("perturbation.json", r)?;
            }
        }
        Analysis::Heat => {
            let times = cfg.windows.times(cfg.windows.time);
            let prof = heat::decay_profile(&d.profile, &times)?;
            let mut buf = Vec::new();
            io::write_profile_csv(&mut buf, &prof)?;
            out.file("heat_profile.csv", buf);
        }
        Analysis::Splitting => {
            let times = cfg.windows.times(cfg.windows.splitting);
            let r = heat::fourier_splitting_check(&d.profile, p.sigma.map(Exponent::from_sigma), &times)?;
            out.checks.push(Check::new(
                "splitting_inequality",
                r.holds,
                format!("worst margin {:e}", r.worst_margin),
            ));
            if let Some(ratio) = r.compensated_ratio {
                out.checks.push(Check::new(
                    "splitting_compensated_ratio",
                    ratio <= p.ratio_cap,
                    format!("sup/inf {ratio:.4}"),
                ));
            }
            out.json("splitting.json", &r)?;
        }
        Analysis::Certify => {
            let w = cfg.windows.time;
            let prof = heat::decay_profile(&d.profile, &cfg.windows.times(w))?;
            let c = fit::fit_rate_with(&prof, (w[0], w[1]), cfg.fit_options())?;
            out.expect("verdict", e.verdict, c.verdict);
            if let Some(s) = e.sigma {
                let tol = e.sigma_tolerance.unwrap_or(0.02);
                out.checks.push(Check::new(
                    "sigma",
                    (c.sigma_hat - s).abs() <= tol,
                    format!("sigma_hat {:.6}, expected {s} +- {tol}", c.sigma_hat),
                ));
            }
            if let Some(s) = p.sigma {
                let mut reports = Vec::new();
                for l in 0..=2 {
                    let r = nse::liminf_check(&prof, 0.5 * s, l, (w[0], w[1]), p.liminf_tolerance)?;
                    out.checks.push(Check::new(
                        &format!("compensated_flat_l{l}"),
                        r.flat,
                        format!("spread {:.4}", r.compensated.spread),
                    ));
                    reports.push(r);
                }
                out.json("compensated.json", &reports)?;
            }
            out.file("certificate.txt", io::certificate_text("heat-flow certificate", &c).to_string());
            out.json("certificate.json", &c)?;
        }
        Analysis::Equivalence => {
            let r = fit::equivalence_report(&d.profile, &cfg.equivalence_options())?;
            out.checks.push(Check::new(
                "agree",
                r.agree,
                format!("cond_i {}, cond_ii {}, cond_iii {}", r.cond_i, r.cond_ii, r.cond_iii),
            ));
            out.expect("conditions", e.conditions, r.cond_i);
            let mut t = io::certificate_text("equivalence", &r.certificate);
            t.line("cond_i", r.cond_i)
                .line("cond_ii", r.cond_ii)
                .line("cond_iii", r.cond_iii)
                .line("agree", r.agree);
            if let Some(x) = &r.exponent {
                t.line("exponent_sigma", x.sigma);
            }
            out.file("equivalence.txt", t.to_string());
            out.json("equivalence.json", &r)?;
        }
        Analysis::Nse => return run_nse(cfg, d),
    }
    Ok(out)
}

fn run_nse(cfg: &ExperimentConfig, d: &Datum) -> Result<Output> {
    let mut out = Output::default();
    let np = cfg.nse.as_ref().expect("validated");
    let grid = Grid::new(2, 2.0 * std::f64::consts::PI / np.k0, np.n)?;
    let u0 = match np.data {
        NseData::Anisotropic => nse::anisotropic_data(grid, &d.profile.amplitude, np.norm)?,
        NseData::Random => nse::small_data(grid, cfg.seed, &d.profile.amplitude, np.norm)?,
        NseData::ExactMode => nse::exact_mode_field(grid, np.mode, np.norm)?,
    };
    let desk = SimConfig::desk(grid);
    let t_end = np.t_end.unwrap_or(desk.t_end);
    let sim = SimConfig {
        t_end,
        dt: np.dt.unwrap_or(desk.dt),
        dt_max: np.dt_max.unwrap_or(desk.dt_max),
        growth: np.growth.unwrap_or(desk.growth),
        cfl: np.cfl.unwrap_or(desk.cfl),
        integrator: np.integrator,
        record_times: nse::record_schedule(np.t_first, t_end, np.per_decade),
        ..desk
    };
    let trace = nse::evolve_nse(&u0, &sim)?;

    let audit = nse::energy_audit(&trace);
    out.checks.push(Check::new(
        "energy_inequality",
        audit.inequality_holds,
        format!("worst margin {:e}", audit.worst_margin),
    ));
    out.checks.push(Check::new(
        "energy_equality",
        audit.equality_holds,
        format!("residual {:e}", audit.equality_residual),
    ));
    let mut report = serde_json::json!({
        "steps": trace.steps,
        "integrator": trace.integrator,
        "max_divergence": trace.max_divergence,
        "max_transfer_defect": trace.max_transfer_defect,
        "energy_audit": audit,
    });
    if np.data == NseData::ExactMode {
        let [m1, m2] = np.mode;
        let k2 = grid.k0().powi(2) * (m1 * m1 + m2 * m2) as f64;
        let l0 = trace.u.l2[0];
        let worst = trace
            .times()
            .iter()
            .zip(&trace.u.l2)
            .map(|(t, l)| (l / (l0 * (-k2 * t).exp()) - 1.0).abs())
            .fold(0.0, f64::max);
        out.checks.push(Check::new("exact_decay", worst <= 1e-8, format!("max relative error {worst:e}")));
        report["exact_decay_error"] = worst.into();
    }
    let inverse = nse::inverse_wiegner_check(&trace)?;
    out.checks.push(Check::new(
        "inverse_wiegner",
        inverse.passes,
        format!("|sigma_u - sigma_v| = {:.4}, C_v/C_u = {:.3}", inverse.difference, inverse.constant_ratio),
    ));
    report["inverse_wiegner"] = serde_json::to_value(&inverse)?;
    if let Some(alpha) = np.alpha {
        let w = nse::wiegner_difference_check(&trace, alpha)?;
        out.checks.push(Check::new(
            "wiegner_difference",
            w.passes,
            format!("slope {:?}, target {} + {}", w.slope, w.target, w.tolerance),
        ));
        let g = nse::gradient_decay_check(&trace, alpha)?;
        out.checks.push(Check::new(
            "gradient_decay",
            g.passes,
            format!("slope {:?}, target {} +- {}", g.slope, g.target, g.tolerance),
        ));
        report["wiegner"] = serde_json::to_value(&w)?;
        report["gradient"] = serde_json::to_value(&g)?;
    }
    let mut buf = Vec::new();
    io::write_trace_csv(&mut buf, &trace)?;
    out.file("trace.csv", buf);
    let mut field = Vec::new();
    io::write_field(&mut field, &trace.final_state).map_err(|e| Error::Format(e.to_string()))?;
    out.file("final_state.algf", field);
    out.json("nse.json", &report)?;
    Ok(out)
}

/// One bundled recipe as shown by `list-recipes`.
#[derive(Debug, Clone, Serialize)]
pub struct RecipeEntry {
    pub file: String,
    pub name: String,
    pub claim: String,
    pub analyses: Vec<Analysis>,
}

/// Every `*.cfg` file in `dir`, sorted by file name.
pub fn list_recipes(dir: &Path) -> Result<Vec<RecipeEntry>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .at(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|p| {
            let c = ExperimentConfig::load(p)?;
            Ok(RecipeEntry {
                file: p.file_name().unwrap().to_string_lossy().into_owned(),
                name: c.name,
                claim: c.claim,
                analyses: c.analyses,
            })
        })
        .collect()
}

pub fn recipes_table(entries: &[RecipeEntry]) -> String {
    let w = entries.iter().map(|e| e.file.len()).max().unwrap_or(4).max(4);
    let mut s = format!("{:<w$}  claim\n", "file");
    for e in entries {
        s.push_str(&format!("{:<w$}  {}\n", e.file, e.claim));
    }
    s
}
