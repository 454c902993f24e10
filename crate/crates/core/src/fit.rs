//! Decay-rate estimation and certification.
//!
//! A decay profile is summarized by a [`DecayCertificate`]: the fitted rate
//! `s` of `||u(t)||^2 ~ (1+t)^{-s}`, the windowed constants of the
//! compensated curve `(1+t)^s ||u(t)||^2`, and a verdict.

use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::dyadic::{self, BlockMode};
use crate::error::{Error, Result};
use crate::heat::{decay_profile, DecayProfile};
use crate::math;
use crate::norms::{low_freq_mass, SpectralField};
use crate::radial::RadialSpectralProfile;

/// A decay exponent. The canonical value `s` is the rate of the squared
/// norm, `||e^{t Delta} u0||^2 ~ (1+t)^{-s}`; equivalently the blocks obey
/// `||Delta_j u0|| ~ 2^{s j}` and the low-frequency mass `~ rho^{2s}`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(into = "ConventionRecord", from = "ConventionRecord")]
pub struct Exponent(f64);

impl Exponent {
    pub fn from_sigma(s: f64) -> Self {
        Exponent(s)
    }

    /// Index used with the squared-norm rate `(1+t)^{-a}` and blocks `2^{a j}`.
    pub fn from_alpha_31(a: f64) -> Self {
        Exponent(a)
    }

    /// Index used with the unsquared rate `||u(t)|| ~ (1+t)^{-a}` and blocks
    /// `2^{2 a j}`.
    pub fn from_alpha_32(a: f64) -> Self {
        Exponent(2.0 * a)
    }

    /// From the exponent of `int_{|xi| <= rho} |u0^|^2 ~ rho^m`.
    pub fn from_mass_exponent(m: f64) -> Self {
        Exponent(0.5 * m)
    }

    /// Power law `A(r) = r^{2 kappa}` in `R^n`.
    pub fn of_power_law(kappa: f64, n: usize) -> Self {
        Exponent(kappa + n as f64 / 2.0)
    }

    pub fn sigma(self) -> f64 {
        self.0
    }

    pub fn alpha_31(self) -> f64 {
        self.0
    }

    pub fn alpha_32(self) -> f64 {
        0.5 * self.0
    }

    pub fn mass_exponent(self) -> f64 {
        2.0 * self.0
    }
}

/// The same exponent in every convention, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionRecord {
    pub sigma: f64,
    pub alpha_31: f64,
    pub alpha_32: f64,
    pub mass_exponent: f64,
}

impl From<Exponent> for ConventionRecord {
    fn from(e: Exponent) -> Self {
        ConventionRecord {
            sigma: e.sigma(),
            alpha_31: e.alpha_31(),
            alpha_32: e.alpha_32(),
            mass_exponent: e.mass_exponent(),
        }
    }
}

impl From<ConventionRecord> for Exponent {
    fn from(r: ConventionRecord) -> Self {
        Exponent(r.sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TwoSided,
    UpperOnly,
    NoAlgebraicRate,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Verdict::TwoSided => "two_sided",
            Verdict::UpperOnly => "upper_only",
            Verdict::NoAlgebraicRate => "no_algebraic_rate",
        })
    }
}

/// Caps used to turn a compensated curve into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Largest admissible `C_upper / c_lower`.
    pub ratio_cap: f64,
    /// Largest admissible deviation of `ln((1+t)^s E)` from its mean.
    pub residual_cap: f64,
    pub min_decades: f64,
    /// Below this fitted rate the decay is not algebraic.
    pub min_rate: f64,
    /// The local rate on the first third of the window exceeding this
    /// multiple of the rate on the last third signals a slowing, sub-algebraic
    /// decay.
    pub drift_ratio: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            ratio_cap: 10.0,
            residual_cap: 0.1,
            min_decades: 1.0,
            min_rate: 0.02,
            drift_ratio: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub sigma_hat: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub residual: f64,
    pub window: (f64, f64),
    pub verdict: Verdict,
    pub convention: ConventionRecord,
    pub samples: usize,
    /// Local rates fitted on the first and last thirds of the window.
    pub local_rates: (f64, f64),
}

impl DecayCertificate {
    pub fn exponent(&self) -> Exponent {
        Exponent(self.sigma_hat)
    }

    pub fn ratio(&self) -> f64 {
        if self.c_lower > 0.0 {
            self.c_upper / self.c_lower
        } else {
            f64::INFINITY
        }
    }
}

/// Fits the squared `L^2` norm of a decay profile over `window`.
pub fn fit_rate(profile: &DecayProfile, window: (f64, f64)) -> Result<DecayCertificate> {
    let e: Vec<f64> = profile.l2.iter().map(|x| x * x).collect();
    fit_series(&profile.times, &e, window, FitOptions::default())
}

pub fn fit_rate_with(profile: &DecayProfile, window: (f64, f64), opts: FitOptions) -> Result<DecayCertificate> {
    let e: Vec<f64> = profile.l2.iter().map(|x| x * x).collect();
    fit_series(&profile.times, &e, window, opts)
}

fn window_indices(times: &[f64], window: (f64, f64)) -> Vec<usize> {
    let (a, b) = (window.0 * (1.0 - 1e-12), window.1 * (1.0 + 1e-12));
    (0..times.len()).filter(|&i| times[i] >= a && times[i] <= b).collect()
}

fn check_window(window: (f64, f64), min_decades: f64) -> Result<()> {
    let decades = if window.0 > 0.0 && window.1 > window.0 {
        (window.1 / window.0).log10()
    } else {
        0.0
    };
    if decades < min_decades - 1e-12 {
        return Err(Error::WindowTooShort { decades, required: min_decades });
    }
    Ok(())
}

/// Least-squares rate of `ln E` against `ln(1+t)`; `E` are squared norms.
pub fn fit_series(times: &[f64], energy: &[f64], window: (f64, f64), opts: FitOptions) -> Result<DecayCertificate> {
    check_window(window, opts.min_decades)?;
    let idx = window_indices(times, window);
    if idx.len() < 3 {
        return Err(Error::WindowTooShort { decades: 0.0, required: opts.min_decades });
    }
    let pos: Vec<usize> = idx.iter().copied().filter(|&i| energy[i] > 0.0).collect();
    let x: Vec<f64> = pos.iter().map(|&i| (1.0 + times[i]).ln()).collect();
    let y: Vec<f64> = pos.iter().map(|&i| energy[i].ln()).collect();
    let sigma_hat = if pos.len() >= 2 { -math::linear_fit(&x, &y).0 } else { f64::INFINITY };
    let third = (pos.len() / 3).max(2);
    let local = |r: core::ops::Range<usize>| {
        if r.len() >= 2 && pos.len() >= 2 {
            -math::linear_fit(&x[r.clone()], &y[r]).0
        } else {
            f64::NAN
        }
    };
    let local_rates = if pos.len() >= 4 {
        (local(0..third), local(pos.len() - third..pos.len()))
    } else {
        (f64::NAN, f64::NAN)
    };
    let zeros = pos.len() < idx.len();
    let (c_lower, c_upper, residual) = if zeros || !sigma_hat.is_finite() {
        (0.0, f64::INFINITY, f64::INFINITY)
    } else {
        compensated(&x, &y, sigma_hat)
    };
    let drift = local_rates.0 > opts.drift_ratio * local_rates.1;
    let verdict = if zeros {
        Verdict::UpperOnly
    } else if sigma_hat <= opts.min_rate || drift {
        Verdict::NoAlgebraicRate
    } else if c_upper / c_lower <= opts.ratio_cap && residual <= opts.residual_cap {
        Verdict::TwoSided
    } else {
        Verdict::UpperOnly
    };
    Ok(DecayCertificate {
        sigma_hat,
        c_lower,
        c_upper,
        residual,
        window,
        verdict,
        convention: Exponent(sigma_hat).into(),
        samples: idx.len(),
        local_rates,
    })
}

// inf, sup and log-flatness of (1+t)^s E given x = ln(1+t), y = ln E
fn compensated(x: &[f64], y: &[f64], s: f64) -> (f64, f64, f64) {
    let logs: Vec<f64> = x.iter().zip(y).map(|(x, y)| y + s * x).collect();
    let mean = math::pairwise_sum(&logs) / logs.len() as f64;
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let residual = logs.iter().map(|l| (l - mean).abs()).fold(0.0, f64::max);
    (lo.exp(), hi.exp(), residual)
}

/// Compensated curve `t^{a + l/2} ||D^l u(t)||` over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensatedReport {
    pub l: usize,
    pub alpha: f64,
    pub window: (f64, f64),
    pub inf: f64,
    pub sup: f64,
    /// `sup / inf - 1`.
    pub spread: f64,
    /// Compensated value at the end of the window over its value at the start.
    pub growth: f64,
    /// Fitted slope of `ln ||D^l u||` against `ln t`.
    pub slope: f64,
    pub positive: bool,
    pub window_limited: bool,
}

/// `t^{a + l/2} ||D^l u(t)||` with the unsquared rate `a`.
pub fn compensated_curve(profile: &DecayProfile, alpha: f64, l: usize, window: (f64, f64)) -> Result<CompensatedReport> {
    check_window(window, 0.0)?;
    let idx = window_indices(&profile.times, window);
    if idx.len() < 2 {
        return Err(Error::WindowTooShort { decades: 0.0, required: 1.0 });
    }
    let series = profile.series(l);
    let p = alpha + l as f64 / 2.0;
    let vals: Vec<f64> = idx.iter().map(|&i| profile.times[i].powf(p) * series[i]).collect();
    let inf = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let sup = vals.iter().copied().fold(0.0, f64::max);
    let pos: Vec<usize> = idx.iter().copied().filter(|&i| series[i] > 0.0).collect();
    let slope = if pos.len() >= 2 {
        let x: Vec<f64> = pos.iter().map(|&i| profile.times[i].ln()).collect();
        let y: Vec<f64> = pos.iter().map(|&i| series[i].ln()).collect();
        math::linear_fit(&x, &y).0
    } else {
        f64::NAN
    };
    Ok(CompensatedReport {
        l,
        alpha,
        window,
        inf,
        sup,
        spread: if inf > 0.0 { sup / inf - 1.0 } else { f64::INFINITY },
        growth: if vals[0] > 0.0 { vals[vals.len() - 1] / vals[0] } else { f64::INFINITY },
        slope,
        positive: inf > 0.0,
        window_limited: true,
    })
}

/// Parameters of [`equivalence_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EquivalenceOptions {
    /// Candidate exponents `s` (squared-norm convention).
    pub sigma_grid: Vec<f64>,
    pub rho_ladder: Vec<f64>,
    pub time_window: (f64, f64),
    pub samples_per_decade: usize,
    pub block_window: (i32, i32),
    pub stride: usize,
    pub block_mode: BlockMode,
    /// Largest admissible `sup / inf` of `rho^{-2s} mass(rho)`.
    pub mass_ratio_cap: f64,
    pub fit: FitOptions,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            sigma_grid: (1..=16).map(|i| 0.25 * i as f64).collect(),
            rho_ladder: math::log_space(1e-8, 1e-2, 25),
            time_window: (1e2, 1e8),
            samples_per_decade: 10,
            block_window: dyadic::DEFAULT_WINDOW,
            stride: 1,
            block_mode: BlockMode::Sharp,
            mass_ratio_cap: 10.0,
            fit: FitOptions::default(),
        }
    }
}

/// The three conditions evaluated at one exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub exponent: ConventionRecord,
    /// Two-sided heat decay at rate `s`.
    pub cond_i: bool,
    /// `rho^{-2s} mass(rho)` bounded above and below on the ladder.
    pub cond_ii: bool,
    /// Dyadic membership at index `s`.
    pub cond_iii: bool,
    pub heat_ratio: f64,
    pub mass_inf: f64,
    pub mass_sup: f64,
    pub script_a_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub certificate: DecayCertificate,
    /// Exponent at which the conditions were evaluated (the fitted rate
    /// snapped to the grid), or `None` when no two-sided rate was found and
    /// every grid point was tried.
    pub exponent: Option<ConventionRecord>,
    pub cond_i: bool,
    pub cond_ii: bool,
    pub cond_iii: bool,
    pub agree: bool,
    pub rows: Vec<ConditionRow>,
    pub window_limited: bool,
}

fn heat_samples(u0: &RadialSpectralProfile, opts: &EquivalenceOptions) -> Result<DecayProfile> {
    let (a, b) = opts.time_window;
    let n = ((b / a).log10() * opts.samples_per_decade as f64).round() as usize + 1;
    decay_profile(u0, &math::log_space(a, b, n.max(3)))
}

fn condition_row(
    u0: &RadialSpectralProfile,
    heat: &DecayProfile,
    blocks: &dyadic::DyadicSpectrum,
    s: Exponent,
    opts: &EquivalenceOptions,
) -> Result<ConditionRow> {
    let sig = s.sigma();
    // (i): compensated heat energy bounded above and below
    let e: Vec<(f64, f64)> = heat
        .times
        .iter()
        .zip(&heat.l2)
        .map(|(t, v)| ((1.0 + t).ln(), v * v))
        .collect();
    let heat_ratio = if e.iter().any(|p| !(p.1 > 0.0)) {
        f64::INFINITY
    } else {
        let x: Vec<f64> = e.iter().map(|p| p.0).collect();
        let y: Vec<f64> = e.iter().map(|p| p.1.ln()).collect();
        let (lo, hi, _) = compensated(&x, &y, sig);
        hi / lo
    };
    // (ii): low-frequency mass on the ladder
    let mut q = Vec::with_capacity(opts.rho_ladder.len());
    for &rho in &opts.rho_ladder {
        q.push((rho.powf(-s.mass_exponent()), low_freq_mass(u0, rho)?));
    }
    let vals: Vec<f64> = q.iter().map(|p| p.0 * p.1).collect();
    let mass_inf = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let mass_sup = vals.iter().copied().fold(0.0, f64::max);
    let cond_ii = mass_inf > 0.0 && mass_sup / mass_inf <= opts.mass_ratio_cap;
    // (iii): dyadic membership
    let v = dyadic::script_a_membership(blocks, sig, opts.stride);
    Ok(ConditionRow {
        exponent: s.into(),
        cond_i: heat_ratio <= opts.fit.ratio_cap,
        cond_ii,
        cond_iii: v.in_script_a,
        heat_ratio,
        mass_inf,
        mass_sup,
        script_a_c: v.script_a_c,
    })
}

/// The three conditions at a single exponent.
pub fn equivalence_at(u0: &RadialSpectralProfile, s: Exponent, opts: &EquivalenceOptions) -> Result<ConditionRow> {
    let heat = heat_samples(u0, opts)?;
    let blocks = dyadic::dyadic_blocks_with(u0, opts.block_window.0, opts.block_window.1, opts.block_mode)?;
    condition_row(u0, &heat, &blocks, s, opts)
}

/// Evaluates the heat-decay, low-frequency-mass and dyadic conditions.
///
/// When the heat flow has a two-sided certificate, the fitted rate is snapped
/// to the nearest grid exponent and the other two conditions are evaluated
/// there. Otherwise every grid exponent is tried and a condition counts as
/// satisfied if it holds at any of them.
pub fn equivalence_report(u0: &RadialSpectralProfile, opts: &EquivalenceOptions) -> Result<EquivalenceReport> {
    let lad = &opts.rho_ladder;
    let decades = match (lad.first(), lad.last()) {
        (Some(a), Some(b)) if *a > 0.0 && b > a => (b / a).log10(),
        _ => 0.0,
    };
    if decades < 5.0 - 1e-12 {
        return Err(Error::WindowTooShort { decades, required: 5.0 });
    }
    if opts.sigma_grid.is_empty() {
        return Err(Error::invalid("empty exponent grid"));
    }
    let heat = heat_samples(u0, opts)?;
    let certificate = fit_rate_with(&heat, opts.time_window, opts.fit)?;
    let blocks = dyadic::dyadic_blocks_with(u0, opts.block_window.0, opts.block_window.1, opts.block_mode)?;
    if certificate.verdict == Verdict::TwoSided {
        let snapped = opts
            .sigma_grid
            .iter()
            .copied()
            .fold(f64::NAN, |best, s| {
                if best.is_nan() || (s - certificate.sigma_hat).abs() < (best - certificate.sigma_hat).abs() {
                    s
                } else {
                    best
                }
            });
        let row = condition_row(u0, &heat, &blocks, Exponent(snapped), opts)?;
        let (i, ii, iii) = (true, row.cond_ii, row.cond_iii);
        Ok(EquivalenceReport {
            certificate,
            exponent: Some(Exponent(snapped).into()),
            cond_i: i,
            cond_ii: ii,
            cond_iii: iii,
            agree: i == ii && ii == iii,
            rows: alloc::vec![row],
            window_limited: true,
        })
    } else {
        let mut rows = Vec::with_capacity(opts.sigma_grid.len());
        for &s in &opts.sigma_grid {
            rows.push(condition_row(u0, &heat, &blocks, Exponent(s), opts)?);
        }
        let ii = rows.iter().any(|r| r.cond_ii);
        let iii = rows.iter().any(|r| r.cond_iii);
        Ok(EquivalenceReport {
            certificate,
            exponent: None,
            cond_i: false,
            cond_ii: ii,
            cond_iii: iii,
            agree: !ii && !iii,
            rows,
            window_limited: true,
        })
    }
}
