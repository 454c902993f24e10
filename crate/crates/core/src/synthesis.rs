//! Constructors for the witness data: power laws, the logarithmic
//! counterexample `v0`, the `V_a` perturbation and random divergence-free
//! grid fields.

use alloc::boxed::Box;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dyadic;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridField};
use crate::math::{self, sphere_area};
use crate::norms::{SpectralField, Weight};
use crate::radial::{pow2, Amplitude, DeepShells, RadialSpectralProfile, ShellSplice};

/// `A(r) = r^{2 kappa}` on `r <= cutoff`.
pub fn make_power_law(n: usize, kappa: f64, cutoff: f64) -> Result<RadialSpectralProfile> {
    RadialSpectralProfile::new(n, Amplitude::power_law(kappa, cutoff))
}

/// `A(r) = r^{-n} (ln r)^{-2}` on `r <= 1/2`.
pub fn make_log_counterexample(n: usize) -> Result<RadialSpectralProfile> {
    RadialSpectralProfile::new(n, Amplitude::LogCounterexample { dim: n })
}

pub fn make_gaussian_swirl(n: usize) -> Result<RadialSpectralProfile> {
    RadialSpectralProfile::new(n, Amplitude::GaussianSwirl)
}

/// Power law supported on `lo <= r < hi` only.
pub fn make_band_limited(n: usize, kappa: f64, lo: f64, hi: f64) -> Result<RadialSpectralProfile> {
    RadialSpectralProfile::new(
        n,
        Amplitude::Band {
            lo,
            hi,
            base: Box::new(Amplitude::power_law(kappa, hi)),
        },
    )
}

pub fn make_zero(n: usize) -> Result<RadialSpectralProfile> {
    RadialSpectralProfile::new(n, Amplitude::power_law(0.0, 1.0).scaled(0.0))
}

/// A power law `r^{2 kappa}` on `r <= cutoff` modulated by a seeded
/// log-normal factor of standard deviation `jitter` at every half octave.
///
/// The two lowest nodes are left unjittered so the extrapolation below the
/// table keeps the nominal slope `2 kappa`.
pub fn make_random_envelope(n: usize, seed: u64, kappa: f64, cutoff: f64, jitter: f64) -> Result<RadialSpectralProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = 2 * 60 + 1;
    let r = math::log_space(cutoff * pow2(-60), cutoff, nodes);
    let a = r
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let z: f64 = rng.sample(StandardNormal);
            let z = if i < 2 { 0.0 } else { z };
            x.powf(2.0 * kappa) * (jitter * z).exp()
        })
        .collect();
    RadialSpectralProfile::new(n, Amplitude::Table { r, a })
}

/// Serializable description of a synthesized radial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SynthesisRecipe {
    PowerLaw { dim: usize, kappa: f64, cutoff: f64 },
    LogCounterexample { dim: usize },
    GaussianSwirl { dim: usize },
    BandLimited { dim: usize, kappa: f64, lo: f64, hi: f64 },
    Zero { dim: usize },
    RandomEnvelope { dim: usize, seed: u64, kappa: f64, cutoff: f64, jitter: f64 },
    VAlphaPerturbation { source: Box<SynthesisRecipe>, alpha: f64, epsilon: f64, j0: i32 },
}

impl SynthesisRecipe {
    pub fn dim(&self) -> usize {
        match self {
            SynthesisRecipe::PowerLaw { dim, .. }
            | SynthesisRecipe::LogCounterexample { dim }
            | SynthesisRecipe::GaussianSwirl { dim }
            | SynthesisRecipe::BandLimited { dim, .. }
            | SynthesisRecipe::Zero { dim }
            | SynthesisRecipe::RandomEnvelope { dim, .. } => *dim,
            SynthesisRecipe::VAlphaPerturbation { source, .. } => source.dim(),
        }
    }

    pub fn build(&self) -> Result<RadialSpectralProfile> {
        match self {
            SynthesisRecipe::PowerLaw { dim, kappa, cutoff } => make_power_law(*dim, *kappa, *cutoff),
            SynthesisRecipe::LogCounterexample { dim } => make_log_counterexample(*dim),
            SynthesisRecipe::GaussianSwirl { dim } => make_gaussian_swirl(*dim),
            SynthesisRecipe::BandLimited { dim, kappa, lo, hi } => make_band_limited(*dim, *kappa, *lo, *hi),
            SynthesisRecipe::Zero { dim } => make_zero(*dim),
            SynthesisRecipe::RandomEnvelope { dim, seed, kappa, cutoff, jitter } => {
                make_random_envelope(*dim, *seed, *kappa, *cutoff, *jitter)
            }
            SynthesisRecipe::VAlphaPerturbation { source, alpha, epsilon, j0 } => {
                Ok(make_v_alpha_perturbation(&source.build()?, *alpha, *epsilon, *j0)?.field)
            }
        }
    }
}

/// Lowest shell treated individually by the perturbation; deeper shells
/// follow a single rule decided at this index.
pub const PERTURBATION_DEPTH: i32 = -64;

/// Lowest shell listed in a perturbation report.
pub const REPORT_DEPTH: i32 = -40;

/// `(omega_{n-1} (2^n - 1) / n)^{1/2}`: the value of `2^{-2aj}||Delta_j w||/eps`
/// on a replacement shell.
pub fn shell_constant(n: usize) -> f64 {
    (sphere_area(n) * (pow2(n as i32) - 1.0) / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRow {
    pub j: i32,
    pub kept: bool,
    /// `2^{-2aj}||Delta_j u0||`
    pub ratio_source: f64,
    /// `2^{-2aj}||Delta_j w||`
    pub ratio_w: f64,
    /// `2^{-2aj}||Delta_j (u0 - w)||`
    pub ratio_diff: f64,
    /// `ratio_w >= c_n eps (1 - 1e-10)`
    pub lower_ok: bool,
    /// `ratio_diff <= 2 eps`
    pub distance_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub alpha: f64,
    pub epsilon: f64,
    pub j0: i32,
    pub c_n: f64,
    /// `min(1, c_n)`: the lower constant that holds for kept and replaced
    /// shells alike.
    pub c_guaranteed: f64,
    pub rows: Vec<PerturbationRow>,
    pub replaced: usize,
    pub deep: DeepShells,
    /// Blocks above `j0` are bit-identical in `u0` and `w`.
    pub unchanged_above_j0: bool,
    pub all_lower: bool,
    pub all_lower_guaranteed: bool,
    pub all_distance: bool,
    /// Largest `ratio_diff / eps` over the reported shells.
    pub worst_distance: f64,
}

pub struct Perturbation {
    pub field: RadialSpectralProfile,
    pub report: PerturbationReport,
}

/// Builds `w = sum_j w_j` with `w_j = Delta_j u0` for `j > j0` or when
/// `2^{-2aj}||Delta_j u0|| >= eps`, and otherwise the swirl shell with
/// constant amplitude `eps^2 2^{(4a - n) j}` on `[2^j, 2^{j+1})`.
pub fn make_v_alpha_perturbation(u0: &RadialSpectralProfile, alpha: f64, epsilon: f64, j0: i32) -> Result<Perturbation> {
    if !(epsilon > 0.0) || !(alpha > 0.0) {
        return Err(Error::invalid("perturbation needs alpha > 0 and epsilon > 0"));
    }
    if j0 < PERTURBATION_DEPTH + 1 || j0 > 30 {
        return Err(Error::invalid("j0 outside the supported range"));
    }
    let n = u0.dim;
    let index = 2.0 * alpha;
    let level = |j: i32| epsilon * epsilon * ((4.0 * alpha - n as f64) * j as f64).exp2();
    let block = |f: &RadialSpectralProfile, j: i32| f.energy(pow2(j), pow2(j + 1), Weight::MASS);
    let ratio = |e: f64, j: i32| (-(index * j as f64)).exp2() * e.max(0.0).sqrt();

    let mut replaced = Vec::new();
    let mut deepest_kept = true;
    for j in PERTURBATION_DEPTH..=j0 {
        let keep = ratio(block(u0, j)?, j) >= epsilon;
        if j == PERTURBATION_DEPTH {
            deepest_kept = keep;
        }
        if !keep {
            replaced.push((j, level(j)));
        }
    }
    let deep = if deepest_kept {
        DeepShells::Keep
    } else {
        DeepShells::Geometric {
            coefficient: epsilon * epsilon,
            exponent: 4.0 * alpha - n as f64,
        }
    };
    let replaced_count = replaced.len();
    let field = RadialSpectralProfile {
        dim: n,
        amplitude: Amplitude::ShellSplice(ShellSplice {
            base: Box::new(u0.amplitude.clone()),
            replaced,
            explicit_min: PERTURBATION_DEPTH,
            deep,
        }),
        quadrature: u0.quadrature,
    };
    field.validate()?;
    let diff = RadialSpectralProfile {
        dim: n,
        amplitude: Amplitude::Difference {
            a: Box::new(u0.amplitude.clone()),
            b: Box::new(field.amplitude.clone()),
        },
        quadrature: u0.quadrature,
    };

    let c_n = shell_constant(n);
    let c_guaranteed = c_n.min(1.0);
    let mut rows = Vec::new();
    let mut all_lower_guaranteed = true;
    for j in REPORT_DEPTH.min(j0)..=j0 {
        let rs = ratio(block(u0, j)?, j);
        let rw = ratio(block(&field, j)?, j);
        let rd = ratio(block(&diff, j)?, j);
        all_lower_guaranteed &= rw >= c_guaranteed * epsilon * (1.0 - 1e-10);
        rows.push(PerturbationRow {
            j,
            kept: rs >= epsilon,
            ratio_source: rs,
            ratio_w: rw,
            ratio_diff: rd,
            lower_ok: rw >= c_n * epsilon * (1.0 - 1e-10),
            distance_ok: rd <= 2.0 * epsilon,
        });
    }
    let top = j0 + 12;
    let mut unchanged = true;
    for j in (j0 + 1)..=top {
        unchanged &= block(u0, j)?.to_bits() == block(&field, j)?.to_bits();
    }
    let worst_distance = rows.iter().map(|r| r.ratio_diff / epsilon).fold(0.0, f64::max);
    let report = PerturbationReport {
        alpha,
        epsilon,
        j0,
        c_n,
        c_guaranteed,
        replaced: replaced_count,
        deep,
        unchanged_above_j0: unchanged,
        all_lower: rows.iter().all(|r| r.lower_ok),
        all_lower_guaranteed,
        all_distance: rows.iter().all(|r| r.distance_ok),
        worst_distance,
        rows,
    };
    Ok(Perturbation { field, report })
}

/// The `V_a` verdict of a perturbation output over the default window.
pub fn perturbation_membership(p: &Perturbation) -> Result<dyadic::MembershipVerdict> {
    let s = dyadic::dyadic_blocks(&p.field, dyadic::DEFAULT_WINDOW.0, p.report.j0)?;
    Ok(dyadic::v_alpha_membership(&s, p.report.alpha))
}

/// Random real divergence-free field whose coefficient magnitudes equal
/// `envelope(|k|)^{1/2}` exactly; only directions and phases are random.
pub fn make_random_div_free(grid: Grid, seed: u64, envelope: &Amplitude) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let np = grid.points();
    let dim = grid.dim;
    let mut f = GridField::zeros(grid);
    for idx in 0..np {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for c in v.iter_mut().take(dim) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *c = Complex64::new(re, im);
        }
        let mirror = grid.mirror(idx);
        if idx == 0 || mirror <= idx || grid.is_nyquist(idx) {
            continue;
        }
        let k = grid.wavevector(idx);
        let k2: f64 = k.iter().map(|x| x * x).sum();
        let mut dot = Complex64::new(0.0, 0.0);
        for c in 0..dim {
            dot += v[c] * k[c];
        }
        for c in 0..dim {
            v[c] -= dot * (k[c] / k2);
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let target = envelope.value(k2.sqrt()).sqrt();
        if norm == 0.0 || target == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c *= target / norm;
        }
        f.set_coeff(idx, v);
        f.set_coeff(mirror, [v[0].conj(), v[1].conj(), v[2].conj()]);
    }
    f
}
