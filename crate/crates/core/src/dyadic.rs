//! Littlewood-Paley block energies, Besov seminorms and the membership tests
//! for the classes `A^{-a}_{2,oo}` and `V_a`.
//!
//! Blocks are sharp shells `2^j <= |xi| < 2^{j+1}` by default. The smooth
//! mode uses `phi(r) = chi(r/2) - chi(r)` with `chi = 1` on `r <= 3/4`,
//! `chi = 0` on `r >= 4/3` and a `cos^2` transition, so `phi` is supported in
//! `[3/4, 8/3]`; the smooth block energy is `int phi(|xi|/2^j)^2 |u^|^2`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{SpectralField, Weight};
use crate::radial::pow2;

/// Default analysis window for radial data.
pub const DEFAULT_WINDOW: (i32, i32) = (-40, 10);

/// Absolute tolerance for the membership constants after normalizing the
/// field to unit energy.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Per-block growth of the ratio `2^{-a j} ||Delta_j u||` (in `log2`) above
/// which the supremum is considered to be still increasing at `j_min`.
const DIVERGENCE_SLOPE: f64 = 0.02;
const DIVERGENCE_SPAN: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BlockMode {
    #[default]
    Sharp,
    Smooth,
}

/// `j -> ||Delta_j u||^2` over `[j_min, j_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicSpectrum {
    pub j_min: i32,
    pub j_max: i32,
    pub mode: BlockMode,
    pub block_energy: Vec<f64>,
    /// `||u||^2`.
    pub total_mass: f64,
    /// Mass outside the window (sharp mode), `||u||^2 - sum_j block_energy`.
    pub truncated_mass: f64,
}

impl DyadicSpectrum {
    /// A spectrum given directly by its blocks; the total mass is their sum.
    pub fn from_blocks(j_min: i32, block_energy: Vec<f64>) -> Self {
        let j_max = j_min + block_energy.len() as i32 - 1;
        let total_mass = crate::math::pairwise_sum(&block_energy);
        DyadicSpectrum {
            j_min,
            j_max,
            mode: BlockMode::Sharp,
            block_energy,
            total_mass,
            truncated_mass: 0.0,
        }
    }

    pub fn indices(&self) -> core::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// `||Delta_j u||^2`, zero outside the window.
    pub fn energy(&self, j: i32) -> f64 {
        if j < self.j_min || j > self.j_max {
            0.0
        } else {
            self.block_energy[(j - self.j_min) as usize]
        }
    }

    pub fn block_norm(&self, j: i32) -> f64 {
        self.energy(j).max(0.0).sqrt()
    }

    /// `2^{-index j} ||Delta_j u||`.
    pub fn ratio(&self, j: i32, index: f64) -> f64 {
        (-(index * j as f64)).exp2() * self.block_norm(j)
    }

    pub fn window_sum(&self) -> f64 {
        crate::math::pairwise_sum(&self.block_energy)
    }

    fn norm(&self) -> f64 {
        self.total_mass.max(0.0).sqrt()
    }
}

fn chi(r: f64) -> f64 {
    const A: f64 = 0.75;
    const B: f64 = 4.0 / 3.0;
    if r <= A {
        1.0
    } else if r >= B {
        0.0
    } else {
        let c = (FRAC_PI_2 * (r - A) / (B - A)).cos();
        c * c
    }
}

/// The smooth Littlewood-Paley symbol `phi(r) = chi(r/2) - chi(r)`.
pub fn smooth_symbol(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// Sharp-shell block energies over `[j_min, j_max]`.
pub fn dyadic_blocks<F: SpectralField>(u: &F, j_min: i32, j_max: i32) -> Result<DyadicSpectrum> {
    dyadic_blocks_with(u, j_min, j_max, BlockMode::Sharp)
}

pub fn dyadic_blocks_with<F: SpectralField>(
    u: &F,
    j_min: i32,
    j_max: i32,
    mode: BlockMode,
) -> Result<DyadicSpectrum> {
    if j_min > j_max {
        return Err(Error::invalid("dyadic window needs j_min <= j_max"));
    }
    let min = u.min_frequency();
    if pow2(j_min) < min {
        return Err(Error::WindowUnresolvable { j: j_min, min });
    }
    let mut blocks = Vec::with_capacity((j_max - j_min + 1) as usize);
    for j in j_min..=j_max {
        let e = match mode {
            BlockMode::Sharp => u.energy(pow2(j), pow2(j + 1), Weight::MASS)?,
            BlockMode::Smooth => {
                let s = pow2(j);
                let g = move |r: f64| {
                    let p = smooth_symbol(r / s);
                    p * p
                };
                let breaks = [0.75 * s, 4.0 / 3.0 * s, 1.5 * s, 8.0 / 3.0 * s];
                u.energy_weighted(0.75 * s, 8.0 / 3.0 * s, &g, &breaks)?
            }
        };
        blocks.push(e);
    }
    let total_mass = u.total_energy()?;
    let sum = crate::math::pairwise_sum(&blocks);
    Ok(DyadicSpectrum {
        j_min,
        j_max,
        mode,
        block_energy: blocks,
        total_mass,
        truncated_mass: match mode {
            BlockMode::Sharp => (total_mass - sum).max(0.0),
            BlockMode::Smooth => f64::NAN,
        },
    })
}

/// Best constant in `||Delta_j u|| <= C 2^{a j}` over the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovReport {
    pub alpha: f64,
    pub seminorm: f64,
    pub arg_sup: i32,
    /// Set when the ratio is still growing at the bottom of the window, so
    /// the windowed supremum underestimates an infinite seminorm.
    pub divergent: bool,
    pub ratios: Vec<(i32, f64)>,
}

pub fn besov_seminorm(s: &DyadicSpectrum, alpha: f64) -> BesovReport {
    let ratios: Vec<(i32, f64)> = s.indices().map(|j| (j, s.ratio(j, alpha))).collect();
    let (arg_sup, seminorm) = ratios
        .iter()
        .fold((s.j_min, -1.0), |acc, &(j, r)| if r > acc.1 { (j, r) } else { acc });
    let mut divergent = false;
    if s.j_max - s.j_min >= DIVERGENCE_SPAN {
        let low = s.ratio(s.j_min, alpha);
        let high = s.ratio(s.j_min + DIVERGENCE_SPAN, alpha);
        divergent = low > 0.0 && low > (DIVERGENCE_SLOPE * DIVERGENCE_SPAN as f64).exp2() * high;
    }
    BesovReport {
        alpha,
        seminorm: seminorm.max(0.0),
        arg_sup,
        divergent,
        ratios,
    }
}

/// Outcome of the dyadic membership tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    /// Exponent `b` in the ratios `2^{-b j} ||Delta_j u||`.
    pub index: f64,
    pub in_besov: bool,
    pub besov_constant: f64,
    pub in_script_a: bool,
    pub script_a_c: f64,
    pub stride: usize,
    pub anchor: i32,
    /// Largest ratio within each stride `[anchor-(k+1)M, anchor-kM)`.
    pub stride_table: Vec<f64>,
    pub in_v_alpha: bool,
    pub v_delta: f64,
    pub v_j0: Option<i32>,
    pub ratios: Vec<(i32, f64)>,
    /// Always true: every verdict is limited to the finite window.
    pub window_limited: bool,
}

/// Membership in `A^{-a}_{2,oo}` with ratios `2^{-a j}||Delta_j u||` and
/// strides `[-(k+1)m, -km)` of length `m` below 0.
pub fn script_a_membership(s: &DyadicSpectrum, alpha: f64, m: usize) -> MembershipVerdict {
    script_a_anchored(s, alpha, m, 0)
}

pub fn script_a_anchored(s: &DyadicSpectrum, alpha: f64, m: usize, anchor: i32) -> MembershipVerdict {
    let besov = besov_seminorm(s, alpha);
    let norm = s.norm();
    let m = m.max(1) as i32;
    let mut table = Vec::new();
    let mut k = 0;
    loop {
        let hi = anchor - k * m - 1;
        let lo = anchor - (k + 1) * m;
        if lo < s.j_min {
            break;
        }
        if hi > s.j_max {
            k += 1;
            continue;
        }
        let best = (lo..=hi).map(|j| s.ratio(j, alpha)).fold(0.0, f64::max);
        table.push(best);
        k += 1;
    }
    let c = if table.is_empty() {
        0.0
    } else {
        table.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let in_besov = norm > 0.0 && !besov.divergent;
    let in_script_a = in_besov && table.len() >= 5 && c > MEMBERSHIP_TOL * norm;
    MembershipVerdict {
        index: alpha,
        in_besov,
        besov_constant: besov.seminorm,
        in_script_a,
        script_a_c: c,
        stride: m as usize,
        anchor,
        stride_table: table,
        in_v_alpha: false,
        v_delta: 0.0,
        v_j0: None,
        ratios: besov.ratios,
        window_limited: true,
    }
}

/// Minimum number of blocks `[j_min, j0]` must contain for `j0` to be an
/// admissible threshold in the `V_a` search.
pub const V_MIN_BLOCKS: i32 = 5;

/// Membership in `V_a`: `u` in `B^{-2a}_{2,oo}` and
/// `||Delta_j u|| >= delta 2^{2 a j}` for all `j <= j0`.
///
/// The search runs over thresholds `j0` leaving at least [`V_MIN_BLOCKS`]
/// blocks below them and reports the largest `j0` attaining the best `delta`.
/// The Besov and `A` fields are filled at index `2a` with unit strides
/// ending at that `j0`.
pub fn v_alpha_membership(s: &DyadicSpectrum, alpha: f64) -> MembershipVerdict {
    let index = 2.0 * alpha;
    let norm = s.norm();
    let first = s.j_min + V_MIN_BLOCKS - 1;
    let mut running = f64::INFINITY;
    for j in s.j_min..first.min(s.j_max + 1) {
        running = running.min(s.ratio(j, index));
    }
    let mut deltas = Vec::new();
    for j0 in first..=s.j_max {
        running = running.min(s.ratio(j0, index));
        deltas.push((j0, running));
    }
    let best = deltas.iter().map(|d| d.1).fold(0.0, f64::max);
    let j0 = deltas
        .iter()
        .rev()
        .find(|d| best > 0.0 && d.1 >= best * (1.0 - 1e-9))
        .map(|d| d.0);
    let mut v = script_a_anchored(s, index, 1, j0.unwrap_or(s.j_min) + 1);
    v.in_v_alpha = v.in_besov && j0.is_some() && norm > 0.0 && best > MEMBERSHIP_TOL * norm;
    v.v_delta = best;
    v.v_j0 = j0;
    v
}

/// `sup_{j <= j0} 2^{-2 a j}||Delta_j w|| + (sum_{j > j0} ||Delta_j w||^2)^{1/2}`.
pub fn equivalent_norm(s: &DyadicSpectrum, alpha: f64, j0: i32) -> Result<f64> {
    if j0 < s.j_min || j0 > s.j_max {
        return Err(Error::invalid("j0 must lie in the dyadic window"));
    }
    let low = (s.j_min..=j0).map(|j| s.ratio(j, 2.0 * alpha)).fold(0.0, f64::max);
    let high: Vec<f64> = ((j0 + 1)..=s.j_max).map(|j| s.energy(j)).collect();
    Ok(low + crate::math::pairwise_sum(&high).sqrt())
}
