//! Radially structured divergence-free data described by their squared
//! spectral amplitude `A(r) = |u0^(xi)|^2`, `r = |xi|`.
//!
//! The realized vector field is `A(r)^{1/2} e(xi)` with the swirl direction
//! `e(xi) = (-i xi_2, i xi_1, 0, ..., 0) / |xi|`. Every quantity the crate
//! needs reduces to a one-dimensional integral
//! `omega_{n-1} int A(r) r^{n-1} W(r) dr`, which is evaluated in the variable
//! `x = ln r` with composite Gauss-Legendre panels, plus an analytic tail on
//! `[0, floor]`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{self, Integral, PanelRule};

/// Squared spectral amplitude of a radial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Amplitude {
    /// `r^{2 kappa}` on `r <= cutoff`.
    PowerLaw { kappa: f64, cutoff: f64 },
    /// `r^{-n} (ln r)^{-2}` on `r <= 1/2`.
    LogCounterexample { dim: usize },
    /// `r^2 exp(-r^2)`.
    GaussianSwirl,
    /// `base` restricted to `lo <= r < hi`.
    Band { lo: f64, hi: f64, base: Box<Amplitude> },
    /// Log-log interpolated samples; power-law extrapolation below the first
    /// node and zero above the last one.
    Table { r: Vec<f64>, a: Vec<f64> },
    Scaled { factor: f64, base: Box<Amplitude> },
    /// `base(r) exp(-2 t r^2)`, the heat flow at time `t`.
    HeatEvolved { t: f64, base: Box<Amplitude> },
    /// Stokes flow at time `t` with datum `initial` and separable forcing
    /// `phi(s) g` where `g` has squared amplitude `forcing`.
    Duhamel {
        t: f64,
        initial: Box<Amplitude>,
        forcing: Box<Amplitude>,
        phi: TimeFactor,
    },
    ShellSplice(ShellSplice),
    /// `(sqrt(a) - sqrt(b))^2`, the amplitude of the difference of two
    /// swirl fields.
    Difference { a: Box<Amplitude>, b: Box<Amplitude> },
}

/// Scalar time profile of a separable forcing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeFactor {
    Zero,
    /// `exp(-rate t)`
    Exponential { rate: f64 },
    /// `(1+t)^{-power}`
    Algebraic { power: f64 },
    /// `t^{-power}`; only integrable at 0 for `power < 1`.
    Singular { power: f64 },
}

impl TimeFactor {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeFactor::Zero => 0.0,
            TimeFactor::Exponential { rate } => (-rate * t).exp(),
            TimeFactor::Algebraic { power } => (1.0 + t).powf(-power),
            TimeFactor::Singular { power } => t.powf(-power),
        }
    }

    /// `int_0^t |phi|`, or an error if `phi` is not integrable at 0.
    pub fn integral(&self, t: f64) -> Result<f64> {
        Ok(match *self {
            TimeFactor::Zero => 0.0,
            TimeFactor::Exponential { rate } => {
                if rate.abs() < 1e-300 {
                    t
                } else {
                    (1.0 - (-rate * t).exp()) / rate
                }
            }
            TimeFactor::Algebraic { power } => {
                if (power - 1.0).abs() < 1e-14 {
                    (1.0 + t).ln()
                } else {
                    ((1.0 + t).powf(1.0 - power) - 1.0) / (1.0 - power)
                }
            }
            TimeFactor::Singular { power } => {
                if power >= 1.0 {
                    return Err(Error::QuadratureDivergence(alloc::format!(
                        "forcing factor t^-{power} is not integrable at t = 0"
                    )));
                }
                t.powf(1.0 - power) / (1.0 - power)
            }
        })
    }
}

/// `psi(t, r) = int_0^t exp(-(t-s) r^2) phi(s) ds`.
pub(crate) fn duhamel_kernel(phi: &TimeFactor, t: f64, r: f64) -> Result<Integral> {
    if matches!(phi, TimeFactor::Zero) || t <= 0.0 {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    phi.integral(t)?;
    let k = r * r;
    let f = |s: f64| (-(t - s) * k).exp() * phi.value(s);
    // The kernel has a layer of width 1/k at s = t and phi varies on unit
    // scale near s = 0; a lone Kronrod rule on a long interval samples
    // neither, so break geometrically away from both ends.
    let mut breaks = alloc::vec![0.0, t];
    let mut push = |w0: f64| {
        let mut w = w0;
        while w < t {
            breaks.push(w);
            breaks.push(t - w);
            w *= 8.0;
        }
    };
    push(1.0f64.min(t));
    if k > 0.0 {
        push(1.0 / k);
    }
    breaks.retain(|b| *b >= 0.0 && *b <= t);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    breaks.dedup();
    let mut value = Vec::with_capacity(breaks.len());
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let part = math::integrate_adaptive(f, w[0], w[1], 1e-300, 1e-11, 50);
        value.push(part.value);
        error += part.error;
    }
    Ok(Integral {
        value: math::pairwise_sum(&value),
        error,
    })
}

/// Rule for the shells of a [`ShellSplice`] that lie below `explicit_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DeepShells {
    /// Keep the base amplitude.
    Keep,
    /// Constant level `coefficient * 2^{exponent j}` on shell `j`.
    Geometric { coefficient: f64, exponent: f64 },
}

/// A base amplitude with some dyadic shells `[2^j, 2^{j+1})` replaced by
/// constant levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellSplice {
    pub base: Box<Amplitude>,
    /// `(j, level)`, sorted by `j`.
    pub replaced: Vec<(i32, f64)>,
    pub explicit_min: i32,
    pub deep: DeepShells,
}

impl ShellSplice {
    fn level(&self, j: i32) -> Option<f64> {
        if j < self.explicit_min {
            return match self.deep {
                DeepShells::Keep => None,
                DeepShells::Geometric { coefficient, exponent } => {
                    Some(coefficient * (exponent * j as f64).exp2())
                }
            };
        }
        self.replaced
            .binary_search_by_key(&j, |p| p.0)
            .ok()
            .map(|i| self.replaced[i].1)
    }
}

/// Index `j` of the sharp dyadic shell `2^j <= r < 2^{j+1}`.
pub fn shell_index(r: f64) -> i32 {
    let mut j = r.log2().floor() as i32;
    if pow2(j) > r {
        j -= 1;
    }
    if pow2(j + 1) <= r {
        j += 1;
    }
    j
}

pub(crate) fn pow2(j: i32) -> f64 {
    2f64.powi(j)
}

// int_a^b s^m ds
fn monomial_integral(m: f64, a: f64, b: f64) -> f64 {
    if (m + 1.0).abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(m + 1.0) - a.powf(m + 1.0)) / (m + 1.0)
    }
}

fn divergence(what: &str, m: f64) -> Error {
    Error::QuadratureDivergence(alloc::format!(
        "low-frequency tail of {what} diverges for moment r^{m}"
    ))
}

impl Amplitude {
    pub fn power_law(kappa: f64, cutoff: f64) -> Self {
        Amplitude::PowerLaw { kappa, cutoff }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Amplitude::Scaled { factor, base: Box::new(self) }
    }

    pub fn heat_evolved(self, t: f64) -> Self {
        if t == 0.0 {
            return self;
        }
        match self {
            // the multipliers compose
            Amplitude::HeatEvolved { t: s, base } => Amplitude::HeatEvolved { t: s + t, base },
            other => Amplitude::HeatEvolved { t, base: Box::new(other) },
        }
    }

    /// `A(r)`.
    pub fn value(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        match self {
            Amplitude::PowerLaw { kappa, cutoff } => {
                if r <= *cutoff {
                    r.powf(2.0 * kappa)
                } else {
                    0.0
                }
            }
            Amplitude::LogCounterexample { dim } => {
                if r <= 0.5 {
                    let l = r.ln();
                    r.powi(-(*dim as i32)) / (l * l)
                } else {
                    0.0
                }
            }
            Amplitude::GaussianSwirl => r * r * (-r * r).exp(),
            Amplitude::Band { lo, hi, base } => {
                if r >= *lo && r < *hi {
                    base.value(r)
                } else {
                    0.0
                }
            }
            Amplitude::Table { r: rs, a } => table_value(rs, a, r),
            Amplitude::Scaled { factor, base } => factor * base.value(r),
            Amplitude::HeatEvolved { t, base } => {
                let e = (-2.0 * t * r * r).exp();
                if e == 0.0 {
                    0.0
                } else {
                    base.value(r) * e
                }
            }
            Amplitude::Duhamel { t, initial, forcing, phi } => {
                let a0 = initial.value(r).sqrt() * (-t * r * r).exp();
                let g = forcing.value(r).sqrt();
                let psi = if g > 0.0 {
                    duhamel_kernel(phi, *t, r).map(|i| i.value).unwrap_or(f64::NAN)
                } else {
                    0.0
                };
                let v = a0 + psi * g;
                v * v
            }
            Amplitude::ShellSplice(s) => match s.level(shell_index(r)) {
                Some(level) => level,
                None => s.base.value(r),
            },
            Amplitude::Difference { a, b } => {
                let d = a.value(r).sqrt() - b.value(r).sqrt();
                d * d
            }
        }
    }

    /// Radius beyond which the amplitude vanishes (or is below `1e-300`).
    pub fn support_max(&self) -> f64 {
        match self {
            Amplitude::PowerLaw { cutoff, .. } => *cutoff,
            Amplitude::LogCounterexample { .. } => 0.5,
            Amplitude::GaussianSwirl => 27.0,
            Amplitude::Band { hi, base, .. } => hi.min(base.support_max()),
            Amplitude::Table { r, .. } => r.last().copied().unwrap_or(0.0),
            Amplitude::Scaled { base, .. } => base.support_max(),
            Amplitude::HeatEvolved { t, base } => {
                let cut = if *t > 0.0 { (400.0 / t).sqrt() } else { f64::INFINITY };
                base.support_max().min(cut)
            }
            Amplitude::Duhamel { initial, forcing, .. } => {
                initial.support_max().max(forcing.support_max())
            }
            Amplitude::ShellSplice(s) => {
                let top = s.replaced.last().map(|p| pow2(p.0 + 1)).unwrap_or(0.0);
                s.base.support_max().max(top)
            }
            Amplitude::Difference { a, b } => a.support_max().max(b.support_max()),
        }
    }

    /// Radius below which the amplitude vanishes identically.
    pub fn support_min(&self) -> f64 {
        match self {
            Amplitude::Band { lo, base, .. } => lo.max(base.support_min()),
            Amplitude::Scaled { base, .. } | Amplitude::HeatEvolved { base, .. } => {
                base.support_min()
            }
            Amplitude::Duhamel { initial, forcing, phi, .. } => {
                if matches!(phi, TimeFactor::Zero) {
                    initial.support_min()
                } else {
                    initial.support_min().min(forcing.support_min())
                }
            }
            Amplitude::ShellSplice(s) => match s.deep {
                DeepShells::Keep => {
                    let first = s.replaced.first().map(|p| pow2(p.0)).unwrap_or(f64::INFINITY);
                    s.base.support_min().min(first)
                }
                DeepShells::Geometric { .. } => 0.0,
            },
            Amplitude::Difference { a, b } => a.support_min().min(b.support_min()),
            _ => 0.0,
        }
    }

    /// Radii where the amplitude (or one of its derivatives) jumps.
    pub fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Amplitude::PowerLaw { cutoff, .. } => out.push(*cutoff),
            Amplitude::LogCounterexample { .. } => out.push(0.5),
            Amplitude::GaussianSwirl => {}
            Amplitude::Band { lo, hi, base } => {
                out.push(*lo);
                out.push(*hi);
                base.breakpoints(out);
            }
            Amplitude::Table { r, .. } => out.extend_from_slice(r),
            Amplitude::Scaled { base, .. } | Amplitude::HeatEvolved { base, .. } => {
                base.breakpoints(out)
            }
            Amplitude::Duhamel { initial, forcing, .. } => {
                initial.breakpoints(out);
                forcing.breakpoints(out);
            }
            Amplitude::ShellSplice(s) => {
                s.base.breakpoints(out);
                for &(j, _) in &s.replaced {
                    out.push(pow2(j));
                    out.push(pow2(j + 1));
                }
            }
            Amplitude::Difference { a, b } => {
                a.breakpoints(out);
                b.breakpoints(out);
            }
        }
    }

    /// `int_0^r A(s) s^m ds` for small `r`, with an error bound. Closed forms
    /// or leading asymptotics per amplitude kind.
    pub fn tail_moment(&self, m: f64, r: f64) -> Result<Integral> {
        let exact = |value: f64| Ok(Integral { value, error: 0.0 });
        if r <= 0.0 {
            return exact(0.0);
        }
        match self {
            Amplitude::PowerLaw { kappa, cutoff } => {
                let q = 2.0 * kappa + m + 1.0;
                if q <= 0.0 {
                    return Err(divergence("power law", m));
                }
                exact(r.min(*cutoff).powf(q) / q)
            }
            Amplitude::LogCounterexample { dim } => {
                let r = r.min(0.5);
                let p = m - *dim as f64 + 1.0;
                let l = r.ln().abs();
                if p.abs() < 1e-12 {
                    exact(1.0 / l)
                } else if p > 0.0 {
                    let lead = r.powf(p) / (p * l * l);
                    Ok(Integral {
                        value: lead,
                        error: lead * 3.0 / (p * l),
                    })
                } else {
                    Err(divergence("log profile", m))
                }
            }
            Amplitude::GaussianSwirl => {
                let q = m + 3.0;
                if q <= 0.0 {
                    return Err(divergence("gaussian", m));
                }
                Ok(Integral {
                    value: r.powf(q) / q - r.powf(q + 2.0) / (q + 2.0),
                    error: r.powf(q + 4.0) / (2.0 * (q + 4.0)),
                })
            }
            Amplitude::Band { lo, hi, base } => {
                if r <= *lo {
                    return exact(0.0);
                }
                let top = base.tail_moment(m, r.min(*hi))?;
                let bottom = base.tail_moment(m, *lo)?;
                Ok(Integral {
                    value: top.value - bottom.value,
                    error: top.error + bottom.error,
                })
            }
            Amplitude::Table { r: rs, a } => table_tail(rs, a, m, r),
            Amplitude::Scaled { factor, base } => {
                let b = base.tail_moment(m, r)?;
                Ok(Integral {
                    value: factor * b.value,
                    error: factor.abs() * b.error,
                })
            }
            Amplitude::HeatEvolved { t, base } => {
                let b = base.tail_moment(m, r)?;
                let loss = -(-2.0 * t * r * r).exp_m1();
                Ok(Integral {
                    value: b.value,
                    error: b.error + loss * b.value.abs(),
                })
            }
            Amplitude::Duhamel { t, initial, forcing, phi } => {
                let big_phi = match phi {
                    TimeFactor::Zero => 0.0,
                    _ => phi.integral(*t)?,
                };
                let i0 = initial.tail_moment(m, r)?;
                let ig = if big_phi > 0.0 {
                    forcing.tail_moment(m, r)?
                } else {
                    Integral { value: 0.0, error: 0.0 }
                };
                let cross = big_phi * (i0.value * ig.value).max(0.0).sqrt();
                let value = i0.value + big_phi * big_phi * ig.value + cross;
                let loss = -(-2.0 * t * r * r).exp_m1();
                Ok(Integral {
                    value,
                    error: cross + i0.error + big_phi * big_phi * ig.error + loss * value,
                })
            }
            Amplitude::ShellSplice(s) => splice_tail(s, m, r),
            Amplitude::Difference { a, b } => {
                let ta = a.tail_moment(m, r)?;
                let tb = b.tail_moment(m, r)?;
                Ok(Integral {
                    value: 0.0,
                    error: 2.0 * (ta.value + ta.error + tb.value + tb.error),
                })
            }
        }
    }

    /// Checks the parameter ranges of this amplitude.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Amplitude::PowerLaw { kappa, cutoff } => {
                if !(*kappa > -(dim as f64) / 2.0) {
                    return Err(Error::InfiniteEnergy { kappa: *kappa, dim });
                }
                if !(*cutoff > 0.0) || !cutoff.is_finite() {
                    return Err(Error::invalid("power-law cutoff must be positive and finite"));
                }
            }
            Amplitude::LogCounterexample { dim: d } => {
                if *d != dim {
                    return Err(Error::invalid("log profile dimension does not match the profile"));
                }
            }
            Amplitude::GaussianSwirl => {}
            Amplitude::Band { lo, hi, base } => {
                if !(*lo >= 0.0 && hi > lo) {
                    return Err(Error::invalid("band needs 0 <= lo < hi"));
                }
                base.validate(dim)?;
            }
            Amplitude::Table { r, a } => {
                if r.len() < 2 || r.len() != a.len() {
                    return Err(Error::invalid("table needs at least two (r, a) pairs"));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) || !(r[0] > 0.0) {
                    return Err(Error::invalid("table radii must be positive and increasing"));
                }
                if a.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(Error::invalid("table amplitudes must be finite and >= 0"));
                }
            }
            Amplitude::Scaled { factor, base } => {
                if !(*factor >= 0.0) {
                    return Err(Error::invalid("amplitude scale factor must be >= 0"));
                }
                base.validate(dim)?;
            }
            Amplitude::HeatEvolved { t, base } => {
                if !(*t >= 0.0) {
                    return Err(Error::invalid("heat time must be >= 0"));
                }
                base.validate(dim)?;
            }
            Amplitude::Duhamel { t, initial, forcing, phi } => {
                if !(*t >= 0.0) {
                    return Err(Error::invalid("Stokes time must be >= 0"));
                }
                phi.integral(*t)?;
                initial.validate(dim)?;
                forcing.validate(dim)?;
            }
            Amplitude::ShellSplice(s) => {
                s.base.validate(dim)?;
                if s.replaced.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::invalid("replaced shells must be sorted and unique"));
                }
                if s.replaced.iter().any(|p| !(p.1 >= 0.0)) {
                    return Err(Error::invalid("replacement levels must be >= 0"));
                }
            }
            Amplitude::Difference { a, b } => {
                a.validate(dim)?;
                b.validate(dim)?;
            }
        }
        Ok(())
    }
}

fn table_value(rs: &[f64], a: &[f64], r: f64) -> f64 {
    let n = rs.len();
    if n == 0 || r > rs[n - 1] {
        return 0.0;
    }
    if r <= rs[0] {
        if a[0] == 0.0 {
            return 0.0;
        }
        return a[0] * (r / rs[0]).powf(table_slope(rs, a));
    }
    let i = rs.partition_point(|&x| x <= r).min(n - 1);
    let (r0, r1, a0, a1) = (rs[i - 1], rs[i], a[i - 1], a[i]);
    let f = (r / r0).ln() / (r1 / r0).ln();
    if a0 > 0.0 && a1 > 0.0 {
        (a0.ln() + f * (a1 / a0).ln()).exp()
    } else {
        a0 + f * (a1 - a0)
    }
}

fn table_slope(rs: &[f64], a: &[f64]) -> f64 {
    if a[0] > 0.0 && a[1] > 0.0 {
        (a[1] / a[0]).ln() / (rs[1] / rs[0]).ln()
    } else {
        0.0
    }
}

fn table_tail(rs: &[f64], a: &[f64], m: f64, r: f64) -> Result<Integral> {
    let r0 = rs[0];
    let p = table_slope(rs, a);
    let q = p + m + 1.0;
    if a[0] > 0.0 && q <= 0.0 {
        return Err(divergence("table extrapolation", m));
    }
    let head = |x: f64| if a[0] == 0.0 { 0.0 } else { a[0] * r0.powf(-p) * x.powf(q) / q };
    if r <= r0 {
        return Ok(Integral { value: head(r), error: 0.0 });
    }
    let rule = PanelRule::new(16);
    let mut vals = Vec::new();
    let mut err = 0.0;
    let mut edges: Vec<f64> = rs.iter().copied().filter(|&x| x < r).collect();
    edges.push(r);
    for w in edges.windows(2) {
        let (v, e) = rule.apply(w[0].ln(), w[1].ln(), |x| {
            let s = x.exp();
            table_value(rs, a, s) * s.powf(m + 1.0)
        });
        vals.push(v);
        err += e;
    }
    Ok(Integral {
        value: head(r0) + math::pairwise_sum(&vals),
        error: err,
    })
}

fn splice_tail(s: &ShellSplice, m: f64, r: f64) -> Result<Integral> {
    let jr = shell_index(r);
    let mut vals = Vec::new();
    let mut err = 0.0;
    let shell = |j: i32, b: f64, vals: &mut Vec<f64>, err: &mut f64| -> Result<()> {
        let a = pow2(j);
        match s.level(j) {
            Some(level) => vals.push(level * monomial_integral(m, a, b)),
            None => {
                let hi = s.base.tail_moment(m, b)?;
                let lo = s.base.tail_moment(m, a)?;
                vals.push(hi.value - lo.value);
                *err += hi.error + lo.error;
            }
        }
        Ok(())
    };
    let deep_top = if jr < s.explicit_min {
        shell(jr, r, &mut vals, &mut err)?;
        jr
    } else {
        for j in s.explicit_min..=jr {
            let b = pow2(j + 1).min(r);
            shell(j, b, &mut vals, &mut err)?;
        }
        s.explicit_min
    };
    // everything below 2^deep_top
    match s.deep {
        DeepShells::Keep => {
            let t = s.base.tail_moment(m, pow2(deep_top))?;
            vals.push(t.value);
            err += t.error;
        }
        DeepShells::Geometric { coefficient, exponent } => {
            let q = exponent + m + 1.0;
            if q <= 0.0 {
                return Err(divergence("geometric shell sequence", m));
            }
            let per = coefficient * monomial_integral(m, 1.0, 2.0);
            let ratio = (-q).exp2();
            vals.push(per * ((deep_top - 1) as f64 * q).exp2() / (1.0 - ratio));
        }
    }
    Ok(Integral {
        value: math::pairwise_sum(&vals),
        error: err,
    })
}

/// Numerical parameters of the radial quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Quadrature {
    /// Gauss nodes per decade of `r` (rounded up to whole 16-point panels).
    pub nodes_per_decade: usize,
    /// Radius below which the analytic tail replaces numerical quadrature.
    pub floor: f64,
    /// Relative error above which an integral is reported as divergent.
    pub rel_tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            nodes_per_decade: 64,
            floor: 1e-8,
            rel_tol: 1e-6,
        }
    }
}

const REFINE_ROUNDS: usize = 12;
const PANEL_ORDER: usize = 16;

/// Exact one-dimensional description of a swirl-type field on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSpectralProfile {
    pub dim: usize,
    pub amplitude: Amplitude,
    #[serde(default)]
    pub quadrature: Quadrature,
}

/// Spectral weight `|xi|^{2 order} exp(-2 heat_time |xi|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Weight {
    pub order: f64,
    pub heat_time: f64,
}

impl Weight {
    pub const MASS: Weight = Weight { order: 0.0, heat_time: 0.0 };

    pub fn derivative(order: u32) -> Self {
        Weight { order: order as f64, heat_time: 0.0 }
    }

    pub fn at_time(self, t: f64) -> Self {
        Weight { heat_time: t, ..self }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let mut w = 1.0;
        if self.order != 0.0 {
            w *= r.powf(2.0 * self.order);
        }
        if self.heat_time != 0.0 {
            w *= (-2.0 * self.heat_time * r * r).exp();
        }
        w
    }
}

impl RadialSpectralProfile {
    pub fn new(dim: usize, amplitude: Amplitude) -> Result<Self> {
        let p = RadialSpectralProfile {
            dim,
            amplitude,
            quadrature: Quadrature::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_quadrature(mut self, q: Quadrature) -> Self {
        self.quadrature = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid("radial profiles need dimension >= 2"));
        }
        if self.quadrature.nodes_per_decade == 0 || !(self.quadrature.floor > 0.0) {
            return Err(Error::invalid("bad quadrature parameters"));
        }
        self.amplitude.validate(self.dim)?;
        self.integrate(0.0, f64::INFINITY, Weight::MASS, None, &[])?;
        Ok(())
    }

    /// `(r_min, r_max)` outside of which the amplitude vanishes.
    pub fn support_hint(&self) -> (f64, f64) {
        (self.amplitude.support_min(), self.amplitude.support_max())
    }

    pub fn amplitude_at(&self, r: f64) -> f64 {
        self.amplitude.value(r)
    }

    /// The realized Fourier coefficient `A(|xi|)^{1/2} e(xi)` at a point.
    pub fn coefficient(&self, xi: &[f64]) -> Vec<Complex64> {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let a = self.amplitude.value(r).sqrt();
        swirl_direction(xi).into_iter().map(|e| e * a).collect()
    }

    pub fn map_amplitude(&self, f: impl FnOnce(Amplitude) -> Amplitude) -> Self {
        RadialSpectralProfile {
            dim: self.dim,
            amplitude: f(self.amplitude.clone()),
            quadrature: self.quadrature,
        }
    }

    /// `omega_{n-1} int_{lo}^{hi} A(r) W(r) extra(r) r^{n-1} dr`.
    ///
    /// When `lo == 0` the interval `[0, floor]` is covered by the analytic
    /// tail of the amplitude, with `extra` frozen at its value at the floor.
    pub fn integrate(
        &self,
        lo: f64,
        hi: f64,
        w: Weight,
        extra: Option<&dyn Fn(f64) -> f64>,
        extra_breaks: &[f64],
    ) -> Result<Integral> {
        let omega = math::sphere_area(self.dim);
        let m = self.dim as f64 - 1.0 + 2.0 * w.order;
        let (smin, smax) = self.support_hint();
        let mut top = hi.min(smax);
        if w.heat_time > 0.0 {
            top = top.min((400.0 / w.heat_time).sqrt());
        }
        let mut vals: Vec<f64> = Vec::new();
        let mut err = 0.0;
        let floor = self.quadrature.floor;
        let mut start = lo.max(smin);
        if lo <= 0.0 && smin < floor {
            let cut = floor.min(top);
            let t = self.amplitude.tail_moment(m, cut)?;
            let mut scale = Weight { order: 0.0, ..w }.eval(cut);
            if let Some(f) = extra {
                scale *= f(cut);
            }
            vals.push(omega * scale * t.value);
            err += omega * scale * (t.error + t.value * (1.0 - Weight { order: 0.0, ..w }.eval(cut)));
            start = start.max(cut);
        }
        if top > start {
            let mut edges = Vec::new();
            self.amplitude.breakpoints(&mut edges);
            edges.extend_from_slice(extra_breaks);
            edges.retain(|&b| b > start && b < top && b.is_finite());
            edges.push(start);
            edges.push(top);
            edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
            edges.dedup();
            let rule = PanelRule::new(PANEL_ORDER);
            let panels_per_decade =
                (self.quadrature.nodes_per_decade + PANEL_ORDER - 1) / PANEL_ORDER;
            let width = core::f64::consts::LN_10 / panels_per_decade.max(1) as f64;
            let integrand = |x: f64| {
                let r = x.exp();
                let amp = self.amplitude.value(r);
                if amp == 0.0 {
                    return 0.0;
                }
                let mut f = amp * r.powf(m + 1.0) * w.eval_no_order(r);
                if let Some(g) = extra {
                    f *= g(r);
                }
                f
            };
            let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new();
            for seg in edges.windows(2) {
                let (xa, xb) = (seg[0].ln(), seg[1].ln());
                let count = (((xb - xa) / width).ceil() as usize).max(1);
                let h = (xb - xa) / count as f64;
                for p in 0..count {
                    let a = xa + h * p as f64;
                    let b = if p + 1 == count { xb } else { a + h };
                    let (v, e) = rule.apply(a, b, integrand);
                    panels.push((a, b, v, e));
                }
            }
            // Steep features (heat factors at large t, band edges) can be
            // narrower than a panel; bisect the panels carrying the error.
            let fixed = math::pairwise_sum(&vals);
            for _ in 0..REFINE_ROUNDS {
                let total: Vec<f64> = panels.iter().map(|p| p.2).collect();
                let value = omega * math::pairwise_sum(&total) + fixed;
                let e_sum: f64 = panels.iter().map(|p| omega * p.3).sum::<f64>() + err;
                let tol = 0.5 * self.quadrature.rel_tol * value.abs();
                if e_sum <= tol || !value.is_finite() {
                    break;
                }
                let share = tol / panels.len() as f64;
                let mut next = Vec::with_capacity(panels.len() + 16);
                for &(a, b, v, e) in &panels {
                    if omega * e > share {
                        let mid = 0.5 * (a + b);
                        let (v1, e1) = rule.apply(a, mid, integrand);
                        let (v2, e2) = rule.apply(mid, b, integrand);
                        next.push((a, mid, v1, e1));
                        next.push((mid, b, v2, e2));
                    } else {
                        next.push((a, b, v, e));
                    }
                }
                panels = next;
            }
            for p in &panels {
                vals.push(omega * p.2);
                err += omega * p.3;
            }
        }
        let value = math::pairwise_sum(&vals);
        if !value.is_finite() || err > self.quadrature.rel_tol * value.abs() + 1e-300 {
            return Err(Error::QuadratureDivergence(alloc::format!(
                "integral over [{lo:e}, {hi:e}] has value {value:e} with error estimate {err:e}"
            )));
        }
        Ok(Integral { value, error: err })
    }
}

impl Weight {
    #[inline]
    fn eval_no_order(&self, r: f64) -> f64 {
        if self.heat_time != 0.0 {
            (-2.0 * self.heat_time * r * r).exp()
        } else {
            1.0
        }
    }
}

/// `e(xi) = (-i xi_2, i xi_1, 0, ..., 0) / |xi|`; zero at the origin.
pub fn swirl_direction(xi: &[f64]) -> Vec<Complex64> {
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut e = alloc::vec![Complex64::new(0.0, 0.0); xi.len()];
    if r > 0.0 && xi.len() >= 2 {
        e[0] = Complex64::new(0.0, -xi[1] / r);
        e[1] = Complex64::new(0.0, xi[0] / r);
    }
    e
}
