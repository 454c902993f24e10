//! Heat and Stokes evolution, forcing bounds and Schonbek's Fourier
//! splitting inequality.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::Exponent;
use crate::grid::GridField;
use crate::math::{self, Integral};
use crate::norms::{Backend, SpectralField, Weight};
use crate::radial::{duhamel_kernel, Amplitude, RadialSpectralProfile, TimeFactor};

/// `e^{t Delta} u0`.
pub fn heat_evolve<F: SpectralField>(u0: &F, t: f64) -> Result<F> {
    if !(t >= 0.0) {
        return Err(Error::invalid("heat time must be >= 0"));
    }
    Ok(u0.heat(t))
}

/// Separable forcing `f(x, t) = phi(t) g(x)` with the claimed bounds
/// `||f(t)||_2 <= C_f (1+t)^{-a-1}` and `||f(t)||_n <= K_f t^{-a-(n+2)/4}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec<F> {
    pub phi: TimeFactor,
    pub g: F,
    pub alpha: f64,
    pub c_f: f64,
    pub k_f: Option<f64>,
}

impl<F: SpectralField> ForcingSpec<F> {
    pub fn zero(g: F) -> Self {
        ForcingSpec {
            phi: TimeFactor::Zero,
            g,
            alpha: 0.0,
            c_f: 0.0,
            k_f: None,
        }
    }

    /// `||f(t)||_2`.
    pub fn l2_norm(&self, t: f64) -> Result<f64> {
        Ok(self.phi.value(t).abs() * self.g.total_energy()?.sqrt())
    }
}

/// Fields for which the forced Stokes problem can be solved exactly in
/// frequency: `u^(t) = e^{-t|xi|^2} u0^ + psi(t, |xi|) g^`.
pub trait StokesField: SpectralField {
    fn stokes(&self, g: &Self, phi: &TimeFactor, t: f64) -> Result<StokesSolution<Self>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct StokesSolution<F> {
    pub field: F,
    /// Largest relative error estimate of the time quadrature.
    pub quad_error: f64,
}

impl StokesField for RadialSpectralProfile {
    fn stokes(&self, g: &Self, phi: &TimeFactor, t: f64) -> Result<StokesSolution<Self>> {
        if g.dim != self.dim {
            return Err(Error::invalid("forcing and datum dimensions differ"));
        }
        phi.integral(t)?;
        let mut quad_error: f64 = 0.0;
        if !matches!(phi, TimeFactor::Zero) {
            let (_, top) = g.support_hint();
            for r in math::log_space(1e-8, top.min(1e4).max(1e-7), 41) {
                let i = duhamel_kernel(phi, t, r)?;
                if i.value > 0.0 {
                    quad_error = quad_error.max(i.error / i.value);
                }
            }
        }
        let field = RadialSpectralProfile {
            dim: self.dim,
            amplitude: Amplitude::Duhamel {
                t,
                initial: alloc::boxed::Box::new(self.amplitude.clone()),
                forcing: alloc::boxed::Box::new(g.amplitude.clone()),
                phi: *phi,
            },
            quadrature: self.quadrature,
        };
        Ok(StokesSolution { field, quad_error })
    }
}

impl StokesField for GridField {
    fn stokes(&self, g: &Self, phi: &TimeFactor, t: f64) -> Result<StokesSolution<Self>> {
        if g.grid() != self.grid() {
            return Err(Error::invalid("forcing and datum live on different grids"));
        }
        phi.integral(t)?;
        let grid = *self.grid();
        let mut cache: BTreeMap<i64, Integral> = BTreeMap::new();
        let mut quad_error: f64 = 0.0;
        let mut out = self.clone();
        let np = grid.points();
        for idx in 0..np {
            let m = grid.mode(idx);
            let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
            let k = grid.wavevector(idx);
            let k2: f64 = k.iter().map(|x| x * x).sum();
            let psi = match cache.get(&m2) {
                Some(i) => *i,
                None => {
                    let i = duhamel_kernel(phi, t, k2.sqrt())?;
                    cache.insert(m2, i);
                    i
                }
            };
            if psi.value != 0.0 {
                quad_error = quad_error.max(psi.error / psi.value.abs());
            }
            let e = (-t * k2).exp();
            let u = self.coeff(idx);
            let f = g.coeff(idx);
            let mut v = [Complex64::new(0.0, 0.0); 3];
            for c in 0..grid.dim {
                v[c] = u[c] * e + f[c] * psi.value;
            }
            out.set_coeff(idx, v);
        }
        Ok(StokesSolution { field: out, quad_error })
    }
}

/// Solution of `v_t = Delta v + f`, `v(0) = u0` at time `t`.
pub fn stokes_duhamel<F: StokesField>(u0: &F, f: &ForcingSpec<F>, t: f64) -> Result<StokesSolution<F>> {
    if !(t > 0.0) {
        return Err(Error::invalid("Stokes time must be positive"));
    }
    u0.stokes(&f.g, &f.phi, t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingReport {
    /// `min_t C_f (1+t)^{-a-1} / ||f(t)||_2`; infinite for zero forcing.
    pub l2_margin: f64,
    pub l2_worst_t: f64,
    /// Same for the `L^n` bound; `None` when skipped.
    pub ln_margin: Option<f64>,
    pub ln_checked: bool,
    pub passes: bool,
}

/// Evaluates the claimed forcing bounds at the sample times. The `L^n`
/// bound is redundant in two dimensions and skipped there; in higher
/// dimensions it needs `ln_norm_of_g`, the `L^n` norm of the spatial factor.
pub fn forcing_bound_check<F: SpectralField>(
    f: &ForcingSpec<F>,
    t_samples: &[f64],
    ln_norm_of_g: Option<f64>,
) -> Result<ForcingReport> {
    let n = f.g.dim();
    let mut l2_margin = f64::INFINITY;
    let mut l2_worst_t = f64::NAN;
    let mut ln_margin: Option<f64> = None;
    for &t in t_samples {
        if !(t > 0.0) {
            return Err(Error::invalid("forcing samples must be positive"));
        }
        let norm = f.l2_norm(t)?;
        if norm > 0.0 {
            let m = f.c_f * (1.0 + t).powf(-f.alpha - 1.0) / norm;
            if m < l2_margin {
                l2_margin = m;
                l2_worst_t = t;
            }
        }
        if n > 2 {
            if let (Some(k_f), Some(gn)) = (f.k_f, ln_norm_of_g) {
                let val = f.phi.value(t).abs() * gn;
                let m = if val > 0.0 {
                    k_f * t.powf(-f.alpha - (n as f64 + 2.0) / 4.0) / val
                } else {
                    f64::INFINITY
                };
                ln_margin = Some(ln_margin.map_or(m, |x: f64| x.min(m)));
            }
        }
    }
    let tol = 1.0 - 1e-12;
    let passes = l2_margin >= tol && ln_margin.map_or(true, |m| m >= tol);
    Ok(ForcingReport {
        l2_margin,
        l2_worst_t,
        ln_checked: ln_margin.is_some(),
        ln_margin,
        passes,
    })
}

/// One sample of the Fourier splitting check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingRow {
    pub t: f64,
    pub energy: f64,
    pub derivative: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs - lhs) / (|dE/dt| + g^2 E)`.
    pub margin: f64,
    /// `rhs (1+t)^{1+s}` when an exponent was supplied.
    pub compensated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub rows: Vec<SplittingRow>,
    pub worst_margin: f64,
    pub holds: bool,
    /// `sup / inf` of the compensated right-hand side over `[10, 1e6]`.
    pub compensated_ratio: Option<f64>,
    /// Largest relative gap between the exact derivative and a centred
    /// difference at three sample times.
    pub derivative_crosscheck: f64,
}

/// Margin below which the splitting inequality counts as violated.
pub const SPLITTING_TOL: f64 = -1e-10;

/// Checks `dE/dt + g^2 E <= g^2 int_{|xi| <= g} e^{-2t|xi|^2}|u0^|^2` with
/// `E(t) = ||e^{t Delta} u0||^2` and `g(t)^2 = 1/(1+t)`.
pub fn fourier_splitting_check<F: SpectralField>(
    u0: &F,
    exponent: Option<Exponent>,
    t_samples: &[f64],
) -> Result<SplittingReport> {
    let energy = |t: f64| u0.energy(0.0, f64::INFINITY, Weight::MASS.at_time(t));
    let derivative = |t: f64| -> Result<f64> {
        Ok(-2.0 * u0.energy(0.0, f64::INFINITY, Weight::derivative(1).at_time(t))?)
    };
    let mut rows = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let g2 = 1.0 / (1.0 + t);
        let e = energy(t)?;
        let d = derivative(t)?;
        let low = u0.energy_within(g2.sqrt(), Weight::MASS.at_time(t))?;
        let lhs = d + g2 * e;
        let rhs = g2 * low;
        let scale = d.abs() + g2 * e;
        let margin = if scale > 0.0 { (rhs - lhs) / scale } else { 0.0 };
        rows.push(SplittingRow {
            t,
            energy: e,
            derivative: d,
            lhs,
            rhs,
            margin,
            compensated: exponent.map(|s| rhs * (1.0 + t).powf(1.0 + s.sigma())),
        });
    }
    let worst_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let compensated_ratio = exponent.map(|_| {
        let c: Vec<f64> = rows
            .iter()
            .filter(|r| r.t >= 10.0 * (1.0 - 1e-12) && r.t <= 1e6 * (1.0 + 1e-12))
            .filter_map(|r| r.compensated)
            .collect();
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(0.0, f64::max);
        if lo > 0.0 {
            hi / lo
        } else {
            f64::INFINITY
        }
    });
    // centred differences guard the exact derivative formula
    let mut cross: f64 = 0.0;
    let picks = [0, t_samples.len() / 2, t_samples.len().saturating_sub(1)];
    for &i in picks.iter().filter(|&&i| i < t_samples.len()) {
        let t = t_samples[i];
        let h = 1e-4 * t.max(1e-3);
        let fd = (energy(t + h)? - energy((t - h).max(0.0))?) / (t + h - (t - h).max(0.0));
        let ex = derivative(t)?;
        if ex != 0.0 {
            cross = cross.max((fd - ex).abs() / ex.abs());
        }
    }
    Ok(SplittingReport {
        holds: worst_margin >= SPLITTING_TOL || rows.is_empty(),
        worst_margin: if rows.is_empty() { 0.0 } else { worst_margin },
        rows,
        compensated_ratio,
        derivative_crosscheck: cross,
    })
}

/// Sampled `||D^l u(t)||`, `l = 0, 1, 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub hdot1: Vec<f64>,
    pub hdot2: Vec<f64>,
    pub backend: Backend,
    pub validity_horizon: Option<f64>,
}

impl DecayProfile {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `||D^l u||` samples.
    pub fn series(&self, l: usize) -> &[f64] {
        match l {
            0 => &self.l2,
            1 => &self.hdot1,
            _ => &self.hdot2,
        }
    }

    /// Whether sample `i` lies inside the validity horizon.
    pub fn within_horizon(&self, i: usize) -> bool {
        self.validity_horizon.map_or(true, |h| self.times[i] <= h)
    }

    /// Positive increasing times, nonnegative norms.
    pub fn check_invariants(&self) -> bool {
        let n = self.times.len();
        self.l2.len() == n
            && self.hdot1.len() == n
            && self.hdot2.len() == n
            && self.times.iter().all(|t| *t > 0.0)
            && self.times.windows(2).all(|w| w[1] > w[0])
            && [&self.l2, &self.hdot1, &self.hdot2]
                .iter()
                .all(|s| s.iter().all(|v| *v >= 0.0))
    }
}

/// Samples `||D^l e^{t Delta} u0||` on `times`.
pub fn decay_profile<F: SpectralField>(u0: &F, times: &[f64]) -> Result<DecayProfile> {
    let horizon = u0.validity_horizon();
    check_times(times, horizon)?;
    let mut p = DecayProfile {
        times: times.to_vec(),
        l2: Vec::with_capacity(times.len()),
        hdot1: Vec::with_capacity(times.len()),
        hdot2: Vec::with_capacity(times.len()),
        backend: u0.backend(),
        validity_horizon: horizon,
    };
    for &t in times {
        let e = |l: u32| -> Result<f64> {
            Ok(u0
                .energy(0.0, f64::INFINITY, Weight::derivative(l).at_time(t))?
                .max(0.0)
                .sqrt())
        };
        p.l2.push(e(0)?);
        p.hdot1.push(e(1)?);
        p.hdot2.push(e(2)?);
    }
    Ok(p)
}

/// Samples the forced Stokes flow `v(t)` on `times`.
pub fn forced_decay_profile<F: StokesField>(
    u0: &F,
    f: &ForcingSpec<F>,
    times: &[f64],
) -> Result<DecayProfile> {
    let horizon = u0.validity_horizon();
    check_times(times, horizon)?;
    let mut p = DecayProfile {
        times: times.to_vec(),
        l2: Vec::new(),
        hdot1: Vec::new(),
        hdot2: Vec::new(),
        backend: u0.backend(),
        validity_horizon: horizon,
    };
    for &t in times {
        let v = stokes_duhamel(u0, f, t)?.field;
        let n = crate::norms::norms(&v)?;
        p.l2.push(n.l2);
        p.hdot1.push(n.hdot[0]);
        p.hdot2.push(n.hdot[1]);
    }
    Ok(p)
}

fn check_times(times: &[f64], horizon: Option<f64>) -> Result<()> {
    if times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("sample times must be positive and increasing"));
    }
    if let (Some(h), Some(&last)) = (horizon, times.last()) {
        if last > h {
            return Err(Error::HorizonExceeded { t: last, horizon: h });
        }
    }
    Ok(())
}

/// Relative defect of `||e^{tD}u0||^2 + 2 int_0^t ||D e^{sD}u0||^2 ds = ||u0||^2`.
pub fn energy_identity_defect<F: SpectralField>(u0: &F, t: f64) -> Result<f64> {
    let e0 = u0.total_energy()?;
    if e0 == 0.0 {
        return Ok(0.0);
    }
    let et = u0.energy(0.0, f64::INFINITY, Weight::MASS.at_time(t))?;
    let mut failure = None;
    let mut dissipation = |s: f64| match u0.energy(0.0, f64::INFINITY, Weight::derivative(1).at_time(s)) {
        Ok(v) => 2.0 * v,
        Err(e) => {
            failure = Some(e);
            0.0
        }
    };
    // geometric panels resolve the fast initial transient
    let mut edges = alloc::vec![0.0];
    let mut s = t * 1e-8;
    while s < t {
        edges.push(s);
        s *= 10.0;
    }
    edges.push(t);
    let mut parts = Vec::new();
    for w in edges.windows(2) {
        let i = math::integrate_adaptive(&mut dissipation, w[0], w[1], 1e-14 * e0, 1e-10, 64);
        parts.push(i.value);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(((et + math::pairwise_sum(&parts)) - e0).abs() / e0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use core::f64::consts::PI;

    fn gaussian() -> RadialSpectralProfile {
        RadialSpectralProfile::new(2, Amplitude::GaussianSwirl).unwrap()
    }

    #[test]
    fn gaussian_closed_form() {
        let p = gaussian();
        for t in [0.0, 1.0, 10.0, 100.0] {
            let e = heat_evolve(&p, t).unwrap().total_energy().unwrap();
            let want = PI * (1.0 + 2.0 * t).powi(-2);
            assert!((e / want - 1.0).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn zero_forcing_matches_heat() {
        let p = gaussian();
        let f = ForcingSpec::zero(gaussian());
        let v = stokes_duhamel(&p, &f, 3.0).unwrap().field.total_energy().unwrap();
        let h = heat_evolve(&p, 3.0).unwrap().total_energy().unwrap();
        assert!((v / h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_mode_duhamel_closed_form() {
        let grid = Grid::new(2, 2.0 * PI, 16).unwrap();
        let u0 = GridField::zeros(grid);
        // a single Hermitian pair at m = (1, 2)
        let mut g = GridField::zeros(grid);
        let np = grid.points();
        let idx = (1..np).find(|&i| grid.mode(i)[..2] == [1, 2]).unwrap();
        let k = grid.wavevector(idx);
        let c = [Complex64::new(0.0, -k[1]), Complex64::new(0.0, k[0]), Complex64::new(0.0, 0.0)];
        g.set_coeff(idx, c);
        g.set_coeff(grid.mirror(idx), [c[0].conj(), c[1].conj(), c[2]]);
        let f = ForcingSpec {
            phi: TimeFactor::Exponential { rate: 1.0 },
            g: g.clone(),
            alpha: 1.0,
            c_f: 1.0,
            k_f: None,
        };
        let t = 0.7;
        let sol = stokes_duhamel(&u0, &f, t).unwrap();
        let k2 = k[0] * k[0] + k[1] * k[1];
        let factor = ((-t).exp() - (-t * k2).exp()) / (k2 - 1.0);
        let got = sol.field.coeff(idx);
        for cc in 0..2 {
            assert!((got[cc] - c[cc] * factor).norm() < 1e-12 * c[cc].norm().max(1.0));
        }
        assert!(sol.quad_error < 1e-8);
    }

    #[test]
    fn forcing_bounds() {
        let g = gaussian();
        let gn = g.total_energy().unwrap().sqrt();
        let ts = math::log_space(1e-2, 1e6, 50);
        let ok = ForcingSpec {
            phi: TimeFactor::Algebraic { power: 2.0 },
            g: g.clone(),
            alpha: 1.0,
            c_f: gn,
            k_f: None,
        };
        let r = forcing_bound_check(&ok, &ts, None).unwrap();
        assert!(r.passes && (r.l2_margin - 1.0).abs() < 1e-12);
        let bad = ForcingSpec {
            phi: TimeFactor::Algebraic { power: 1.5 },
            ..ok.clone()
        };
        assert!(!forcing_bound_check(&bad, &ts, None).unwrap().passes);
        let zero = ForcingSpec::zero(g);
        let r = forcing_bound_check(&zero, &ts, None).unwrap();
        assert!(r.passes && r.l2_margin.is_infinite());
    }

    #[test]
    fn splitting_holds_for_gaussian() {
        let r = fourier_splitting_check(&gaussian(), None, &[1.0, 10.0, 100.0]).unwrap();
        assert!(r.holds, "{:?}", r.worst_margin);
        assert!(r.derivative_crosscheck < 1e-6, "{}", r.derivative_crosscheck);
    }

    #[test]
    fn energy_identity() {
        let d = energy_identity_defect(&gaussian(), 50.0).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn grid_profile_respects_horizon() {
        let grid = Grid::new(2, 2.0 * PI, 16).unwrap();
        let f = GridField::zeros(grid);
        let e = decay_profile(&f, &[0.05, 1.0]).unwrap_err();
        assert!(matches!(e, Error::HorizonExceeded { .. }));
    }
}
