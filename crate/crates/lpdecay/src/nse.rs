//! Pseudo-spectral solver for the unforced 2D Navier-Stokes equations in
//! vorticity form, `w_t + u.grad w = Lap w`, on the periodic box of a
//! [`Grid`], with 2/3 dealiasing and an integrating-factor RK4 step.
//!
//! The vorticity is stored on the lattice with the same normalization as
//! the velocity coefficients (`w^ = i (k1 u2^ - k2 u1^)`), so
//! `||u||^2 = k0^2 sum |w^|^2 / |k|^2`.

use lpdecay_core::fit::{self, compensated_curve, CompensatedReport, DecayCertificate};
use lpdecay_core::grid::{Grid, GridField};
use lpdecay_core::heat::DecayProfile;
use lpdecay_core::math::{linear_fit, log_space, pairwise_sum};
use lpdecay_core::radial::Amplitude;
use lpdecay_core::synthesis::make_random_div_free;
use lpdecay_core::{Backend, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{synthesis_scale, FftNd};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Integrating-factor RK4: the viscous part is integrated exactly.
    IfRk4,
    /// Explicit nonlinear term, implicit viscosity, first order.
    ImexEuler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: Grid,
    /// First step, and the smallest step the adaptive policy takes.
    pub dt: f64,
    pub dt_max: f64,
    /// Adaptive steps are `growth * t` clamped to `[dt, dt_max]`; 0 gives
    /// fixed steps of `dt`.
    pub growth: f64,
    /// Courant number `dt max|u| / dx` allowed.
    pub cfl: f64,
    pub t_end: f64,
    /// Retained fraction of the Nyquist frequency on each axis.
    pub dealias: f64,
    pub integrator: Integrator,
    pub record_times: Vec<f64>,
}

/// `0` followed by `per_decade` log-spaced samples per decade on
/// `[t_first, t_end]`.
pub fn record_schedule(t_first: f64, t_end: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t_end / t_first).log10();
    let count = (decades * per_decade as f64).round() as usize + 1;
    let mut out = vec![0.0];
    out.extend(log_space(t_first, t_end, count.max(2)));
    out
}

impl SimConfig {
    /// Defaults for a run up to the validity horizon of `grid`.
    pub fn desk(grid: Grid) -> Self {
        let t_end = grid.validity_horizon();
        SimConfig {
            grid,
            dt: 1e-2,
            dt_max: 10.0,
            growth: 0.05,
            cfl: 0.5,
            t_end,
            dealias: 2.0 / 3.0,
            integrator: Integrator::IfRk4,
            record_times: record_schedule(1e-2, t_end, 20),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ConfigInvalid(m.to_string()));
        if self.grid.dim != 2 {
            return bad("the Navier-Stokes solver is two-dimensional");
        }
        if !(self.dt > 0.0) || !(self.dt_max >= self.dt) {
            return bad("need 0 < dt <= dt_max");
        }
        if !(self.growth >= 0.0) || !(self.cfl > 0.0) {
            return bad("growth must be >= 0 and cfl > 0");
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            return bad("dealias fraction must lie in (0, 1]");
        }
        if !(self.t_end > 0.0) || self.t_end > self.grid.validity_horizon() * (1.0 + 1e-12) {
            return bad("t_end must be positive and within the validity horizon 0.1/k0^2");
        }
        if self.record_times.is_empty()
            || self.record_times.windows(2).any(|w| !(w[1] > w[0]))
            || self.record_times[0] < 0.0
            || *self.record_times.last().unwrap() > self.t_end
        {
            return bad("record times must increase within [0, t_end]");
        }
        Ok(())
    }
}

/// Energy and cumulative dissipation `2 int_0^t ||Du||^2` at a record time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub energy: f64,
    pub dissipation: f64,
}

#[derive(Debug, Clone)]
pub struct SimTrace {
    pub u: DecayProfile,
    /// The heat flow from the same datum, evaluated exactly.
    pub v: DecayProfile,
    pub theta_l2: Vec<f64>,
    pub energy_ledger: Vec<LedgerEntry>,
    pub integrator: Integrator,
    pub steps: usize,
    /// Largest `|k.u^| / (|k||u^|)` of the reconstructed velocity at the
    /// record times.
    pub max_divergence: f64,
    /// Largest `|<u, P(u.grad u)>|` relative to its absolute-value bound at
    /// the record times.
    pub max_transfer_defect: f64,
    pub final_state: GridField,
}

impl SimTrace {
    pub fn times(&self) -> &[f64] {
        &self.u.times
    }

    /// `(E(0) - E(t) - D(t)) / E(0)` at every record time.
    pub fn energy_residuals(&self) -> Vec<f64> {
        let e0 = self.energy_ledger[0].energy;
        self.energy_ledger
            .iter()
            .map(|l| {
                let r = e0 - l.energy - l.dissipation;
                if e0 > 0.0 {
                    r / e0
                } else {
                    r
                }
            })
            .collect()
    }
}

struct Solver {
    grid: Grid,
    kx: Vec<f64>,
    ky: Vec<f64>,
    ksq: Vec<f64>,
    keep: Vec<bool>,
    fft: FftNd,
    scale: f64,
    z1: Vec<Complex64>,
    z2: Vec<Complex64>,
}

impl Solver {
    fn new(grid: Grid, dealias: f64) -> Self {
        let np = grid.points();
        let cut = (dealias * (grid.n / 2) as f64).floor() as i64;
        let (mut kx, mut ky, mut ksq, mut keep) = (vec![0.0; np], vec![0.0; np], vec![0.0; np], vec![false; np]);
        for idx in 0..np {
            let k = grid.wavevector(idx);
            let m = grid.mode(idx);
            kx[idx] = k[0];
            ky[idx] = k[1];
            ksq[idx] = k[0] * k[0] + k[1] * k[1];
            keep[idx] = idx != 0 && m[0].abs() <= cut && m[1].abs() <= cut && !grid.is_nyquist(idx);
        }
        Solver {
            grid,
            kx,
            ky,
            ksq,
            keep,
            fft: FftNd::new(&grid),
            scale: synthesis_scale(&grid),
            z1: vec![ZERO; np],
            z2: vec![ZERO; np],
        }
    }

    /// `-(u.grad w)^` on the retained modes; returns `max |u|` as well.
    fn nonlinear(&mut self, w: &[Complex64], out: &mut [Complex64]) -> f64 {
        let np = w.len();
        // pack (u1, d1 w) and (u2, d2 w) as real and imaginary parts
        for i in 0..np {
            if !self.keep[i] {
                self.z1[i] = ZERO;
                self.z2[i] = ZERO;
                continue;
            }
            let psi = w[i] / self.ksq[i];
            self.z1[i] = I * self.ky[i] * psi - self.kx[i] * w[i];
            self.z2[i] = -I * self.kx[i] * psi - self.ky[i] * w[i];
        }
        self.fft.inverse(&mut self.z1);
        self.fft.inverse(&mut self.z2);
        let s = self.scale;
        let mut umax2: f64 = 0.0;
        for i in 0..np {
            let (a, b) = (self.z1[i], self.z2[i]);
            umax2 = umax2.max(a.re * a.re + b.re * b.re);
            out[i] = Complex64::new(s * s * (a.re * a.im + b.re * b.im), 0.0);
        }
        self.fft.forward(out);
        let norm = -1.0 / (s * np as f64);
        for i in 0..np {
            out[i] = if self.keep[i] { out[i] * norm } else { ZERO };
        }
        s * umax2.sqrt()
    }

    fn energy_terms(&self, w: &[Complex64], weight: impl Fn(f64) -> f64) -> f64 {
        let k0 = self.grid.k0();
        let terms: Vec<f64> = (0..w.len())
            .filter(|&i| self.keep[i])
            .map(|i| w[i].norm_sqr() * weight(self.ksq[i]))
            .collect();
        k0 * k0 * pairwise_sum(&terms)
    }

    // l2, hdot1, hdot2 from the vorticity
    fn norms(&self, w: &[Complex64]) -> [f64; 3] {
        [
            self.energy_terms(w, |k2| 1.0 / k2).sqrt(),
            self.energy_terms(w, |_| 1.0).sqrt(),
            self.energy_terms(w, |k2| k2).sqrt(),
        ]
    }

    fn vorticity(&self, u: &GridField) -> Vec<Complex64> {
        let np = self.grid.points();
        let (u1, u2) = (u.component(0), u.component(1));
        (0..np)
            .map(|i| if self.keep[i] { I * (self.kx[i] * u2[i] - self.ky[i] * u1[i]) } else { ZERO })
            .collect()
    }

    fn velocity(&self, w: &[Complex64]) -> Result<GridField> {
        let np = self.grid.points();
        let mut c = vec![ZERO; 2 * np];
        for i in 0..np {
            if self.keep[i] {
                let psi = w[i] / self.ksq[i];
                c[i] = I * self.ky[i] * psi;
                c[np + i] = -I * self.kx[i] * psi;
            }
        }
        Ok(GridField::from_coefficients(self.grid, c)?)
    }

    fn divergence(&self, w: &[Complex64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..w.len() {
            if !self.keep[i] || w[i] == ZERO {
                continue;
            }
            let psi = w[i] / self.ksq[i];
            let (u1, u2) = (I * self.ky[i] * psi, -I * self.kx[i] * psi);
            let div = (u1 * self.kx[i] + u2 * self.ky[i]).norm();
            let mag = (u1.norm_sqr() + u2.norm_sqr()).sqrt() * self.ksq[i].sqrt();
            worst = worst.max(div / mag);
        }
        worst
    }

    fn transfer_defect(&self, w: &[Complex64], nl: &[Complex64]) -> f64 {
        let (mut num, mut den) = (Vec::new(), Vec::new());
        for i in 0..w.len() {
            if self.keep[i] {
                num.push((w[i].conj() * nl[i]).re / self.ksq[i]);
                den.push(w[i].norm() * nl[i].norm() / self.ksq[i]);
            }
        }
        let d = pairwise_sum(&den);
        if d == 0.0 {
            0.0
        } else {
            pairwise_sum(&num).abs() / d
        }
    }

    // 2 int ||Du||^2 over one step, exact when every mode decays exponentially
    fn step_dissipation(&self, before: &[Complex64], after: &[Complex64], h: f64) -> f64 {
        let k0 = self.grid.k0();
        let terms: Vec<f64> = (0..before.len())
            .filter(|&i| self.keep[i])
            .map(|i| 2.0 * log_mean_integral(before[i].norm_sqr(), after[i].norm_sqr(), h, 2.0 * self.ksq[i]))
            .collect();
        k0 * k0 * pairwise_sum(&terms)
    }
}

// int_0^h f for f exponential through f(0) = a, f(h) = b; `rate` is used
// when b has underflowed.
fn log_mean_integral(a: f64, b: f64, h: f64, rate: f64) -> f64 {
    if a == b {
        return a * h;
    }
    if a <= 0.0 || b <= 0.0 {
        if a > 0.0 && rate > 0.0 {
            return a * (1.0 - (-rate * h).exp()) / rate;
        }
        return 0.5 * (a + b) * h;
    }
    let x = (a / b).ln();
    if x.abs() < 1e-4 {
        b * h * (1.0 + x / 2.0 + x * x / 6.0)
    } else {
        h * (a - b) / x
    }
}

/// Integrates the Navier-Stokes equations from `u0` and records norms of
/// `u`, the heat flow `v` and `u - v` at `cfg.record_times`.
pub fn evolve_nse(u0: &GridField, cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;
    let grid = cfg.grid;
    if *u0.grid() != grid {
        return Err(Error::InitialData("datum lives on a different grid".into()));
    }
    if !u0.check_invariants(1e-10) {
        return Err(Error::InitialData("datum must be real, divergence-free and mean-zero".into()));
    }
    let mut solver = Solver::new(grid, cfg.dealias);
    let np = grid.points();
    let w0 = solver.vorticity(u0);
    // everything outside the retained modes must already vanish
    let kept = solver.energy_terms(&w0, |k2| 1.0 / k2);
    let total = u0.total_energy()?;
    if (total - kept).abs() > 1e-12 * total {
        return Err(Error::InitialData("datum is not dealias-truncated".into()));
    }

    let dx = grid.length / grid.n as f64;
    let mut w = w0.clone();
    let mut k1 = vec![ZERO; np];
    let (mut k2, mut k3, mut k4) = (vec![ZERO; np], vec![ZERO; np], vec![ZERO; np]);
    let mut stage = vec![ZERO; np];
    let mut half = vec![0.0; np];

    let n_rec = cfg.record_times.len();
    let mut rows_u = Vec::with_capacity(n_rec);
    let mut rows_v = Vec::with_capacity(n_rec);
    let mut theta = Vec::with_capacity(n_rec);
    let mut ledger = Vec::with_capacity(n_rec);
    let mut max_div: f64 = 0.0;
    let mut max_transfer: f64 = 0.0;
    let mut dissipation = 0.0;
    let mut t = 0.0;
    let mut steps = 0;
    let l2_0 = solver.norms(&w0)[0];

    let mut umax = solver.nonlinear(&w, &mut k1);
    for &tr in &cfg.record_times {
        while t < tr {
            let remaining = tr - t;
            let mut h = if cfg.growth > 0.0 {
                (cfg.growth * t).clamp(cfg.dt, cfg.dt_max)
            } else {
                cfg.dt
            };
            let limit = if umax > 0.0 { cfg.cfl * dx / umax } else { f64::INFINITY };
            if h > limit {
                if cfg.growth == 0.0 || limit < 1e-12 * cfg.t_end {
                    return Err(Error::CflViolation { t, dt: h, limit, umax });
                }
                h = limit;
            }
            if remaining <= h * (1.0 + 1e-12) {
                h = remaining;
            } else if remaining < 2.0 * h {
                h = 0.5 * remaining;
            }
            let before = w.clone();
            match cfg.integrator {
                Integrator::IfRk4 => {
                    for i in 0..np {
                        half[i] = (-solver.ksq[i] * h * 0.5).exp();
                    }
                    for i in 0..np {
                        stage[i] = half[i] * (w[i] + 0.5 * h * k1[i]);
                    }
                    solver.nonlinear(&stage, &mut k2);
                    for i in 0..np {
                        stage[i] = half[i] * w[i] + 0.5 * h * k2[i];
                    }
                    solver.nonlinear(&stage, &mut k3);
                    for i in 0..np {
                        stage[i] = half[i] * half[i] * w[i] + h * half[i] * k3[i];
                    }
                    solver.nonlinear(&stage, &mut k4);
                    for i in 0..np {
                        let e = half[i];
                        w[i] = e * e * w[i] + h / 6.0 * (e * e * k1[i] + 2.0 * e * (k2[i] + k3[i]) + k4[i]);
                    }
                }
                Integrator::ImexEuler => {
                    for i in 0..np {
                        w[i] = (w[i] + h * k1[i]) / (1.0 + h * solver.ksq[i]);
                    }
                }
            }
            for i in 0..np {
                if !solver.keep[i] {
                    w[i] = ZERO;
                }
            }
            dissipation += solver.step_dissipation(&before, &w, h);
            t = if remaining == h { tr } else { t + h };
            steps += 1;
            umax = solver.nonlinear(&w, &mut k1);
        }
        let nu = solver.norms(&w);
        if l2_0 > 0.0 && nu[0] > 10.0 * l2_0 {
            return Err(Error::BlowupDetected { t, ratio: nu[0] / l2_0 });
        }
        for i in 0..np {
            stage[i] = w0[i] * (-solver.ksq[i] * t).exp();
        }
        rows_v.push(solver.norms(&stage));
        for i in 0..np {
            stage[i] = w[i] - stage[i];
        }
        theta.push(solver.energy_terms(&stage, |k2| 1.0 / k2).sqrt());
        rows_u.push(nu);
        ledger.push(LedgerEntry {
            energy: nu[0] * nu[0],
            dissipation,
        });
        max_div = max_div.max(solver.divergence(&w));
        max_transfer = max_transfer.max(solver.transfer_defect(&w, &k1));
    }

    let profile = |rows: &[[f64; 3]]| DecayProfile {
        times: cfg.record_times.clone(),
        l2: rows.iter().map(|r| r[0]).collect(),
        hdot1: rows.iter().map(|r| r[1]).collect(),
        hdot2: rows.iter().map(|r| r[2]).collect(),
        backend: Backend::Grid,
        validity_horizon: Some(grid.validity_horizon()),
    };
    Ok(SimTrace {
        u: profile(&rows_u),
        v: profile(&rows_v),
        theta_l2: theta,
        energy_ledger: ledger,
        integrator: cfg.integrator,
        steps,
        max_divergence: max_div,
        max_transfer_defect: max_transfer,
        final_state: solver.velocity(&w)?,
    })
}

/// A velocity field whose vorticity is `amplitude * cos(k0 m.x)` summed over
/// the lattice vectors `(m1, m2)` and `(m1, -m2)`. Both have the same length,
/// so the vorticity is a Laplacian eigenfunction and the nonlinear term
/// vanishes identically: the solution is `e^{-|k|^2 t} u0`.
pub fn exact_mode_field(grid: Grid, m: [i64; 2], amplitude: f64) -> Result<GridField> {
    if grid.dim != 2 || m == [0, 0] {
        return Err(Error::InitialData("exact modes need a 2D grid and m != 0".into()));
    }
    let n = grid.n as i64;
    let idx = |a: i64, b: i64| (a.rem_euclid(n) * n + b.rem_euclid(n)) as usize;
    let np = grid.points();
    let mut w = vec![ZERO; np];
    for (a, b) in [(m[0], m[1]), (m[0], -m[1])] {
        w[idx(a, b)] += Complex64::new(0.5 * amplitude, 0.0);
        w[idx(-a, -b)] += Complex64::new(0.5 * amplitude, 0.0);
    }
    let mut c = vec![ZERO; 2 * np];
    for i in 0..np {
        if w[i] == ZERO {
            continue;
        }
        let k = grid.wavevector(i);
        let psi = w[i] / (k[0] * k[0] + k[1] * k[1]);
        c[i] = I * k[1] * psi;
        c[np + i] = -I * k[0] * psi;
    }
    Ok(GridField::from_coefficients(grid, c)?)
}

/// Zeroes every mode outside `|m_i| <= floor(dealias N / 2)`.
pub fn dealias_truncate(field: &GridField, dealias: f64) -> GridField {
    let grid = *field.grid();
    let cut = (dealias * (grid.n / 2) as f64).floor() as i64;
    let mut out = field.clone();
    for idx in 0..grid.points() {
        let m = grid.mode(idx);
        if m[..grid.dim].iter().any(|x| x.abs() > cut) {
            out.set_coeff(idx, [ZERO; 3]);
        }
    }
    out
}

/// Random-phase divergence-free datum with `|u^(k)|^2` proportional to
/// `envelope(|k|)`, truncated by the 2/3 rule and rescaled to
/// `||u0|| = norm`.
pub fn small_data(grid: Grid, seed: u64, envelope: &Amplitude, norm: f64) -> Result<GridField> {
    let f = dealias_truncate(&make_random_div_free(grid, seed, envelope), 2.0 / 3.0);
    let e = f.total_energy()?;
    if !(e > 0.0) {
        return Err(Error::InitialData("envelope vanishes on the lattice".into()));
    }
    Ok(f.scaled(norm / e.sqrt()))
}

/// Deterministic datum `u^(k) = A(|k|)^{1/2} (2 k1^2 / |k|^2) e(k)` with the
/// swirl direction `e`, truncated by the 2/3 rule and rescaled to
/// `||u0|| = norm`. The angular factor
/// makes the trace-free part of `int u (x) u` nonzero, so the nonlinear
/// term does not reduce to a pressure gradient as it does for pure swirls.
pub fn anisotropic_data(grid: Grid, envelope: &Amplitude, norm: f64) -> Result<GridField> {
    if grid.dim != 2 {
        return Err(Error::InitialData("anisotropic data are two-dimensional".into()));
    }
    let f = GridField::from_fn(grid, |k| {
        let r2 = k[0] * k[0] + k[1] * k[1];
        let r = r2.sqrt();
        let a = envelope.value(r);
        if r2 == 0.0 || a == 0.0 {
            return [ZERO; 3];
        }
        let g = a.sqrt() * 2.0 * k[0] * k[0] / r2 / r;
        [-I * k[1] * g, I * k[0] * g, ZERO]
    });
    let f = dealias_truncate(&f, 2.0 / 3.0);
    let e = f.total_energy()?;
    if !(e > 0.0) {
        return Err(Error::InitialData("envelope vanishes on the lattice".into()));
    }
    Ok(f.scaled(norm / e.sqrt()))
}

/// Pairwise audit of the strong energy inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyAudit {
    pub pairs: usize,
    /// Smallest `(E(s) - E(t) - (D(t) - D(s))) / E(s)` over recorded `s < t`.
    pub worst_margin: f64,
    /// Largest absolute value of the same quantity.
    pub equality_residual: f64,
    pub tolerance: f64,
    pub inequality_holds: bool,
    pub equality_holds: bool,
}

pub const ENERGY_TOL: f64 = 1e-6;

pub fn energy_audit(trace: &SimTrace) -> EnergyAudit {
    let l = &trace.energy_ledger;
    let mut worst = f64::INFINITY;
    let mut resid: f64 = 0.0;
    let mut pairs = 0;
    for s in 0..l.len() {
        for t in (s + 1)..l.len() {
            let gap = l[s].energy - l[t].energy - (l[t].dissipation - l[s].dissipation);
            let rel = if l[s].energy > 0.0 { gap / l[s].energy } else { gap };
            worst = worst.min(rel);
            resid = resid.max(rel.abs());
            pairs += 1;
        }
    }
    if pairs == 0 {
        worst = 0.0;
    }
    EnergyAudit {
        pairs,
        worst_margin: worst,
        equality_residual: resid,
        tolerance: ENERGY_TOL,
        inequality_holds: worst >= -ENERGY_TOL,
        equality_holds: resid <= ENERGY_TOL,
    }
}

/// The last decade of record times before the final one.
pub fn last_decade(trace: &SimTrace) -> Result<(f64, f64)> {
    let t_end = *trace.times().last().unwrap_or(&0.0);
    let first = trace.times().iter().copied().find(|&t| t > 0.0).unwrap_or(t_end);
    let window = ((t_end / 10.0).max(first), t_end);
    let decades = if window.0 > 0.0 { (window.1 / window.0).log10() } else { 0.0 };
    if decades < 1.0 - 1e-9 {
        return Err(lpdecay_core::Error::WindowTooShort { decades, required: 1.0 }.into());
    }
    Ok(window)
}

// slope of ln y against ln t over the window, skipping zeros
fn window_slope(times: &[f64], values: &[f64], window: (f64, f64)) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= window.0 * (1.0 - 1e-12) && **t <= window.1 * (1.0 + 1e-12) && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .unzip();
    if x.len() < 3 {
        None
    } else {
        Some(linear_fit(&x, &y).0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiegnerReport {
    pub alpha: f64,
    pub window: (f64, f64),
    /// Slope of `ln ||u - v||` against `ln t`; absent when `u = v`.
    pub slope: Option<f64>,
    pub target: f64,
    pub tolerance: f64,
    /// Largest `||u - v|| / ||v||` over the window.
    pub max_relative: f64,
    pub identically_zero: bool,
    /// `alpha` beyond `(n+2)/4 = 1`, where no transfer is claimed.
    pub beyond_transfer_range: bool,
    pub passes: bool,
}

/// Decay of `theta = u - v`: slope at most `-min(2 alpha, 1)` up to the
/// tolerance (0.05 below `alpha = 1/2`, 0.1 above).
pub fn wiegner_difference_check(trace: &SimTrace, alpha: f64) -> Result<WiegnerReport> {
    let window = last_decade(trace)?;
    let t = trace.times();
    let zero = trace.theta_l2.iter().all(|&x| x == 0.0);
    let slope = window_slope(t, &trace.theta_l2, window);
    let target = -(2.0 * alpha).min(1.0);
    let tolerance = if alpha < 0.5 { 0.05 } else { 0.1 };
    let mut max_rel: f64 = 0.0;
    for i in 0..t.len() {
        if t[i] >= window.0 && trace.v.l2[i] > 0.0 {
            max_rel = max_rel.max(trace.theta_l2[i] / trace.v.l2[i]);
        }
    }
    let passes = zero || slope.is_some_and(|s| s <= target + tolerance);
    Ok(WiegnerReport {
        alpha,
        window,
        slope: if zero { None } else { slope },
        target,
        tolerance,
        max_relative: max_rel,
        identically_zero: zero,
        beyond_transfer_range: alpha > 1.0,
        passes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub alpha: f64,
    pub window: (f64, f64),
    pub slope: Option<f64>,
    pub target: f64,
    pub tolerance: f64,
    /// `sup (1+t)^alpha t^{1/2} ||Du(t)||` over the window.
    pub sup_constant: f64,
    pub passes: bool,
}

/// `||Du(t)|| = O((1+t)^{-alpha} t^{-1/2})`: bounded compensated curve and
/// slope `-(alpha + 1/2)` within 0.1.
pub fn gradient_decay_check(trace: &SimTrace, alpha: f64) -> Result<GradientReport> {
    let window = last_decade(trace)?;
    let t = trace.times();
    let d = &trace.u.hdot1;
    let mut sup: f64 = 0.0;
    for i in 0..t.len() {
        if t[i] >= window.0 {
            sup = sup.max((1.0 + t[i]).powf(alpha) * t[i].sqrt() * d[i]);
        }
    }
    let zero = d.iter().all(|&x| x == 0.0);
    let slope = window_slope(t, d, window);
    let target = -(alpha + 0.5);
    let tolerance = 0.1;
    Ok(GradientReport {
        alpha,
        window,
        slope,
        target,
        tolerance,
        sup_constant: sup,
        passes: zero || slope.is_some_and(|s| (s - target).abs() <= tolerance),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiminfReport {
    pub compensated: CompensatedReport,
    /// Allowed `sup / inf - 1` for the curve to count as flat.
    pub tolerance: f64,
    pub flat: bool,
}

/// Windowed infimum of `t^{alpha + l/2} ||D^l u(t)||`; a positive, flat
/// curve is the finite-window reading of a positive liminf.
pub fn liminf_check(profile: &DecayProfile, alpha: f64, l: usize, window: (f64, f64), tolerance: f64) -> Result<LiminfReport> {
    let c = compensated_curve(profile, alpha, l, window)?;
    let flat = c.positive && c.spread <= tolerance;
    Ok(LiminfReport {
        compensated: c,
        tolerance,
        flat,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseWiegnerReport {
    pub u: DecayCertificate,
    pub v: DecayCertificate,
    pub difference: f64,
    pub tolerance: f64,
    /// `C_v / C_u` of the upper constants.
    pub constant_ratio: f64,
    pub constant_cap: f64,
    pub passes: bool,
}

/// Same fitted rate for `||u||^2` and `||v||^2` on the last decade, with
/// comparable upper constants.
pub fn inverse_wiegner_check(trace: &SimTrace) -> Result<InverseWiegnerReport> {
    let window = last_decade(trace)?;
    let cu = fit::fit_rate(&trace.u, window)?;
    let cv = fit::fit_rate(&trace.v, window)?;
    let difference = (cu.sigma_hat - cv.sigma_hat).abs();
    let constant_ratio = if cu.c_upper > 0.0 { cv.c_upper / cu.c_upper } else { f64::INFINITY };
    let tolerance = 0.05;
    let constant_cap = 10.0;
    let passes = difference <= tolerance && constant_ratio <= constant_cap;
    Ok(InverseWiegnerReport {
        u: cu,
        v: cv,
        difference,
        tolerance,
        constant_ratio,
        constant_cap,
        passes,
    })
}
