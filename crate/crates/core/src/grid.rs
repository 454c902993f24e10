//! Fourier coefficients of real, divergence-free vector fields on a periodic
//! box `[0, L)^n`, `n` in {2, 3}.
//!
//! Coefficients sample the continuous transform, `c(k) ~ u^(k)` at
//! `k = k0 m`, so that `||u||^2 = k0^n sum |c(k)|^2` matches the radial
//! backend. Storage is component-major and each component uses FFT ordering
//! along every axis (index `i` maps to `m = i` for `i < N/2`, else `i - N`).

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::radial::{swirl_direction, RadialSpectralProfile, Weight};

/// Periodic box of side `length` with `n` modes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub length: f64,
    pub n: usize,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl Grid {
    pub fn new(dim: usize, length: f64, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid("grids are only supported in 2 or 3 dimensions"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid("box length must be positive"));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::invalid("resolution must be a power of two, at least 16"));
        }
        Ok(Grid { dim, length, n })
    }

    /// Fundamental frequency `2 pi / L`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Number of lattice points.
    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Largest time for which heat decay on the box still resembles decay on
    /// the whole space: `0.1 / k0^2`.
    pub fn validity_horizon(&self) -> f64 {
        0.1 / (self.k0() * self.k0())
    }

    /// Integer frequency of axis index `i`.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        let h = self.n / 2;
        if i < h {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    fn index_of_freq(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    /// Integer frequency vector of a flat index (unused axes are 0).
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        match self.dim {
            2 => [self.freq(idx / n), self.freq(idx % n), 0],
            _ => [
                self.freq(idx / (n * n)),
                self.freq((idx / n) % n),
                self.freq(idx % n),
            ],
        }
    }

    /// Wavevector `k0 m` of a flat index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.mode(idx);
        let k0 = self.k0();
        [k0 * m[0] as f64, k0 * m[1] as f64, k0 * m[2] as f64]
    }

    /// Flat index of `-m`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let m = self.mode(idx);
        let n = self.n;
        let i0 = self.index_of_freq(-m[0]);
        let i1 = self.index_of_freq(-m[1]);
        match self.dim {
            2 => i0 * n + i1,
            _ => (i0 * n + i1) * n + self.index_of_freq(-m[2]),
        }
    }

    /// True for modes with a component at `-N/2`, which have no partner
    /// inside the lattice and are kept at zero.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = -(self.n as i64 / 2);
        let m = self.mode(idx);
        m[..self.dim].iter().any(|&x| x == h)
    }
}

/// A vector field in Fourier space on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(grid: Grid) -> Self {
        GridField {
            grid,
            coeffs: alloc::vec![ZERO; grid.points() * grid.dim],
        }
    }

    /// Builds a field from raw coefficients, zeroing the mean and Nyquist
    /// modes. No symmetry or divergence condition is imposed.
    pub fn from_coefficients(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.points() * grid.dim {
            return Err(Error::invalid("coefficient array has the wrong length"));
        }
        let mut f = GridField { grid, coeffs };
        f.clean();
        Ok(f)
    }

    /// Builds a field by evaluating `f(k)` (wavevector) at every mode.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> [Complex64; 3]) -> Self {
        let mut out = GridField::zeros(grid);
        let np = grid.points();
        for idx in 0..np {
            let k = grid.wavevector(idx);
            let v = f(&k[..grid.dim]);
            for c in 0..grid.dim {
                out.coeffs[c * np + idx] = v[c];
            }
        }
        out.clean();
        out
    }

    /// Samples a radial profile: `c(k) = A(|k|)^{1/2} e(k)`.
    pub fn from_radial(grid: Grid, profile: &RadialSpectralProfile) -> Result<Self> {
        if profile.dim != grid.dim {
            return Err(Error::invalid("profile and grid dimensions differ"));
        }
        Ok(GridField::from_fn(grid, |k| {
            let r = k.iter().map(|x| x * x).sum::<f64>().sqrt();
            let a = profile.amplitude_at(r).sqrt();
            let e = swirl_direction(k);
            let mut v = [ZERO; 3];
            for (c, ec) in e.iter().enumerate() {
                v[c] = ec * a;
            }
            v
        }))
    }

    fn clean(&mut self) {
        let np = self.grid.points();
        for idx in 0..np {
            if idx == 0 || self.grid.is_nyquist(idx) {
                for c in 0..self.grid.dim {
                    self.coeffs[c * np + idx] = ZERO;
                }
            }
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// All coefficients, component-major.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let np = self.grid.points();
        &self.coeffs[c * np..(c + 1) * np]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let np = self.grid.points();
        &mut self.coeffs[c * np..(c + 1) * np]
    }

    /// Coefficient vector at a flat index.
    pub fn coeff(&self, idx: usize) -> [Complex64; 3] {
        let np = self.grid.points();
        let mut v = [ZERO; 3];
        for c in 0..self.grid.dim {
            v[c] = self.coeffs[c * np + idx];
        }
        v
    }

    pub fn set_coeff(&mut self, idx: usize, v: [Complex64; 3]) {
        let np = self.grid.points();
        for c in 0..self.grid.dim {
            self.coeffs[c * np + idx] = v[c];
        }
    }

    /// Applies `f(k, c(k))` to every mode in place.
    pub fn map_modes(&mut self, mut f: impl FnMut(&[f64], &mut [Complex64; 3])) {
        let np = self.grid.points();
        for idx in 0..np {
            let k = self.grid.wavevector(idx);
            let mut v = self.coeff(idx);
            f(&k[..self.grid.dim], &mut v);
            self.set_coeff(idx, v);
        }
        self.clean();
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        GridField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * lambda).collect(),
        }
    }

    /// `self - other` on the same grid.
    pub fn sub(&self, other: &GridField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::invalid("fields live on different grids"));
        }
        Ok(GridField {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Leray-Helmholtz projection `c - k (k.c) / |k|^2`.
    pub fn leray_project(&self) -> Self {
        let mut out = self.clone();
        out.map_modes(|k, v| project(k, v));
        out
    }

    /// Heat multiplier `exp(-t |k|^2)`.
    pub fn heat_evolve(&self, t: f64) -> Self {
        let mut out = self.clone();
        out.map_modes(|k, v| {
            let e = (-t * k.iter().map(|x| x * x).sum::<f64>()).exp();
            for c in v.iter_mut() {
                *c *= e;
            }
        });
        out
    }

    /// `c(k) <- (c(k) + conj(c(-k))) / 2`.
    pub fn hermitian_symmetrize(&self) -> Self {
        let np = self.grid.points();
        let mut out = self.clone();
        for idx in 0..np {
            let mi = self.grid.mirror(idx);
            for c in 0..self.grid.dim {
                let a = self.coeffs[c * np + idx];
                let b = self.coeffs[c * np + mi].conj();
                out.coeffs[c * np + idx] = 0.5 * (a + b);
            }
        }
        out.clean();
        out
    }

    /// `max |c(k) - conj(c(-k))|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let np = self.grid.points();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..np {
            let mi = self.grid.mirror(idx);
            for c in 0..self.grid.dim {
                let d = self.coeffs[c * np + idx] - self.coeffs[c * np + mi].conj();
                worst = worst.max(d.norm());
            }
        }
        worst / scale
    }

    /// `max |k.c(k)| / (|k| |c(k)|)` over nonzero modes.
    pub fn divergence_defect(&self) -> f64 {
        let np = self.grid.points();
        let mut worst: f64 = 0.0;
        for idx in 1..np {
            let k = self.grid.wavevector(idx);
            let v = self.coeff(idx);
            let mut dot = ZERO;
            let mut cn = 0.0;
            let mut kn = 0.0;
            for c in 0..self.grid.dim {
                dot += v[c] * k[c];
                cn += v[c].norm_sqr();
                kn += k[c] * k[c];
            }
            if cn > 0.0 {
                worst = worst.max(dot.norm() / (cn.sqrt() * kn.sqrt()));
            }
        }
        worst
    }

    /// True if Hermitian, divergence-free (relative `tol`) and mean-zero.
    pub fn check_invariants(&self, tol: f64) -> bool {
        let mean_zero = (0..self.grid.dim).all(|c| self.coeffs[c * self.grid.points()] == ZERO);
        mean_zero && self.hermitian_defect() <= tol && self.divergence_defect() <= tol
    }

    /// `k0^n sum_{lo <= |k| < hi (or <= hi)} |k|^{2l} exp(-2t|k|^2) |c(k)|^2`.
    pub fn lattice_energy(&self, lo: f64, hi: f64, hi_closed: bool, w: Weight) -> f64 {
        self.lattice_sum(|r| {
            let inside = r >= lo && if hi_closed { r <= hi } else { r < hi };
            if inside {
                w.eval(r)
            } else {
                0.0
            }
        })
    }

    /// `k0^n sum_k g(|k|) |c(k)|^2`.
    pub fn lattice_sum(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        let np = self.grid.points();
        let mut terms = Vec::with_capacity(np);
        for idx in 0..np {
            let k = self.grid.wavevector(idx);
            let r = k.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut e = 0.0;
            for c in 0..self.grid.dim {
                e += self.coeffs[c * np + idx].norm_sqr();
            }
            if e > 0.0 {
                let wgt = g(r);
                terms.push(if wgt == 0.0 { 0.0 } else { e * wgt });
            } else {
                terms.push(0.0);
            }
        }
        math::pairwise_sum(&terms) * self.grid.k0().powi(self.grid.dim as i32)
    }
}

fn project(k: &[f64], v: &mut [Complex64; 3]) {
    let k2: f64 = k.iter().map(|x| x * x).sum();
    if k2 == 0.0 {
        return;
    }
    let mut dot = ZERO;
    for (c, kc) in k.iter().enumerate() {
        dot += v[c] * kc;
    }
    for (c, kc) in k.iter().enumerate() {
        v[c] -= dot * (kc / k2);
    }
}
