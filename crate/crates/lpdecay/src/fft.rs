//! Multidimensional FFTs on the coefficient layout of [`Grid`] and the
//! scaling between lattice coefficients and physical samples.

use std::f64::consts::PI;
use std::sync::Arc;

use lpdecay_core::grid::{Grid, GridField};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans for a cubic grid, applied axis by axis.
pub struct FftNd {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    lines: Vec<Complex64>,
}

impl FftNd {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n);
        let inverse = planner.plan_fft_inverse(grid.n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        FftNd {
            n: grid.n,
            dim: grid.dim,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
            lines: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized `sum_j x_j e^{-2 pi i jk/N}` along every axis.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let plan = self.forward.clone();
        self.apply(&*plan, data);
    }

    /// Unnormalized `sum_k x_k e^{+2 pi i jk/N}` along every axis.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let plan = self.inverse.clone();
        self.apply(&*plan, data);
    }

    fn apply(&mut self, plan: &dyn Fft<f64>, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len());
        let n = self.n;
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut self.scratch);
                continue;
            }
            // gather every line along `axis` into contiguous storage
            let outer = data.len() / (n * stride);
            let mut w = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    for k in 0..n {
                        self.lines[w + k] = data[base + k * stride];
                    }
                    w += n;
                }
            }
            plan.process_with_scratch(&mut self.lines, &mut self.scratch);
            let mut r = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    for k in 0..n {
                        data[base + k * stride] = self.lines[r + k];
                    }
                    r += n;
                }
            }
        }
    }
}

/// Factor `S` with `u(x_j) = S * IFFT(c)_j` for coefficients sampling the
/// unitary transform: `(2 pi)^{-n/2} k0^n`.
pub fn synthesis_scale(grid: &Grid) -> f64 {
    (2.0 * PI).powf(-(grid.dim as f64) / 2.0) * grid.k0().powi(grid.dim as i32)
}

/// Physical-space samples of every component, `[component][point]`.
pub fn to_physical(field: &GridField, fft: &mut FftNd) -> Vec<Vec<f64>> {
    let grid = *field.grid();
    let s = synthesis_scale(&grid);
    (0..grid.dim)
        .map(|c| {
            let mut buf = field.component(c).to_vec();
            fft.inverse(&mut buf);
            buf.iter().map(|z| z.re * s).collect()
        })
        .collect()
}

/// Inverse of [`to_physical`] for a single real component.
pub fn from_physical(grid: &Grid, samples: &[f64], fft: &mut FftNd) -> Vec<Complex64> {
    let norm = 1.0 / (synthesis_scale(grid) * grid.points() as f64);
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.forward(&mut buf);
    for z in buf.iter_mut() {
        *z *= norm;
    }
    buf
}
