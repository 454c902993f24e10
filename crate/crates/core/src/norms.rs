use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::radial::RadialSpectralProfile;
pub use crate::radial::Weight;

/// Which field representation produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Radial,
    Grid,
}

impl core::fmt::Display for Backend {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Backend::Radial => "radial",
            Backend::Grid => "grid",
        })
    }
}

/// Common interface of the radial and grid representations: weighted
/// spectral energies over annuli.
pub trait SpectralField: Clone {
    fn dim(&self) -> usize;

    fn backend(&self) -> Backend;

    /// `int_{lo <= |xi| < hi} W(|xi|) |u^|^2`.
    fn energy(&self, lo: f64, hi: f64, w: Weight) -> Result<f64>;

    /// `int_{|xi| <= rho} W(|xi|) |u^|^2`.
    fn energy_within(&self, rho: f64, w: Weight) -> Result<f64>;

    /// `int_{lo <= |xi| <= hi} g(|xi|) |u^|^2` for a bounded weight `g`,
    /// with `breaks` listing radii where `g` is not smooth.
    fn energy_weighted(&self, lo: f64, hi: f64, g: &dyn Fn(f64) -> f64, breaks: &[f64]) -> Result<f64>;

    /// Smallest frequency the representation resolves (0 on `R^n`).
    fn min_frequency(&self) -> f64;

    /// Largest time for which heat decay is meaningful.
    fn validity_horizon(&self) -> Option<f64>;

    /// `e^{t Delta} u`.
    fn heat(&self, t: f64) -> Self;

    /// `lambda u`.
    fn scale(&self, lambda: f64) -> Self;

    fn total_energy(&self) -> Result<f64> {
        self.energy(0.0, f64::INFINITY, Weight::MASS)
    }
}

impl SpectralField for RadialSpectralProfile {
    fn dim(&self) -> usize {
        self.dim
    }

    fn backend(&self) -> Backend {
        Backend::Radial
    }

    fn energy(&self, lo: f64, hi: f64, w: Weight) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        Ok(self.integrate(lo, hi, w, None, &[])?.value)
    }

    fn energy_within(&self, rho: f64, w: Weight) -> Result<f64> {
        self.energy(0.0, rho, w)
    }

    fn energy_weighted(&self, lo: f64, hi: f64, g: &dyn Fn(f64) -> f64, breaks: &[f64]) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        Ok(self.integrate(lo, hi, Weight::MASS, Some(g), breaks)?.value)
    }

    fn min_frequency(&self) -> f64 {
        0.0
    }

    fn validity_horizon(&self) -> Option<f64> {
        None
    }

    fn heat(&self, t: f64) -> Self {
        self.map_amplitude(|a| a.heat_evolved(t))
    }

    fn scale(&self, lambda: f64) -> Self {
        self.map_amplitude(|a| a.scaled(lambda * lambda))
    }
}

impl SpectralField for GridField {
    fn dim(&self) -> usize {
        self.grid().dim
    }

    fn backend(&self) -> Backend {
        Backend::Grid
    }

    fn energy(&self, lo: f64, hi: f64, w: Weight) -> Result<f64> {
        Ok(self.lattice_energy(lo, hi, false, w))
    }

    fn energy_within(&self, rho: f64, w: Weight) -> Result<f64> {
        Ok(self.lattice_energy(0.0, rho, true, w))
    }

    fn energy_weighted(&self, lo: f64, hi: f64, g: &dyn Fn(f64) -> f64, _breaks: &[f64]) -> Result<f64> {
        Ok(self.lattice_sum(|r| if r >= lo && r <= hi { g(r) } else { 0.0 }))
    }

    fn min_frequency(&self) -> f64 {
        2.0 * self.grid().k0()
    }

    fn validity_horizon(&self) -> Option<f64> {
        Some(self.grid().validity_horizon())
    }

    fn heat(&self, t: f64) -> Self {
        self.heat_evolve(t)
    }

    fn scale(&self, lambda: f64) -> Self {
        self.scaled(lambda)
    }
}

/// `||u||` and the homogeneous Sobolev seminorms `||D^l u||`, `l = 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldNorms {
    pub l2: f64,
    pub hdot: [f64; 2],
}

/// Plancherel sums (grid) or radial quadrature of `||D^l u||`.
pub fn norms<F: SpectralField>(f: &F) -> Result<FieldNorms> {
    let e = |l: u32| f.energy(0.0, f64::INFINITY, Weight::derivative(l)).map(|x| x.max(0.0).sqrt());
    Ok(FieldNorms {
        l2: e(0)?,
        hdot: [e(1)?, e(2)?],
    })
}

/// `int_{|xi| <= rho} |u0^|^2`.
pub fn low_freq_mass<F: SpectralField>(f: &F, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::invalid("frequency radius must be positive"));
    }
    let min = f.min_frequency();
    if rho < min {
        return Err(Error::MassUnresolvable { rho, min });
    }
    f.energy_within(rho, Weight::MASS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::radial::Amplitude;
    use core::f64::consts::PI;

    #[test]
    fn gaussian_norms() {
        let p = RadialSpectralProfile::new(2, Amplitude::GaussianSwirl).unwrap();
        let n = norms(&p).unwrap();
        // int r^3 e^{-r^2} 2 pi = pi; with r^2: 2pi int r^5 e^{-r^2} = 2 pi; r^4: 2pi * 3 = 6 pi
        assert!((n.l2 * n.l2 / PI - 1.0).abs() < 1e-9);
        assert!((n.hdot[0] * n.hdot[0] / (2.0 * PI) - 1.0).abs() < 1e-9);
        assert!((n.hdot[1] * n.hdot[1] / (6.0 * PI) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_field_norms() {
        let p = RadialSpectralProfile::new(2, Amplitude::power_law(1.0, 1.0).scaled(0.0)).unwrap();
        assert_eq!(norms(&p).unwrap(), FieldNorms { l2: 0.0, hdot: [0.0, 0.0] });
        let g = GridField::zeros(Grid::new(2, 1.0, 16).unwrap());
        assert_eq!(norms(&g).unwrap(), FieldNorms { l2: 0.0, hdot: [0.0, 0.0] });
    }

    #[test]
    fn grid_mass_needs_resolution() {
        let g = GridField::zeros(Grid::new(2, 2.0 * PI, 16).unwrap());
        assert!(matches!(low_freq_mass(&g, 1.0), Err(Error::MassUnresolvable { .. })));
        assert_eq!(low_freq_mass(&g, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn v0_low_frequency_mass() {
        let p = RadialSpectralProfile::new(2, Amplitude::LogCounterexample { dim: 2 }).unwrap();
        let m = low_freq_mass(&p, 0.01).unwrap();
        assert!((m / (2.0 * PI / 100f64.ln()) - 1.0).abs() < 1e-9);
    }
}
