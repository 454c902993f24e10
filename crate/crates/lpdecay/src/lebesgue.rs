//! Physical-space norms of grid fields.
//!
//! These are Riemann sums over the sample points and only approximate the
//! norms of the underlying continuous field.

use lpdecay_core::grid::GridField;
use lpdecay_core::heat::ForcingSpec;
use lpdecay_core::math::pairwise_sum;

use crate::error::Result;
use crate::fft::{to_physical, FftNd};

/// `(int |u(x)|^p dx)^{1/p}` with `|u|` the Euclidean norm of the vector.
pub fn lebesgue_norm(field: &GridField, p: f64, fft: &mut FftNd) -> f64 {
    let grid = *field.grid();
    let comps = to_physical(field, fft);
    let cell = (grid.length / grid.n as f64).powi(grid.dim as i32);
    let terms: Vec<f64> = (0..grid.points())
        .map(|i| {
            let m2: f64 = comps.iter().map(|c| c[i] * c[i]).sum();
            m2.powf(0.5 * p)
        })
        .collect();
    (cell * pairwise_sum(&terms)).powf(1.0 / p)
}

/// `||g||_{L^n}` of the spatial profile of a grid forcing, the value
/// [`lpdecay_core::heat::forcing_bound_check`] takes for its `L^n` bound.
/// `None` in two dimensions, where that bound is not needed.
pub fn forcing_ln_norm(f: &ForcingSpec<GridField>) -> Result<Option<f64>> {
    let grid = *f.g.grid();
    if grid.dim == 2 {
        return Ok(None);
    }
    let mut fft = FftNd::new(&grid);
    Ok(Some(lebesgue_norm(&f.g, grid.dim as f64, &mut fft)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpdecay_core::grid::Grid;
    use lpdecay_core::radial::Amplitude;
    use lpdecay_core::synthesis::make_random_div_free;
    use lpdecay_core::SpectralField;

    #[test]
    fn plancherel_on_random_fields() {
        for dim in [2, 3] {
            let grid = Grid::new(dim, 8.0 * std::f64::consts::PI, 16).unwrap();
            let f = make_random_div_free(grid, 7, &Amplitude::GaussianSwirl);
            let mut fft = FftNd::new(&grid);
            let phys = lebesgue_norm(&f, 2.0, &mut fft).powi(2);
            let spec = f.total_energy().unwrap();
            assert!((phys / spec - 1.0).abs() < 1e-12, "dim {dim}: {phys} {spec}");
        }
    }

    #[test]
    fn zero_field_norm() {
        let grid = Grid::new(3, 1.0, 16).unwrap();
        let mut fft = FftNd::new(&grid);
        assert_eq!(lebesgue_norm(&GridField::zeros(grid), 3.0, &mut fft), 0.0);
    }
}
