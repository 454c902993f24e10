use lpdecay_core::dyadic;
use lpdecay_core::fit::{self, FitOptions};
use lpdecay_core::grid::{Grid, GridField};
use lpdecay_core::heat;
use lpdecay_core::math::log_space;
use lpdecay_core::radial::Amplitude;
use lpdecay_core::synthesis::*;
use lpdecay_core::{low_freq_mass, SpectralField, Weight};
use num_complex::Complex64;
use proptest::prelude::*;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 50,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_1a7e),
        ..ProptestConfig::default()
    }
}

fn random_grid_field(dim: usize, seed: u64) -> GridField {
    let n = if dim == 2 { 32 } else { 16 };
    let grid = Grid::new(dim, 8.0 * std::f64::consts::PI, n).unwrap();
    make_random_div_free(grid, seed, &Amplitude::GaussianSwirl)
}

fn max_diff(a: &GridField, b: &GridField) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn leray_is_idempotent(seed in any::<u64>(), dim in 2usize..=3) {
        let grid = Grid::new(dim, 2.0 * std::f64::consts::PI, 16).unwrap();
        let mut rng = seed;
        // arbitrary, not divergence-free
        let raw = GridField::from_fn(grid, |_| {
            let mut v = [Complex64::new(0.0, 0.0); 3];
            for c in v.iter_mut() {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let im = (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                *c = Complex64::new(re, im);
            }
            v
        });
        let p = raw.leray_project();
        let pp = p.leray_project();
        prop_assert!(max_diff(&p, &pp) < 1e-14);
        prop_assert!(p.divergence_defect() < 1e-13);
    }

    #[test]
    fn leray_annihilates_gradients(seed in any::<u64>(), dim in 2usize..=3) {
        let grid = Grid::new(dim, 2.0 * std::f64::consts::PI, 16).unwrap();
        let phase = (seed % 1000) as f64 * 1e-3;
        let g = GridField::from_fn(grid, |k| {
            let phi = Complex64::from_polar(1.0, phase + k[0]);
            let mut v = [Complex64::new(0.0, 0.0); 3];
            for c in 0..k.len() {
                v[c] = phi * k[c];
            }
            v
        });
        let p = g.leray_project();
        let scale = g.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(p.coefficients().iter().all(|c| c.norm() <= 1e-14 * scale));
    }

    #[test]
    fn random_fields_satisfy_invariants(seed in any::<u64>(), dim in 2usize..=3) {
        let f = random_grid_field(dim, seed);
        prop_assert!(f.check_invariants(1e-12));
    }

    #[test]
    fn synthesis_is_deterministic(seed in any::<u64>(), dim in 2usize..=3) {
        let a = random_grid_field(dim, seed);
        let b = random_grid_field(dim, seed);
        prop_assert_eq!(a.coefficients(), b.coefficients());
        let e1 = make_random_envelope(2, seed, 0.5, 1.0, 0.3).unwrap();
        let e2 = make_random_envelope(2, seed, 0.5, 1.0, 0.3).unwrap();
        prop_assert_eq!(e1, e2);
    }

    #[test]
    fn grid_heat_is_a_semigroup(seed in any::<u64>(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let f = random_grid_field(2, seed);
        let a = f.heat_evolve(s).heat_evolve(t);
        let b = f.heat_evolve(s + t);
        let scale = f.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(max_diff(&a, &b) <= 1e-13 * scale);
    }

    #[test]
    fn radial_heat_is_a_semigroup(kappa in 0.0f64..2.0, s in 0.01f64..100.0, t in 0.01f64..100.0) {
        let u = make_power_law(2, kappa, 1.0).unwrap();
        let a = u.heat(s).heat(t).total_energy().unwrap();
        let b = u.heat(s + t).total_energy().unwrap();
        prop_assert!(rel(a, b) < 1e-9, "{} {}", a, b);
    }

    #[test]
    fn energy_is_quadratic_under_scaling(seed in any::<u64>(), lambda in 0.01f64..100.0) {
        let f = random_grid_field(2, seed);
        let e = f.total_energy().unwrap();
        prop_assert!(rel(f.scale(lambda).total_energy().unwrap(), lambda * lambda * e) < 1e-12);
        let u = make_power_law(3, 0.5, 1.0).unwrap();
        let e = u.total_energy().unwrap();
        prop_assert!(rel(u.scale(lambda).total_energy().unwrap(), lambda * lambda * e) < 1e-12);
    }

    #[test]
    fn sharp_blocks_account_for_all_mass(kappa in -0.9f64..2.0, dim in 2usize..=3) {
        let u = make_power_law(dim, kappa, 1.0).unwrap();
        let s = dyadic::dyadic_blocks(&u, -40, 10).unwrap();
        let total = u.total_energy().unwrap();
        prop_assert!(s.block_energy.iter().all(|b| *b >= 0.0));
        prop_assert!(rel(s.window_sum() + s.truncated_mass, total) < 1e-8);
        prop_assert!(s.window_sum() <= total * (1.0 + 1e-9));
    }

    #[test]
    fn grid_blocks_account_for_all_mass(seed in any::<u64>()) {
        let f = random_grid_field(2, seed);
        let j_min = (2.0 * f.grid().k0()).log2().ceil() as i32;
        let s = dyadic::dyadic_blocks(&f, j_min, 8).unwrap();
        let below = f.energy(0.0, (j_min as f64).exp2(), Weight::MASS).unwrap();
        prop_assert!(rel(s.window_sum() + below, f.total_energy().unwrap()) < 1e-12);
        prop_assert!(rel(s.truncated_mass, below) < 1e-9);
    }

    #[test]
    fn low_frequency_mass_is_monotone(kappa in -0.9f64..2.0, a in 1e-6f64..1.0, b in 1e-6f64..1.0) {
        let u = make_power_law(2, kappa, 1.0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(low_freq_mass(&u, lo).unwrap() <= low_freq_mass(&u, hi).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn fitted_rate_ignores_amplitude(kappa in 0.0f64..2.0, lambda in 0.01f64..100.0) {
        let u = make_power_law(2, kappa, 1.0).unwrap();
        let times = log_space(1.0, 1e6, 31);
        let p1 = heat::decay_profile(&u, &times).unwrap();
        let p2 = heat::decay_profile(&u.scale(lambda), &times).unwrap();
        let c1 = fit::fit_rate_with(&p1, (1e2, 1e6), FitOptions::default()).unwrap();
        let c2 = fit::fit_rate_with(&p2, (1e2, 1e6), FitOptions::default()).unwrap();
        prop_assert!((c1.sigma_hat - c2.sigma_hat).abs() < 1e-9);
        prop_assert_eq!(c1.verdict, c2.verdict);
    }

    #[test]
    fn radial_and_grid_energies_agree(t in 0.0f64..1.0) {
        let u = make_gaussian_swirl(2).unwrap();
        let grid = Grid::new(2, 16.0 * std::f64::consts::PI, 64).unwrap();
        let g = GridField::from_radial(grid, &u).unwrap();
        let er = u.energy(0.0, f64::INFINITY, Weight::MASS.at_time(t)).unwrap();
        let eg = g.energy(0.0, f64::INFINITY, Weight::MASS.at_time(t)).unwrap();
        prop_assert!(rel(er, eg) < 0.02, "{} {}", er, eg);
    }

    #[test]
    fn v_alpha_lies_inside_script_a(seed in any::<u64>(), kappa in -0.5f64..1.0, eps in 0.01f64..1.0, j0 in -10i32..0) {
        let src = make_random_envelope(2, seed, kappa, 1.0, 0.3).unwrap();
        let p = make_v_alpha_perturbation(&src, 0.25, eps, j0).unwrap();
        let v = perturbation_membership(&p).unwrap();
        prop_assert!(!v.in_v_alpha || v.in_script_a);
        prop_assert!(p.report.unchanged_above_j0);
    }
}
