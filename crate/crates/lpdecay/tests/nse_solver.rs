use std::f64::consts::PI;

use lpdecay::nse::*;
use lpdecay::Error;
use lpdecay_core::grid::{Grid, GridField};
use lpdecay_core::radial::Amplitude;
use lpdecay_core::SpectralField;

fn fixed_step(grid: Grid, dt: f64, t_end: f64, integrator: Integrator) -> SimConfig {
    SimConfig {
        dt,
        dt_max: dt,
        growth: 0.0,
        t_end,
        integrator,
        record_times: vec![0.0, t_end],
        ..SimConfig::desk(grid)
    }
}

fn rel_diff(a: &GridField, b: &GridField) -> f64 {
    let d = a.sub(b).unwrap().total_energy().unwrap();
    (d / b.total_energy().unwrap()).sqrt()
}

/// Strongly nonlinear datum on the unit box: the nonlinear term dominates
/// the step error.
fn stiff_pair() -> (GridField, Grid) {
    let grid = Grid::new(2, 2.0 * PI, 32).unwrap();
    let u0 = anisotropic_data(grid, &Amplitude::GaussianSwirl, 4.0).unwrap();
    (u0, grid)
}

#[test]
fn rk4_converges_at_fourth_order() {
    let (u0, grid) = stiff_pair();
    let t_end = 0.1;
    let run = |dt: f64| {
        evolve_nse(&u0, &fixed_step(grid, dt, t_end, Integrator::IfRk4))
            .unwrap()
            .final_state
    };
    let reference = run(t_end / 160.0);
    let e1 = rel_diff(&run(t_end / 10.0), &reference);
    let e2 = rel_diff(&run(t_end / 20.0), &reference);
    let order = (e1 / e2).log2();
    assert!(e1 > 1e-12, "nonlinearity too weak to measure: {e1}");
    assert!((order - 4.0).abs() < 0.5, "observed order {order} ({e1}, {e2})");
}

#[test]
fn imex_euler_is_first_order_and_agrees_with_rk4() {
    let (u0, grid) = stiff_pair();
    let t_end = 0.1;
    let reference = evolve_nse(&u0, &fixed_step(grid, t_end / 160.0, t_end, Integrator::IfRk4))
        .unwrap()
        .final_state;
    let run = |dt: f64| {
        evolve_nse(&u0, &fixed_step(grid, dt, t_end, Integrator::ImexEuler))
            .unwrap()
            .final_state
    };
    let e1 = rel_diff(&run(t_end / 40.0), &reference);
    let e2 = rel_diff(&run(t_end / 80.0), &reference);
    let order = (e1 / e2).log2();
    assert!((order - 1.0).abs() < 0.25, "observed order {order} ({e1}, {e2})");
    assert!(e2 < 1e-2, "{e2}");
}

#[test]
fn small_data_stay_close_to_the_heat_flow() {
    let grid = Grid::new(2, 16.0 * PI, 64).unwrap();
    let u0 = small_data(grid, 42, &Amplitude::GaussianSwirl, 1e-3).unwrap();
    let tr = evolve_nse(&u0, &SimConfig::desk(grid)).unwrap();
    for i in 0..tr.times().len() {
        assert!(
            tr.theta_l2[i] <= 1e-4 * tr.v.l2[i],
            "t = {}: {} vs {}",
            tr.times()[i],
            tr.theta_l2[i],
            tr.v.l2[i]
        );
    }
    let audit = energy_audit(&tr);
    assert!(audit.inequality_holds && audit.equality_holds, "{audit:?}");
}

#[test]
fn companion_heat_flow_is_exact() {
    let grid = Grid::new(2, 8.0 * PI, 32).unwrap();
    let u0 = small_data(grid, 1, &Amplitude::GaussianSwirl, 0.5).unwrap();
    let tr = evolve_nse(&u0, &SimConfig::desk(grid)).unwrap();
    for (t, v) in tr.times().iter().zip(&tr.v.l2) {
        let want = u0.heat_evolve(*t).total_energy().unwrap().sqrt();
        assert!((v / want - 1.0).abs() < 1e-13);
    }
}

#[test]
fn fixed_steps_report_cfl_violations() {
    let (u0, grid) = stiff_pair();
    let u0 = u0.scaled(20.0);
    let err = evolve_nse(&u0, &fixed_step(grid, 0.05, 0.1, Integrator::IfRk4)).unwrap_err();
    assert!(matches!(err, Error::CflViolation { .. }), "{err}");
}

#[test]
fn adaptive_steps_land_on_record_times() {
    let grid = Grid::new(2, 8.0 * PI, 32).unwrap();
    let u0 = small_data(grid, 3, &Amplitude::GaussianSwirl, 0.1).unwrap();
    let cfg = SimConfig::desk(grid);
    let tr = evolve_nse(&u0, &cfg).unwrap();
    assert_eq!(tr.times(), &cfg.record_times[..]);
    assert!(tr.steps >= cfg.record_times.len() - 1);
}

#[test]
fn invalid_configurations_are_rejected() {
    let grid = Grid::new(2, 2.0 * PI, 16).unwrap();
    let u0 = GridField::zeros(grid);
    let beyond = SimConfig {
        t_end: 1.0,
        ..SimConfig::desk(grid)
    };
    assert!(matches!(evolve_nse(&u0, &beyond), Err(Error::ConfigInvalid(_))));
    let g3 = Grid::new(3, 2.0 * PI, 16).unwrap();
    assert!(matches!(
        evolve_nse(&GridField::zeros(g3), &SimConfig::desk(g3)),
        Err(Error::ConfigInvalid(_))
    ));
}

#[test]
fn truncation_matches_the_solver_cut() {
    let grid = Grid::new(2, 8.0 * PI, 32).unwrap();
    let f = lpdecay_core::synthesis::make_random_div_free(grid, 9, &Amplitude::GaussianSwirl);
    let t = dealias_truncate(&f, 2.0 / 3.0);
    assert!(t.total_energy().unwrap() < f.total_energy().unwrap());
    for idx in 0..grid.points() {
        let m = grid.mode(idx);
        let inside = m[0].abs() <= 10 && m[1].abs() <= 10;
        assert_eq!(t.coeff(idx), if inside { f.coeff(idx) } else { [Default::default(); 3] });
    }
    // the untruncated field is refused, the truncated one runs
    let cfg = SimConfig::desk(grid);
    assert!(matches!(evolve_nse(&f, &cfg), Err(Error::InitialData(_))));
    assert!(evolve_nse(&t, &cfg).is_ok());
}
