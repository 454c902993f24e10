//! Acceptance suite. Prints one PASS/FAIL line per criterion to the
//! uncaptured stderr, then asserts every sub-check that is attainable.
//!
//! Some literal sub-checks cannot hold and are reported as FAIL without
//! failing the suite. For `v0` these are the tenfold growth of the compensated
//! mass between `rho = 1e-2` and `1e-5` and the `|j|(|j|+1)` block formula.
//! For the perturbation they are the `2 eps` distance bound on replaced
//! shells, the `c_n eps` lower bound on kept shells whose ratio lies in
//! `[eps, c_n eps)`, and the `V_alpha` verdict for the `v0` source. The
//! `#[ignore]`d tests at the bottom assert them literally and fail when run.

use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use lpdecay::fft::FftNd;
use lpdecay::lebesgue::lebesgue_norm;
use lpdecay::nse::{self, SimConfig, SimTrace};
use lpdecay_core::dyadic::{self, dyadic_blocks};
use lpdecay_core::fit::{self, EquivalenceOptions};
use lpdecay_core::grid::{Grid, GridField};
use lpdecay_core::heat::{self, decay_profile, fourier_splitting_check, SPLITTING_TOL};
use lpdecay_core::math::log_space;
use lpdecay_core::radial::{Amplitude, Weight};
use lpdecay_core::synthesis::*;
use lpdecay_core::{low_freq_mass, Exponent, RadialSpectralProfile, SpectralField, Verdict};
use num_complex::Complex64;

struct Sub {
    name: String,
    passed: bool,
    detail: String,
    /// Known to be unattainable as stated; reported but not asserted.
    literal: bool,
}

#[derive(Default)]
struct Criterion {
    subs: Vec<Sub>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.subs.push(Sub {
            name: name.into(),
            passed,
            detail: detail.into(),
            literal: false,
        });
    }

    fn literal(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.subs.push(Sub {
            name: name.into(),
            passed,
            detail: detail.into(),
            literal: true,
        });
    }

    fn runtime(&mut self, start: Instant, budget_s: f64) {
        let s = start.elapsed().as_secs_f64();
        self.check("runtime", s < budget_s, format!("{s:.2} s (budget {budget_s} s)"));
    }

    /// Prints the summary line and the failing sub-checks, and panics if an
    /// attainable sub-check failed.
    fn finish(self, title: &str) {
        let passed = self.subs.iter().filter(|s| s.passed).count();
        let mark = if passed == self.subs.len() { "PASS" } else { "FAIL" };
        let mut out = std::io::stderr().lock();
        writeln!(out, "{mark} {title} ({passed}/{} sub-checks)", self.subs.len()).unwrap();
        for s in self.subs.iter().filter(|s| !s.passed) {
            let tag = if s.literal { "unattainable" } else { "failed" };
            writeln!(out, "    {tag}: {}: {}", s.name, s.detail).unwrap();
        }
        drop(out);
        let broken: Vec<String> = self
            .subs
            .iter()
            .filter(|s| !s.passed && !s.literal)
            .map(|s| format!("{}: {}", s.name, s.detail))
            .collect();
        assert!(broken.is_empty(), "{title}: {broken:#?}");
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

// ---------------------------------------------------------------------------
// shared Navier-Stokes runs

fn desk_grid() -> Grid {
    Grid::new(2, 200.0 * PI, 512).unwrap()
}

fn energy_run() -> &'static (SimTrace, f64) {
    static RUN: OnceLock<(SimTrace, f64)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let grid = desk_grid();
        let u0 = nse::small_data(grid, 11, &Amplitude::power_law(0.5, 1.0), 0.1).unwrap();
        let tr = nse::evolve_nse(&u0, &SimConfig::desk(grid)).unwrap();
        (tr, start.elapsed().as_secs_f64())
    })
}

fn anisotropic_run(alpha: f64) -> &'static SimTrace {
    static LOW: OnceLock<SimTrace> = OnceLock::new();
    static HIGH: OnceLock<SimTrace> = OnceLock::new();
    let cell = if alpha < 0.5 { &LOW } else { &HIGH };
    cell.get_or_init(|| {
        // alpha = s / 2 with s = kappa + 1 in the plane
        let kappa = 2.0 * alpha - 1.0;
        let grid = desk_grid();
        let u0 = nse::anisotropic_data(grid, &Amplitude::power_law(kappa, 1.0), 0.1).unwrap();
        nse::evolve_nse(&u0, &SimConfig::desk(grid)).unwrap()
    })
}

// ---------------------------------------------------------------------------
// the data corpus

fn power_laws() -> Vec<(String, RadialSpectralProfile, Exponent)> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        for kappa in [0.25, 0.5, 1.0, 1.5] {
            out.push((
                format!("power_law(n={n}, kappa={kappa})"),
                make_power_law(n, kappa, 1.0).unwrap(),
                Exponent::of_power_law(kappa, n),
            ));
        }
    }
    out
}

fn negatives() -> Vec<(String, RadialSpectralProfile)> {
    vec![
        ("v0".into(), make_log_counterexample(2).unwrap()),
        ("band_limited".into(), make_band_limited(2, 0.5, 0.1, 1.0).unwrap()),
    ]
}

// ---------------------------------------------------------------------------

fn closed_form_heat_decay() {
    let start = Instant::now();
    let mut c = Criterion::default();
    let u0 = make_gaussian_swirl(2).unwrap();
    let mut times = vec![0.0];
    times.extend(log_space(1e-2, 1e4, 39));
    let worst = times
        .iter()
        .map(|&t| {
            let e = heat::heat_evolve(&u0, t).unwrap().total_energy().unwrap();
            rel(e, PI / (1.0 + 2.0 * t).powi(2))
        })
        .fold(0.0, f64::max);
    c.check("closed_form", worst < 1e-6, format!("worst relative error {worst:e} at 40 times"));
    let p = decay_profile(&u0, &log_space(1.0, 1e4, 41)).unwrap();
    let cert = fit::fit_rate(&p, (10.0, 1e4)).unwrap();
    c.check(
        "fitted_rate",
        (cert.sigma_hat - 2.0).abs() <= 0.02,
        format!("sigma_hat = {:.5}", cert.sigma_hat),
    );
    c.runtime(start, 1.0);
    c.finish("closed-form heat decay of the Gaussian swirl");
}

fn three_way_equivalence() {
    let start = Instant::now();
    let mut c = Criterion::default();
    let opts = EquivalenceOptions::default();
    for (name, u0, s) in power_laws() {
        let r = fit::equivalence_report(&u0, &opts).unwrap();
        let at = r.exponent.map(|e| e.mass_exponent);
        c.check(
            name,
            r.cond_i && r.cond_ii && r.cond_iii && r.agree && at == Some(s.mass_exponent()),
            format!("({}, {}, {}) at mass exponent {at:?}", r.cond_i, r.cond_ii, r.cond_iii),
        );
    }
    for (name, u0) in negatives() {
        let r = fit::equivalence_report(&u0, &opts).unwrap();
        c.check(
            name,
            !r.cond_i && !r.cond_ii && !r.cond_iii && r.agree,
            format!("({}, {}, {})", r.cond_i, r.cond_ii, r.cond_iii),
        );
    }
    c.runtime(start, 30.0);
    c.finish("three-way equivalence on ten radial profiles");
}

fn fourier_splitting() {
    let mut c = Criterion::default();
    let times = log_space(10.0, 1e6, 25);
    let mut corpus: Vec<(String, RadialSpectralProfile, Option<Exponent>)> =
        power_laws().into_iter().map(|(n, u, s)| (n, u, Some(s))).collect();
    corpus.extend(negatives().into_iter().map(|(n, u)| (n, u, None)));
    corpus.push(("gaussian_swirl".into(), make_gaussian_swirl(2).unwrap(), Some(Exponent::from_sigma(2.0))));
    corpus.push((
        "random_envelope".into(),
        make_random_envelope(2, 42, 0.5, 1.0, 0.3).unwrap(),
        Some(Exponent::of_power_law(0.5, 2)),
    ));
    for (name, u0, s) in corpus {
        let r = fourier_splitting_check(&u0, s, &times).unwrap();
        let ratio_ok = s.is_none() || r.compensated_ratio.is_some_and(|q| q <= 10.0);
        c.check(
            name,
            r.holds && r.worst_margin >= SPLITTING_TOL && ratio_ok,
            format!("worst margin {:e}, compensated C/c {:?}", r.worst_margin, r.compensated_ratio),
        );
    }
    c.finish("Fourier-splitting inequality");
}

fn counterexample_divergence() {
    let mut c = Criterion::default();
    let v0 = make_log_counterexample(2).unwrap();
    let ladder = log_space(1e-2, 1e-5, 13);
    let q: Vec<f64> = ladder
        .iter()
        .map(|&rho| rho.powf(-0.2) * low_freq_mass(&v0, rho).unwrap())
        .collect();
    let closed = ladder
        .iter()
        .zip(&q)
        .map(|(rho, q)| rel(*q, rho.powf(-0.2) * 2.0 * PI / rho.ln().abs()))
        .fold(0.0, f64::max);
    c.check("mass_closed_form", closed < 1e-9, format!("worst relative error {closed:e}"));
    let far = 1e-40f64.powf(-0.2) * low_freq_mass(&v0, 1e-40).unwrap();
    c.check("mass_diverges", far > 100.0 * q[0], format!("growth {:.1} by rho = 1e-40", far / q[0]));
    let monotone = q.windows(2).all(|w| w[1] > w[0]);
    let growth = q[q.len() - 1] / q[0];
    c.literal(
        "mass_growth",
        monotone && growth >= 10.0,
        format!("monotone = {monotone}, growth {growth:.3} from 1e-2 to 1e-5 (needs >= 10)"),
    );
    let s = dyadic_blocks(&v0, -30, -2).unwrap();
    let mut shell = 0.0f64;
    let mut literal = 0.0f64;
    for j in -30i32..=-2 {
        let a = j.abs() as f64;
        shell = shell.max(rel(s.energy(j), 2.0 * PI / LN_2 / (a * (a - 1.0))));
        literal = literal.max(rel(s.energy(j), 2.0 * PI / LN_2 / (a * (a + 1.0))));
    }
    c.check("blocks_shell_integral", shell < 1e-4, format!("worst relative error {shell:e}"));
    c.literal(
        "blocks_literal_formula",
        literal < 1e-4,
        format!("worst relative gap {literal:.3} to (2 pi/ln 2)/(|j|(|j|+1))"),
    );
    let b = dyadic::besov_seminorm(&dyadic_blocks(&v0, -40, 10).unwrap(), 0.1);
    c.check("besov_divergent", b.divergent, "sup of 2^{-0.1 j} block norms grows");
    c.finish("divergence of the logarithmic counterexample");
}

fn v_alpha_perturbation() {
    let mut c = Criterion::default();
    let sources = [
        ("zero", make_zero(2).unwrap()),
        ("v0", make_log_counterexample(2).unwrap()),
        ("random_envelope", make_random_envelope(2, 42, 0.5, 1.0, 0.3).unwrap()),
    ];
    let c_n = shell_constant(2);
    c.check("c_n", rel(c_n, (3.0 * PI).sqrt()) < 1e-14, format!("c_2 = {c_n}"));
    for (name, u0) in &sources {
        for eps in [0.1, 0.01] {
            for j0 in [-3, -8] {
                let tag = format!("{name}/eps={eps}/j0={j0}");
                let p = make_v_alpha_perturbation(u0, 0.25, eps, j0).unwrap();
                let r = &p.report;
                c.check(format!("{tag}/unchanged"), r.unchanged_above_j0, "blocks above j0");
                let below: Vec<_> = r.rows.iter().filter(|row| row.j <= j0).collect();
                let kept_far = below.iter().filter(|row| row.kept).all(|row| row.ratio_diff == 0.0);
                c.check(format!("{tag}/kept_exact"), kept_far, "kept shells copy the source");
                let dist = below.iter().all(|row| row.ratio_diff <= 2.0 * eps);
                c.literal(
                    format!("{tag}/distance"),
                    dist,
                    format!("worst 2^(-2aj)|D_j(u0 - w)| = {:.3} eps (bound 2 eps)", r.worst_distance),
                );
                let at_least = |rows: &mut dyn Iterator<Item = &&PerturbationRow>, k: f64| {
                    let floor = rows.map(|row| row.ratio_w / eps).fold(f64::INFINITY, f64::min);
                    (floor >= k * (1.0 - 1e-10), format!("min 2^(-2aj)|D_j w| = {floor:.4} eps"))
                };
                let (ok, d) = at_least(&mut below.iter().filter(|row| !row.kept), c_n);
                c.check(format!("{tag}/lower_replaced"), ok, d);
                let (ok, d) = at_least(&mut below.iter(), r.c_guaranteed);
                c.check(format!("{tag}/lower_guaranteed"), ok, d);
                let (ok, d) = at_least(&mut below.iter(), c_n);
                c.literal(format!("{tag}/lower_c_n"), ok, format!("{d} (needs c_n = {c_n:.4})"));
                let v = perturbation_membership(&p).unwrap();
                let verdict = format!("in_v_alpha = {}, in_besov = {}", v.in_v_alpha, v.in_besov);
                if *name == "v0" {
                    c.literal(format!("{tag}/v_alpha"), v.in_v_alpha, verdict);
                } else {
                    c.check(format!("{tag}/v_alpha"), v.in_v_alpha && v.in_script_a, verdict);
                }
            }
        }
    }
    c.finish("V_alpha perturbation");
}

fn nse_energy_law() {
    let mut c = Criterion::default();
    let (tr, runtime) = energy_run();
    let audit = nse::energy_audit(tr);
    c.check(
        "strong_inequality",
        audit.worst_margin >= -1e-6,
        format!("worst relative margin {:e} over {} pairs", audit.worst_margin, audit.pairs),
    );
    c.check(
        "equality",
        audit.equality_residual <= 1e-6,
        format!("residual {:e}", audit.equality_residual),
    );
    c.check("horizon", *tr.times().last().unwrap() == 1e3, "run ends at t = 1000");
    c.check("runtime", *runtime < 300.0, format!("{runtime:.1} s for the 512^2 run (budget 300 s)"));

    let grid = Grid::new(2, 8.0 * PI, 64).unwrap();
    let u0 = nse::exact_mode_field(grid, [3, 4], 1.0).unwrap();
    let cfg = SimConfig {
        t_end: 1.0,
        record_times: nse::record_schedule(1e-2, 1.0, 10),
        ..SimConfig::desk(grid)
    };
    let tr = nse::evolve_nse(&u0, &cfg).unwrap();
    let k2 = grid.k0().powi(2) * 25.0;
    let worst = tr
        .times()
        .iter()
        .zip(&tr.u.l2)
        .map(|(t, l)| rel(*l, tr.u.l2[0] * (-k2 * t).exp()))
        .fold(0.0, f64::max);
    c.check("exact_mode", worst <= 1e-8, format!("max relative error {worst:e}"));
    c.finish("2D Navier-Stokes energy law");
}

fn wiegner_transfer() {
    let mut c = Criterion::default();
    for alpha in [0.25, 0.75] {
        let tr = anisotropic_run(alpha);
        let inv = nse::inverse_wiegner_check(tr).unwrap();
        c.check(
            format!("alpha={alpha}/rates_agree"),
            inv.difference <= 0.05,
            format!(
                "sigma_u = {:.4}, sigma_v = {:.4}",
                inv.u.sigma_hat, inv.v.sigma_hat
            ),
        );
        let w = nse::wiegner_difference_check(tr, alpha).unwrap();
        let slope = w.slope.unwrap_or(f64::NAN);
        let v_slope = -alpha;
        // steeper than the solution by 2 alpha (alpha < 1/2) or 1 (alpha > 1/2)
        let margin = if alpha < 0.5 { alpha } else { 1.0 - alpha };
        c.check(
            format!("alpha={alpha}/difference_slope"),
            w.passes && slope - v_slope <= -margin + 0.1,
            format!("|u - v| slope {slope:.4}, |v| slope {v_slope}, target {}", w.target),
        );
    }
    c.finish("Wiegner and inverse-Wiegner transfer");
}

fn gradient_decay() {
    let mut c = Criterion::default();
    let window = (1e7, 1e8);
    let times = log_space(window.0, window.1, 21);
    let mut members: Vec<(String, RadialSpectralProfile, Exponent)> = power_laws();
    members.push(("gaussian_swirl".into(), make_gaussian_swirl(2).unwrap(), Exponent::from_sigma(2.0)));
    for (name, u0, s) in members {
        let p = decay_profile(&u0, &times).unwrap();
        for l in 0..=2 {
            let r = nse::liminf_check(&p, 0.5 * s.sigma(), l, window, 0.1).unwrap();
            c.check(
                format!("{name}/l={l}"),
                r.flat,
                format!("spread {:.4}", r.compensated.spread),
            );
        }
    }
    for alpha in [0.25, 0.75] {
        let g = nse::gradient_decay_check(anisotropic_run(alpha), alpha).unwrap();
        c.check(
            format!("nse/alpha={alpha}"),
            g.passes,
            format!("hdot1 slope {:?}, target {}", g.slope, g.target),
        );
    }
    c.finish("gradient decay and liminf of compensated curves");
}

fn random_field(seed: u64, dim: usize) -> GridField {
    let n = if dim == 2 { 32 } else { 16 };
    make_random_div_free(Grid::new(dim, 8.0 * PI, n).unwrap(), seed, &Amplitude::GaussianSwirl)
}

fn gradient_field(seed: u64, grid: Grid) -> GridField {
    // i k phi^ with phi^ the Hermitian first component of a random field
    let phi = make_random_div_free(grid, seed, &Amplitude::GaussianSwirl);
    let mut g = GridField::zeros(grid);
    for idx in 0..grid.points() {
        let k = grid.wavevector(idx);
        let p = phi.coeff(idx)[0] + phi.coeff(idx)[1];
        let mut v = [Complex64::default(); 3];
        for d in 0..grid.dim {
            v[d] = Complex64::new(0.0, k[d]) * p;
        }
        g.set_coeff(idx, v);
    }
    g
}

fn max_abs(f: &GridField) -> f64 {
    f.coefficients().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn property_suites() {
    let mut c = Criterion::default();
    let cases: Vec<(u64, usize)> = (0..50u64).map(|i| (0x5eed_0000 + 7919 * i, 2 + (i as usize % 2))).collect();
    let mut tally = |name: &str, ok: &dyn Fn(u64, usize) -> bool| {
        let failed: Vec<u64> = cases.iter().filter(|(s, d)| !ok(*s, *d)).map(|p| p.0).collect();
        c.check(name, failed.is_empty(), format!("{} of 50 cases fail {failed:?}", failed.len()));
    };
    tally("projector_idempotent", &|s, d| {
        let f = random_field(s, d);
        let raw = gradient_field(s ^ 1, *f.grid());
        let mixed = GridField::from_coefficients(
            *f.grid(),
            f.coefficients().iter().zip(raw.coefficients()).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        let p = mixed.leray_project();
        max_abs(&p.leray_project().sub(&p).unwrap()) <= 1e-13 * max_abs(&p)
    });
    tally("projector_annihilates_gradients", &|s, d| {
        let g = gradient_field(s, *random_field(s, d).grid());
        max_abs(&g.leray_project()) <= 1e-13 * max_abs(&g)
    });
    tally("plancherel", &|s, d| {
        let f = random_field(s, d);
        let mut fft = FftNd::new(f.grid());
        rel(lebesgue_norm(&f, 2.0, &mut fft).powi(2), f.total_energy().unwrap()) < 1e-12
    });
    tally("semigroup", &|s, d| {
        let f = random_field(s, d);
        let (a, b) = (0.1 + (s % 7) as f64 * 0.3, 0.05 + (s % 5) as f64 * 0.2);
        let two = f.heat_evolve(a).heat_evolve(b);
        max_abs(&two.sub(&f.heat_evolve(a + b)).unwrap()) <= 1e-13 * max_abs(&f)
    });
    tally("block_mass_accounting", &|s, d| {
        let f = random_field(s, d);
        let j_min = (2.0 * f.grid().k0()).log2().ceil() as i32;
        let b = dyadic_blocks(&f, j_min, 10).unwrap();
        let below = f.energy(0.0, (j_min as f64).exp2(), Weight::MASS).unwrap();
        rel(b.window_sum() + below, f.total_energy().unwrap()) < 1e-12
    });
    tally("scaling_equivariance", &|s, d| {
        let f = random_field(s, d);
        let lambda = 0.01 + (s % 1000) as f64 * 0.1;
        let (b, bl) = (
            dyadic_blocks(&f, -1, 10).unwrap(),
            dyadic_blocks(&f.scaled(lambda), -1, 10).unwrap(),
        );
        b.block_energy
            .iter()
            .zip(&bl.block_energy)
            .all(|(x, y)| (y - lambda * lambda * x).abs() <= 1e-12 * lambda * lambda * b.window_sum())
    });
    tally("determinism", &|s, d| {
        let env = |s| make_random_envelope(d, s, 0.5, 1.0, 0.3).unwrap();
        random_field(s, d) == random_field(s, d) && env(s) == env(s) && random_field(s, d) != random_field(s + 1, d)
    });
    c.finish("property suites over a 50-case seeded corpus");
}

#[test]
fn acceptance() {
    closed_form_heat_decay();
    three_way_equivalence();
    fourier_splitting();
    counterexample_divergence();
    v_alpha_perturbation();
    nse_energy_law();
    wiegner_transfer();
    gradient_decay();
    property_suites();
}

#[test]
#[ignore = "unattainable: rho^-0.2 mass(rho) = 2 pi rho^-0.2 / |ln rho| grows by 1.59 on [1e-5, 1e-2]"]
fn literal_compensated_mass_grows_tenfold() {
    let v0 = make_log_counterexample(2).unwrap();
    let q = |rho: f64| rho.powf(-0.2) * low_freq_mass(&v0, rho).unwrap();
    let ladder = log_space(1e-2, 1e-5, 13);
    assert!(ladder.windows(2).all(|w| q(w[1]) > q(w[0])), "not monotone");
    assert!(q(1e-5) / q(1e-2) >= 10.0, "growth {}", q(1e-5) / q(1e-2));
}

#[test]
#[ignore = "unattainable: sharp shells give (2 pi/ln 2)/(|j|(|j|-1))"]
fn literal_block_formula() {
    let s = dyadic_blocks(&make_log_counterexample(2).unwrap(), -30, -2).unwrap();
    for j in -30i32..=-2 {
        let a = j.abs() as f64;
        let want = 2.0 * PI / LN_2 / (a * (a + 1.0));
        assert!(rel(s.energy(j), want) < 1e-4, "j = {j}: {} vs {want}", s.energy(j));
    }
}

#[test]
#[ignore = "unattainable: replaced shells sit at c_n eps = 3.07 eps from a zero source"]
fn literal_distance_bound_on_replaced_shells() {
    let p = make_v_alpha_perturbation(&make_zero(2).unwrap(), 0.25, 0.1, -3).unwrap();
    for row in p.report.rows.iter().filter(|r| r.j <= -3) {
        assert!(row.ratio_diff <= 0.2, "j = {}: {}", row.j, row.ratio_diff);
    }
}

#[test]
#[ignore = "unattainable: kept shells only guarantee a ratio of eps, and c_n > 1"]
fn literal_lower_bound_on_kept_shells() {
    let u0 = make_random_envelope(2, 42, 0.5, 1.0, 0.3).unwrap();
    let p = make_v_alpha_perturbation(&u0, 0.25, 0.01, -8).unwrap();
    let c_n = shell_constant(2);
    for row in p.report.rows.iter().filter(|r| r.j <= -8) {
        assert!(row.ratio_w >= c_n * 0.01 * (1.0 - 1e-10), "j = {}: {}", row.j, row.ratio_w);
    }
}

#[test]
#[ignore = "unattainable: the v0 source is not in the Besov space containing V_alpha"]
fn literal_v_alpha_verdict_for_v0() {
    let p = make_v_alpha_perturbation(&make_log_counterexample(2).unwrap(), 0.25, 0.1, -3).unwrap();
    assert!(perturbation_membership(&p).unwrap().in_v_alpha);
}

#[test]
fn fitted_verdicts_are_reported() {
    // sanity guard for the corpus: each negative datum lacks a two-sided rate
    for (name, u0) in negatives() {
        let p = decay_profile(&u0, &log_space(1e2, 1e8, 61)).unwrap();
        let cert = fit::fit_rate(&p, (1e2, 1e8)).unwrap();
        assert_ne!(cert.verdict, Verdict::TwoSided, "{name}");
    }
}
