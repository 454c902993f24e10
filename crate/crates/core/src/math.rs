//! Small numerical kernels shared by the rest of the crate.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// slice length, so the result is reproducible regardless of how the terms
/// were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 16;
    if xs.len() <= BASE {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(n - 2) / (n - 2) as f64,
    }
}

/// `n` points from `a` to `b` (inclusive), evenly spaced in `ln`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > 0.0, "log_space needs positive endpoints");
    match n {
        0 => Vec::new(),
        1 => alloc::vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        a
                    } else if i + 1 == n {
                        b
                    } else {
                        (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Ordinary least squares `y ~ slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx: Vec<f64> = x.iter().map(|a| (a - mx) * (a - mx)).collect();
    let slope = pairwise_sum(&sxy) / pairwise_sum(&sxx);
    (slope, my - slope * mx)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

// P_n(z) and P_n'(z) by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A pair of nested-order Gauss rules used for panel integration with an
/// embedded error estimate (`|I_hi - I_lo|`).
#[derive(Debug, Clone)]
pub struct PanelRule {
    hi: (Vec<f64>, Vec<f64>),
    lo: (Vec<f64>, Vec<f64>),
}

impl PanelRule {
    pub fn new(order: usize) -> Self {
        PanelRule {
            hi: gauss_legendre(order),
            lo: gauss_legendre((order / 2).max(1)),
        }
    }

    pub fn order(&self) -> usize {
        self.hi.0.len()
    }

    /// Integral of `f` over `[a, b]` and its error estimate.
    pub fn apply(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut ih = 0.0;
        for (x, w) in self.hi.0.iter().zip(&self.hi.1) {
            ih += w * f(c + h * x);
        }
        let mut il = 0.0;
        for (x, w) in self.lo.0.iter().zip(&self.lo.1) {
            il += w * f(c + h * x);
        }
        (ih * h, ((ih - il) * h).abs())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Gauss-Kronrod (7/15) quadrature by global bisection of the
/// interval with the largest error estimate.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0 };
    }
    let (v, e) = gk15(a, b, &mut f);
    let mut parts: Vec<(f64, f64, f64, f64)> = alloc::vec![(a, b, v, e)];
    loop {
        let value = pairwise_sum(&parts.iter().map(|p| p.2).collect::<Vec<_>>());
        let error = pairwise_sum(&parts.iter().map(|p| p.3).collect::<Vec<_>>());
        if error <= abs_tol.max(rel_tol * value.abs()) || parts.len() >= max_intervals {
            return Integral { value, error };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (pa, pb, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(pa, mid, &mut f);
        let (v2, e2) = gk15(mid, pb, &mut f);
        parts.push((pa, mid, v1, e1));
        parts.push((mid, pb, v2, e2));
        // keep a canonical order so the reduction is reproducible
        parts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));
    }
}
