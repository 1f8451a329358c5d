//! Independent reference computations shared by the integration suites.
//! None of these call into the solver or quadrature code under test.

#![allow(dead_code)]

use geomrand::specfn::digamma;

/// log κ - ψ(κ). Below 20 it is evaluated directly; above, through its own
/// asymptotic expansion to avoid cancellation.
pub fn shape_function(kappa: f64) -> f64 {
    if kappa < 20.0 {
        return kappa.ln() - digamma(kappa).unwrap();
    }
    let r = 1.0 / kappa;
    let r2 = r * r;
    r / 2.0
        + r2 * (1.0 / 12.0
            - r2 * (1.0 / 120.0 - r2 * (1.0 / 252.0 - r2 * (1.0 / 240.0 - r2 / 132.0))))
}

/// Root of log κ - ψ(κ) = s by plain geometric bisection over [1e-6, 1e6],
/// run until the bracket stops shrinking.
pub fn bisect_shape(s: f64) -> f64 {
    let (mut lo, mut hi) = (1e-6_f64, 1e6_f64);
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if shape_function(mid) > s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// ψ'(x) from the defining series Σ 1/(x+k)², with an Euler–Maclaurin tail
/// after 1000 terms.
pub fn trigamma_series(x: f64) -> f64 {
    const N: usize = 1000;
    let head: f64 = (0..N)
        .rev()
        .map(|k| 1.0 / ((x + k as f64) * (x + k as f64)))
        .sum();
    let y = x + N as f64;
    let tail = 1.0 / y + 1.0 / (2.0 * y * y) + 1.0 / (6.0 * y.powi(3)) - 1.0 / (30.0 * y.powi(5))
        + 1.0 / (42.0 * y.powi(7));
    head + tail
}

/// Composite trapezoid rule with `n` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    acc * h / 3.0
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Sample mean and coefficient of variation (n - 1 denominator).
pub fn mean_cv(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt() / mean)
}

/// Interquartile range by linear interpolation between order statistics.
pub fn iqr(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (v.len() - 1) as f64 * p;
        let (i, frac) = (h.floor() as usize, h - h.floor());
        if i + 1 < v.len() {
            v[i] + frac * (v[i + 1] - v[i])
        } else {
            v[i]
        }
    };
    q(0.75) - q(0.25)
}
