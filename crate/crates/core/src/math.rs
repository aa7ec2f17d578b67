//! Small numeric helpers shared by the density, sampler and rate modules.

use std::f64::consts::{LN_10, PI};

/// `ln(sqrt(2π))`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Kernel exponents below this (natural log) evaluate to exactly zero.
pub const MIN_EXPONENT: f64 = -745.0;

/// Gaussian density `N(x; mean, sd²)`, with the exponent clamp applied.
#[inline]
pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    let e = -0.5 * z * z;
    if e < MIN_EXPONENT {
        0.0
    } else {
        e.exp() / (sd * (2.0 * PI).sqrt())
    }
}

#[inline]
pub fn normal_logpdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - LN_SQRT_2PI
}

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Natural-log sum of exponentials. Empty or all `-inf` input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// `log10(Σ 10^xᵢ)` for terms already in log₁₀ units.
pub fn log10_sum(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| ((x - m) * LN_10).exp()).sum();
    m + s.log10()
}

/// Normalizes log-weights in place into probabilities.
pub fn normalize_log_weights(logw: &mut [f64]) {
    let lse = log_sum_exp(logw);
    for w in logw.iter_mut() {
        *w = (*w - lse).exp();
    }
}

/// Composite Simpson rule on `points` equally spaced nodes (`points` odd, ≥ 3).
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> f64 {
    let points = if points.is_multiple_of(2) {
        points + 1
    } else {
        points.max(3)
    };
    let intervals = points - 1;
    let h = (hi - lo) / intervals as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * i as f64);
    }
    acc * h / 3.0
}

/// Trapezoid weights for an ordered (possibly non-uniform) grid.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let g = grid.len();
    let mut w = vec![0.0; g];
    for i in 1..g {
        let half = 0.5 * (grid[i] - grid[i - 1]);
        w[i - 1] += half;
        w[i] += half;
    }
    w
}

/// Evenly spaced points on `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points).map(|i| lo + step * i as f64).collect()
        }
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
