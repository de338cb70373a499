//! Convergence-rate fitting shared by the Jordan, degree and Green modules.

use serde::Serialize;

/// Least-squares line `y = slope·x + intercept` and its coefficient of determination.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if syy > 0.0 && sxx > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateKind {
    /// Deviations vanish identically.
    Exact,
    /// Polynomial decay `n^slope`.
    Algebraic,
    /// Exponential decay.
    Geometric,
}

/// Fit of an `O(shape(n))` bound: the constant is fitted on one range and
/// checked on a disjoint later range.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    /// Either `1/n` or `log n / n`.
    pub shape: &'static str,
    pub constant: f64,
    pub fit_range: (u64, u64),
    pub validate_range: (u64, u64),
    /// Largest `deviation / (C·shape(n))` seen on the validation range.
    pub worst_ratio: f64,
    pub holds: bool,
    /// Log-log slope of the deviations over both ranges.
    pub slope: f64,
    pub kind: RateKind,
}

/// Multiplier applied to the fitted constant before validation.
pub const RATE_SLACK: f64 = 1.5;

fn classify(ns: &[u64], devs: &[f64]) -> (RateKind, f64) {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(devs)
        .filter(|(_, d)| **d > 0.0 && d.is_finite())
        .map(|(&n, &d)| (n as f64, d.ln()))
        .collect();
    if devs.iter().all(|d| *d == 0.0) {
        return (RateKind::Exact, 0.0);
    }
    if pts.len() < 3 {
        return (RateKind::Geometric, f64::NEG_INFINITY);
    }
    let xs_log: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let xs_lin: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, _, r2_log) = linear_fit(&xs_log, &ys);
    let (lin_slope, _, r2_lin) = linear_fit(&xs_lin, &ys);
    if r2_lin > r2_log && lin_slope < -1e-3 {
        (RateKind::Geometric, slope)
    } else {
        (RateKind::Algebraic, slope)
    }
}

/// `shape_log = false` fits `dev ≤ C/n`; `true` fits `dev ≤ C·ln n/n`.
/// Deviations at or below `floor` (the rounding level of the computation)
/// count as zero.
pub fn fit_rate(ns: &[u64], devs: &[f64], fit: (u64, u64), validate: (u64, u64), shape_log: bool, floor: f64) -> RateFit {
    let devs: Vec<f64> = devs.iter().map(|&d| if d <= floor { 0.0 } else { d }).collect();
    let devs = &devs[..];
    let shape = |n: u64| -> f64 {
        let n = n as f64;
        if shape_log {
            n.ln().max(f64::MIN_POSITIVE) / n
        } else {
            1.0 / n
        }
    };
    let mut c = 0.0f64;
    for (&n, &d) in ns.iter().zip(devs) {
        if n >= fit.0 && n <= fit.1 {
            c = c.max(d / shape(n));
        }
    }
    c *= RATE_SLACK;
    let mut worst = 0.0f64;
    for (&n, &d) in ns.iter().zip(devs) {
        if n >= validate.0 && n <= validate.1 {
            let bound = c * shape(n);
            let ratio = if d == 0.0 {
                0.0
            } else if bound > 0.0 {
                d / bound
            } else {
                f64::INFINITY
            };
            worst = worst.max(ratio);
        }
    }
    let (kind, slope) = classify(ns, devs);
    RateFit {
        shape: if shape_log { "log n / n" } else { "1 / n" },
        constant: c,
        fit_range: fit,
        validate_range: validate,
        worst_ratio: worst,
        holds: worst <= 1.0,
        slope,
        kind,
    }
}
