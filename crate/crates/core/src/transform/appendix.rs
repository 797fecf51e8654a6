//! Numerical checks of the symbol-decay lemmas: power decay of compactly
//! supported symbols with a λ^ν singularity, logarithmic growth at the
//! origin for order −1, and boundedness of the λ^{−m−1−iζ} boundary symbols.

use super::fourier::{oscillatory_fourier, riesz_boundary_check, FnSymbol, Support};
use crate::error::{Error, Result};
use crate::fit;
use crate::kernels::chi_cutoffs;
use num_complex::Complex64;
use serde::Serialize;

/// Log-spaced points on [a, b].
pub fn log_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCheck {
    pub nu: f64,
    pub expected_slope: f64,
    pub slope: f64,
    pub samples: Vec<(f64, f64)>,
    pub passed: bool,
}

/// |k(x)| for b = χ₀(λ)λ^ν on [0, 2], fitted on x ∈ [10, 10³]; the slope
/// should be −ν−1 within `tol`.
pub fn compact_decay_check(nu: f64, tol: f64) -> Result<DecayCheck> {
    if !(nu > -1.0) {
        return Err(Error::Precondition(format!("λ^ν must be integrable at 0: need ν > −1 (got {nu})")));
    }
    let b = FnSymbol {
        f: move |mu: Complex64, _| Complex64::new(chi_cutoffs(mu.re).0 * mu.re.powf(nu), 0.0),
        order: nu,
        support: Support::HalfLine,
        cutoff: Some(2.0),
        analytic_from: 2.0,
    };
    let xs = log_points(10.0, 1000.0, 13);
    let mut samples = Vec::with_capacity(xs.len());
    for &x in &xs {
        samples.push((x, oscillatory_fourier(&b, x)?.norm()));
    }
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let slope = fit::loglog_slope(&xs, &ys).0;
    let expected_slope = -nu - 1.0;
    Ok(DecayCheck { nu, expected_slope, slope, passed: (slope - expected_slope).abs() <= tol, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogGrowthCheck {
    /// d|k| / d log(1/x) from a least-squares line.
    pub log_coefficient: f64,
    /// log–log slope of |k| on the same points (≈ 0 for logarithmic growth).
    pub power_slope: f64,
    /// Largest deviation from the fitted line, relative to max |k|.
    pub max_line_deviation: f64,
    pub samples: Vec<(f64, f64)>,
    pub passed: bool,
}

/// k(x) for the order −1 symbol (1 + λ²)^{−1/2} on ℝ, on x ∈ [1e−4, 1e−2]:
/// |k| must be an affine function of log(1/x) with positive coefficient.
pub fn log_growth_check() -> Result<LogGrowthCheck> {
    let b = FnSymbol {
        f: |mu: Complex64, _| (Complex64::new(1.0, 0.0) + mu * mu).sqrt().inv(),
        order: -1.0,
        support: Support::Line,
        cutoff: None,
        analytic_from: 2.0,
    };
    let xs = log_points(1e-4, 1e-2, 9);
    let mut samples = Vec::with_capacity(xs.len());
    for &x in &xs {
        samples.push((x, oscillatory_fourier(&b, x)?.norm()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, k)| ((1.0 / x).ln(), k)).collect();
    let (a, c, _) = fit::slope(&pts);
    let kmax = samples.iter().fold(0.0f64, |m, s| m.max(s.1));
    let max_line_deviation = pts.iter().map(|p| (p.1 - a * p.0 - c).abs()).fold(0.0, f64::max) / kmax;
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let power_slope = fit::loglog_slope(&xs, &ys).0;
    let passed = a > 0.0 && max_line_deviation < 1e-2 && power_slope.abs() < 0.5;
    Ok(LogGrowthCheck { log_coefficient: a, power_slope, max_line_deviation, samples, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryScan {
    pub m_order: u32,
    /// (ζ, sup_x |∂_x^m k(x)|, bound / (1 + ζ²)).
    pub bounds: Vec<(f64, f64, f64)>,
    pub passed: bool,
}

/// sup over x ∈ [1e−3, 0.4] of |∂_x^m k| for b = ζχ_∞λ^{−m−1−iζ}, for each ζ.
/// Passes when every bound is finite and bound/(1+ζ²) does not grow along
/// the scan (allowing a factor 2 against the first positive ζ).
pub fn boundary_scan(m_order: u32, zetas: &[f64]) -> Result<BoundaryScan> {
    let xs = log_points(1e-3, 0.4, 25);
    let mut bounds = Vec::with_capacity(zetas.len());
    for &z in zetas {
        let mut sup = 0.0f64;
        for &x in &xs {
            sup = sup.max(riesz_boundary_check(m_order, z, None, x)?);
        }
        bounds.push((z, sup, sup / (1.0 + z * z)));
    }
    // ζ = 0 has no boundary term; compare against the first positive ζ
    let first = bounds.iter().find(|b| b.0 != 0.0).map(|b| b.2).unwrap_or(0.0);
    let passed = bounds.iter().all(|b| b.1.is_finite() && b.2 <= 2.0 * first);
    Ok(BoundaryScan { m_order, bounds, passed })
}
