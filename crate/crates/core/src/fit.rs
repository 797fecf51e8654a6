//! Least-squares line fits used by the slope checks.

/// Ordinary least-squares fit y = a x + b.
///
/// Returns (slope, intercept, standard error of the slope).
pub fn slope(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
    let se = if pts.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (a, b, se)
}

/// Slope of log|y| against log x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.abs().ln())).collect();
    slope(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        let (a, b, se) = loglog_slope(&xs, &ys);
        assert!((a + 1.5).abs() < 1e-12 && (b - 3f64.ln()).abs() < 1e-12 && se < 1e-10);
    }
}
