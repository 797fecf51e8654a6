//! Gauss–Legendre rules and composite panel quadrature.

use std::sync::OnceLock;

/// Nodes per panel used throughout the crate.
pub const NODES: usize = 16;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// The cached 16-point rule.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

/// Nodes and weights of a composite rule over the given panel breakpoints.
pub fn composite(breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gl16();
    let mut nodes = Vec::with_capacity(breaks.len().saturating_sub(1) * NODES);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for j in 0..NODES {
            nodes.push(c + h * x[j]);
            weights.push(h * w[j]);
        }
    }
    (nodes, weights)
}

/// Uniform breakpoints on [a, b] with panel width at most `width`.
pub fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let np = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=np).map(|i| a + (b - a) * i as f64 / np as f64).collect()
}

/// Breakpoints on [0, b] graded geometrically towards 0 over the first
/// panel of width `width`, for integrands with an algebraic endpoint
/// singularity at the origin.
pub fn graded_breaks(b: f64, width: f64, levels: usize) -> Vec<f64> {
    let uni = uniform_breaks(0.0, b, width);
    let h = uni[1];
    let mut out = vec![0.0];
    for l in (1..=levels).rev() {
        out.push(h * 0.5f64.powi(l as i32));
    }
    out.extend_from_slice(&uni[1..]);
    out
}

/// ∫_a^b f by composite 16-point Gauss–Legendre.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64]) -> f64 {
    let (x, w) = gl16();
    let mut s = 0.0;
    for p in breaks.windows(2) {
        let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
        let mut ps = 0.0;
        for j in 0..NODES {
            ps += w[j] * f(c + h * x[j]);
        }
        s += h * ps;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn exact_for_degree_31() {
        let v = integrate(|x| x.powi(31) + x.powi(30), &[0.0, 1.0]);
        assert!((v - (1.0 / 32.0 + 1.0 / 31.0)).abs() < 1e-14);
    }

    #[test]
    fn graded_handles_sqrt() {
        let v = integrate(|x| x.sqrt(), &graded_breaks(1.0, 0.25, 30));
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn odd_rule() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
    }
}
