//! Fixed-step 4-stage Gauss–Legendre collocation (order 8) for the radial
//! eigenfunction equation φ″ + (V′/V) φ′ + μ φ = 0 with φ(0) = 1, φ′(0) = 0.

use crate::quad::gauss_legendre;
use crate::space::{log_density_derivative_unchecked, SpaceParams};
use std::sync::OnceLock;

/// Largest step used away from the origin.
pub(crate) const BASE_STEP: f64 = 1e-3;

struct Tableau {
    c: [f64; 4],
    a: [[f64; 4]; 4],
    a2: [[f64; 4]; 4],
    b: [f64; 4],
}

fn tableau() -> &'static Tableau {
    static T: OnceLock<Tableau> = OnceLock::new();
    T.get_or_init(|| {
        let (x, w) = gauss_legendre(4);
        let c: [f64; 4] = std::array::from_fn(|i| 0.5 * (1.0 + x[i]));
        let b: [f64; 4] = std::array::from_fn(|i| 0.5 * w[i]);
        let lagrange = |j: usize, s: f64| {
            (0..4).filter(|&l| l != j).fold(1.0, |acc, l| acc * (s - c[l]) / (c[j] - c[l]))
        };
        // a_ij = ∫_0^{c_i} L_j, exact with a 4-point rule on [0, c_i]
        let a: [[f64; 4]; 4] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..4).map(|q| 0.5 * c[i] * w[q] * lagrange(j, 0.5 * c[i] * (1.0 + x[q]))).sum()
            })
        });
        let a2 = std::array::from_fn(|i| std::array::from_fn(|l| (0..4).map(|j| a[i][j] * a[j][l]).sum()));
        Tableau { c, a, a2, b }
    })
}

/// Solves a 4×4 system in place by partial pivoting.
fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> [f64; 4] {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for c in col..4 {
                m[row][c] -= f * m[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|c| m[row][c] * x[c]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    x
}

/// One collocation step of size h from r for y = (φ, φ′).
///
/// With stages K_i = (u_i, v_i), the first component is eliminated:
/// u_i = y₂ + h Σ a_ij v_j, leaving a 4×4 system for the v_i.
fn step(space: &SpaceParams, mu: f64, r: f64, h: f64, y: [f64; 2]) -> [f64; 2] {
    let t = tableau();
    let p: [f64; 4] = std::array::from_fn(|i| log_density_derivative_unchecked(space, r + t.c[i] * h));
    let mut m = [[0.0; 4]; 4];
    let mut rhs = [0.0; 4];
    for i in 0..4 {
        for l in 0..4 {
            m[i][l] = mu * h * h * t.a2[i][l] + p[i] * h * t.a[i][l];
        }
        m[i][i] += 1.0;
        rhs[i] = -mu * (y[0] + h * t.c[i] * y[1]) - p[i] * y[1];
    }
    let v = solve4(m, rhs);
    let mut u = [0.0; 4];
    for i in 0..4 {
        u[i] = y[1] + h * (0..4).map(|j| t.a[i][j] * v[j]).sum::<f64>();
    }
    let du: f64 = (0..4).map(|i| t.b[i] * u[i]).sum();
    let dv: f64 = (0..4).map(|i| t.b[i] * v[i]).sum();
    [y[0] + h * du, y[1] + h * dv]
}

/// Second-order-accurate Taylor start φ ≈ 1 + a₂r² + a₄r⁴.
fn taylor(space: &SpaceParams, mu: f64, r: f64) -> [f64; 2] {
    let n = space.nf();
    let beta = (space.m + space.k) as f64 / 12.0 + space.k as f64 / 4.0;
    let a2 = -mu / (2.0 * n);
    let a4 = -a2 * (2.0 * beta + mu) / (4.0 * (n + 2.0));
    let r2 = r * r;
    [1.0 + a2 * r2 + a4 * r2 * r2, 2.0 * a2 * r + 4.0 * a4 * r2 * r]
}

/// Integrates the eigenfunction equation for eigen-parameter
/// μ = λ² + Q²/4 and returns (φ, φ′) at each sorted target radius.
///
/// `step_scale` multiplies every step size (used for convergence checks).
pub(crate) fn solve(space: &SpaceParams, lambda: f64, targets: &[f64], step_scale: f64) -> Vec<[f64; 2]> {
    let q = space.q();
    let mu = lambda * lambda + 0.25 * q * q;
    let r0 = (1e-3f64).min(1e-2 / mu.sqrt());
    let hmax = BASE_STEP.min(0.1 / lambda.abs().max(1e-300)) * step_scale;
    let mut out = Vec::with_capacity(targets.len());
    let mut r = r0;
    let mut y = taylor(space, mu, r0);
    for &rt in targets {
        debug_assert!(rt >= 0.0);
        if rt <= r0 {
            out.push(taylor(space, mu, rt));
            continue;
        }
        while r < rt {
            // geometric grading near the regular singular point
            let h = hmax.min(0.125 * r * step_scale.min(1.0));
            let h = if r + h >= rt || rt - (r + h) < 1e-3 * h { rt - r } else { h };
            y = step(space, mu, r, h, y);
            r += h;
        }
        r = rt;
        out.push(y);
    }
    out
}
