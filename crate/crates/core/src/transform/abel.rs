//! Inverse Abel transform: A^{−1} = a·D₁^{k/2}D₂^{m/2} for k even, and a
//! Weyl-type integral of D₁^{(k+1)/2}D₂^{m/2} for k odd.

use super::jet::{apply_d, Jet};
use super::SpectralProfile;
use crate::error::{Error, Result};
use crate::quad;
use crate::space::SpaceParams;
use num_complex::Complex64;
use std::f64::consts::PI;

/// An even function on ℝ that can report derivatives g^{(j)}(s), j ≤ order.
pub trait EvenFunction {
    fn derivatives(&self, s: f64, order: usize) -> Vec<Complex64>;
    /// Highest derivative order that `derivatives` can deliver.
    fn max_order(&self) -> usize {
        usize::MAX
    }
    /// Distance from the origin to the nearest singularity (for Taylor
    /// evaluation near s = 0).
    fn taylor_radius(&self) -> f64 {
        f64::INFINITY
    }
}

/// Wraps a plain closure; derivatives by 5-point central differences.
pub struct FiniteDiff<F: Fn(f64) -> f64> {
    pub f: F,
    pub h: f64,
}

impl<F: Fn(f64) -> f64> FiniteDiff<F> {
    pub fn new(f: F) -> Self {
        FiniteDiff { f, h: 1e-3 }
    }
}

impl<F: Fn(f64) -> f64> EvenFunction for FiniteDiff<F> {
    fn derivatives(&self, s: f64, order: usize) -> Vec<Complex64> {
        let h = self.h;
        let f = |x: f64| (self.f)(x.abs());
        let (m2, m1, z, p1, p2) = (f(s - 2.0 * h), f(s - h), f(s), f(s + h), f(s + 2.0 * h));
        let d = [
            z,
            (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h),
            (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h),
            (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h.powi(3)),
            (p2 - 4.0 * p1 + 6.0 * z - 4.0 * m1 + m2) / h.powi(4),
        ];
        (0..=order).map(|j| Complex64::new(*d.get(j).unwrap_or(&f64::NAN), 0.0)).collect()
    }
    fn max_order(&self) -> usize {
        4
    }
}

/// g = F^{−1}G for an even spectral profile:
/// g(s) = (1/π) ∫_0^Λ G(λ) cos(λs) dλ, differentiated under the integral.
pub struct CosineInverse {
    nodes: Vec<f64>,
    wg: Vec<Complex64>,
}

impl CosineInverse {
    pub fn new(g: &SpectralProfile) -> Self {
        let wg = g.grid.weights.iter().zip(&g.values).map(|(w, v)| v * (w / PI)).collect();
        CosineInverse { nodes: g.grid.nodes.clone(), wg }
    }
}

impl EvenFunction for CosineInverse {
    fn derivatives(&self, s: f64, order: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        for (&l, &w) in self.nodes.iter().zip(&self.wg) {
            let (sn, cs) = (l * s).sin_cos();
            // d^j/ds^j cos(λs) cycles through cos, −sin, −cos, sin (times λ^j)
            let mut p = 1.0;
            for (j, o) in out.iter_mut().enumerate() {
                let v = match j % 4 {
                    0 => cs,
                    1 => -sn,
                    2 => -cs,
                    _ => sn,
                };
                *o += w * (p * v);
                p *= l;
            }
        }
        out
    }
}

/// Quadrature settings for the k-odd Weyl integral.
#[derive(Debug, Clone, Copy)]
pub struct AbelOptions {
    /// The integral over s ∈ [r, r + extent].
    pub extent: f64,
    /// Gauss panels on u ∈ (0, √extent] after s = r + u².
    pub panels: usize,
    /// A point s where g or its derivatives blow up; panels are graded
    /// towards it.
    pub singular: Option<f64>,
}

impl Default for AbelOptions {
    fn default() -> Self {
        AbelOptions { extent: 12.0, panels: 200, singular: None }
    }
}

/// Extra Taylor orders used when evaluating the operator chain near s = 0.
const TAYLOR_EXTRA: usize = 10;

/// Constant in front of the differential (k even) or Weyl (k odd) formula,
/// for the measure V(r)dr and g = (1/π)∫_0^∞ G(λ)cos(λs)dλ.
///
/// Near the origin D₁ ≈ −(1/r)∂ and D₂ ≈ −(2/r)∂, so the constant is fixed by
/// the Euclidean inversion formula in dimension n, rescaled by |S^{n−1}|
/// because V carries no sphere-area factor.
pub fn abel_constant(space: &SpaceParams) -> f64 {
    let (m, n) = (space.m as f64, space.nf());
    let area = 2.0 * PI.powf(n / 2.0) / crate::special::gamma_real(n / 2.0);
    if space.k % 2 == 0 {
        (2.0 * PI).powf(-(n - 1.0) / 2.0) * 2f64.powf(-m / 2.0) * area
    } else {
        (2.0 * PI).powf(-(n - 2.0) / 2.0) / PI * 2f64.powf(-(m + 1.0) / 2.0) * area
    }
}

/// D₁^{n1} D₂^{n2} g at s (D₂ applied first).
///
/// Close to the origin the quotients cancel catastrophically, so there the
/// chain is applied to the Taylor jet at 0 and the result summed at s.
pub(crate) fn d_chain(g: &dyn EvenFunction, s: f64, n1: usize, n2: usize) -> Complex64 {
    let j = n1 + n2;
    let near = (0.05f64).min(g.taylor_radius() / 8.0);
    let taylor = s == 0.0 || (s < near && g.max_order() >= 2 * j + TAYLOR_EXTRA);
    let base = if taylor { 0.0 } else { s };
    let order = if s == 0.0 {
        2 * j
    } else if taylor {
        2 * j + TAYLOR_EXTRA
    } else {
        j
    };
    let mut jet = Jet::from_derivatives(&g.derivatives(base, order));
    if taylor {
        jet = jet.even_part();
    }
    for _ in 0..n2 {
        jet = apply_d(&jet, 0.5, base);
    }
    for _ in 0..n1 {
        jet = apply_d(&jet, 1.0, base);
    }
    if taylor && s > 0.0 {
        jet.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    } else {
        jet.value()
    }
}

/// Panel breaks in u = √(s − r): uniform, plus geometric grading towards a
/// singular point of g when one lies in the range.
fn weyl_breaks(r: f64, opts: &AbelOptions) -> Vec<f64> {
    let umax = opts.extent.sqrt();
    let width = umax / opts.panels as f64;
    let mut b = quad::uniform_breaks(0.0, umax, width);
    if let Some(sing) = opts.singular {
        let d = sing - r;
        // stop grading before s − sing drops to rounding level
        let floor = 1e-10 * (1.0 + sing.abs());
        if d > 0.0 && d.sqrt() < umax {
            let u0 = d.sqrt();
            let mut off = width;
            while off * (2.0 * u0 + off) > floor {
                b.push(u0 - off);
                b.push(u0 + off);
                off *= 0.5;
            }
            b.push(u0);
        } else if d.abs() < width * width {
            // singularity at (or just below) the lower limit
            let mut off = 0.5 * width;
            while off * off > floor {
                b.push(off);
                off *= 0.5;
            }
        }
    }
    b.retain(|&u| (0.0..=umax).contains(&u));
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-300);
    b
}

/// A^{−1}g(r) as a complex number (for complex-valued g).
pub fn abel_inverse_complex(space: &SpaceParams, g: &dyn EvenFunction, r: f64, opts: &AbelOptions) -> Result<Complex64> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::NegativeRadius(r));
    }
    let a = abel_constant(space);
    let n2 = (space.m / 2) as usize;
    let v = if space.k % 2 == 0 {
        a * d_chain(g, r, (space.k / 2) as usize, n2)
    } else {
        let n1 = ((space.k + 1) / 2) as usize;
        let (x, w) = quad::gl16();
        let breaks = weyl_breaks(r, opts);
        let mut acc = Complex64::new(0.0, 0.0);
        for p in breaks.windows(2) {
            let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            for q in 0..quad::NODES {
                let u = c + h * x[q];
                let s = r + u * u;
                let x2 = 0.5 * u * u;
                let ratio = x2.sinh() / (u * u);
                let kernel = 2.0 * s.sinh() / (2.0 * (r + x2).sinh() * ratio).sqrt();
                acc += d_chain(g, s, n1, n2) * (h * w[q] * kernel);
            }
        }
        a * acc
    };
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Invalid("derivative estimates blew up (input not smooth enough)".into()));
    }
    Ok(v)
}

/// A^{−1}g(r) for real even g.
pub fn abel_inverse(space: &SpaceParams, g: &dyn EvenFunction, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok(abel_inverse_complex(space, g, r, &AbelOptions::default())?.re)
}

/// A^{−1}g on a list of radii with explicit options.
pub fn abel_inverse_grid(space: &SpaceParams, g: &dyn EvenFunction, radii: &[f64], opts: &AbelOptions) -> Result<Vec<Complex64>> {
    radii.iter().map(|&r| abel_inverse_complex(space, g, r, opts)).collect()
}
