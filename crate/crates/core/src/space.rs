//! Damek–Ricci space parameters, the volume density and the potential ω.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Geometry of a Damek–Ricci space S = N ⋊ ℝ⁺ with dim 𝔳 = m, dim 𝔷 = k.
///
/// Since m is even, Q = m/2 + k is an integer and is stored exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub m: u32,
    pub k: u32,
    pub n: u32,
    q: u32,
    pub qtilde: f64,
}

/// Exact coefficients of ω(r) = Σ_{j≥1} ω_j e^{-jr}.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaCoeffs {
    /// `coeffs[j-1]` is ω_j.
    pub coeffs: Vec<f64>,
    pub jmax: usize,
}

impl OmegaCoeffs {
    /// ω_j for 1 ≤ j ≤ jmax, zero otherwise.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 || j > self.jmax {
            0.0
        } else {
            self.coeffs[j - 1]
        }
    }

    /// Σ_{j≤J} ω_j e^{-jr}.
    pub fn partial_sum(&self, r: f64) -> f64 {
        let q = (-r).exp();
        self.coeffs.iter().rev().fold(0.0, |acc, &w| (acc + w) * q)
    }
}

/// Validating constructor; `qtilde` defaults to Q + 1.
pub fn new_space(m: i64, k: i64, qtilde_override: Option<f64>) -> Result<SpaceParams> {
    if m % 2 != 0 {
        return Err(Error::OddM(m));
    }
    if m < 2 {
        return Err(Error::MTooSmall(m));
    }
    if k < 1 {
        return Err(Error::KTooSmall(k));
    }
    let q = (m / 2 + k) as u32;
    let qtilde = match qtilde_override {
        Some(qt) if !(qt > q as f64) || !qt.is_finite() => {
            return Err(Error::QtildeTooSmall { q: q as f64, qtilde: qt })
        }
        Some(qt) => qt,
        None => q as f64 + 1.0,
    };
    Ok(SpaceParams { m: m as u32, k: k as u32, n: (m + k + 1) as u32, q, qtilde })
}

impl SpaceParams {
    /// Convenience wrapper around [`new_space`] with the default Q̃.
    pub fn new(m: i64, k: i64) -> Result<Self> {
        new_space(m, k, None)
    }

    /// Homogeneous dimension Q = m/2 + k.
    pub fn q(&self) -> f64 {
        self.q as f64
    }

    pub fn q_int(&self) -> u32 {
        self.q
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Short stable identifier used in file names.
    pub fn tag(&self) -> String {
        format!("m{}k{}qt{}", self.m, self.k, fmt_num(self.qtilde))
    }

    /// A = (1/4)(m/2)(Q−1): coefficient of sinh(r/2)^{-2} in ω.
    fn omega_a(&self) -> f64 {
        0.25 * (self.m as f64 / 2.0) * (self.q() - 1.0)
    }

    /// B = (k/2)(k/2 − 1): coefficient of sinh(r)^{-2} in ω.
    fn omega_b(&self) -> f64 {
        let h = self.k as f64 / 2.0;
        h * (h - 1.0)
    }
}

/// Compact decimal rendering without trailing zeros.
pub(crate) fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// V(r) = 2^{m+k} sinh^{m+k}(r/2) cosh^k(r/2).
pub fn density(space: &SpaceParams, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::NegativeRadius(r));
    }
    Ok(density_unchecked(space, r))
}

pub(crate) fn density_unchecked(space: &SpaceParams, r: f64) -> f64 {
    let (m, k) = (space.m as i32, space.k as i32);
    if r > 40.0 {
        // avoid overflow in the separate powers
        let lv = (m + k) as f64 * (2.0 * (0.5 * r).sinh()).ln() + k as f64 * (0.5 * r).cosh().ln();
        return lv.exp();
    }
    2f64.powi(m + k) * (0.5 * r).sinh().powi(m + k) * (0.5 * r).cosh().powi(k)
}

/// V′(r)/V(r) = ((m+k)/2) coth(r/2) + (k/2) tanh(r/2).
pub fn log_density_derivative(space: &SpaceParams, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok(log_density_derivative_unchecked(space, r))
}

pub(crate) fn log_density_derivative_unchecked(space: &SpaceParams, r: f64) -> f64 {
    let h = 0.5 * r;
    0.5 * (space.m + space.k) as f64 / h.tanh() + 0.5 * space.k as f64 * h.tanh()
}

/// ω(r) = A sinh(r/2)^{-2} + B sinh(r)^{-2}, the potential of the conjugated
/// radial Laplacian V^{1/2}(∂² + V′/V ∂)V^{-1/2} = ∂² − ω − Q²/4.
pub fn omega(space: &SpaceParams, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok(space.omega_a() / (0.5 * r).sinh().powi(2) + space.omega_b() / r.sinh().powi(2))
}

/// ω_j = 4A j + [j even] 4B (j/2), from sinh(x)^{-2} = 4 Σ j e^{-2jx}.
pub fn omega_coeffs(space: &SpaceParams, jmax: usize) -> Result<OmegaCoeffs> {
    if jmax < 1 {
        return Err(Error::Invalid("jmax must be at least 1".into()));
    }
    let (a, b) = (space.omega_a(), space.omega_b());
    let coeffs = (1..=jmax)
        .map(|j| {
            let even = if j % 2 == 0 { 4.0 * b * (j / 2) as f64 } else { 0.0 };
            4.0 * a * j as f64 + even
        })
        .collect();
    Ok(OmegaCoeffs { coeffs, jmax })
}

/// Constant A with |ω_j| ≤ A·j for all j.
pub fn omega_growth_constant(space: &SpaceParams) -> f64 {
    4.0 * space.omega_a().abs() + 2.0 * space.omega_b().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_spaces() {
        let s = new_space(2, 1, None).unwrap();
        assert_eq!((s.n, s.q(), s.qtilde), (4, 2.0, 3.0));
        let s = new_space(2, 2, None).unwrap();
        assert_eq!((s.n, s.q()), (5, 3.0));
    }

    #[test]
    fn distinct_errors() {
        assert_eq!(new_space(3, 1, None), Err(Error::OddM(3)));
        assert_eq!(new_space(0, 1, None), Err(Error::MTooSmall(0)));
        assert_eq!(new_space(2, 0, None), Err(Error::KTooSmall(0)));
        assert!(matches!(new_space(2, 1, Some(2.0)), Err(Error::QtildeTooSmall { .. })));
        assert!(new_space(2, 1, Some(2.5)).is_ok());
    }

    #[test]
    fn density_values() {
        let s = SpaceParams::new(2, 1).unwrap();
        assert_eq!(density(&s, 0.0).unwrap(), 0.0);
        // 8 sinh(1)^3 cosh(1), 30 digits from mpmath
        assert!((density(&s, 2.0).unwrap() - 20.036_196_381_433_715).abs() < 1e-12);
        assert!((density(&s, 30.0).unwrap() * (-60.0f64).exp() - 0.5).abs() < 1e-6);
        assert!(density(&s, -1.0).is_err());
    }

    #[test]
    fn log_derivative_values() {
        let s = SpaceParams::new(2, 1).unwrap();
        assert!((log_density_derivative(&s, 50.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((log_density_derivative(&s, 0.01).unwrap() / 300.0 - 1.0).abs() < 0.01);
        let s2 = SpaceParams::new(2, 2).unwrap();
        let v = 2.0 / 0.5f64.tanh() + 0.5f64.tanh();
        assert!((log_density_derivative(&s2, 1.0).unwrap() - v).abs() < 1e-14);
        assert!((v - 4.79).abs() < 0.01);
        assert!(log_density_derivative(&s, 0.0).is_err());
    }

    #[test]
    fn omega_coefficients() {
        let s = SpaceParams::new(2, 1).unwrap();
        let w = omega_coeffs(&s, 4).unwrap();
        assert_eq!(w.get(1), 1.0);
        assert_eq!(w.get(2), 1.0);
        for (m, k) in [(2, 1), (2, 2), (4, 3), (6, 1)] {
            let s = SpaceParams::new(m, k).unwrap();
            let w = omega_coeffs(&s, 1).unwrap();
            assert_eq!(w.get(1), (m as f64 / 2.0) * (s.q() - 1.0));
        }
    }

    #[test]
    fn omega_series_matches_closed_form() {
        for (m, k) in [(2, 1), (2, 2), (4, 3)] {
            let s = SpaceParams::new(m, k).unwrap();
            let w = omega_coeffs(&s, 60).unwrap();
            let diff = (w.partial_sum(1.0) - omega(&s, 1.0).unwrap()).abs();
            assert!(diff < 1e-8, "{m},{k}: {diff}");
        }
        let s = SpaceParams::new(2, 2).unwrap();
        let w1 = omega_coeffs(&s, 1).unwrap().get(1);
        assert!((omega(&s, 10.0).unwrap() / (w1 * (-10.0f64).exp()) - 1.0).abs() < 1e-3);
    }
}
