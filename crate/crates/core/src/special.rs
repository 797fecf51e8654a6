//! Complex log-gamma via a shifted Stirling series.

use num_complex::Complex64;
use std::f64::consts::PI;

/// B_{2j} / (2j (2j-1)) for j = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Principal-ish branch of ln Γ(z); the imaginary part is only defined mod 2π,
/// which is all callers need since they exponentiate.
///
/// Returns `None` at the poles z ∈ {0, -1, -2, ...}.
pub fn ln_gamma(z: Complex64) -> Option<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return None;
    }
    let shift = if z.re < 12.0 { (12.0 - z.re).ceil() as usize } else { 0 };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    for _ in 0..shift {
        acc += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    let lg = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    Some(lg - acc)
}

/// Γ(z) for complex z, `None` at poles.
pub fn gamma(z: Complex64) -> Option<Complex64> {
    ln_gamma(z).map(|l| l.exp())
}

/// Γ(x) for real x away from the poles.
pub fn gamma_real(x: f64) -> f64 {
    match gamma(Complex64::new(x, 0.0)) {
        Some(g) => g.re,
        None => f64::INFINITY,
    }
}

/// 1/Γ(z), entire: returns zero at the poles.
pub fn rgamma(z: Complex64) -> Complex64 {
    match ln_gamma(z) {
        Some(l) => (-l).exp(),
        None => Complex64::new(0.0, 0.0),
    }
}
