//! Truncated Taylor series ("jets") about a point, used to apply the
//! differential operators D₁ = −(1/sinh r)∂ and D₂ = −(1/sinh(r/2))∂ exactly
//! up to the available order.

use num_complex::Complex64;

/// Taylor coefficients c_j of Σ c_j h^j about a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<Complex64>);

impl Jet {
    /// Jet from derivatives g^{(j)}(s), j = 0..=order.
    pub fn from_derivatives(d: &[Complex64]) -> Self {
        let mut fact = 1.0;
        Jet(d.iter().enumerate().map(|(j, &v)| {
            if j > 0 {
                fact *= j as f64;
            }
            v / fact
        }).collect())
    }

    pub fn order(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn value(&self) -> Complex64 {
        self.0[0]
    }

    /// d/dh; drops one order.
    pub fn derivative(&self) -> Jet {
        Jet(self.0.iter().enumerate().skip(1).map(|(j, &c)| c * j as f64).collect())
    }

    /// Drops the (zero) constant term and divides by h.
    pub fn shift_down(&self) -> Jet {
        Jet(self.0[1..].to_vec())
    }

    pub fn truncate(&self, len: usize) -> Jet {
        Jet(self.0[..len.min(self.0.len())].to_vec())
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.0.len().min(other.0.len());
        Jet((0..n).map(|k| (0..=k).map(|j| self.0[j] * other.0[k - j]).sum()).collect())
    }

    /// self / other with other's constant term non-zero.
    pub fn div(&self, other: &Jet) -> Jet {
        let n = self.0.len().min(other.0.len());
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let s: Complex64 = (0..k).map(|j| q[j] * other.0[k - j]).sum();
            q[k] = (self.0[k] - s) / other.0[0];
        }
        Jet(q)
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet(self.0.iter().map(|&v| v * c).collect())
    }

    /// Zeroes the odd coefficients (used at the origin for even functions).
    pub fn even_part(&self) -> Jet {
        Jet(self.0.iter().enumerate().map(|(j, &v)| if j % 2 == 1 { Complex64::new(0.0, 0.0) } else { v }).collect())
    }
}

/// Jet of sinh(a(s + h)) in h.
pub fn sinh_jet(a: f64, s: f64, len: usize) -> Jet {
    let (sh, ch) = ((a * s).sinh(), (a * s).cosh());
    let mut pow = 1.0;
    Jet((0..len).map(|j| {
        if j > 0 {
            pow *= a / j as f64;
        }
        Complex64::new(if j % 2 == 0 { sh } else { ch } * pow, 0.0)
    }).collect())
}

/// D_a g = −g′ / sinh(a·) applied to a jet at base point s. At s = 0 the
/// quotient of two odd functions is formed by cancelling the common factor h.
pub fn apply_d(g: &Jet, a: f64, s: f64) -> Jet {
    let dg = g.derivative();
    let sh = sinh_jet(a, s, dg.0.len());
    let out = if s == 0.0 {
        dg.shift_down().div(&sh.shift_down()).even_part()
    } else {
        dg.div(&sh)
    };
    out.scale(-1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn reciprocal_of_exp() {
        let e = Jet((0..6).map(|j| c(1.0 / (1..=j).product::<usize>().max(1) as f64)).collect());
        let one = Jet(vec![c(1.0); 1].into_iter().chain(vec![c(0.0); 5]).collect());
        let r = one.div(&e);
        for (j, v) in r.0.iter().enumerate() {
            let want = (-1f64).powi(j as i32) / (1..=j).product::<usize>().max(1) as f64;
            assert!((v.re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn d2_of_cosh_is_constant_like() {
        // D₂ cosh(r/2)·(-2) … check −g′/sinh(r/2) for g = cosh(r/2): = −1/2
        for s in [0.0f64, 0.7, 3.0] {
            let g: Vec<Complex64> = (0..4)
                .map(|j| c(0.5f64.powi(j) * if j % 2 == 0 { (0.5f64 * s).cosh() } else { (0.5f64 * s).sinh() }))
                .collect();
            let out = apply_d(&Jet::from_derivatives(&g), 0.5, s);
            assert!((out.value().re + 0.5).abs() < 1e-14, "{s}");
        }
    }
}
