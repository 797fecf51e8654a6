//! One-dimensional Fourier integrals k(x) = ∫ b(λ) e^{iλx} dλ of symbols,
//! used to check the decay statements of the appendix lemmas.
//!
//! The finite part of the support is integrated with panels no wider than
//! π/(2|x|); an infinite tail (where the symbol is analytic) is moved onto
//! the ray λ = A + i·sgn(x)·y, where the integrand decays like e^{−|x|y}.

use crate::error::{Error, Result};
use crate::kernels::chi_cutoffs;
use crate::quad;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);
const PANEL_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// [0, ∞)
    HalfLine,
    /// ℝ
    Line,
}

/// A symbol b with declared order and support.
pub trait Symbol {
    fn order(&self) -> f64;
    fn support(&self) -> Support;
    /// b(μ) (or b(−μ) when `negative`) for μ ≥ 0. Beyond [`Symbol::analytic_from`]
    /// it must accept complex μ (analytic continuation) unless a cutoff is set.
    fn eval(&self, mu: Complex64, negative: bool) -> Complex64;
    /// b vanishes for |λ| beyond this value.
    fn cutoff(&self) -> Option<f64> {
        None
    }
    fn analytic_from(&self) -> f64 {
        2.0
    }
    /// b vanishes for |λ| below this value.
    fn lower(&self) -> f64 {
        0.0
    }
}

/// Symbol built from a closure.
pub struct FnSymbol<F: Fn(Complex64, bool) -> Complex64> {
    pub f: F,
    pub order: f64,
    pub support: Support,
    pub cutoff: Option<f64>,
    pub analytic_from: f64,
}

impl<F: Fn(Complex64, bool) -> Complex64> Symbol for FnSymbol<F> {
    fn order(&self) -> f64 {
        self.order
    }
    fn support(&self) -> Support {
        self.support
    }
    fn eval(&self, mu: Complex64, negative: bool) -> Complex64 {
        (self.f)(mu, negative)
    }
    fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }
    fn analytic_from(&self) -> f64 {
        self.analytic_from
    }
}

/// ∫_0^∞ (±iμ)^j b(±μ) e^{iμx} dμ for j = 0..=jmax.
fn half_line(b: &dyn Symbol, negative: bool, x: f64, jmax: usize) -> Result<Vec<Complex64>> {
    let end = b.cutoff().unwrap_or_else(|| b.analytic_from());
    let lower = b.lower().min(end);
    let width = (0.25f64).min(std::f64::consts::PI / (2.0 * x.abs()));
    if (end - lower) / width > PANEL_CAP as f64 {
        return Err(Error::Resolution(format!("{:.0} panels needed at x = {x}", (end - lower) / width)));
    }
    let breaks = if lower > 0.0 {
        quad::uniform_breaks(lower, end, width)
    } else {
        quad::graded_breaks(end, width, 40)
    };
    let unit = if negative { -I } else { I };
    let (gx, gw) = quad::gl16();
    let mut acc = vec![Complex64::new(0.0, 0.0); jmax + 1];
    let add = |acc: &mut [Complex64], mu: Complex64, v: Complex64| {
        let mut p = v;
        for a in acc.iter_mut() {
            *a += p;
            p *= unit * mu;
        }
    };
    for p in breaks.windows(2) {
        let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
        for q in 0..quad::NODES {
            let mu = c + h * gx[q];
            let m = Complex64::new(mu, 0.0);
            add(&mut acc, m, b.eval(m, negative) * (I * mu * x).exp() * (h * gw[q]));
        }
    }
    if b.cutoff().is_none() {
        // rotated tail: μ = end + i·sgn(x)·u/|x|, integrand ∝ e^{−u}
        let sg = x.signum();
        let ax = x.abs();
        let mut ub = vec![0.0];
        let mut u = (end * ax).min(1.0) / 8.0;
        while u < 64.0 {
            ub.push(u);
            u *= 2.0;
        }
        ub.push(64.0);
        let mut tail = vec![Complex64::new(0.0, 0.0); jmax + 1];
        for p in ub.windows(2) {
            let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            for q in 0..quad::NODES {
                let u = c + h * gx[q];
                let mu = Complex64::new(end, sg * u / ax);
                add(&mut tail, mu, b.eval(mu, negative) * ((-u).exp() * h * gw[q]));
            }
        }
        let f = I * sg / ax * (I * end * x).exp();
        for (a, t) in acc.iter_mut().zip(tail) {
            *a += f * t;
        }
    }
    Ok(acc)
}

/// k(x) = ∫ b(λ) e^{iλx} dλ over the symbol's support.
pub fn oscillatory_fourier(b: &dyn Symbol, x: f64) -> Result<Complex64> {
    Ok(fourier_moments(b, x, 0)?[0])
}

/// k^{(j)}(x) = ∫ (iλ)^j b(λ) e^{iλx} dλ for j = 0..=jmax, in one pass.
pub fn fourier_moments(b: &dyn Symbol, x: f64, jmax: usize) -> Result<Vec<Complex64>> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Invalid("oscillatory_fourier needs x ≠ 0".into()));
    }
    let mut k = half_line(b, false, x, jmax)?;
    if b.support() == Support::Line {
        for (a, v) in k.iter_mut().zip(half_line(b, true, -x, jmax)?) {
            *a += v;
        }
    }
    Ok(k)
}

/// |∂_x^m k(x)| for b(λ) = ζ χ_∞(λ) λ^{−m−1−iζ} + f(λ) on the half-line,
/// i.e. the Fourier integral of (iλ)^m b(λ).
pub fn riesz_boundary_check(m_order: u32, zeta: f64, f_symbol: Option<&dyn Symbol>, x: f64) -> Result<f64> {
    if let Some(f) = f_symbol {
        if f.order() >= -(m_order as f64) - 1.0 {
            return Err(Error::Precondition(format!(
                "f must have order < −m−1 = {} (got {})",
                -(m_order as f64) - 1.0,
                f.order()
            )));
        }
    }
    let im = I.powu(m_order);
    let main = FnSymbol {
        f: move |mu: Complex64, _neg: bool| {
            let chi = if mu.im == 0.0 { chi_cutoffs(mu.re).1 } else { 1.0 };
            // (iλ)^m λ^{−m−1−iζ} = i^m λ^{−1−iζ}
            im * zeta * chi * mu.powc(Complex64::new(-1.0, -zeta))
        },
        order: -1.0,
        support: Support::HalfLine,
        cutoff: None,
        analytic_from: 2.0,
    };
    let mut k = if zeta == 0.0 { Complex64::new(0.0, 0.0) } else { oscillatory_fourier(&main, x)? };
    if let Some(f) = f_symbol {
        let wrapped = FnSymbol {
            f: |mu: Complex64, neg: bool| {
                let lam = if neg { -mu } else { mu };
                (I * lam).powu(m_order) * f.eval(mu, neg)
            },
            order: f.order() + m_order as f64,
            support: f.support(),
            cutoff: f.cutoff(),
            analytic_from: f.analytic_from(),
        };
        k += oscillatory_fourier(&wrapped, x)?;
    }
    Ok(k.norm())
}
