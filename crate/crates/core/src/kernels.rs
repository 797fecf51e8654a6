//! Wave propagator kernels and their envelope checks.
//!
//! The kernel of D^{−τ} D̃^{τ−σ} e^{itD} splits into a low-frequency part
//! w_t^0 (spectral integral over λ ∈ [0, 2], done against a tabulated φ_λ)
//! and a high-frequency part. The latter is computed through the Abel
//! factorisation: its spectral integral is g ↦ A^{−1}g of the 1-D Fourier
//! integral g, and g is evaluated by contour rotation, so no spectral
//! truncation is involved.

use crate::error::{Error, Result};
use crate::fit;
use crate::quad;
use crate::space::{density_unchecked, SpaceParams};
use crate::special::rgamma;
use crate::spherical::{phi_zero_grid, plancherel_density, PhiTable, RowBuilder};
use crate::transform::{abel_inverse_complex, cs_closed_form, fourier_moments, AbelOptions, EvenFunction, Grid, RadialProfile, Support, Symbol};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smooth partition of unity 1 = χ₀ + χ_∞ with χ₀ = 1 on [0, 1] and
/// χ₀ = 0 on [2, ∞). The transition is the C^∞ step
/// ψ(t) = e^{−1/t} / (e^{−1/t} + e^{−1/(1−t)}).
pub fn chi_cutoffs(lambda: f64) -> (f64, f64) {
    let l = lambda.abs();
    if l <= 1.0 {
        return (1.0, 0.0);
    }
    if l >= 2.0 {
        return (0.0, 1.0);
    }
    let t = l - 1.0;
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let psi = a / (a + b);
    (1.0 - psi, psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPart {
    Low,
    HighRegularized,
    Full,
}

/// Parameters of one kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRequest {
    pub sigma: Complex64,
    pub tau: f64,
    pub t: f64,
    pub part: KernelPart,
}

impl KernelRequest {
    pub fn new(sigma: Complex64, tau: f64, t: f64, part: KernelPart) -> Result<Self> {
        let r = KernelRequest { sigma, tau, t, part };
        r.check_basic()?;
        Ok(r)
    }

    pub fn real(sigma: f64, tau: f64, t: f64, part: KernelPart) -> Result<Self> {
        Self::new(Complex64::new(sigma, 0.0), tau, t, part)
    }

    /// Same request at another time.
    pub fn at(&self, t: f64) -> Self {
        KernelRequest { t, ..*self }
    }

    fn check_basic(&self) -> Result<()> {
        if self.t == 0.0 || !self.t.is_finite() {
            return Err(Error::Invalid("t must be finite and non-zero".into()));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::Invalid(format!("τ must be ≥ 0 (got {})", self.tau)));
        }
        // the low part only needs integrability at λ = 0
        let cap = if self.part == KernelPart::Low { 2.0 } else { 1.5 };
        if self.tau >= cap {
            return Err(Error::Integrability(format!("τ = {} must be < {cap}", self.tau)));
        }
        if !self.sigma.re.is_finite() || !self.sigma.im.is_finite() {
            return Err(Error::Invalid("σ must be finite".into()));
        }
        Ok(())
    }

    fn check_high(&self, space: &SpaceParams) -> Result<()> {
        let top = (space.nf() + 1.0) / 2.0;
        if self.part == KernelPart::HighRegularized && !(0.0..=top + 1e-12).contains(&self.sigma.re) {
            return Err(Error::Precondition(format!("Re σ must lie in [0, {top}] (got {})", self.sigma.re)));
        }
        Ok(())
    }
}

/// λ^{−τ} (λ² + Q̃²/4)^{(τ−σ)/2}, continued analytically off the real axis.
pub fn multiplier(space: &SpaceParams, sigma: Complex64, tau: f64, lambda: Complex64) -> Complex64 {
    let qt2 = space.qtilde * space.qtilde / 4.0;
    let base = lambda * lambda + qt2;
    (base.ln() * ((tau - sigma) * 0.5) - lambda.ln() * tau).exp()
}

/// e^{σ²} / Γ((n+1)/2 − σ).
pub fn gamma_prefactor(space: &SpaceParams, sigma: Complex64) -> Complex64 {
    (sigma * sigma).exp() * rgamma(Complex64::new((space.nf() + 1.0) / 2.0, 0.0) - sigma)
}

/// Largest λ-panel allowed for phases up to `phase` = |t| + r.
fn lambda_panel(phase: f64) -> f64 {
    (0.1f64).min(PI / (2.0 * phase.max(1e-9)))
}

/// w_t^0 on a fixed radial grid; φ_λ for λ ∈ [0, 2] is tabulated once and
/// reused for every t with |t| ≤ `t_max`.
#[derive(Debug, Clone)]
pub struct LowFrequencyKernel {
    pub space: SpaceParams,
    pub radii: Vec<f64>,
    pub t_max: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    table: PhiTable,
}

impl LowFrequencyKernel {
    pub fn new(space: SpaceParams, radii: &[f64], t_max: f64) -> Result<Self> {
        if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
            return Err(Error::Invalid("radii must be non-negative and strictly increasing".into()));
        }
        let rmax = *radii.last().unwrap();
        let width = lambda_panel(t_max.abs() + rmax);
        let (nodes, weights) = quad::composite(&quad::graded_breaks(2.0, width, 30));
        // χ₀|c|^{−2} with the panel weight folded in
        let weights: Vec<f64> = nodes.iter().zip(&weights)
            .map(|(&l, &w)| w * chi_cutoffs(l).0 * plancherel_density(&space, l))
            .collect();
        let table = PhiTable::build(&space, &nodes, radii)?;
        Ok(LowFrequencyKernel { space, radii: radii.to_vec(), t_max: t_max.abs(), nodes, weights, table })
    }

    pub fn eval(&self, req: &KernelRequest) -> Result<Vec<Complex64>> {
        req.check_basic()?;
        if req.tau >= 2.0 {
            return Err(Error::Integrability(format!("τ = {} ≥ 2: λ^{{−τ}}|c|^{{−2}} is not integrable at 0", req.tau)));
        }
        if req.t.abs() > self.t_max * (1.0 + 1e-12) {
            return Err(Error::Resolution(format!("|t| = {} exceeds the table's t_max = {}", req.t.abs(), self.t_max)));
        }
        let mut out = vec![ZERO; self.radii.len()];
        for (i, &l) in self.nodes.iter().enumerate() {
            if self.weights[i] == 0.0 {
                continue;
            }
            let lam = Complex64::new(l, 0.0);
            let c = multiplier(&self.space, req.sigma, req.tau, lam) * (Complex64::new(0.0, req.t * l)).exp() * self.weights[i];
            for (o, &p) in out.iter_mut().zip(self.table.row(i)) {
                *o += c * p;
            }
        }
        Ok(out)
    }
}

/// w_t^0 for several requests at once without storing the φ_λ table: each
/// row is built, used for every request, and dropped. For long times, where
/// the λ-grid and the radial grid are both large.
pub fn low_kernel_sweep(space: &SpaceParams, radii: &[f64], reqs: &[KernelRequest]) -> Result<Vec<Vec<Complex64>>> {
    for req in reqs {
        req.check_basic()?;
    }
    let t_max = reqs.iter().fold(0.0f64, |a, r| a.max(r.t.abs()));
    let rmax = radii.last().copied().unwrap_or(0.0);
    let (nodes, weights) = quad::composite(&quad::graded_breaks(2.0, lambda_panel(t_max + rmax), 30));
    let rows = RowBuilder::new(space, radii)?;
    let mut out = vec![vec![ZERO; radii.len()]; reqs.len()];
    for (&l, &w) in nodes.iter().zip(&weights) {
        let w = w * chi_cutoffs(l).0 * plancherel_density(space, l);
        if w == 0.0 {
            continue;
        }
        let row = rows.row(l)?;
        let lam = Complex64::new(l, 0.0);
        for (req, o) in reqs.iter().zip(out.iter_mut()) {
            let c = multiplier(space, req.sigma, req.tau, lam) * Complex64::new(0.0, req.t * l).exp() * w;
            for (x, &p) in o.iter_mut().zip(&row) {
                *x += c * p;
            }
        }
    }
    Ok(out)
}

/// w_t^0(r) = ∫_0^2 χ₀|c|^{−2} λ^{−τ}(λ²+Q̃²/4)^{(τ−σ)/2} φ_λ(r) e^{itλ} dλ.
pub fn kernel_w0(space: &SpaceParams, req: &KernelRequest, rgrid: &Grid) -> Result<RadialProfile> {
    if req.part != KernelPart::Low {
        return Err(Error::Invalid("kernel_w0 needs part = low".into()));
    }
    let k = LowFrequencyKernel::new(*space, &rgrid.nodes, req.t.abs())?;
    RadialProfile::new(*space, rgrid.clone(), k.eval(req)?)
}

/// χ_∞-cut multiplier on the half-line (zero below λ = 1).
struct HighSymbol {
    space: SpaceParams,
    sigma: Complex64,
    tau: f64,
}

impl Symbol for HighSymbol {
    fn order(&self) -> f64 {
        -self.sigma.re
    }
    fn support(&self) -> Support {
        Support::HalfLine
    }
    fn eval(&self, mu: Complex64, _negative: bool) -> Complex64 {
        let chi = if mu.im == 0.0 { chi_cutoffs(mu.re).1 } else { 1.0 };
        if chi == 0.0 {
            return ZERO;
        }
        multiplier(&self.space, self.sigma, self.tau, mu) * chi
    }
    fn lower(&self) -> f64 {
        1.0
    }
}

/// g(s) = (1/π) ∫_0^∞ χ_∞ λ^{−τ}(λ²+Q̃²/4)^{(τ−σ)/2} e^{itλ} cos(λs) dλ
///      = (K(t+s) + K(t−s)) / 2π, K the one-sided Fourier integral.
struct HighG {
    sym: HighSymbol,
    t: f64,
}

impl EvenFunction for HighG {
    fn derivatives(&self, s: f64, order: usize) -> Vec<Complex64> {
        let plus = fourier_moments(&self.sym, self.t + s, order);
        let minus = fourier_moments(&self.sym, self.t - s, order);
        match (plus, minus) {
            (Ok(p), Ok(m)) => (0..=order)
                .map(|j| (p[j] + if j % 2 == 0 { m[j] } else { -m[j] }) / (2.0 * PI))
                .collect(),
            _ => vec![Complex64::new(f64::NAN, f64::NAN); order + 1],
        }
    }
    fn taylor_radius(&self) -> f64 {
        self.t.abs()
    }
}

/// High-frequency kernel values with a quadrature error estimate.
#[derive(Debug, Clone)]
pub struct HighKernel {
    pub profile: RadialProfile,
    /// |difference| against a half-resolution Weyl quadrature at the radius
    /// of largest |w|, relative to that value (0 for k even, where A^{−1} is
    /// purely differential).
    pub error_estimate: f64,
}

/// Relative accuracy demanded of the high-frequency quadrature.
pub const HIGH_KERNEL_TOL: f64 = 1e-4;

fn high_part(space: &SpaceParams, req: &KernelRequest, radii: &[f64], regularized: bool) -> Result<HighKernel> {
    req.check_basic()?;
    req.check_high(space)?;
    let g = HighG { sym: HighSymbol { space: *space, sigma: req.sigma, tau: req.tau }, t: req.t };
    let pref = if regularized { gamma_prefactor(space, req.sigma) } else { Complex64::new(1.0, 0.0) } / cs_closed_form(space);
    let opts = AbelOptions { singular: Some(req.t.abs()), panels: 60, ..AbelOptions::default() };
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        if space.k % 2 == 0 && r == req.t.abs() {
            return Err(Error::Singularity(format!("r = {r} lies on the wave front r = |t|")));
        }
        // the Weyl integral must reach past the front s = |t|
        let o = AbelOptions { extent: opts.extent.max(req.t.abs() - r + 12.0), ..opts };
        values.push(pref * abel_inverse_complex(space, &g, r, &o)?);
    }
    let mut error_estimate = 0.0;
    if space.k % 2 == 1 && pref != ZERO {
        let (jmax, vmax) = values.iter().enumerate().fold((0, 0.0), |b, (j, v)| if v.norm() > b.1 { (j, v.norm()) } else { b });
        if vmax > 0.0 {
            let extent = opts.extent.max(req.t.abs() - radii[jmax] + 12.0);
            let coarse = AbelOptions { panels: opts.panels / 2, extent, ..opts };
            let v2 = pref * abel_inverse_complex(space, &g, radii[jmax], &coarse)?;
            error_estimate = (v2 - values[jmax]).norm() / vmax;
        }
    }
    if error_estimate > HIGH_KERNEL_TOL {
        return Err(Error::Truncation(format!("high-frequency quadrature error {error_estimate:.2e} (> {HIGH_KERNEL_TOL:.0e})")));
    }
    let grid = Grid::from_nodes(radii.to_vec())?;
    Ok(HighKernel { profile: RadialProfile::new(*space, grid, values)?, error_estimate })
}

/// w̃_t^∞(r) = e^{σ²}/Γ((n+1)/2 − σ) · ∫ χ_∞|c|^{−2} λ^{−τ}(λ²+Q̃²/4)^{(τ−σ)/2} φ_λ(r) e^{itλ} dλ,
/// the integral understood as H^{−1} of the multiplier (no Λ cutoff).
pub fn kernel_w_inf(space: &SpaceParams, req: &KernelRequest, radii: &[f64]) -> Result<HighKernel> {
    if req.part != KernelPart::HighRegularized {
        return Err(Error::Invalid("kernel_w_inf needs part = high_regularized".into()));
    }
    high_part(space, req, radii, true)
}

/// w_t = w_t^0 + w_t^∞ (no Gamma regularisation) at radii away from r = |t|.
pub fn kernel_full(space: &SpaceParams, req: &KernelRequest, radii: &[f64]) -> Result<RadialProfile> {
    if req.part != KernelPart::Full {
        return Err(Error::Invalid("kernel_full needs part = full".into()));
    }
    let low = LowFrequencyKernel::new(*space, radii, req.t.abs())?.eval(&KernelRequest { part: KernelPart::Low, ..*req })?;
    let high = high_part(space, req, radii, false)?;
    let values = low.iter().zip(&high.profile.values).map(|(a, b)| a + b).collect();
    RadialProfile::new(*space, high.profile.grid, values)
}

/// Writes `t,r,kernel_re,kernel_im` rows.
pub fn write_kernel_csv<W: Write>(out: W, rows: &[(f64, f64, Complex64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "r", "kernel_re", "kernel_im"]).map_err(io)?;
    for (t, r, v) in rows {
        w.write_record([format!("{t:e}"), format!("{r:e}"), format!("{:e}", v.re), format!("{:e}", v.im)]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// The pointwise regimes of the two kernel theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// |w_t^0| ≲ φ_0(r), |t| ≤ 2.
    LowSmallTime,
    /// |w_t^0| ≲ |t|^{τ−3} φ_0(r), |t| ≥ 2, r ≤ |t|/2.
    LowInside,
    /// |w_t^0| ≲ (1+|r−|t||)^{τ−2} e^{−Qr/2}, |t| ≥ 2, r ≥ |t|/2.
    LowOutside,
    /// |w̃_t^∞| ≲ |t|^{−(n−1)/2}, Re σ = (n+1)/2, |t| ≤ 2, r ≤ 3.
    HighSmallTimeNear,
    /// |w̃_t^∞| ≲ r^{−N} e^{−Qr/2}, |t| ≤ 2, r ≥ 3.
    HighSmallTimeFar,
    /// |w̃_t^∞| ≲ (1+|r−|t||)^{−N} e^{−Qr/2}, |t| ≥ 2.
    HighLargeTime,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::LowSmallTime => "low_small_time",
            Regime::LowInside => "low_inside",
            Regime::LowOutside => "low_outside",
            Regime::HighSmallTimeNear => "high_small_time_near",
            Regime::HighSmallTimeFar => "high_small_time_far",
            Regime::HighLargeTime => "high_large_time",
        }
    }

    pub fn is_low(&self) -> bool {
        matches!(self, Regime::LowSmallTime | Regime::LowInside | Regime::LowOutside)
    }

    fn accepts(&self, t: f64, r: f64) -> bool {
        let at = t.abs();
        match self {
            Regime::LowSmallTime => at <= 2.0,
            Regime::LowInside => at >= 2.0 && r <= at / 2.0 + 1e-12,
            Regime::LowOutside => at >= 2.0 && r >= at / 2.0 - 1e-12,
            Regime::HighSmallTimeNear => at <= 2.0 && r <= 3.0 + 1e-12,
            Regime::HighSmallTimeFar => at <= 2.0 && r >= 3.0 - 1e-12,
            Regime::HighLargeTime => at >= 2.0,
        }
    }

    /// Variable along which a wrong envelope shows up as growth.
    fn scan_variable(&self, t: f64, r: f64) -> f64 {
        match self {
            Regime::LowSmallTime | Regime::HighSmallTimeNear => 1.0 / t.abs(),
            Regime::LowInside => t.abs(),
            Regime::LowOutside | Regime::HighLargeTime => 1.0 + (r - t.abs()).abs(),
            Regime::HighSmallTimeFar => r,
        }
    }
}

/// An envelope: a regime plus exponent shifts (negative = stronger decay,
/// used for negative controls) and the finite order N standing in for ∞.
/// `shift` moves the power of t or (1+|r−|t||); `rate_shift` is added to
/// the rate Q/2 of the exponential factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub regime: Regime,
    pub shift: f64,
    pub rate_shift: f64,
    pub order: f64,
}

impl Envelope {
    pub fn new(regime: Regime) -> Self {
        Envelope { regime, shift: 0.0, rate_shift: 0.0, order: 3.0 }
    }

    pub fn shifted(regime: Regime, shift: f64) -> Self {
        Envelope { shift, ..Self::new(regime) }
    }

    pub fn rate_shifted(regime: Regime, rate_shift: f64) -> Self {
        Envelope { rate_shift, ..Self::new(regime) }
    }

    fn value(&self, space: &SpaceParams, tau: f64, t: f64, r: f64, phi0: f64) -> f64 {
        let at = t.abs();
        let q = space.q();
        let decay = (-(q / 2.0 + self.rate_shift) * r).exp();
        let n = self.order;
        match self.regime {
            Regime::LowSmallTime => phi0 * at.powf(self.shift),
            Regime::LowInside => at.powf(tau - 3.0 + self.shift) * phi0,
            Regime::LowOutside => (1.0 + (r - at).abs()).powf(tau - 2.0 + self.shift) * decay,
            Regime::HighSmallTimeNear => at.powf(-(space.nf() - 1.0) / 2.0 + self.shift),
            Regime::HighSmallTimeFar => r.powf(-n + self.shift) * decay,
            Regime::HighLargeTime => (1.0 + (r - at).abs()).powf(-n + self.shift) * decay,
        }
    }
}

/// Times and radii of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRange {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
}

impl ScanRange {
    pub fn new(times: Vec<f64>, r_min: f64, r_max: f64, nr: usize) -> Self {
        let radii = if nr <= 1 {
            vec![r_min]
        } else {
            (0..nr).map(|i| r_min + (r_max - r_min) * i as f64 / (nr - 1) as f64).collect()
        };
        ScanRange { times, radii }
    }
}

/// Sup of |kernel|/envelope over a scan, with a divergence diagnosis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub region: String,
    pub max_ratio: f64,
    /// Geometric-mean constant C in |kernel| ≈ C·envelope.
    pub fitted_constant: f64,
    /// Log-log slope of the ratio along the scan variable (upper half).
    pub tail_slope: f64,
    pub diverges: bool,
    /// (scan variable, sup ratio) per bin, in increasing variable.
    pub profile: Vec<(f64, f64)>,
}

/// Ratio growing faster than this power along the scan variable is divergence.
pub const DIVERGENCE_SLOPE: f64 = 0.5;
/// Ratio exceeding this multiple of the median in the tail is divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

impl EnvelopeReport {
    /// Builds the report from (scan variable, ratio) samples.
    pub fn from_samples(region: String, samples: &[(f64, f64)]) -> Self {
        let mut bins: Vec<(f64, f64)> = Vec::new();
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (v, ratio) in sorted {
            match bins.last_mut() {
                Some(b) if (b.0 - v).abs() <= 1e-9 * v.abs().max(1.0) => b.1 = b.1.max(ratio),
                _ => bins.push((v, ratio)),
            }
        }
        let max_ratio = bins.iter().map(|b| b.1).fold(0.0, f64::max);
        let positive: Vec<f64> = samples.iter().map(|s| s.1).filter(|&x| x > 0.0).collect();
        let fitted_constant = if positive.is_empty() {
            0.0
        } else {
            (positive.iter().map(|x| x.ln()).sum::<f64>() / positive.len() as f64).exp()
        };
        if max_ratio == 0.0 || bins.len() < 2 {
            return EnvelopeReport { region, max_ratio, fitted_constant, tail_slope: 0.0, diverges: false, profile: bins };
        }
        let mut vals: Vec<f64> = bins.iter().map(|b| b.1).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = vals[vals.len() / 2];
        let upper = &bins[bins.len() / 2..];
        let tail_max = upper.iter().map(|b| b.1).fold(0.0, f64::max);
        let pts: Vec<&(f64, f64)> = upper.iter().filter(|b| b.1 > 0.0 && b.0 > 0.0).collect();
        let tail_slope = if pts.len() >= 2 {
            let xs: Vec<f64> = pts.iter().map(|b| b.0).collect();
            let ys: Vec<f64> = pts.iter().map(|b| b.1).collect();
            fit::loglog_slope(&xs, &ys).0
        } else {
            0.0
        };
        let diverges = tail_max > DIVERGENCE_FACTOR * median || tail_slope > DIVERGENCE_SLOPE;
        EnvelopeReport { region, max_ratio, fitted_constant, tail_slope, diverges, profile: bins }
    }

    pub fn write_csv<W: Write>(reports: &[EnvelopeReport], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["regime", "max_ratio", "constant"]).map_err(io)?;
        for r in reports {
            w.write_record([r.region.clone(), format!("{:e}", r.max_ratio), format!("{:e}", r.fitted_constant)]).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scans |kernel|/envelope over `range`. `req` supplies σ and τ (its t is
/// replaced by each scan time); `low` may pass a prebuilt table.
pub fn envelope_scan(
    space: &SpaceParams,
    req: &KernelRequest,
    envelope: &Envelope,
    range: &ScanRange,
    low: Option<&LowFrequencyKernel>,
) -> Result<EnvelopeReport> {
    let regime = envelope.regime;
    if range.times.is_empty() || range.radii.is_empty() {
        return Err(Error::Invalid("empty scan range".into()));
    }
    for &t in &range.times {
        if !range.radii.iter().any(|&r| regime.accepts(t, r)) {
            return Err(Error::Precondition(format!("t = {t} has no radius inside regime {}", regime.name())));
        }
        if matches!(regime, Regime::LowSmallTime | Regime::HighSmallTimeNear | Regime::HighSmallTimeFar) && t.abs() > 2.0 {
            return Err(Error::Precondition(format!("regime {} needs |t| ≤ 2 (got {t})", regime.name())));
        }
        if matches!(regime, Regime::LowInside | Regime::LowOutside | Regime::HighLargeTime) && t.abs() < 2.0 {
            return Err(Error::Precondition(format!("regime {} needs |t| ≥ 2 (got {t})", regime.name())));
        }
    }
    if regime == Regime::HighSmallTimeNear && (req.sigma.re - (space.nf() + 1.0) / 2.0).abs() > 1e-12 {
        return Err(Error::Precondition("the small-time high-frequency envelope needs Re σ = (n+1)/2".into()));
    }
    let mut radii = range.radii.clone();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup();
    let phi0 = phi_zero_grid(space, &radii);
    let tmax = range.times.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let owned;
    let lowk = if regime.is_low() {
        match low {
            Some(k) if k.radii == radii && k.t_max >= tmax => Some(k),
            _ => {
                owned = LowFrequencyKernel::new(*space, &radii, tmax)?;
                Some(&owned)
            }
        }
    } else {
        None
    };
    let mut samples = Vec::new();
    for &t in &range.times {
        let inside: Vec<usize> = (0..radii.len()).filter(|&j| regime.accepts(t, radii[j])).collect();
        let vals: Vec<Complex64> = if let Some(k) = lowk {
            let all = k.eval(&KernelRequest { part: KernelPart::Low, ..req.at(t) })?;
            inside.iter().map(|&j| all[j]).collect()
        } else {
            let rs: Vec<f64> = inside.iter().map(|&j| radii[j]).collect();
            let rq = KernelRequest { part: KernelPart::HighRegularized, ..req.at(t) };
            kernel_w_inf(space, &rq, &rs)?.profile.values
        };
        for (&j, v) in inside.iter().zip(&vals) {
            let env = envelope.value(space, req.tau, t, radii[j], phi0[j]);
            samples.push((regime.scan_variable(t, radii[j]), v.norm() / env));
        }
    }
    let mut label = regime.name().to_string();
    if envelope.shift != 0.0 {
        label += &format!("(shift {})", envelope.shift);
    }
    if envelope.rate_shift != 0.0 {
        label += &format!("(rate shift {})", envelope.rate_shift);
    }
    Ok(EnvelopeReport::from_samples(label, &samples))
}

/// One envelope scan: kernel parameters, envelope and range.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub req: KernelRequest,
    pub envelope: Envelope,
    pub range: ScanRange,
}

fn regime_range(regime: Regime) -> ScanRange {
    match regime {
        Regime::LowSmallTime => ScanRange::new(vec![0.1, 0.25, 0.5, 1.0, 2.0], 0.0, 10.0, 21),
        Regime::LowInside => ScanRange::new(vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0], 0.0, 16.0, 33),
        Regime::LowOutside => ScanRange::new(vec![4.0, 8.0, 16.0], 2.0, 30.0, 29),
        // radii offset so no sample sits exactly on the front r = |t|
        Regime::HighSmallTimeNear => ScanRange::new(vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0], 0.0537, 3.0, 16),
        Regime::HighSmallTimeFar => ScanRange::new(vec![0.5, 1.0, 2.0], 3.0, 12.0, 19),
        Regime::HighLargeTime => ScanRange::new(vec![4.0, 8.0], 0.537, 20.0, 40),
    }
}

pub const ALL_REGIMES: [Regime; 6] = [
    Regime::LowSmallTime,
    Regime::LowInside,
    Regime::LowOutside,
    Regime::HighSmallTimeNear,
    Regime::HighSmallTimeFar,
    Regime::HighLargeTime,
];

/// Default scan for a regime: σ = 1 for the low part, the endpoint line
/// Re σ = (n+1)/2 for the high part.
pub fn standard_scan(space: &SpaceParams, regime: Regime, tau: f64) -> Result<ScanSpec> {
    let req = if regime.is_low() {
        KernelRequest::real(1.0, tau, 1.0, KernelPart::Low)?
    } else {
        let endpoint = Complex64::new((space.nf() + 1.0) / 2.0, ENDPOINT_IM_SIGMA);
        KernelRequest::new(endpoint, tau, 1.0, KernelPart::HighRegularized)?
    };
    Ok(ScanSpec { req, envelope: Envelope::new(regime), range: regime_range(regime) })
}

/// Deliberately too strong envelopes that a correct kernel must violate:
/// an extra power of t at small times, t^{τ−4} instead of t^{τ−3} inside
/// the light cone (visible only past the pre-asymptotic decay, hence the
/// scan out to t = 1024), and a faster exponential rate elsewhere.
pub fn negative_control(space: &SpaceParams, regime: Regime, tau: f64) -> Result<ScanSpec> {
    let mut spec = standard_scan(space, regime, tau)?;
    spec.envelope = match regime {
        Regime::LowSmallTime | Regime::HighSmallTimeNear => Envelope::shifted(regime, 1.0),
        Regime::LowInside => Envelope::shifted(regime, -1.0),
        _ => Envelope::rate_shifted(regime, 1.0),
    };
    Ok(spec)
}

/// Runs a scan.
pub fn run_scan(space: &SpaceParams, spec: &ScanSpec) -> Result<EnvelopeReport> {
    envelope_scan(space, &spec.req, &spec.envelope, &spec.range, None)
}

/// (∫ V φ_0^ν |κ|^α dr)^{1/α} with ν = 2 min(q,q̃)/(q+q̃), α = q q̃/(q+q̃).
pub fn criterion_bound(space: &SpaceParams, kappa: &RadialProfile, q: f64, qtilde: f64) -> Result<f64> {
    if !(q > 2.0 && qtilde > 2.0) || !q.is_finite() || !qtilde.is_finite() {
        return Err(Error::Precondition(format!("need q, q̃ ∈ (2, ∞) (got {q}, {qtilde})")));
    }
    let nu = 2.0 * q.min(qtilde) / (q + qtilde);
    let alpha = q * qtilde / (q + qtilde);
    let phi0 = phi_zero_grid(space, &kappa.grid.nodes);
    let integrand: Vec<f64> = kappa.grid.nodes.iter().zip(&kappa.values).zip(&phi0)
        .map(|((&r, v), &p)| density_unchecked(space, r) * p.powf(nu) * v.norm().powf(alpha))
        .collect();
    let total: f64 = integrand.iter().zip(&kappa.grid.weights).map(|(f, w)| f * w).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let last = *integrand.last().unwrap();
    if last / total > 1e-12 {
        return Err(Error::Truncation(format!("criterion integrand tail {:.2e} at r = {} (> 1e-12)", last / total, kappa.grid.last())));
    }
    Ok(total.powf(1.0 / alpha))
}

/// A slope with its 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub half_width: f64,
    pub points: usize,
}

impl SlopeFit {
    pub fn from_loglog(xs: &[f64], ys: &[f64]) -> Self {
        let (slope, _, se) = fit::loglog_slope(xs, ys);
        SlopeFit { slope, half_width: 1.96 * se, points: xs.len() }
    }
}

/// Small- and large-time decay slopes with their data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersiveFit {
    pub small_t: SlopeFit,
    pub large_t: SlopeFit,
    /// (t, (sup_{r≤3} |w̃_t^∞|)^θ) with θ = 1 − 2/q.
    pub small_samples: Vec<(f64, f64)>,
    /// (t, criterion bound of w_t^0).
    pub large_samples: Vec<(f64, f64)>,
}

/// Imaginary part of σ used on the line Re σ = (n+1)/2.
pub const ENDPOINT_IM_SIGMA: f64 = 1.0;

/// Radii for the sup over r ≤ 3 at time t: a uniform grid plus points
/// clustered around the wave front r = |t|.
pub fn near_radii(t: f64) -> Vec<f64> {
    // offset keeps the uniform points off the front for round t
    let mut rs: Vec<f64> = (0..30).map(|i| 0.0537 + 2.9463 * i as f64 / 29.0).collect();
    for f in [0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 1.01, 1.05, 1.1, 1.25, 1.5] {
        let r = f * t.abs();
        if r > 0.0 && r <= 3.0 {
            rs.push(r);
        }
    }
    rs.push(0.01);
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    rs
}

/// sup_{r ≤ 3} |w̃_t^∞| on the endpoint line Re σ = (n+1)/2.
pub fn endpoint_sup(space: &SpaceParams, tau: f64, t: f64) -> Result<f64> {
    let sigma = Complex64::new((space.nf() + 1.0) / 2.0, ENDPOINT_IM_SIGMA);
    let req = KernelRequest::new(sigma, tau, t, KernelPart::HighRegularized)?;
    let k = kernel_w_inf(space, &req, &near_radii(t))?;
    Ok(k.profile.values.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Radial grid for the criterion integral at time t: far enough beyond
/// r = |t| that the r·e^{−Qr/2} tail of the integrand is below 1e−12.
pub fn criterion_grid(space: &SpaceParams, t: f64) -> Grid {
    let extra = 2.0 * (12.0 * std::f64::consts::LN_10 + 6.0) / space.q();
    Grid::gauss(0.0, t.abs() + extra, 4.0)
}

/// Small-t slope of (sup_r |w̃_t^∞|)^{1−2/q} (the L¹→L^∞ endpoint raised to
/// the interpolation weight) and large-t slope of the criterion bound on
/// w_t^0 with q = q̃.
pub fn dispersive_decay_fit(space: &SpaceParams, q: f64, sigma: f64, tau: f64, tlist: &[f64]) -> Result<DispersiveFit> {
    let n = space.nf();
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::Precondition(format!("q must lie in (2, ∞) (got {q})")));
    }
    let need = (n + 1.0) * (0.5 - 1.0 / q);
    if sigma < need - 1e-12 {
        return Err(Error::Precondition(format!("dispersive bound needs σ ≥ (n+1)(1/2 − 1/q) = {need} (got {sigma})")));
    }
    if !(0.0..1.5).contains(&tau) {
        return Err(Error::Precondition(format!("τ must lie in [0, 3/2) (got {tau})")));
    }
    let theta = 1.0 - 2.0 / q;
    let small: Vec<f64> = tlist.iter().copied().filter(|t| t.abs() <= 2.0).collect();
    let large: Vec<f64> = tlist.iter().copied().filter(|t| t.abs() >= 2.0).collect();
    if small.len() < 2 || large.len() < 2 {
        return Err(Error::Invalid("need at least two times with |t| ≤ 2 and two with |t| ≥ 2".into()));
    }
    let mut small_samples = Vec::new();
    for &t in &small {
        small_samples.push((t.abs(), endpoint_sup(space, tau, t)?.powf(theta)));
    }
    let tmax = large.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let grid = criterion_grid(space, tmax);
    let reqs = large.iter().map(|&t| KernelRequest::real(sigma, tau, t, KernelPart::Low)).collect::<Result<Vec<_>>>()?;
    let kernels = low_kernel_sweep(space, &grid.nodes, &reqs)?;
    let mut large_samples = Vec::new();
    for (&t, values) in large.iter().zip(kernels) {
        let kappa = RadialProfile::new(*space, grid.clone(), values)?;
        large_samples.push((t.abs(), criterion_bound(space, &kappa, q, q)?));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = small_samples.iter().copied().unzip();
    let small_t = SlopeFit::from_loglog(&xs, &ys);
    let (xs, ys): (Vec<f64>, Vec<f64>) = large_samples.iter().copied().unzip();
    let large_t = SlopeFit::from_loglog(&xs, &ys);
    Ok(DispersiveFit { small_t, large_t, small_samples, large_samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoffs_partition_unity() {
        assert_eq!(chi_cutoffs(0.5), (1.0, 0.0));
        assert_eq!(chi_cutoffs(3.0), (0.0, 1.0));
        for i in 0..=200 {
            let l = i as f64 * 0.015;
            let (a, b) = chi_cutoffs(l);
            assert!((a + b - 1.0).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn request_validation() {
        assert!(KernelRequest::real(1.0, 1.6, 1.0, KernelPart::HighRegularized).is_err());
        assert!(KernelRequest::real(1.0, 1.6, 1.0, KernelPart::Low).is_ok());
        assert!(matches!(KernelRequest::real(1.0, 2.0, 1.0, KernelPart::Low), Err(Error::Integrability(_))));
        assert!(KernelRequest::real(1.0, 0.5, 0.0, KernelPart::Low).is_err());
    }

    #[test]
    fn prefactor_vanishes_at_real_endpoint() {
        let s = SpaceParams::new(2, 1).unwrap();
        assert_eq!(gamma_prefactor(&s, Complex64::new(2.5, 0.0)), ZERO);
        assert!(gamma_prefactor(&s, Complex64::new(2.5, 1.0)).norm() > 0.1);
    }

    #[test]
    fn zero_kernel_report() {
        let r = EnvelopeReport::from_samples("x".into(), &[(1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(r.max_ratio, 0.0);
        assert!(!r.diverges);
    }

    #[test]
    fn growing_ratio_flags() {
        let s: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, i as f64)).collect();
        assert!(EnvelopeReport::from_samples("x".into(), &s).diverges);
        let s: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, 1.0 / i as f64)).collect();
        assert!(!EnvelopeReport::from_samples("x".into(), &s).diverges);
    }
}
