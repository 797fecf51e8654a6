//! Spherical functions φ_λ, the Harish-Chandra expansion Φ_λ, the c-function
//! and the Plancherel density.
//!
//! φ_λ is evaluated by a hybrid scheme: the eigenfunction ODE near the origin
//! and the convergent expansion φ_λ = c(λ)Φ_λ + c(−λ)Φ_{−λ} further out.

use crate::error::{Error, Result};
use crate::radial_ode;
use crate::space::{density_unchecked, omega_coeffs, SpaceParams};
use crate::special::ln_gamma;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Radius where evaluation switches from the ODE to the series.
pub const R_SWITCH: f64 = 1.0;
/// Upper end of the window on which both branches are compared.
pub const OVERLAP_END: f64 = 2.0;
/// Below this |λ| the c-function split loses digits; the ODE is used.
pub const LAMBDA_ODE_ONLY: f64 = 1e-3;
/// Tolerance for the branch-agreement check.
pub const BRANCH_TOL: f64 = 1e-7;
const SERIES_TOL: f64 = 1e-14;
const SERIES_CAP: usize = 5000;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Γ_0(λ), …, Γ_L(λ) of the expansion Φ_λ.
#[derive(Debug, Clone)]
pub struct GammaTable {
    pub values: Vec<Complex64>,
    pub lambda: Complex64,
    pub lmax: usize,
}

/// Φ_λ(r) together with an estimate of the neglected tail.
#[derive(Debug, Clone, Copy)]
pub struct PhiBig {
    pub value: Complex64,
    pub truncation_error: f64,
}

/// Growth bound |Γ_ℓ(λ)|(1+|λ|) ≤ C ℓ^d fitted for one space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaBound {
    pub c: f64,
    pub d: f64,
}

/// ln c(λ), or a singularity error at the poles of the Gamma factors.
fn ln_c(space: &SpaceParams, lambda: Complex64) -> Result<Complex64> {
    if lambda.norm() == 0.0 {
        return Err(Error::Singularity("c(λ) has a pole at λ = 0".into()));
    }
    let (m, q, n) = (space.m as f64, space.q(), space.nf());
    let il = I * lambda;
    let sing = |what: &str| Error::Singularity(format!("Γ({what}) has a pole at λ = {lambda}"));
    let num = ln_gamma(2.0 * il).ok_or_else(|| sing("2iλ"))?;
    let d1 = ln_gamma(il + 0.5 * q).ok_or_else(|| sing("iλ + Q/2"))?;
    let d2 = ln_gamma(il + 0.25 * m + 0.5).ok_or_else(|| sing("iλ + m/4 + 1/2"))?;
    let g = ln_gamma(Complex64::new(0.5 * n, 0.0)).unwrap();
    Ok(g + (q - 2.0 * il) * 2f64.ln() + num - d1 - d2)
}

/// c(λ) = Γ(n/2) 2^{Q−2iλ} Γ(2iλ) / [Γ(iλ+Q/2) Γ(iλ+m/4+1/2)].
pub fn c_function(space: &SpaceParams, lambda: Complex64) -> Result<Complex64> {
    ln_c(space, lambda).map(|l| l.exp())
}

/// |c(λ)|^{-2}, extended by continuity with the value 0 at λ = 0.
pub fn plancherel_density(space: &SpaceParams, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let l = ln_c(space, Complex64::new(lambda.abs(), 0.0)).expect("real λ ≠ 0 is regular");
    (-2.0 * l.re).exp()
}

/// 1/(c(λ)c(−λ)), the analytic continuation of the Plancherel density off
/// the real axis (used on rotated integration contours).
pub fn plancherel_density_complex(space: &SpaceParams, lambda: Complex64) -> Result<Complex64> {
    Ok((-(ln_c(space, lambda)? + ln_c(space, -lambda)?)).exp())
}

/// Γ_ℓ(λ) from ℓ(ℓ − 2iλ)Γ_ℓ = Σ_{j<ℓ} ω_{ℓ−j} Γ_j, Γ_0 = 1.
pub fn gamma_coeffs(space: &SpaceParams, lambda: Complex64, lmax: usize) -> Result<GammaTable> {
    let omega = omega_coeffs(space, lmax.max(1))?;
    let mut values = Vec::with_capacity(lmax + 1);
    values.push(Complex64::new(1.0, 0.0));
    for ell in 1..=lmax {
        let denom = ell as f64 * (ell as f64 - 2.0 * I * lambda);
        if denom.norm() < 1e-300 {
            return Err(Error::RecurrencePole { ell });
        }
        let s: Complex64 = (0..ell).map(|j| values[j] * omega.get(ell - j)).sum();
        values.push(s / denom);
    }
    Ok(GammaTable { values, lambda, lmax })
}

fn bound_cache() -> &'static Mutex<HashMap<(u32, u32), GammaBound>> {
    static C: OnceLock<Mutex<HashMap<(u32, u32), GammaBound>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fits (C, d) with |Γ_ℓ(λ)|(1+|λ|) ≤ C ℓ^d for ℓ ≤ 500 over a spread of real
/// λ (including λ = 0 so the bound also serves the truncation rule). The fit
/// is computed once per space and then frozen.
pub fn gamma_bound(space: &SpaceParams) -> GammaBound {
    let key = (space.m, space.k);
    if let Some(b) = bound_cache().lock().unwrap().get(&key) {
        return *b;
    }
    const L: usize = 500;
    let mut env = vec![0.0f64; L + 1];
    for lam in [0.0, 1.0, 3.0, 10.0, 30.0, 100.0] {
        let t = gamma_coeffs(space, Complex64::new(lam, 0.0), L).unwrap();
        for (e, g) in env.iter_mut().zip(&t.values) {
            *e = e.max(g.norm() * (1.0 + lam));
        }
    }
    let pts: Vec<(f64, f64)> = (50..=L).map(|l| ((l as f64).ln(), env[l].ln())).collect();
    let d = crate::fit::slope(&pts).0;
    let c = (1..=L).map(|l| env[l] / (l as f64).powf(d)).fold(0.0, f64::max);
    let b = GammaBound { c, d };
    bound_cache().lock().unwrap().insert(key, b);
    b
}

/// Number of series terms needed at radius r for the truncation rule
/// C ℓ^d e^{−ℓr} < 1e−14 (capped at 5000).
pub fn series_terms(space: &SpaceParams, r: f64) -> usize {
    let b = gamma_bound(space);
    let mut ell = 1usize;
    while ell < SERIES_CAP && b.c.max(1.0) * (ell as f64).powf(b.d) * (-(ell as f64) * r).exp() >= SERIES_TOL {
        ell += 1;
    }
    ell
}

/// Σ Γ_ℓ q^ℓ by Horner, with q = e^{−r}.
fn gamma_sum(table: &GammaTable, r: f64, terms: usize) -> Complex64 {
    let q = (-r).exp();
    let terms = terms.min(table.lmax);
    table.values[..=terms].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &g| acc * q + g)
}

fn phi_big_with(space: &SpaceParams, table: &GammaTable, r: f64, terms: usize) -> PhiBig {
    let pref = 2f64.powf(-0.5 * space.k as f64) / density_unchecked(space, r).sqrt();
    let s = gamma_sum(table, r, terms);
    let value = pref * (I * table.lambda * r).exp() * s;
    let b = gamma_bound(space);
    let l = (terms + 1) as f64;
    let tail = b.c.max(1.0) * l.powf(b.d.max(0.0)) * (-l * r).exp() / (1.0 - (-r).exp());
    let truncation_error = pref * (-table.lambda.im * r).exp() * tail;
    PhiBig { value, truncation_error }
}

/// Φ_λ(r) = 2^{−k/2} V(r)^{−1/2} Σ_ℓ Γ_ℓ(λ) e^{(iλ−ℓ)r} for r ≥ 1.
pub fn phi_big(space: &SpaceParams, lambda: Complex64, r: f64) -> Result<PhiBig> {
    if r < R_SWITCH {
        return Err(Error::Invalid(format!("Φ_λ series needs r ≥ {R_SWITCH} (got {r})")));
    }
    let terms = series_terms(space, r);
    let table = gamma_coeffs(space, lambda, terms)?;
    Ok(phi_big_with(space, &table, r, terms))
}

/// Φ_λ with the Γ-series truncated after `terms` (0 keeps only Γ_0).
pub fn phi_big_truncated(space: &SpaceParams, lambda: Complex64, r: f64, terms: usize) -> Result<Complex64> {
    let table = gamma_coeffs(space, lambda, terms)?;
    Ok(phi_big_with(space, &table, r, terms).value)
}

/// Series-branch value 2 Re[c(λ)Φ_λ(r)] for real λ ≠ 0 and r ≥ 1.
pub fn spherical_series(space: &SpaceParams, lambda: f64, r: f64) -> Result<f64> {
    let lam = Complex64::new(lambda.abs(), 0.0);
    Ok(2.0 * (c_function(space, lam)? * phi_big(space, lam, r)?.value).re)
}

/// ODE-branch value of φ_λ(r), any r ≥ 0.
pub fn spherical_ode(space: &SpaceParams, lambda: f64, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::NegativeRadius(r));
    }
    Ok(radial_ode::solve(space, lambda.abs(), &[r], 1.0)[0][0])
}

/// φ_λ(r) for real λ: ODE branch below r = 1 (and for |λ| < 1e−3), series
/// branch above.
pub fn spherical_function(space: &SpaceParams, lambda: f64, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::NegativeRadius(r));
    }
    if r < R_SWITCH || lambda.abs() < LAMBDA_ODE_ONLY {
        spherical_ode(space, lambda, r)
    } else {
        spherical_series(space, lambda, r)
    }
}

/// φ_0(r), from the ODE branch everywhere.
pub fn phi_zero(space: &SpaceParams, r: f64) -> f64 {
    radial_ode::solve(space, 0.0, &[r.max(0.0)], 1.0)[0][0]
}

/// φ_0 on a sorted grid in one ODE sweep.
pub fn phi_zero_grid(space: &SpaceParams, radii: &[f64]) -> Vec<f64> {
    radial_ode::solve(space, 0.0, radii, 1.0).into_iter().map(|y| y[0]).collect()
}

/// Largest discrepancy of the two branches on [1, 2], relative to the
/// largest |φ_λ| there; errors out above the agreement tolerance.
pub fn branch_agreement(space: &SpaceParams, lambda: f64) -> Result<f64> {
    let radii: Vec<f64> = (0..=20).map(|i| R_SWITCH + (OVERLAP_END - R_SWITCH) * i as f64 / 20.0).collect();
    let ode = radial_ode::solve(space, lambda.abs(), &radii, 1.0);
    let lam = Complex64::new(lambda.abs(), 0.0);
    let c = c_function(space, lam)?;
    let table = gamma_coeffs(space, lam, series_terms(space, R_SWITCH))?;
    let mut scale = 0.0f64;
    let mut diff = 0.0f64;
    for (r, y) in radii.iter().zip(&ode) {
        let s = 2.0 * (c * phi_big_with(space, &table, *r, table.lmax).value).re;
        scale = scale.max(s.abs()).max(y[0].abs());
        diff = diff.max((s - y[0]).abs());
    }
    let rel = diff / scale;
    if rel > BRANCH_TOL {
        return Err(Error::BranchMismatch(format!("λ = {lambda}: relative gap {rel:.3e}")));
    }
    Ok(rel)
}

/// Computes φ_λ over a fixed sorted radial grid one λ at a time, for sweeps
/// too large to tabulate. Every λ that uses both branches is checked for
/// agreement at r = 1.
#[derive(Debug, Clone)]
pub struct RowBuilder {
    space: SpaceParams,
    radii: Vec<f64>,
    split: usize,
    phi0_switch: f64,
    far_terms: usize,
}

impl RowBuilder {
    pub fn new(space: &SpaceParams, radii: &[f64]) -> Result<Self> {
        if radii.windows(2).any(|w| w[1] < w[0]) || radii.first().is_some_and(|&r| r < 0.0) {
            return Err(Error::Invalid("radii must be sorted and non-negative".into()));
        }
        let split = radii.partition_point(|&r| r < R_SWITCH);
        let far_terms = radii.get(split).map(|&r| series_terms(space, r)).unwrap_or(0);
        Ok(RowBuilder { space: *space, radii: radii.to_vec(), split, phi0_switch: phi_zero(space, R_SWITCH), far_terms })
    }

    pub fn row(&self, lam: f64) -> Result<Vec<f64>> {
        let (space, radii, split) = (&self.space, &self.radii, self.split);
        let lam = lam.abs();
        if lam < LAMBDA_ODE_ONLY {
            return Ok(radial_ode::solve(space, lam, radii, 1.0).into_iter().map(|y| y[0]).collect());
        }
        let mut out = Vec::with_capacity(radii.len());
        let mut near: Vec<f64> = radii[..split].to_vec();
        near.push(R_SWITCH);
        let ode = radial_ode::solve(space, lam, &near, 1.0);
        out.extend(ode[..split].iter().map(|y| y[0]));
        let lc = Complex64::new(lam, 0.0);
        let c = c_function(space, lc)?;
        let table = gamma_coeffs(space, lc, self.far_terms.max(series_terms(space, R_SWITCH)))?;
        let at_switch = 2.0 * (c * phi_big_with(space, &table, R_SWITCH, table.lmax).value).re;
        let gap = (at_switch - ode[split][0]).abs() / self.phi0_switch;
        if gap > BRANCH_TOL {
            return Err(Error::BranchMismatch(format!("λ = {lam}: gap {gap:.3e} at r = 1")));
        }
        for &r in &radii[split..] {
            let terms = series_terms(space, r);
            out.push(2.0 * (c * phi_big_with(space, &table, r, terms).value).re);
        }
        Ok(out)
    }
}

/// φ_λ(r) tabulated on a λ-grid × r-grid (row-major in λ), built once and
/// reused by transforms and kernel quadratures.
#[derive(Debug, Clone)]
pub struct PhiTable {
    pub lambdas: Vec<f64>,
    pub radii: Vec<f64>,
    values: Vec<f64>,
}

impl PhiTable {
    /// Builds the table. `radii` must be sorted ascending and non-negative.
    /// Every λ that uses both branches is checked for agreement at r = 1.
    pub fn build(space: &SpaceParams, lambdas: &[f64], radii: &[f64]) -> Result<Self> {
        let rows = RowBuilder::new(space, radii)?;
        let mut values = Vec::with_capacity(lambdas.len() * radii.len());
        for &lam in lambdas {
            values.extend(rows.row(lam)?);
        }
        Ok(PhiTable { lambdas: lambdas.to_vec(), radii: radii.to_vec(), values })
    }

    /// φ_{λ_i}(r_j).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.radii.len() + j]
    }

    /// Row of φ_{λ_i} over all radii.
    pub fn row(&self, i: usize) -> &[f64] {
        let nr = self.radii.len();
        &self.values[i * nr..(i + 1) * nr]
    }
}
