//! Spectral solver for the shifted wave equation ∂²_t u + D²u = F(u),
//! D = (−Δ − Q²/4)^{1/2}, on radial data.
//!
//! The linear flow is exact on the spectral side (D acts as λ). The
//! semilinear problem is solved by Picard iteration of the Duhamel map
//!
//!   Φ(v)(t) = cos(tD)f + sin(tD)/D g + ∫_0^t sin((t−s)D)/D F(v(s)) ds,
//!
//! with F applied pointwise in r and the s-integral done by the trapezoid
//! rule on a uniform time grid.

use crate::error::{Error, Result};
use crate::space::{density_unchecked, SpaceParams};
use crate::spherical::plancherel_density;
use crate::strichartz::{find_exponents, is_admissible, AdmissiblePair};
use crate::transform::{cs_closed_form, Grid, RadialProfile, SpectralProfile, SphericalTransform};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral state (û, ∂_tû) at time t; both share one λ-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub uhat: SpectralProfile,
    pub vhat: SpectralProfile,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// |u|^γ
    AbsPower,
    /// |u|^{γ−1}u (odd; keeps real data real)
    FocusingPower,
}

impl Nonlinearity {
    pub fn apply(&self, gamma: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::AbsPower => u.abs().powf(gamma),
            Nonlinearity::FocusingPower => u.abs().powf(gamma - 1.0) * u,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub gamma: f64,
    pub nonlin: Nonlinearity,
    /// Time horizon T.
    pub t_max: f64,
    /// Number of time steps (Δt = T/nt).
    pub nt: usize,
    pub picard_max: usize,
    /// Monitoring pair (1/p, 1/q).
    pub inv_p: f64,
    pub inv_q: f64,
    pub sigma: f64,
    /// Relative X-norm change at which the iteration stops.
    pub tol: f64,
    /// Multiplies F (0 gives the linear flow).
    pub coupling: f64,
}

impl SolveConfig {
    /// Pair (p, q) taken from the exponent solver for (n, γ, σ); nt = 10·T.
    pub fn from_exponents(n: u32, gamma: f64, sigma: f64, t_max: f64) -> Result<Self> {
        let sol = find_exponents(n, gamma, sigma)?;
        Ok(SolveConfig {
            gamma,
            nonlin: Nonlinearity::FocusingPower,
            t_max,
            nt: (10.0 * t_max).ceil().max(1.0) as usize,
            picard_max: 30,
            inv_p: sol.inv_p,
            inv_q: sol.inv_q,
            sigma,
            tol: 1e-8,
            coupling: 1.0,
        })
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        if !(self.gamma > 1.0) {
            return Err(Error::Invalid(format!("γ must exceed 1 (got {})", self.gamma)));
        }
        if !(self.t_max > 0.0) || self.nt == 0 {
            return Err(Error::Invalid("need T > 0 and nt ≥ 1".into()));
        }
        if !is_admissible(n, self.inv_p, self.inv_q) {
            return Err(Error::Precondition(format!(
                "(1/p, 1/q) = ({}, {}) is not admissible for n = {n}",
                self.inv_p, self.inv_q
            )));
        }
        if self.picard_max == 0 || !(self.tol > 0.0) {
            return Err(Error::Invalid("picard_max ≥ 1 and tol > 0 required".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.nt as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.nt).map(|i| i as f64 * self.dt()).collect()
    }
}

/// Radial and spectral grids suited to a run up to time T: the radial grid
/// reaches T + 12 so the outgoing wave stays on it, the spectral grid stops at
/// Λ = 16 (data are smooth Gaussians).
pub fn solver_transform(space: SpaceParams, t_max: f64) -> Result<SphericalTransform> {
    SphericalTransform::new(space, Grid::gauss(0.0, t_max + 12.0, 0.25), Grid::gauss(0.0, 16.0, 0.25))
}

/// (c_S ∫ |c|^{−2} (λ² + Q̃²/4)^σ λ^{2τ} |g|² dλ)^{1/2}.
pub fn sobolev_norm(space: &SpaceParams, g: &SpectralProfile, sigma: f64, tau: f64) -> Result<f64> {
    // |c|^{−2} ~ λ² at 0, so λ^{2τ}|c|^{−2} is integrable iff τ > −3/2
    if !(tau > -1.5) || !tau.is_finite() {
        return Err(Error::Integrability(format!("λ^{{2τ}}|c|^{{−2}} weight needs τ > −3/2 (got τ = {tau})")));
    }
    let shift = space.qtilde * space.qtilde / 4.0;
    let mut acc = 0.0;
    for ((&l, &w), v) in g.grid.nodes.iter().zip(&g.grid.weights).zip(&g.values) {
        if l == 0.0 && tau < 0.0 {
            continue; // |c|^{−2} ~ λ² makes the weight vanish there
        }
        acc += w * plancherel_density(space, l) * (l * l + shift).powf(sigma) * l.powf(2.0 * tau) * v.norm_sqr();
    }
    Ok((cs_closed_form(space) * acc).sqrt())
}

/// sin(tλ)/λ with the value t at λ = 0.
fn sinc_t(t: f64, l: f64) -> f64 {
    if (t * l).abs() < 1e-8 {
        t
    } else {
        (t * l).sin() / l
    }
}

fn same_grid(a: &SpectralProfile, b: &SpectralProfile) -> Result<()> {
    if a.grid.nodes != b.grid.nodes {
        return Err(Error::Invalid("profiles live on different λ-grids".into()));
    }
    Ok(())
}

/// Exact linear flow: û = cos(tλ)f̂ + sin(tλ)/λ ĝ, ∂_tû = −λ sin(tλ)f̂ + cos(tλ)ĝ.
pub fn linear_propagate(space: &SpaceParams, fhat: &SpectralProfile, ghat: &SpectralProfile, t: f64) -> Result<WaveState> {
    same_grid(fhat, ghat)?;
    let n = fhat.grid.len();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for (i, &l) in fhat.grid.nodes.iter().enumerate() {
        let (s, c) = (t * l).sin_cos();
        u.push(fhat.values[i] * c + ghat.values[i] * sinc_t(t, l));
        v.push(fhat.values[i] * (-l * s) + ghat.values[i] * c);
    }
    Ok(WaveState {
        uhat: SpectralProfile { space: *space, grid: fhat.grid.clone(), values: u },
        vhat: SpectralProfile { space: *space, grid: fhat.grid.clone(), values: v },
        t,
    })
}

impl WaveState {
    /// Advances by dt with the linear flow.
    pub fn propagate(&self, dt: f64) -> Result<WaveState> {
        let mut s = linear_propagate(&self.uhat.space, &self.uhat, &self.vhat, dt)?;
        s.t = self.t + dt;
        Ok(s)
    }
}

/// E = ½ c_S ∫ |c|^{−2} (|v̂|² + λ²|û|²) dλ.
pub fn energy(space: &SpaceParams, state: &WaveState) -> f64 {
    let g = &state.uhat.grid;
    let acc: f64 = (0..g.len())
        .map(|i| {
            let l = g.nodes[i];
            g.weights[i] * plancherel_density(space, l) * (state.vhat.values[i].norm_sqr() + l * l * state.uhat.values[i].norm_sqr())
        })
        .sum();
    0.5 * cs_closed_form(space) * acc
}

/// ‖∂_t u‖²_{H^{σ,τ}} + ‖u‖²_{H^{σ,τ+1}}, conserved by the linear flow.
pub fn generalized_energy(space: &SpaceParams, state: &WaveState, sigma: f64, tau: f64) -> Result<f64> {
    Ok(sobolev_norm(space, &state.vhat, sigma, tau)?.powi(2) + sobolev_norm(space, &state.uhat, sigma, tau + 1.0)?.powi(2))
}

/// (∫ |u|^q V dr)^{1/q}.
pub fn lq_norm(space: &SpaceParams, u: &RadialProfile, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Invalid(format!("L^q needs q ≥ 1 (got {q})")));
    }
    Ok(lq_raw(space, &u.grid, &u.values, q))
}

fn lq_raw(space: &SpaceParams, grid: &Grid, values: &[Complex64], q: f64) -> f64 {
    let s: f64 = grid.nodes.iter().zip(&grid.weights).zip(values)
        .map(|((&r, &w), v)| w * v.norm().powf(q) * density_unchecked(space, r))
        .sum();
    s.powf(1.0 / q)
}

/// Trapezoid L^p norm in time of samples on a uniform grid.
fn lp_time(values: &[f64], dt: f64, p: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let s: f64 = values.iter().enumerate()
        .map(|(i, v)| if i == 0 || i == n - 1 { 0.5 } else { 1.0 } * v.powf(p))
        .sum();
    (s * dt).powf(1.0 / p)
}

/// Components of the discrete X-norm: max_t ‖u‖_{H^{σ−½,½}},
/// max_t ‖∂_tu‖_{H^{σ−½,−½}} and ‖u‖_{L^p_t L^q}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XNorm {
    pub energy_u: f64,
    pub energy_v: f64,
    pub strichartz: f64,
}

impl XNorm {
    pub fn total(&self) -> f64 {
        self.energy_u + self.energy_v + self.strichartz
    }
}

/// Sub-samples per time step for the L^∞_t components.
const SUP_SUBSAMPLES: usize = 8;

/// Quadrature weights of ‖·‖²_{H^{σ,τ}} on a λ-grid (τ > −3/2 assumed).
fn sobolev_weights(space: &SpaceParams, grid: &Grid, sigma: f64, tau: f64) -> Vec<f64> {
    let shift = space.qtilde * space.qtilde / 4.0;
    let cs = cs_closed_form(space);
    grid.nodes.iter().zip(&grid.weights)
        .map(|(&l, &w)| {
            if l == 0.0 && tau < 0.0 {
                0.0
            } else {
                cs * w * plancherel_density(space, l) * (l * l + shift).powf(sigma) * l.powf(2.0 * tau)
            }
        })
        .collect()
}

/// sup_t of the energy components. Node sampling under-resolves the
/// oscillation of ‖∂_tu(t)‖ (frequencies up to 2Λ), so each step is
/// sub-sampled with the blend of the free flow forward from t_i and backward
/// from t_{i+1}; this is exact for the linear flow and O(Δt²) in the forcing.
fn sup_energy(space: &SpaceParams, states: &[WaveState], dt: f64, sigma: f64) -> (f64, f64) {
    let Some(first) = states.first() else { return (0.0, 0.0) };
    let grid = &first.uhat.grid;
    let wu = sobolev_weights(space, grid, sigma - 0.5, 0.5);
    let wv = sobolev_weights(space, grid, sigma - 0.5, -0.5);
    let norms = |u: &mut dyn Iterator<Item = (Complex64, Complex64)>| {
        let (mut a, mut b) = (0.0, 0.0);
        for (k, (x, y)) in u.enumerate() {
            a += wu[k] * x.norm_sqr();
            b += wv[k] * y.norm_sqr();
        }
        (a, b)
    };
    let (mut su, mut sv) = norms(&mut first.uhat.values.iter().copied().zip(first.vhat.values.iter().copied()));
    let mut take = |(a, b): (f64, f64)| {
        su = su.max(a);
        sv = sv.max(b);
    };
    for w in states.windows(2) {
        let (s0, s1) = (&w[0], &w[1]);
        for j in 1..=SUP_SUBSAMPLES {
            let th = j as f64 / SUP_SUBSAMPLES as f64;
            let mut it = grid.nodes.iter().enumerate().map(|(k, &l)| {
                let fwd = flow(l, th * dt, s0.uhat.values[k], s0.vhat.values[k]);
                if j == SUP_SUBSAMPLES {
                    return (s1.uhat.values[k], s1.vhat.values[k]);
                }
                let bwd = flow(l, (th - 1.0) * dt, s1.uhat.values[k], s1.vhat.values[k]);
                (fwd.0 * (1.0 - th) + bwd.0 * th, fwd.1 * (1.0 - th) + bwd.1 * th)
            });
            take(norms(&mut it));
        }
    }
    (su.sqrt(), sv.sqrt())
}

/// Free flow of one spectral mode over time t.
fn flow(l: f64, t: f64, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
    let (s, c) = (t * l).sin_cos();
    (u * c + v * sinc_t(t, l), u * (-l * s) + v * c)
}

fn x_norm(space: &SpaceParams, states: &[WaveState], physical: &[Vec<Complex64>], rgrid: &Grid, cfg: &SolveConfig) -> Result<XNorm> {
    let (eu, ev) = sup_energy(space, states, cfg.dt(), cfg.sigma);
    let lq: Vec<f64> = physical.iter().map(|u| lq_raw(space, rgrid, u, 1.0 / cfg.inv_q)).collect();
    Ok(XNorm { energy_u: eu, energy_v: ev, strichartz: lp_time(&lq, cfg.dt(), 1.0 / cfg.inv_p) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardDiagnostics {
    /// ‖u^{(j+1)} − u^{(j)}‖_X / ‖u^{(j)} − u^{(j−1)}‖_X, from j = 1.
    pub contraction_ratios: Vec<f64>,
    /// ‖u^{(j)}‖_X for every iterate.
    pub x_norms: Vec<f64>,
    /// ‖u^{(j+1)} − u^{(j)}‖_X / ‖u^{(j+1)}‖_X.
    pub increments: Vec<f64>,
    /// max_t ‖u(t)‖_{L^q} / ‖u(0)‖_{L^q} of the final iterate.
    pub lq_growth: f64,
    /// Fraction of the nonlinear term's Plancherel mass (summed over time)
    /// in the top 10% of the λ-grid (aliasing monitor).
    pub spectral_tail: f64,
    pub converged: bool,
    /// X-norm doubled between iterates.
    pub blow_up_suspected: bool,
    /// ‖Φ(u) − u‖_X / ‖u‖_X for the returned trajectory.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub trajectory: Vec<WaveState>,
    /// u(t_i, r) on the transform's radial grid.
    pub physical: Vec<Vec<Complex64>>,
    /// F̂(u(t_i)) for the returned trajectory.
    pub forcing: Vec<SpectralProfile>,
    pub x_norm: XNorm,
    pub diagnostics: PicardDiagnostics,
}

/// Nonlinear term on the spectral side at every time node.
fn forcing(tr: &SphericalTransform, physical: &[Vec<Complex64>], cfg: &SolveConfig) -> Vec<SpectralProfile> {
    physical.iter()
        .map(|u| {
            let f: Vec<Complex64> = u.iter().map(|v| Complex64::new(cfg.coupling * cfg.nonlin.apply(cfg.gamma, v.re), 0.0)).collect();
            tr.forward_unchecked(&f)
        })
        .collect()
}

/// Fraction of Σ_t ∫|c|^{−2}|F̂|² dλ carried by the top 10% of the λ-grid.
/// Summed over time so late nodes, where F is at rounding level, do not
/// dominate.
fn tail_fraction(space: &SpaceParams, history: &[SpectralProfile]) -> f64 {
    let (mut tail, mut total) = (0.0, 0.0);
    for g in history {
        let lmax = g.grid.last();
        for ((&l, &w), v) in g.grid.nodes.iter().zip(&g.grid.weights).zip(&g.values) {
            let m = w * plancherel_density(space, l) * v.norm_sqr();
            total += m;
            if l > 0.9 * lmax {
                tail += m;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Φ applied to a forcing history: linear part plus the trapezoid Duhamel
/// integral, accumulated with running sums of cos(sλ)F̂ and sin(sλ)F̂.
fn duhamel(space: &SpaceParams, fhat: &SpectralProfile, ghat: &SpectralProfile, forcing: &[SpectralProfile], cfg: &SolveConfig) -> Result<Vec<WaveState>> {
    let dt = cfg.dt();
    let nl = fhat.grid.len();
    let mut pc = vec![ZERO; nl];
    let mut ps = vec![ZERO; nl];
    let mut out = Vec::with_capacity(forcing.len());
    for (i, fi) in forcing.iter().enumerate() {
        let t = i as f64 * dt;
        let mut st = linear_propagate(space, fhat, ghat, t)?;
        for k in 0..nl {
            let l = fhat.grid.nodes[k];
            let (s, c) = (t * l).sin_cos();
            pc[k] += fi.values[k] * (dt * c);
            ps[k] += fi.values[k] * (dt * s);
            if i == 0 {
                continue;
            }
            // trapezoid: end points carry half weight
            let f0 = forcing[0].values[k];
            let cc = pc[k] - (f0 + fi.values[k] * c) * (0.5 * dt);
            let ss = ps[k] - fi.values[k] * (0.5 * dt * s);
            // ∫ sin((t−s)λ)/λ F̂ and ∫ cos((t−s)λ) F̂
            let sin_part = if l * t < 1e-6 {
                // small-λ limit: Σ w_j (t − s_j) F̂_j
                let mut acc = ZERO;
                for (j, fj) in forcing.iter().enumerate().take(i + 1) {
                    let w = if j == 0 || j == i { 0.5 * dt } else { dt };
                    acc += fj.values[k] * (w * (t - j as f64 * dt));
                }
                acc
            } else {
                (cc * s - ss * c) / l
            };
            st.uhat.values[k] += sin_part;
            st.vhat.values[k] += cc * c + ss * s;
        }
        out.push(st);
    }
    Ok(out)
}

fn physical(tr: &SphericalTransform, states: &[WaveState]) -> Vec<Vec<Complex64>> {
    states.iter().map(|s| tr.inverse_unchecked(&s.uhat.values).values).collect()
}

fn difference(a: &[WaveState], b: &[WaveState]) -> Vec<WaveState> {
    a.iter().zip(b)
        .map(|(x, y)| {
            let sub = |p: &SpectralProfile, q: &SpectralProfile| SpectralProfile {
                space: p.space,
                grid: p.grid.clone(),
                values: p.values.iter().zip(&q.values).map(|(u, v)| u - v).collect(),
            };
            WaveState { uhat: sub(&x.uhat, &y.uhat), vhat: sub(&x.vhat, &y.vhat), t: x.t }
        })
        .collect()
}

fn diff_physical(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u - v).collect()).collect()
}

/// Picard iteration u^{(j+1)} = Φ(u^{(j)}) from the linear solution.
///
/// Non-convergence is an outcome, not an error: the diagnostics carry the
/// ratios, norms and flags.
pub fn picard_solve(tr: &SphericalTransform, f: &RadialProfile, g: &RadialProfile, cfg: &SolveConfig) -> Result<PicardResult> {
    let space = tr.space;
    cfg.validate(space.n)?;
    let fhat = tr.forward(f)?;
    let ghat = tr.forward(g)?;
    let times = cfg.times();
    let mut states: Vec<WaveState> = times.iter().map(|&t| linear_propagate(&space, &fhat, &ghat, t)).collect::<Result<_>>()?;
    let mut phys = physical(tr, &states);
    let mut xn = x_norm(&space, &states, &phys, &tr.rgrid, cfg)?;
    let mut diag = PicardDiagnostics {
        contraction_ratios: vec![],
        x_norms: vec![xn.total()],
        increments: vec![],
        lq_growth: 0.0,
        spectral_tail: 0.0,
        converged: false,
        blow_up_suspected: false,
        residual: f64::NAN,
    };
    let mut force = forcing(tr, &phys, cfg);
    let mut prev_step: Option<f64> = None;
    for _ in 0..cfg.picard_max {
        let next = duhamel(&space, &fhat, &ghat, &force, cfg)?;
        let next_phys = physical(tr, &next);
        let step = x_norm(&space, &difference(&next, &states), &diff_physical(&next_phys, &phys), &tr.rgrid, cfg)?.total();
        let next_x = x_norm(&space, &next, &next_phys, &tr.rgrid, cfg)?;
        if let Some(p) = prev_step {
            diag.contraction_ratios.push(if p > 0.0 { step / p } else { 0.0 });
        }
        prev_step = Some(step);
        let rel = if next_x.total() > 0.0 { step / next_x.total() } else { 0.0 };
        diag.increments.push(rel);
        diag.x_norms.push(next_x.total());
        let doubled = next_x.total() > 2.0 * xn.total();
        states = next;
        phys = next_phys;
        xn = next_x;
        force = forcing(tr, &phys, cfg);
        if doubled || !xn.total().is_finite() {
            diag.blow_up_suspected = true;
            break;
        }
        if rel < cfg.tol {
            diag.converged = true;
            break;
        }
    }
    // one more application of Φ measures the fixed-point residual
    let check = duhamel(&space, &fhat, &ghat, &force, cfg)?;
    let check_phys = physical(tr, &check);
    let res = x_norm(&space, &difference(&check, &states), &diff_physical(&check_phys, &phys), &tr.rgrid, cfg)?.total();
    diag.residual = if xn.total() > 0.0 { res / xn.total() } else { 0.0 };
    let q = 1.0 / cfg.inv_q;
    let lq: Vec<f64> = phys.iter().map(|u| lq_raw(&space, &tr.rgrid, u, q)).collect();
    diag.lq_growth = if lq[0] > 0.0 { lq.iter().fold(0.0f64, |a, &b| a.max(b)) / lq[0] } else { 0.0 };
    diag.spectral_tail = tail_fraction(&space, &force);
    Ok(PicardResult { trajectory: states, physical: phys, forcing: force, x_norm: xn, diagnostics: diag })
}

/// Runs the solver on amplitude·profile for each amplitude (ascending) and
/// returns the largest one that converged without a growth flag.
pub fn largest_stable_amplitude(
    tr: &SphericalTransform,
    f: &RadialProfile,
    g: &RadialProfile,
    cfg: &SolveConfig,
    amplitudes: &[f64],
) -> Result<Option<f64>> {
    let mut best = None;
    let mut amps = amplitudes.to_vec();
    amps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for a in amps {
        let scale = |p: &RadialProfile| RadialProfile { values: p.values.iter().map(|v| v * a).collect(), ..p.clone() };
        let res = picard_solve(tr, &scale(f), &scale(g), cfg)?;
        if res.diagnostics.converged && !res.diagnostics.blow_up_suspected {
            best = Some(a);
        } else {
            break;
        }
    }
    Ok(best)
}

/// Exponent data for the Strichartz ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzSetup {
    pub pair: AdmissiblePair,
    pub pair_tilde: AdmissiblePair,
    pub sigma: f64,
    pub sigma_tilde: f64,
}

/// ‖u‖_{L^p_t L^q} divided by
/// ‖f‖_{H^{σ−½,½}} + ‖g‖_{H^{σ−½,−½}} + ‖F‖_{L^{p̃′}_t H^{σ+σ̃−1}_{q̃′}}
/// over the time grid of the trajectory.
pub fn strichartz_ratio(
    tr: &SphericalTransform,
    physical: &[Vec<Complex64>],
    dt: f64,
    fhat: &SpectralProfile,
    ghat: &SpectralProfile,
    forcing: Option<&[SpectralProfile]>,
    setup: &StrichartzSetup,
) -> Result<f64> {
    let space = tr.space;
    let n = space.n;
    let nf = n as f64;
    for (pair, s, name) in [(setup.pair, setup.sigma, "σ"), (setup.pair_tilde, setup.sigma_tilde, "σ̃")] {
        if !is_admissible(n, pair.inv_p, pair.inv_q) {
            return Err(Error::Precondition(format!("({}, {}) not admissible for n = {n}", pair.inv_p, pair.inv_q)));
        }
        let need = (nf + 1.0) / 2.0 * (0.5 - pair.inv_q);
        if s < need - 1e-12 {
            return Err(Error::Precondition(format!("{name} = {s} below (n+1)/2·(1/2 − 1/q) = {need}")));
        }
    }
    let lq: Vec<f64> = physical.iter().map(|u| lq_raw(&space, &tr.rgrid, u, 1.0 / setup.pair.inv_q)).collect();
    let lhs = lp_time(&lq, dt, 1.0 / setup.pair.inv_p);
    let mut rhs = sobolev_norm(&space, fhat, setup.sigma - 0.5, 0.5)? + sobolev_norm(&space, ghat, setup.sigma - 0.5, -0.5)?;
    if let Some(fh) = forcing {
        // D̃^{σ+σ̃−1} F on the physical side, then L^{q̃′} and L^{p̃′}_t
        let s = setup.sigma + setup.sigma_tilde - 1.0;
        let shift = space.qtilde * space.qtilde / 4.0;
        let qd = 1.0 / (1.0 - setup.pair_tilde.inv_q);
        let pd = 1.0 / (1.0 - setup.pair_tilde.inv_p);
        let mult: Vec<f64> = tr.lgrid.nodes.iter().map(|&l| (l * l + shift).powf(s / 2.0)).collect();
        let norms: Vec<f64> = fh.iter()
            .map(|h| {
                let v: Vec<Complex64> = h.values.iter().zip(&mult).map(|(x, m)| x * m).collect();
                lq_raw(&space, &tr.rgrid, &tr.inverse_unchecked(&v).values, qd)
            })
            .collect();
        rhs += lp_time(&norms, dt, pd);
    }
    if rhs == 0.0 {
        return Err(Error::Invalid("zero data".into()));
    }
    Ok(lhs / rhs)
}

/// Linear trajectory on the time grid of `cfg` in physical space.
pub fn linear_trajectory(tr: &SphericalTransform, fhat: &SpectralProfile, ghat: &SpectralProfile, cfg: &SolveConfig) -> Result<Vec<Vec<Complex64>>> {
    let states: Vec<WaveState> = cfg.times().iter().map(|&t| linear_propagate(&tr.space, fhat, ghat, t)).collect::<Result<_>>()?;
    Ok(physical(tr, &states))
}

/// CSV `t,r,u` of a physical trajectory (every `stride`-th radial node).
pub fn write_physical_csv<W: Write>(out: W, times: &[f64], rgrid: &Grid, physical: &[Vec<Complex64>], stride: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "r", "u"]).map_err(io)?;
    for (t, u) in times.iter().zip(physical) {
        for j in (0..rgrid.len()).step_by(stride.max(1)) {
            w.write_record([format!("{t}"), format!("{:e}", rgrid.nodes[j]), format!("{:e}", u[j].re)]).map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// CSV `t,lambda,uhat_re,uhat_im`.
pub fn write_spectral_csv<W: Write>(out: W, trajectory: &[WaveState], stride: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "lambda", "uhat_re", "uhat_im"]).map_err(io)?;
    for s in trajectory {
        for j in (0..s.uhat.grid.len()).step_by(stride.max(1)) {
            let v = s.uhat.values[j];
            w.write_record([format!("{}", s.t), format!("{:e}", s.uhat.grid.nodes[j]), format!("{:e}", v.re), format!("{:e}", v.im)]).map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_hat(space: SpaceParams) -> SpectralProfile {
        SpectralProfile::from_fn(space, Grid::gauss(0.0, 12.0, 0.25), |l| Complex64::new((-l * l / 4.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn propagate_at_zero_is_identity() {
        let s = SpaceParams::new(2, 1).unwrap();
        let f = gaussian_hat(s);
        let g = SpectralProfile::from_fn(s, f.grid.clone(), |l| Complex64::new(1.0 / (1.0 + l * l), 0.0)).unwrap();
        let st = linear_propagate(&s, &f, &g, 0.0).unwrap();
        assert_eq!(st.uhat.values, f.values);
        assert_eq!(st.vhat.values, g.values);
    }

    #[test]
    fn zero_frequency_column() {
        let s = SpaceParams::new(2, 1).unwrap();
        let grid = Grid::from_nodes(vec![0.0, 1.0]).unwrap();
        let f = SpectralProfile::from_fn(s, grid.clone(), |_| Complex64::new(2.0, 0.0)).unwrap();
        let g = SpectralProfile::from_fn(s, grid, |_| Complex64::new(3.0, 0.0)).unwrap();
        let st = linear_propagate(&s, &f, &g, 1.5).unwrap();
        assert!((st.uhat.values[0].re - (2.0 + 1.5 * 3.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_data_zero_energy() {
        let s = SpaceParams::new(2, 2).unwrap();
        let z = SpectralProfile::zeros(s, Grid::gauss(0.0, 4.0, 0.5));
        let st = linear_propagate(&s, &z, &z, 3.0).unwrap();
        assert_eq!(energy(&s, &st), 0.0);
    }

    #[test]
    fn sobolev_rejects_singular_tau() {
        let s = SpaceParams::new(2, 1).unwrap();
        assert!(sobolev_norm(&s, &gaussian_hat(s), 0.0, -1.5).is_err());
        assert!(sobolev_norm(&s, &gaussian_hat(s), 0.0, 1.5).is_ok());
    }
}
