//! Spherical Fourier transform H, its Plancherel inverse, the Abel-inverse
//! factorization H^{−1} = A^{−1}∘F^{−1}, and the symbol-decay verifiers.

mod abel;
mod appendix;
mod fourier;
mod jet;

pub use abel::{abel_constant, abel_inverse, abel_inverse_complex, abel_inverse_grid, AbelOptions, CosineInverse, EvenFunction, FiniteDiff};
pub use fourier::{fourier_moments, oscillatory_fourier, riesz_boundary_check, FnSymbol, Support, Symbol};
pub use appendix::{boundary_scan, compact_decay_check, log_growth_check, log_points, BoundaryScan, DecayCheck, LogGrowthCheck};
pub use jet::Jet;

use crate::error::{Error, Result};
use crate::quad;
use crate::space::{density_unchecked, SpaceParams};
use crate::spherical::{plancherel_density, PhiTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Mutex, OnceLock};

/// Default outer radius.
pub const R_MAX: f64 = 15.0;
/// Default radial panel width.
pub const R_PANEL: f64 = 0.1;
/// Default spectral cutoff.
pub const LAMBDA_MAX: f64 = 50.0;
/// Default spectral panel width.
pub const LAMBDA_PANEL: f64 = 0.25;
/// Forward-transform tail threshold (relative).
pub const FORWARD_TAIL_TOL: f64 = 1e-10;
/// Inverse-transform tail threshold (relative).
pub const INVERSE_TAIL_TOL: f64 = 1e-8;

/// How a grid was generated; kept so quadrature weights survive a CSV roundtrip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridKind {
    /// Composite 16-point Gauss–Legendre on [a, b] with panels ≤ width.
    Gauss { a: f64, b: f64, width: f64 },
    /// Uniform nodes a + j·step (the origin is dropped for radial grids).
    Uniform { a: f64, b: f64, step: f64 },
    /// Arbitrary nodes with trapezoid weights.
    Nodes,
}

/// Sample points with quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn gauss(a: f64, b: f64, width: f64) -> Self {
        let (nodes, weights) = quad::composite(&quad::uniform_breaks(a, b, width));
        Grid { kind: GridKind::Gauss { a, b, width }, nodes, weights }
    }

    /// Uniform grid with composite Simpson weights (3/8 rule on the last
    /// three intervals when the count is odd). With `drop_origin`, a node at
    /// 0 is omitted; its weight only multiplies integrands vanishing there.
    pub fn uniform(a: f64, b: f64, step: f64, drop_origin: bool) -> Self {
        let n = ((b - a) / step).round().max(1.0) as usize;
        let h = (b - a) / n as f64;
        let mut w = vec![0.0; n + 1];
        if n == 1 {
            w = vec![h / 2.0, h / 2.0];
        } else {
            let simpson_end = if n % 2 == 0 { n } else { n - 3 };
            for i in (0..simpson_end).step_by(2) {
                w[i] += h / 3.0;
                w[i + 1] += 4.0 * h / 3.0;
                w[i + 2] += h / 3.0;
            }
            if simpson_end < n {
                for (j, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                    w[simpson_end + j] += 3.0 * h / 8.0 * c;
                }
            }
        }
        let mut nodes: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
        if drop_origin && a == 0.0 {
            nodes.remove(0);
            w.remove(0);
        }
        Grid { kind: GridKind::Uniform { a, b, step }, nodes, weights: w }
    }

    /// Trapezoid weights on arbitrary increasing nodes.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Invalid("grid must be strictly increasing".into()));
        }
        let mut weights = vec![0.0; nodes.len()];
        for i in 0..nodes.len().saturating_sub(1) {
            let h = nodes[i + 1] - nodes[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        Ok(Grid { kind: GridKind::Nodes, nodes, weights })
    }

    fn rebuild(kind: &GridKind, nodes: Vec<f64>, radial: bool) -> Result<Self> {
        let g = match *kind {
            GridKind::Gauss { a, b, width } => Grid::gauss(a, b, width),
            GridKind::Uniform { a, b, step } => Grid::uniform(a, b, step, radial),
            GridKind::Nodes => return Grid::from_nodes(nodes),
        };
        if g.nodes.len() != nodes.len() || g.nodes.iter().zip(&nodes).any(|(x, y)| (x - y).abs() > 1e-9 * (1.0 + x.abs())) {
            return Err(Error::Invalid("grid header does not match the sampled nodes".into()));
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.nodes.last().unwrap_or(&0.0)
    }
}

/// Default radial grid: Gauss panels of width 0.1 on (0, 15].
pub fn default_rgrid() -> Grid {
    Grid::gauss(0.0, R_MAX, R_PANEL)
}

/// Default spectral grid: Gauss panels of width 0.25 on [0, 50].
pub fn default_lgrid() -> Grid {
    Grid::gauss(0.0, LAMBDA_MAX, LAMBDA_PANEL)
}

/// Samples of a radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub space: SpaceParams,
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

/// Samples of a function on the spectral side.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub space: SpaceParams,
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

fn check_values(grid: &Grid, values: &[Complex64]) -> Result<()> {
    if grid.len() != values.len() {
        return Err(Error::Invalid(format!("{} nodes but {} values", grid.len(), values.len())));
    }
    if grid.nodes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Invalid("grid must be strictly increasing".into()));
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Invalid("profile values must be finite".into()));
    }
    Ok(())
}

impl RadialProfile {
    pub fn new(space: SpaceParams, grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        if grid.nodes.first().is_some_and(|&r| r <= 0.0) {
            return Err(Error::Invalid("radial grid must lie in (0, Rmax]".into()));
        }
        Ok(RadialProfile { space, grid, values })
    }

    /// Samples a real function on the grid.
    pub fn from_fn(space: SpaceParams, grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes.iter().map(|&r| Complex64::new(f(r), 0.0)).collect();
        Self::new(space, grid, values)
    }

    pub fn zeros(space: SpaceParams, grid: Grid) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        RadialProfile { space, grid, values }
    }

    /// ∫ |f|² dµ.
    pub fn l2_squared(&self) -> f64 {
        let s = &self.space;
        self.grid.nodes.iter().zip(&self.grid.weights).zip(&self.values)
            .map(|((&r, &w), v)| w * v.norm_sqr() * density_unchecked(s, r))
            .sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_profile(out, &self.space, &self.grid, &self.values, "r")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let (space, grid, values) = read_profile(input, "r", true)?;
        Self::new(space, grid, values)
    }
}

impl SpectralProfile {
    pub fn new(space: SpaceParams, grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        if grid.nodes.first().is_some_and(|&l| l < 0.0) {
            return Err(Error::Invalid("spectral grid must lie in [0, Λmax]".into()));
        }
        Ok(SpectralProfile { space, grid, values })
    }

    pub fn from_fn(space: SpaceParams, grid: Grid, g: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes.iter().map(|&l| g(l)).collect();
        Self::new(space, grid, values)
    }

    pub fn zeros(space: SpaceParams, grid: Grid) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        SpectralProfile { space, grid, values }
    }

    /// ∫ |c(λ)|^{−2} |g(λ)|² dλ (no c_S factor).
    pub fn plancherel_mass(&self) -> f64 {
        self.grid.nodes.iter().zip(&self.grid.weights).zip(&self.values)
            .map(|((&l, &w), v)| w * plancherel_density(&self.space, l) * v.norm_sqr())
            .sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_profile(out, &self.space, &self.grid, &self.values, "lambda")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let (space, grid, values) = read_profile(input, "lambda", false)?;
        Self::new(space, grid, values)
    }
}

fn write_profile<W: Write>(mut out: W, space: &SpaceParams, grid: &Grid, values: &[Complex64], col: &str) -> Result<()> {
    writeln!(out, "# space m={} k={} qtilde={}", space.m, space.k, space.qtilde)?;
    writeln!(out, "# grid {}", serde_json::to_string(&grid.kind).map_err(|e| Error::Io(e.to_string()))?)?;
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([col, "value_re", "value_im"]).map_err(io)?;
    for (x, v) in grid.nodes.iter().zip(values) {
        w.write_record([format!("{x:e}"), format!("{:e}", v.re), format!("{:e}", v.im)]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn read_profile<R: BufRead>(input: R, col: &str, radial: bool) -> Result<(SpaceParams, Grid, Vec<Complex64>)> {
    let mut space = None;
    let mut kind = GridKind::Nodes;
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# space ") {
            let mut kv = HashMap::new();
            for tok in rest.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    kv.insert(k.to_string(), v.to_string());
                }
            }
            let get = |k: &str| kv.get(k).ok_or_else(|| Error::Invalid(format!("missing {k} in space header")));
            let parse_i = |s: &String| s.parse::<i64>().map_err(|e| Error::Invalid(e.to_string()));
            let m = parse_i(get("m")?)?;
            let k = parse_i(get("k")?)?;
            let qt = get("qtilde")?.parse::<f64>().map_err(|e| Error::Invalid(e.to_string()))?;
            space = Some(crate::space::new_space(m, k, Some(qt))?);
        } else if let Some(rest) = line.strip_prefix("# grid ") {
            kind = serde_json::from_str(rest).map_err(|e| Error::Invalid(e.to_string()))?;
        } else if !line.starts_with('#') {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let space = space.ok_or_else(|| Error::Invalid("missing '# space' header".into()))?;
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Invalid(e.to_string()))?.clone();
    if headers.get(0) != Some(col) {
        return Err(Error::Invalid(format!("expected first column '{col}'")));
    }
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Invalid(e.to_string()))?;
        let p = |i: usize| -> Result<f64> {
            rec.get(i).ok_or_else(|| Error::Invalid("short row".into()))?.trim().parse::<f64>().map_err(|e| Error::Invalid(e.to_string()))
        };
        nodes.push(p(0)?);
        values.push(Complex64::new(p(1)?, p(2)?));
    }
    let grid = Grid::rebuild(&kind, nodes, radial)?;
    Ok((space, grid, values))
}

/// Reference Gaussian e^{−r²} used to calibrate c_S.
pub fn reference_gaussian(r: f64) -> f64 {
    (-r * r).exp()
}

/// The three test functions: Gaussian, an exponential-type profile, and a
/// compactly supported bump.
pub fn test_family(space: &SpaceParams) -> Vec<(&'static str, Box<dyn Fn(f64) -> f64 + Send + Sync>)> {
    let a = space.q() + 1.0;
    vec![
        ("gaussian", Box::new(reference_gaussian)),
        ("sech", Box::new(move |r: f64| r.cosh().powf(-a))),
        ("bump", Box::new(bump)),
    ]
}

/// Compactly supported bump exp(6 − 6/(1 − (r/6)²)) on [0, 6). The large
/// exponent keeps its spectral tail at Λ = 50 well below the inverse-tail
/// threshold.
pub fn bump(r: f64) -> f64 {
    let x = r / 6.0;
    if x < 1.0 {
        (6.0 - 6.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// Forward/inverse spherical transform on fixed grids with its φ_λ table and
/// calibrated Plancherel constant.
#[derive(Debug, Clone)]
pub struct SphericalTransform {
    pub space: SpaceParams,
    pub rgrid: Grid,
    pub lgrid: Grid,
    table: PhiTable,
    density_r: Vec<f64>,
    density_l: Vec<f64>,
    phi0_r: Vec<f64>,
    /// Calibrated Plancherel constant.
    pub c_s: f64,
}

impl SphericalTransform {
    /// Builds the φ_λ(r) table and calibrates c_S on e^{−r²}.
    pub fn new(space: SpaceParams, rgrid: Grid, lgrid: Grid) -> Result<Self> {
        if rgrid.nodes.first().is_some_and(|&r| r <= 0.0) {
            return Err(Error::Invalid("radial grid must lie in (0, Rmax]".into()));
        }
        let table = PhiTable::build(&space, &lgrid.nodes, &rgrid.nodes)?;
        let density_r = rgrid.nodes.iter().map(|&r| density_unchecked(&space, r)).collect();
        let density_l = lgrid.nodes.iter().map(|&l| plancherel_density(&space, l)).collect();
        let phi0_r = crate::spherical::phi_zero_grid(&space, &rgrid.nodes);
        let mut t = SphericalTransform { space, rgrid, lgrid, table, density_r, density_l, phi0_r, c_s: 1.0 };
        let f = RadialProfile::from_fn(space, t.rgrid.clone(), reference_gaussian)?;
        t.c_s = t.plancherel_ratio(&f)?;
        Ok(t)
    }

    /// Default grids (Rmax = 15, Λmax = 50).
    pub fn with_defaults(space: SpaceParams) -> Result<Self> {
        Self::new(space, default_rgrid(), default_lgrid())
    }

    /// ∫|f|²dµ / ∫|c|^{−2}|Hf|²dλ: the Plancherel constant seen by f.
    pub fn plancherel_ratio(&self, f: &RadialProfile) -> Result<f64> {
        let hf = self.forward(f)?;
        Ok(f.l2_squared() / hf.plancherel_mass())
    }

    /// Relative size of the neglected tail beyond Rmax.
    pub fn forward_tail(&self, f: &RadialProfile) -> f64 {
        let total: f64 = (0..self.rgrid.len())
            .map(|j| self.rgrid.weights[j] * f.values[j].norm() * self.density_r[j] * self.phi0_r[j])
            .sum();
        let j = self.rgrid.len() - 1;
        let tail = f.values[j].norm() * self.density_r[j] * self.phi0_r[j];
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Relative size of the spectral tail beyond Λmax.
    pub fn inverse_tail(&self, g: &SpectralProfile) -> f64 {
        let total: f64 = (0..self.lgrid.len()).map(|i| self.lgrid.weights[i] * self.density_l[i] * g.values[i].norm()).sum();
        let i = self.lgrid.len() - 1;
        let tail = self.lgrid.nodes[i] * self.density_l[i] * g.values[i].norm();
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Hf(λ) = ∫ f φ_λ V dr on the spectral grid.
    pub fn forward(&self, f: &RadialProfile) -> Result<SpectralProfile> {
        if f.grid.nodes != self.rgrid.nodes {
            return Err(Error::Invalid("profile grid differs from the transform's radial grid".into()));
        }
        let tail = self.forward_tail(f);
        if tail > FORWARD_TAIL_TOL {
            return Err(Error::Truncation(format!("forward tail beyond Rmax is {tail:.2e} (> {FORWARD_TAIL_TOL:.0e})")));
        }
        Ok(self.forward_unchecked(&f.values))
    }

    pub(crate) fn forward_unchecked(&self, values: &[Complex64]) -> SpectralProfile {
        let wf: Vec<Complex64> = (0..self.rgrid.len())
            .map(|j| values[j] * self.rgrid.weights[j] * self.density_r[j])
            .collect();
        let out = (0..self.lgrid.len())
            .map(|i| self.table.row(i).iter().zip(&wf).map(|(p, w)| w * p).sum())
            .collect();
        SpectralProfile { space: self.space, grid: self.lgrid.clone(), values: out }
    }

    /// f(r) = c_S ∫ |c(λ)|^{−2} g(λ) φ_λ(r) dλ on the radial grid.
    pub fn inverse(&self, g: &SpectralProfile) -> Result<RadialProfile> {
        if g.grid.nodes != self.lgrid.nodes {
            return Err(Error::Invalid("profile grid differs from the transform's spectral grid".into()));
        }
        let tail = self.inverse_tail(g);
        if tail > INVERSE_TAIL_TOL {
            return Err(Error::Truncation(format!("spectral tail beyond Λmax is {tail:.2e} (> {INVERSE_TAIL_TOL:.0e})")));
        }
        Ok(self.inverse_unchecked(&g.values))
    }

    pub(crate) fn inverse_unchecked(&self, values: &[Complex64]) -> RadialProfile {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rgrid.len()];
        for i in 0..self.lgrid.len() {
            let c = values[i] * (self.c_s * self.lgrid.weights[i] * self.density_l[i]);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.table.row(i)) {
                *o += c * p;
            }
        }
        RadialProfile { space: self.space, grid: self.rgrid.clone(), values: out }
    }

    /// Relative L²(dµ) distance between two profiles on this grid.
    pub fn relative_l2(&self, a: &RadialProfile, b: &RadialProfile) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.rgrid.len() {
            let w = self.rgrid.weights[j] * self.density_r[j];
            num += w * (a.values[j] - b.values[j]).norm_sqr();
            den += w * b.values[j].norm_sqr();
        }
        (num / den).sqrt()
    }

    pub fn phi_table(&self) -> &PhiTable {
        &self.table
    }
}

fn cs_cache() -> &'static Mutex<HashMap<(u32, u32), f64>> {
    static C: OnceLock<Mutex<HashMap<(u32, u32), f64>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// c_S calibrated once per space on the default grids, then frozen.
pub fn calibrated_cs(space: &SpaceParams) -> Result<f64> {
    if let Some(c) = cs_cache().lock().unwrap().get(&(space.m, space.k)) {
        return Ok(*c);
    }
    // A coarser spectral grid suffices for the Gaussian (Hf ~ e^{−λ²/4}).
    let t = SphericalTransform::new(*space, default_rgrid(), Grid::gauss(0.0, 20.0, LAMBDA_PANEL))?;
    cs_cache().lock().unwrap().insert((space.m, space.k), t.c_s);
    Ok(t.c_s)
}

/// Closed form 2^{k−1}/π of the Plancherel constant for the normalization
/// used here (reported next to the calibrated value).
pub fn cs_closed_form(space: &SpaceParams) -> f64 {
    2f64.powi(space.k as i32 - 1) / std::f64::consts::PI
}

/// One-shot forward transform onto `lgrid` (builds a table; prefer
/// [`SphericalTransform`] for repeated use).
pub fn forward_sft(f: &RadialProfile, lgrid: &Grid) -> Result<SpectralProfile> {
    let table = PhiTable::build(&f.space, &lgrid.nodes, &f.grid.nodes)?;
    let phi0 = crate::spherical::phi_zero_grid(&f.space, &f.grid.nodes);
    let dens: Vec<f64> = f.grid.nodes.iter().map(|&r| density_unchecked(&f.space, r)).collect();
    let total: f64 = (0..f.grid.len()).map(|j| f.grid.weights[j] * f.values[j].norm() * dens[j] * phi0[j]).sum();
    let j = f.grid.len() - 1;
    if total > 0.0 && f.values[j].norm() * dens[j] * phi0[j] / total > FORWARD_TAIL_TOL {
        return Err(Error::Truncation("forward tail beyond Rmax above 1e-10".into()));
    }
    let values = (0..lgrid.len())
        .map(|i| {
            (0..f.grid.len()).map(|j| f.values[j] * (f.grid.weights[j] * dens[j] * table.get(i, j))).sum()
        })
        .collect();
    SpectralProfile::new(f.space, lgrid.clone(), values)
}

/// One-shot inverse transform onto `rgrid` using the calibrated c_S.
pub fn inverse_sft(g: &SpectralProfile, rgrid: &Grid) -> Result<RadialProfile> {
    let space = g.space;
    let dens: Vec<f64> = g.grid.nodes.iter().map(|&l| plancherel_density(&space, l)).collect();
    let total: f64 = (0..g.grid.len()).map(|i| g.grid.weights[i] * dens[i] * g.values[i].norm()).sum();
    let i = g.grid.len() - 1;
    if total > 0.0 && g.grid.nodes[i] * dens[i] * g.values[i].norm() / total > INVERSE_TAIL_TOL {
        return Err(Error::Truncation("spectral tail beyond Λmax above 1e-8".into()));
    }
    let c_s = calibrated_cs(&space)?;
    let table = PhiTable::build(&space, &g.grid.nodes, &rgrid.nodes)?;
    let values = (0..rgrid.len())
        .map(|j| {
            (0..g.grid.len()).map(|i| g.values[i] * (c_s * g.grid.weights[i] * dens[i] * table.get(i, j))).sum()
        })
        .collect();
    RadialProfile::new(space, rgrid.clone(), values)
}
