//! Admissible exponents, the threshold powers γ₁ … γ̃_∞, the regularity
//! curves C₁–C₃ and a feasibility solver for the exponent system behind the
//! small-data global existence theorem.
//!
//! Exponents are handled through their reciprocals: x = 1/q, y = 1/q̃,
//! a = 1/p, b = 1/p̃, with p = p̃′γ, i.e. b = 1 − γa.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

/// Open conditions such as 1/q̃ ≠ 1/2 are enforced as 1/q̃ ≤ 1/2 − ε.
pub const EPS_OPEN: f64 = 1e-9;

/// Slack allowed on closed constraints (rounding in degenerate windows).
pub const CLOSED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissiblePair {
    pub inv_p: f64,
    pub inv_q: f64,
}

impl AdmissiblePair {
    pub fn new(n: u32, inv_p: f64, inv_q: f64) -> Result<Self> {
        if !is_admissible(n, inv_p, inv_q) {
            return Err(Error::Invalid(format!("(1/p, 1/q) = ({inv_p}, {inv_q}) is not admissible for n = {n}")));
        }
        Ok(AdmissiblePair { inv_p, inv_q })
    }
}

/// (1/p, 1/q) ∈ (0, 1/2] × (0, 1/2) with 2/p + (n−1)/q ≥ (n−1)/2. The
/// closed conditions allow [`CLOSED_TOL`] of rounding.
pub fn is_admissible(n: u32, inv_p: f64, inv_q: f64) -> bool {
    let n = n as f64;
    inv_p > 0.0
        && inv_p <= 0.5 + CLOSED_TOL
        && inv_q > 0.0
        && inv_q < 0.5
        && 2.0 * inv_p + (n - 1.0) * inv_q >= (n - 1.0) / 2.0 - CLOSED_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaThresholds {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_conf: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub gamma_inf: f64,
    pub gamma_tilde_inf: f64,
}

fn check_dim(n: u32) -> Result<()> {
    if n < 4 {
        return Err(Error::Invalid(format!("the exponent geometry needs n ≥ 4 (got {n})")));
    }
    Ok(())
}

pub fn thresholds(n: u32) -> Result<GammaThresholds> {
    check_dim(n)?;
    let nf = n as f64;
    let gamma3 = (nf * nf + 5.0 * nf - 2.0 + (nf.powi(4) + 2.0 * nf.powi(3) + 21.0 * nf * nf - 12.0 * nf + 4.0).sqrt())
        / (2.0 * nf * nf - 2.0 * nf);
    let gamma4 = (nf * nf + 2.0 * nf - 5.0) / (nf * nf - 2.0 * nf - 1.0);
    Ok(GammaThresholds {
        gamma1: (nf + 3.0) / nf,
        gamma2: (nf + 1.0).powi(2) / ((nf - 1.0).powi(2) + 4.0),
        gamma_conf: (nf + 3.0) / (nf - 1.0),
        gamma3,
        gamma4,
        gamma_inf: if n <= 5 { gamma3 } else { gamma4 },
        gamma_tilde_inf: 1.0 + 4.0 * (nf - 1.0) / ((nf + 1.0) * (nf - 3.0)),
    })
}

/// Euclidean Strauss exponent γ₀(n), for reference only.
pub fn strauss_exponent(n: u32) -> f64 {
    let a = 0.5 + 1.0 / (n as f64 - 1.0);
    a + (a * a + 2.0 / (n as f64 - 1.0)).sqrt()
}

pub fn curve_c1(n: u32, gamma: f64) -> f64 {
    let n = n as f64;
    (n + 1.0) / 4.0 * (1.0 - (n + 5.0) / (2.0 * n * gamma - n - 1.0))
}

pub fn curve_c2(n: u32, gamma: f64) -> f64 {
    (n as f64 + 1.0) / 4.0 - 1.0 / (gamma - 1.0)
}

pub fn curve_c3(n: u32, gamma: f64) -> f64 {
    n as f64 / 2.0 - 2.0 / (gamma - 1.0)
}

/// The four ranges of γ in the existence theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Infimum of admissible σ for a given γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityBound {
    pub sigma_min: f64,
    pub case: Case,
    /// σ must be strictly larger than `sigma_min` (case A: any σ > 0).
    pub open_below: bool,
}

/// Which case γ falls in; errors outside (1, γ_∞) (γ_∞ itself is allowed
/// from n = 6 on).
pub fn classify(n: u32, gamma: f64) -> Result<Case> {
    let th = thresholds(n)?;
    let top_ok = if n >= 6 { gamma <= th.gamma_inf } else { gamma < th.gamma_inf };
    if !(gamma > 1.0 && top_ok) {
        return Err(Error::Invalid(format!(
            "γ = {gamma} outside (1, γ_∞{}  with γ_∞ = {:.6} for n = {n}",
            if n >= 6 { "]" } else { ")" },
            th.gamma_inf
        )));
    }
    Ok(if gamma <= th.gamma1 {
        Case::A
    } else if gamma <= th.gamma2 {
        Case::B
    } else if gamma < th.gamma_conf {
        Case::C
    } else {
        Case::D
    })
}

pub fn regularity_curve(n: u32, gamma: f64) -> Result<RegularityBound> {
    let case = classify(n, gamma)?;
    let (sigma_min, open_below) = match case {
        Case::A => (0.0, true),
        Case::B => (curve_c1(n, gamma), false),
        Case::C => (curve_c2(n, gamma), false),
        Case::D => (curve_c3(n, gamma), false),
    };
    Ok(RegularityBound { sigma_min, case, open_below })
}

/// Samples (γ, σ_min, case) on (1, γ_∞) with the given step.
pub fn curve_samples(n: u32, step: f64) -> Result<Vec<(f64, RegularityBound)>> {
    if !(step > 0.0) {
        return Err(Error::Invalid(format!("step must be positive (got {step})")));
    }
    let th = thresholds(n)?;
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let g = 1.0 + i as f64 * step;
        match regularity_curve(n, g) {
            Ok(b) => out.push((g, b)),
            Err(_) if g >= th.gamma_inf => break,
            Err(e) => return Err(e),
        }
        i += 1;
    }
    Ok(out)
}

/// One line of a constraint report; `slack` ≥ 0 (> 0 for strict
/// conditions) means satisfied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub id: &'static str,
    pub satisfied: bool,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadruple {
    pub inv_p: f64,
    pub inv_q: f64,
    pub inv_ptilde: f64,
    pub inv_qtilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSolution {
    pub inv_p: f64,
    pub inv_q: f64,
    pub inv_ptilde: f64,
    pub inv_qtilde: f64,
    pub sigma: f64,
    pub case: Case,
    pub constraint_report: Vec<ConstraintCheck>,
}

impl ExponentSolution {
    pub fn quadruple(&self) -> Quadruple {
        Quadruple { inv_p: self.inv_p, inv_q: self.inv_q, inv_ptilde: self.inv_ptilde, inv_qtilde: self.inv_qtilde }
    }
    pub fn pair(&self) -> AdmissiblePair {
        AdmissiblePair { inv_p: self.inv_p, inv_q: self.inv_q }
    }
    pub fn pair_tilde(&self) -> AdmissiblePair {
        AdmissiblePair { inv_p: self.inv_ptilde, inv_q: self.inv_qtilde }
    }
}

/// Why no exponents were found: the window that came out empty and the
/// constraints whose bounds crossed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Infeasible {
    pub window: &'static str,
    pub collapsed: Vec<&'static str>,
    pub detail: String,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} window empty ({}): {}", self.window, self.collapsed.join(" vs "), self.detail)
    }
}

impl From<Infeasible> for Error {
    fn from(e: Infeasible) -> Self {
        Error::Precondition(e.to_string())
    }
}

fn check(id: &'static str, slack: f64, strict: bool) -> ConstraintCheck {
    let satisfied = if strict { slack > 0.0 } else { slack >= -CLOSED_TOL };
    ConstraintCheck { id, satisfied, slack }
}

/// Conjunction of several checks under one id.
fn all(id: &'static str, parts: &[(f64, bool)]) -> ConstraintCheck {
    let satisfied = parts.iter().all(|&(s, strict)| check(id, s, strict).satisfied);
    let slack = parts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    ConstraintCheck { id, satisfied, slack }
}

/// Evaluates the seven exponent conditions and the two σ hypotheses for a
/// candidate; no search.
///
/// Ids: `i` p = p̃′γ; `ii` 0 < 1/q̃′ ≤ γ/q < 1; `iii` the Sobolev-gap
/// condition; `iv`, `v` admissibility triangles; `vi`, `vii` the exponent
/// boxes; `sigma_q` σ ≥ (n+1)/2·(1/2 − 1/q); `sigma_curve` σ above the
/// regularity curve (strict in case A).
pub fn verify_exponents(n: u32, gamma: f64, sigma: f64, cand: &Quadruple) -> Vec<ConstraintCheck> {
    let mut out = conditions(n, gamma, cand);
    let nf = n as f64;
    out.push(check("sigma_q", sigma - (nf + 1.0) / 2.0 * (0.5 - cand.inv_q), false));
    out.push(match regularity_curve(n, gamma) {
        Ok(rb) => check("sigma_curve", sigma - rb.sigma_min, rb.open_below),
        Err(_) => ConstraintCheck { id: "sigma_curve", satisfied: false, slack: f64::NEG_INFINITY },
    });
    out
}

/// Conditions (i)–(vii) only.
fn conditions(n: u32, gamma: f64, cand: &Quadruple) -> Vec<ConstraintCheck> {
    let nf = n as f64;
    let (a, x, b, y) = (cand.inv_p, cand.inv_q, cand.inv_ptilde, cand.inv_qtilde);
    let lo = (nf - 3.0) / (2.0 * (nf - 1.0));
    let qt_dual = 1.0 - y;
    vec![
        // |1/p̃ − (1 − γ/p)| ≤ tol, reported with negative |gap| as slack
        check("i", -(b - (1.0 - gamma * a)).abs(), false),
        all("ii", &[(qt_dual, true), (gamma * x - qt_dual, false), (1.0 - gamma * x, true)]),
        check(
            "iii",
            nf * (qt_dual - gamma * x) - ((nf - 1.0) / 2.0 - (nf + 1.0) / 2.0 * (x + y)),
            false,
        ),
        check("iv", 2.0 * a + (nf - 1.0) * x - (nf - 1.0) / 2.0, false),
        check("v", 2.0 * b + (nf - 1.0) * y - (nf - 1.0) / 2.0, false),
        all("vi", &[(a, true), (0.5 - a, false), (x - lo, false), (0.5 - x, true)]),
        all("vii", &[(b, true), (0.5 - b, false), (y - lo, false), (0.5 - y, true)]),
    ]
}

/// A linear bound c₀ + c₁·x with a name, for the window bookkeeping.
#[derive(Debug, Clone, Copy)]
struct Lin {
    id: &'static str,
    c0: f64,
    c1: f64,
}

impl Lin {
    fn at(&self, x: f64) -> f64 {
        self.c0 + self.c1 * x
    }
}

fn lin(id: &'static str, c0: f64, c1: f64) -> Lin {
    Lin { id, c0, c1 }
}

/// Lower and upper bounds on 1/q̃ as functions of x = 1/q.
fn qtilde_bounds(n: f64, gamma: f64) -> (Vec<Lin>, Vec<Lin>) {
    let lo = (n - 3.0) / (2.0 * (n - 1.0));
    let lower = vec![
        lin("vii", lo, 0.0),
        // 1/q̃′ ≤ γ/q (not listed in the q̃ window of the proof, but part of (ii))
        lin("ii", 1.0, -gamma),
        // from the p, p̃ windows being non-empty
        lin("iv+v", gamma / 2.0 + (n - 5.0) / (2.0 * (n - 1.0)), -gamma),
    ];
    let upper = vec![
        lin("vii", 0.5 - EPS_OPEN, 0.0),
        lin("iii", (n + 1.0) / (n - 1.0), -(2.0 * n * gamma - n - 1.0) / (n - 1.0)),
    ];
    (lower, upper)
}

/// Bounds on 1/p given x = 1/q and y = 1/q̃.
fn p_bounds(n: f64, gamma: f64, x: f64, y: f64) -> (Vec<(&'static str, f64)>, Vec<(&'static str, f64)>) {
    let lower = vec![("iv", (n - 1.0) / 4.0 - (n - 1.0) * x / 2.0), ("vii", 1.0 / (2.0 * gamma)), ("vi", EPS_OPEN)];
    let upper = vec![
        ("vi", 0.5),
        ("v", (5.0 - n) / (4.0 * gamma) + (n - 1.0) * y / (2.0 * gamma)),
        ("vii", 1.0 / gamma - EPS_OPEN),
    ];
    (lower, upper)
}

/// The 1/q window of the case analysis: (lower, lower is strict, upper).
fn case_window(n: u32, gamma: f64, case: Case) -> (Lin, bool, Lin) {
    let nf = n as f64;
    let base = lin("vi", (nf - 3.0) / (2.0 * (nf - 1.0)), 0.0);
    // 1/2 − 2/(γ(n−1)) < 1/q: used above γ = 2 in dimensions 4, 5 and ≥ 6
    let shifted = lin("case window", 0.5 - 2.0 / (gamma * (nf - 1.0)), 0.0);
    let e = lin("case window", (nf + 7.0 - gamma * (nf - 1.0)) / (2.0 * (gamma - 1.0) * (nf + 1.0)), 0.0);
    match case {
        Case::A => (base, false, lin("vi", 0.5 - EPS_OPEN, 0.0)),
        Case::B => (base, false, lin("case window", (nf + 5.0) / (2.0 * (2.0 * nf * gamma - nf - 1.0)), 0.0)),
        Case::C => {
            let up = lin("case window", 2.0 / ((gamma - 1.0) * (nf + 1.0)), 0.0);
            // n = 4 splits at γ = 2
            if n == 4 && gamma > 2.0 {
                (shifted, true, up)
            } else {
                (base, false, up)
            }
        }
        Case::D => {
            // n = 4: the shifted window throughout; n ≥ 5: split at γ = 2
            if n == 4 || gamma > 2.0 {
                (shifted, true, e)
            } else {
                (base, false, e)
            }
        }
    }
}

fn max_by(v: &[(&'static str, f64)]) -> (&'static str, f64) {
    v.iter().copied().fold(("", f64::NEG_INFINITY), |m, c| if c.1 > m.1 { c } else { m })
}

fn min_by(v: &[(&'static str, f64)]) -> (&'static str, f64) {
    v.iter().copied().fold(("", f64::INFINITY), |m, c| if c.1 < m.1 { c } else { m })
}

/// Canonical exponents for (n, γ, σ): the largest 1/q in the case window
/// for which the remaining windows are non-empty, then the largest 1/q̃,
/// then the largest 1/p.
pub fn find_exponents(n: u32, gamma: f64, sigma: f64) -> std::result::Result<ExponentSolution, Infeasible> {
    let bad = |window, collapsed: Vec<&'static str>, detail: String| Err(Infeasible { window, collapsed, detail });
    if n < 4 {
        return bad("dimension", vec![], format!("n = {n} < 4"));
    }
    let rb = match regularity_curve(n, gamma) {
        Ok(rb) => rb,
        Err(e) => return bad("gamma", vec!["gamma range"], e.to_string()),
    };
    let below = if rb.open_below { sigma <= rb.sigma_min } else { sigma < rb.sigma_min - CLOSED_TOL };
    if below {
        return bad(
            "sigma",
            vec!["sigma_curve"],
            format!("σ = {sigma} below the case-{} curve value {}", rb.case, rb.sigma_min),
        );
    }
    let nf = n as f64;
    let (cw_lo, strict_lo, cw_hi) = case_window(n, gamma, rb.case);

    // x-window: bounds of the form c₁x ≤ c₀ collected as (id, value)
    let mut lows = vec![(cw_lo.id, cw_lo.c0 + if strict_lo { EPS_OPEN } else { 0.0 })];
    let mut highs = vec![(cw_hi.id, cw_hi.c0), ("ii", 1.0 / gamma - EPS_OPEN), ("vi", 0.5 - EPS_OPEN)];
    // σ ≥ (n+1)/2 (1/2 − x)
    lows.push(("sigma_q", 0.5 - 2.0 * sigma / (nf + 1.0)));
    let (ylo, yhi) = qtilde_bounds(nf, gamma);
    for l in &ylo {
        for u in &yhi {
            // l.c0 + l.c1 x ≤ u.c0 + u.c1 x
            let (c1, c0) = (l.c1 - u.c1, u.c0 - l.c0);
            if c1 > 0.0 {
                highs.push((pair_id(l.id, u.id), c0 / c1));
            } else if c1 < 0.0 {
                lows.push((pair_id(l.id, u.id), c0 / c1));
            } else if c0 < -CLOSED_TOL {
                return bad("1/q̃", vec![l.id, u.id], format!("{} > {} for every 1/q", l.c0, u.c0));
            }
        }
    }
    let (hid, x) = min_by(&highs);
    let (lid, xlo) = max_by(&lows);
    if x < xlo - CLOSED_TOL {
        return bad("1/q", vec![lid, hid], format!("lower bound {xlo:.9} > upper bound {x:.9}"));
    }
    let y_lo = ylo.iter().map(|l| (l.id, l.at(x))).collect::<Vec<_>>();
    let y_hi = yhi.iter().map(|l| (l.id, l.at(x))).collect::<Vec<_>>();
    let ((lid, ymin), (hid, y)) = (max_by(&y_lo), min_by(&y_hi));
    if y < ymin - CLOSED_TOL {
        return bad("1/q̃", vec![lid, hid], format!("at 1/q = {x}: {ymin:.9} > {y:.9}"));
    }
    let (plo, phi) = p_bounds(nf, gamma, x, y);
    let ((lid, amin), (hid, a)) = (max_by(&plo), min_by(&phi));
    if a < amin - CLOSED_TOL {
        return bad("1/p", vec![lid, hid], format!("at (1/q, 1/q̃) = ({x}, {y}): {amin:.9} > {a:.9}"));
    }
    let quad = Quadruple { inv_p: a, inv_q: x, inv_ptilde: 1.0 - gamma * a, inv_qtilde: y };
    let report = verify_exponents(n, gamma, sigma, &quad);
    if let Some(c) = report.iter().find(|c| !c.satisfied) {
        return bad("verification", vec![c.id], format!("slack {}", c.slack));
    }
    Ok(ExponentSolution {
        inv_p: quad.inv_p,
        inv_q: quad.inv_q,
        inv_ptilde: quad.inv_ptilde,
        inv_qtilde: quad.inv_qtilde,
        sigma,
        case: rb.case,
        constraint_report: report,
    })
}

fn pair_id(a: &'static str, b: &'static str) -> &'static str {
    // the y-window bounds that can cross, named after both constraints
    match (a, b) {
        ("vii", "vii") => "vii",
        ("vii", "iii") => "vii/iii",
        ("ii", "vii") => "ii/vii",
        ("ii", "iii") => "ii/iii",
        ("iv+v", "vii") => "iv+v/vii",
        ("iv+v", "iii") => "iv+v/iii",
        _ => "1/q̃ window",
    }
}

/// Brute-force feasibility oracle: the largest 1/q, q on the grid 2 + h·ℕ,
/// for which some q̃ and p on the same grid satisfy conditions (i)–(vii)
/// (p̃ follows from p = p̃′γ). Independent of σ; feasibility for σ then
/// reads σ ≥ (n+1)/2·(1/2 − 1/q) plus the curve hypothesis.
///
/// The search range q ≤ 2(n−1)/(n−3), p ≤ 2γ only skips grid points that
/// fail (vi) and (vii) anyway.
pub fn brute_force_max_inv_q(n: u32, gamma: f64, h: f64) -> Option<f64> {
    let nf = n as f64;
    let grid = |lo_k: usize, top: f64| -> Vec<f64> {
        (lo_k..).map(|k| 2.0 + k as f64 * h).take_while(|&v| v <= top + 1e-12).collect()
    };
    let qs = grid(1, 2.0 * (nf - 1.0) / (nf - 3.0));
    let ps = grid(0, 2.0 * gamma);
    for &q in &qs {
        for &qt in &qs {
            for &p in &ps {
                let a = 1.0 / p;
                let cand = Quadruple { inv_p: a, inv_q: 1.0 / q, inv_ptilde: 1.0 - gamma * a, inv_qtilde: 1.0 / qt };
                if conditions(n, gamma, &cand).iter().all(|c| c.satisfied) {
                    return Some(1.0 / q);
                }
            }
        }
    }
    None
}

/// Grid feasibility for (n, γ, σ) from the brute-force oracle.
pub fn brute_force_feasible(n: u32, gamma: f64, sigma: f64, h: f64) -> bool {
    let Ok(rb) = regularity_curve(n, gamma) else { return false };
    let curve_ok = if rb.open_below { sigma > rb.sigma_min } else { sigma >= rb.sigma_min };
    curve_ok
        && brute_force_max_inv_q(n, gamma, h)
            .map(|x| sigma >= (n as f64 + 1.0) / 2.0 * (0.5 - x) - CLOSED_TOL)
            .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(4, 0.5, 0.375));
        assert!(!is_admissible(4, 0.25, 0.125));
        assert!(!is_admissible(4, 0.5, 0.5));
    }

    #[test]
    fn thresholds_n4_n6() {
        let t = thresholds(4).unwrap();
        assert!((t.gamma1 - 1.75).abs() < 1e-15);
        assert!((t.gamma2 - 25.0 / 13.0).abs() < 1e-15);
        assert!((t.gamma_conf - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.gamma3, 2.5);
        assert!((t.gamma4 - 19.0 / 7.0).abs() < 1e-15);
        assert_eq!(t.gamma_inf, t.gamma3);
        let t6 = thresholds(6).unwrap();
        assert!((t6.gamma_inf - 43.0 / 23.0).abs() < 1e-15);
        assert!(thresholds(3).is_err());
    }

    #[test]
    fn solver_examples() {
        let s = find_exponents(4, 2.0, 0.3).unwrap();
        assert_eq!(s.case, Case::C);
        assert!(s.constraint_report.iter().all(|c| c.satisfied));
        let e = find_exponents(4, 2.0, 0.2).unwrap_err();
        assert!(e.collapsed.iter().any(|c| c.starts_with("sigma")), "{e}");
        let g4 = thresholds(6).unwrap().gamma4;
        assert!(find_exponents(6, g4, curve_c3(6, g4)).is_ok());
        assert!(find_exponents(4, 2.5, 1.0).is_err());
    }

    #[test]
    fn q_equal_inverse_gamma_is_flagged() {
        let g = 1.5;
        let cand = Quadruple { inv_p: 0.3, inv_q: 1.0 / g, inv_ptilde: 1.0 - g * 0.3, inv_qtilde: 0.3 };
        let rep = verify_exponents(4, g, 1.0, &cand);
        assert!(!rep.iter().find(|c| c.id == "ii").unwrap().satisfied);
    }
}
