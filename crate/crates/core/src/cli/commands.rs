use super::report::{param, params_list, Report, RunConfig};
use super::*;
use crate::kernels::{self, EnvelopeReport, KernelPart, KernelRequest, LowFrequencyKernel, Regime, ScanSpec};
use crate::space::{new_space, omega_growth_constant, SpaceParams};
use crate::spherical::{gamma_bound, spherical_function, spherical_ode, spherical_series};
use crate::strichartz::{self, AdmissiblePair};
use crate::transform::{self as tf, abel_inverse, bump, cs_closed_form, test_family, CosineInverse, Grid, RadialProfile, SphericalTransform};
use crate::wavesolver::{self as ws, Nonlinearity, SolveConfig, StrichartzSetup};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::io::Write;

pub(super) fn dispatch(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    match &cli.command {
        Command::Space(SpaceCmd::Info { calibrate }) => space_info(c, *calibrate),
        Command::Spherical(SphericalCmd::Eval { lambda, r, branch }) => spherical_eval(c, lambda, r, *branch),
        Command::Transform(TransformCmd::Roundtrip { tol, abel }) => transform_roundtrip(c, *tol, *abel),
        Command::Kernel(KernelCmd::Table { part, sigma, sigma_im, tau, t, r_min, r_max, nr }) => {
            kernel_table(c, *part, Complex64::new(*sigma, *sigma_im), *tau, t, (*r_min, *r_max, *nr))
        }
        Command::Kernel(KernelCmd::Verify { tau, regime, control }) => kernel_verify(c, *tau, *regime, *control),
        Command::Dispersive(DispersiveCmd::Fit { q, sigma, tau, t }) => dispersive_fit(c, *q, *sigma, *tau, t),
        Command::Region(RegionCmd::Curve { n, step }) => region_curve(c, *n, *step),
        Command::Exponents(ExponentsCmd::Find { n, gamma, sigma }) => exponents_find(c, *n, *gamma, *sigma),
        Command::Solve(cmd @ SolveCmd::Linear { .. }) => solve_linear(c, cmd),
        Command::Solve(cmd @ SolveCmd::Nlw { .. }) => solve_nlw(c, cmd),
        Command::Appendixa(AppendixCmd::Verify { nu, zeta, m_order }) => appendix_verify(c, *nu, zeta, *m_order),
    }
}

fn space_of(cfg: &RunConfig) -> Result<SpaceParams> {
    new_space(cfg.m, cfg.k, cfg.qtilde)
}

fn transform_of(cfg: &RunConfig, space: SpaceParams) -> Result<SphericalTransform> {
    let rg = Grid::gauss(0.0, cfg.rmax.unwrap_or(tf::R_MAX), cfg.dr.unwrap_or(tf::R_PANEL));
    let lg = Grid::gauss(0.0, cfg.lmax.unwrap_or(tf::LAMBDA_MAX), cfg.dlam.unwrap_or(tf::LAMBDA_PANEL));
    SphericalTransform::new(space, rg, lg)
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn done(report: Report, cfg: &RunConfig) -> Result<()> {
    for p in report.finish(cfg)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn space_info(c: &Common, calibrate: bool) -> Result<Outcome> {
    let cfg = resolve(c, "space info", json!({ "calibrate": calibrate }))?;
    let s = space_of(&cfg)?;
    let gb = gamma_bound(&s);
    let calibrated = if calibrate { Some(tf::calibrated_cs(&s)?) } else { None };
    let info = json!({
        "m": s.m, "k": s.k, "n": s.n, "Q": s.q(), "qtilde": s.qtilde,
        "cs_closed_form": cs_closed_form(&s),
        "cs_calibrated": calibrated,
        "gamma_bound": { "C": gb.c, "d": gb.d },
        "omega_growth_constant": omega_growth_constant(&s),
    });
    println!("n={} Q={} qtilde={}", s.n, s.q(), s.qtilde);
    println!("c_S = {:.15} (closed form 2^(k-1)/pi)", cs_closed_form(&s));
    if let Some(v) = calibrated {
        println!("c_S calibrated = {v:.15}");
    }
    println!("|Gamma_l(lambda)|(1+|lambda|) <= {:.4} l^{:.4}", gb.c, gb.d);
    let mut rep = Report::new(&cfg, &s.tag(), &[])?;
    rep.json(&info)?;
    done(rep, &cfg)?;
    Ok(Outcome::Pass)
}

fn spherical_eval(c: &Common, lambda: &[f64], r: &[f64], branch: Branch) -> Result<Outcome> {
    let cfg = resolve(c, "spherical eval", json!({ "lambda": lambda, "r": r, "branch": format!("{branch:?}").to_lowercase() }))?;
    let s = space_of(&cfg)?;
    let mut rows = Vec::new();
    for &l in lambda {
        for &x in r {
            let v = match branch {
                Branch::Auto => spherical_function(&s, l, x)?,
                Branch::Ode => spherical_ode(&s, l, x)?,
                Branch::Series => spherical_series(&s, l, x)?,
            };
            rows.push((l, x, v));
        }
    }
    let mut rep = Report::new(&cfg, &s.tag(), &[("lambda", params_list(lambda)), ("r", params_list(r))])?;
    let w = rep.csv(None, &[("space", s.tag()), ("branch", format!("{branch:?}").to_lowercase())])?;
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["lambda", "r", "phi"]).map_err(io)?;
    for (l, x, v) in &rows {
        w.write_record([format!("{l:e}"), format!("{x:e}"), format!("{v:e}")]).map_err(io)?;
        println!("phi_{l}({x}) = {v:.15e}");
    }
    w.flush()?;
    drop(w);
    done(rep, &cfg)?;
    Ok(Outcome::Pass)
}

fn transform_roundtrip(c: &Common, tol: f64, abel: bool) -> Result<Outcome> {
    let cfg = resolve(c, "transform roundtrip", json!({ "tol": tol, "abel": abel }))?;
    let s = space_of(&cfg)?;
    let tr = transform_of(&cfg, s)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (name, f) in test_family(&s) {
        let p = RadialProfile::from_fn(s, tr.rgrid.clone(), &f)?;
        let hf = tr.forward(&p)?;
        let back = tr.inverse(&hf)?;
        let err = tr.relative_l2(&back, &p);
        let ratio = p.l2_squared() / hf.plancherel_mass();
        let abel_err = if abel {
            let g = CosineInverse::new(&hf);
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..=55 {
                let r = 0.5 + 0.1 * i as f64;
                worst = worst.max((abel_inverse(&s, &g, r)? - f(r)).abs());
                scale = scale.max(f(r).abs());
            }
            Some(worst / scale)
        } else {
            None
        };
        if err > tol {
            failures.push(format!("{name}: roundtrip {err:.2e} > {tol:.0e}"));
        }
        if abel_err.is_some_and(|e| e > 1e-3) {
            failures.push(format!("{name}: Abel factorization {:.2e} > 1e-3", abel_err.unwrap()));
        }
        rows.push((name, err, ratio, abel_err));
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let spread = (hi - lo) / tr.c_s;
    if spread > 1e-3 {
        failures.push(format!("Plancherel constant spread {spread:.2e} > 1e-3"));
    }
    let mut rep = Report::new(&cfg, &s.tag(), &[])?;
    let w = rep.csv(None, &[("space", s.tag()), ("c_s_calibrated", format!("{:e}", tr.c_s)), ("c_s_closed_form", format!("{:e}", cs_closed_form(&s)))])?;
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["function", "roundtrip_error", "plancherel_ratio", "abel_error"]).map_err(io)?;
    for (name, err, ratio, ab) in &rows {
        let ab = ab.map(|e| format!("{e:e}")).unwrap_or_default();
        w.write_record([name.to_string(), format!("{err:e}"), format!("{ratio:e}"), ab.clone()]).map_err(io)?;
        println!("{name:<10} roundtrip {err:.3e}  c_S seen {ratio:.12}  abel {ab}");
    }
    w.flush()?;
    drop(w);
    println!("c_S calibrated {:.15}, spread {spread:.2e}", tr.c_s);
    done(rep, &cfg)?;
    Ok(if failures.is_empty() { Outcome::Pass } else { Outcome::Fail(failures.join("; ")) })
}

fn kernel_table(c: &Common, part: Part, sigma: Complex64, tau: f64, times: &[f64], (r_min, r_max, nr): (f64, f64, usize)) -> Result<Outcome> {
    let cfg = resolve(
        c,
        "kernel table",
        json!({ "part": format!("{part:?}").to_lowercase(), "sigma": [sigma.re, sigma.im], "tau": tau, "t": times, "r_min": r_min, "r_max": r_max, "nr": nr }),
    )?;
    let s = space_of(&cfg)?;
    if nr < 1 || !(r_max >= r_min) || r_min < 0.0 {
        return Err(Error::Invalid("need 0 ≤ r_min ≤ r_max and nr ≥ 1".into()));
    }
    let radii = kernels::ScanRange::new(vec![], r_min, r_max, nr).radii;
    let mut rows = Vec::new();
    match part {
        Part::Low => {
            let tmax = times.iter().fold(0.0f64, |a, t| a.max(t.abs()));
            let k = LowFrequencyKernel::new(s, &radii, tmax)?;
            for &t in times {
                let v = k.eval(&KernelRequest::new(sigma, tau, t, KernelPart::Low)?)?;
                rows.extend(radii.iter().zip(v).map(|(&r, v)| (t, r, v)));
            }
        }
        Part::High => {
            for &t in times {
                let v = kernels::kernel_w_inf(&s, &KernelRequest::new(sigma, tau, t, KernelPart::HighRegularized)?, &radii)?;
                rows.extend(radii.iter().zip(v.profile.values).map(|(&r, v)| (t, r, v)));
            }
        }
        Part::Full => {
            for &t in times {
                let v = kernels::kernel_full(&s, &KernelRequest::new(sigma, tau, t, KernelPart::Full)?, &radii)?;
                rows.extend(radii.iter().zip(v.values).map(|(&r, v)| (t, r, v)));
            }
        }
    }
    let params = [
        ("part", format!("{part:?}").to_lowercase()),
        ("sigma", format!("{}{}", param(sigma.re), if sigma.im != 0.0 { format!("i{}", param(sigma.im)) } else { String::new() })),
        ("tau", param(tau)),
        ("t", params_list(times)),
    ];
    let mut rep = Report::new(&cfg, &s.tag(), &params)?;
    let w = rep.csv(None, &[("space", s.tag())])?;
    kernels::write_kernel_csv(w, &rows)?;
    println!("{} kernel values", rows.len());
    done(rep, &cfg)?;
    Ok(Outcome::Pass)
}

fn regimes(arg: RegimeArg) -> Vec<Regime> {
    match arg {
        RegimeArg::All => kernels::ALL_REGIMES.to_vec(),
        RegimeArg::LowSmallTime => vec![Regime::LowSmallTime],
        RegimeArg::LowInside => vec![Regime::LowInside],
        RegimeArg::LowOutside => vec![Regime::LowOutside],
        RegimeArg::HighSmallTimeNear => vec![Regime::HighSmallTimeNear],
        RegimeArg::HighSmallTimeFar => vec![Regime::HighSmallTimeFar],
        RegimeArg::HighLargeTime => vec![Regime::HighLargeTime],
    }
}

fn kernel_verify(c: &Common, tau: f64, regime: RegimeArg, control: bool) -> Result<Outcome> {
    let cfg = resolve(c, "kernel verify", json!({ "tau": tau, "regime": format!("{regime:?}"), "control": control }))?;
    let s = space_of(&cfg)?;
    let mut reports: Vec<EnvelopeReport> = Vec::new();
    for r in regimes(regime) {
        let spec: ScanSpec = if control { kernels::negative_control(&s, r, tau)? } else { kernels::standard_scan(&s, r, tau)? };
        let rep = kernels::run_scan(&s, &spec)?;
        println!(
            "{:<34} max ratio {:.3e}  constant {:.3e}  tail slope {:+.2}  {}",
            rep.region,
            rep.max_ratio,
            rep.fitted_constant,
            rep.tail_slope,
            if rep.diverges { "FAIL" } else { "ok" }
        );
        reports.push(rep);
    }
    let mut params = vec![("tau", param(tau)), ("regime", format!("{regime:?}").to_lowercase())];
    if control {
        params.push(("control", String::new()));
    }
    let mut out = Report::new(&cfg, &s.tag(), &params)?;
    let w = out.csv(None, &[("space", s.tag()), ("envelopes", if control { "negative control".into() } else { "theorem".into() })])?;
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["regime", "max_ratio", "constant", "tail_slope", "status"]).map_err(io)?;
    for r in &reports {
        let status = if r.diverges { "fail" } else { "pass" };
        w.write_record([r.region.clone(), format!("{:e}", r.max_ratio), format!("{:e}", r.fitted_constant), format!("{:e}", r.tail_slope), status.into()]).map_err(io)?;
    }
    w.flush()?;
    drop(w);
    out.json(&reports)?;
    done(out, &cfg)?;
    let failed: Vec<String> = reports.iter().filter(|r| r.diverges).map(|r| r.region.clone()).collect();
    Ok(if failed.is_empty() { Outcome::Pass } else { Outcome::Fail(format!("envelope ratio diverges in {}", failed.join(", "))) })
}

fn dispersive_fit(c: &Common, q: f64, sigma: f64, tau: f64, times: &[f64]) -> Result<Outcome> {
    let cfg = resolve(c, "dispersive fit", json!({ "q": q, "sigma": sigma, "tau": tau, "t": times }))?;
    let s = space_of(&cfg)?;
    let fit = kernels::dispersive_decay_fit(&s, q, sigma, tau, times)?;
    println!("small-t slope {:.4} ± {:.4}", fit.small_t.slope, fit.small_t.half_width);
    println!("large-t slope {:.4} ± {:.4}", fit.large_t.slope, fit.large_t.half_width);
    let mut params = vec![("q", param(q)), ("sigma", param(sigma)), ("tau", param(tau))];
    if !times.is_empty() {
        params.push(("t", params_list(times)));
    }
    let mut rep = Report::new(&cfg, &s.tag(), &params)?;
    let w = rep.csv(None, &[("space", s.tag())])?;
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["regime", "t", "value"]).map_err(io)?;
    for (name, samples) in [("small_t", &fit.small_samples), ("large_t", &fit.large_samples)] {
        for (t, v) in samples {
            w.write_record([name.to_string(), format!("{t:e}"), format!("{v:e}")]).map_err(io)?;
        }
    }
    w.flush()?;
    drop(w);
    rep.json(&fit)?;
    done(rep, &cfg)?;
    Ok(Outcome::Pass)
}

fn region_curve(c: &Common, n: u32, step: f64) -> Result<Outcome> {
    let cfg = resolve(c, "region curve", json!({ "n": n, "step": step }))?;
    let th = strichartz::thresholds(n)?;
    let samples = strichartz::curve_samples(n, step)?;
    let mut rep = Report::new(&cfg, &format!("n{n}"), &[("step", param(step))])?;
    let meta = [
        ("n", n.to_string()),
        ("gamma1", format!("{:e}", th.gamma1)),
        ("gamma2", format!("{:e}", th.gamma2)),
        ("gamma_conf", format!("{:e}", th.gamma_conf)),
        ("gamma_inf", format!("{:e}", th.gamma_inf)),
        ("gamma_inf_included", (n >= 6).to_string()),
        ("euclidean_strauss_exponent", format!("{:e}", strichartz::strauss_exponent(n))),
    ];
    let w = rep.csv(None, &meta)?;
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["gamma", "sigma_min", "case"]).map_err(io)?;
    for (g, b) in &samples {
        w.write_record([format!("{g:.10}"), format!("{:.12e}", b.sigma_min), b.case.to_string()]).map_err(io)?;
    }
    w.flush()?;
    drop(w);
    println!("{} samples on (1, {:.6}{}", samples.len(), th.gamma_inf, if n >= 6 { "]" } else { ")" });
    done(rep, &cfg)?;
    Ok(Outcome::Pass)
}

fn exponents_find(c: &Common, n: u32, gamma: f64, sigma: f64) -> Result<Outcome> {
    let cfg = resolve(c, "exponents find", json!({ "n": n, "gamma": gamma, "sigma": sigma }))?;
    let params = [("gamma", param(gamma)), ("sigma", param(sigma))];
    match strichartz::find_exponents(n, gamma, sigma) {
        Ok(sol) => {
            let mut rep = Report::new(&cfg, &format!("n{n}"), &params)?;
            let text = serde_json::to_string_pretty(&sol).map_err(|e| Error::Io(e.to_string()))?;
            println!("{text}");
            rep.json(&sol)?;
            done(rep, &cfg)?;
            Ok(Outcome::Pass)
        }
        Err(inf) => {
            let mut rep = Report::new(&cfg, &format!("n{n}"), &params)?;
            rep.json(&json!({ "infeasible": inf }))?;
            done(rep, &cfg)?;
            Err(inf.into())
        }
    }
}

fn profile_fn(p: Profile, space: &SpaceParams) -> Box<dyn Fn(f64) -> f64> {
    let a = space.q() + 1.0;
    match p {
        Profile::Gaussian => Box::new(|r: f64| (-r * r).exp()),
        Profile::Sech => Box::new(move |r: f64| r.cosh().powf(-a)),
        Profile::Bump => Box::new(bump),
        Profile::Zero => Box::new(|_| 0.0),
    }
}

fn solver_transform_of(cfg: &RunConfig, space: SpaceParams, t_max: f64) -> Result<SphericalTransform> {
    if cfg.rmax.is_none() && cfg.dr.is_none() && cfg.lmax.is_none() && cfg.dlam.is_none() {
        return ws::solver_transform(space, t_max);
    }
    let rg = Grid::gauss(0.0, cfg.rmax.unwrap_or(t_max + 12.0), cfg.dr.unwrap_or(0.25));
    let lg = Grid::gauss(0.0, cfg.lmax.unwrap_or(16.0), cfg.dlam.unwrap_or(0.25));
    SphericalTransform::new(space, rg, lg)
}

fn solve_linear(c: &Common, cmd: &SolveCmd) -> Result<Outcome> {
    let SolveCmd::Linear { t_max, nt, f, g, amp, stride, ensemble, inv_p, inv_q, sigma } = *cmd else { unreachable!() };
    let cfg = resolve(
        c,
        "solve linear",
        json!({ "t_max": t_max, "nt": nt, "f": format!("{f:?}").to_lowercase(), "g": format!("{g:?}").to_lowercase(), "amp": amp,
                "stride": stride, "ensemble": ensemble, "inv_p": inv_p, "inv_q": inv_q, "sigma": sigma }),
    )?;
    let s = space_of(&cfg)?;
    if !(t_max > 0.0) || stride == 0 {
        return Err(Error::Invalid("need T > 0 and stride ≥ 1".into()));
    }
    let tr = solver_transform_of(&cfg, s, t_max)?;
    let (pf, pg) = (profile_fn(f, &s), profile_fn(g, &s));
    let fh = tr.forward(&RadialProfile::from_fn(s, tr.rgrid.clone(), |r| amp * pf(r))?)?;
    let gh = tr.forward(&RadialProfile::from_fn(s, tr.rgrid.clone(), |r| amp * pg(r))?)?;
    let nt = nt.unwrap_or((10.0 * t_max).ceil() as usize).max(1);
    // only the time grid and the monitoring pair matter for the free flow
    let scfg = SolveConfig { gamma: 2.0, nonlin: Nonlinearity::FocusingPower, t_max, nt, picard_max: 1, inv_p, inv_q, sigma, tol: 1e-8, coupling: 0.0 };
    let times = scfg.times();
    let states: Vec<ws::WaveState> = times.iter().map(|&t| ws::linear_propagate(&s, &fh, &gh, t)).collect::<Result<_>>()?;
    let e0 = ws::energy(&s, &states[0]);
    let drift = states.iter().map(|st| (ws::energy(&s, st) - e0).abs()).fold(0.0, f64::max) / e0.max(f64::MIN_POSITIVE);
    let phys = ws::linear_trajectory(&tr, &fh, &gh, &scfg)?;
    let mut ratios = Vec::new();
    if ensemble > 0 {
        let pair = AdmissiblePair::new(s.n, inv_p, inv_q)?;
        let setup = StrichartzSetup { pair, pair_tilde: pair, sigma, sigma_tilde: sigma };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..ensemble {
            let (a, b, v) = (rng.gen_range(1e-3..1e-2), rng.gen_range(0.5..2.0), rng.gen_range(-1e-2..1e-2));
            let fe = tr.forward(&RadialProfile::from_fn(s, tr.rgrid.clone(), |r| a * (-b * r * r).exp())?)?;
            let ge = tr.forward(&RadialProfile::from_fn(s, tr.rgrid.clone(), |r| v * (-r * r).exp())?)?;
            let ph = ws::linear_trajectory(&tr, &fe, &ge, &scfg)?;
            ratios.push(ws::strichartz_ratio(&tr, &ph, scfg.dt(), &fe, &ge, None, &setup)?);
        }
    }
    println!("energy {e0:.12e}, max relative drift {drift:.2e} over [0, {t_max}]");
    if !ratios.is_empty() {
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        println!("Strichartz ratio over {} Gaussians: [{lo:.4e}, {hi:.4e}], spread {:.2}", ratios.len(), hi / lo);
    }
    let mut rep = Report::new(&cfg, &s.tag(), &[("T", param(t_max)), ("f", format!("{f:?}").to_lowercase()), ("g", format!("{g:?}").to_lowercase()), ("amp", param(amp))])?;
    let w = rep.csv(None, &[("space", s.tag()), ("dt", format!("{:e}", scfg.dt())), ("stride", stride.to_string())])?;
    ws::write_physical_csv(w, &times, &tr.rgrid, &phys, stride)?;
    rep.json(&json!({ "energy": e0, "max_relative_drift": drift, "strichartz_ratios": ratios, "seed": cfg.seed }))?;
    done(rep, &cfg)?;
    Ok(if drift > 1e-10 { Outcome::Fail(format!("energy drift {drift:.2e} > 1e-10")) } else { Outcome::Pass })
}

fn solve_nlw(c: &Common, cmd: &SolveCmd) -> Result<Outcome> {
    let SolveCmd::Nlw { gamma, sigma, t_max, nt, f, g, amp, nonlin, coupling, picard_max, tol, stride } = *cmd else { unreachable!() };
    let cfg = resolve(
        c,
        "solve nlw",
        json!({ "gamma": gamma, "sigma": sigma, "t_max": t_max, "nt": nt, "f": format!("{f:?}").to_lowercase(), "g": format!("{g:?}").to_lowercase(),
                "amp": amp, "nonlin": format!("{nonlin:?}").to_lowercase(), "coupling": coupling, "picard_max": picard_max, "tol": tol, "stride": stride }),
    )?;
    let s = space_of(&cfg)?;
    if stride == 0 {
        return Err(Error::Invalid("stride must be ≥ 1".into()));
    }
    let mut scfg = SolveConfig::from_exponents(s.n, gamma, sigma, t_max)?;
    scfg.nonlin = match nonlin {
        NonlinArg::Odd => Nonlinearity::FocusingPower,
        NonlinArg::Abs => Nonlinearity::AbsPower,
    };
    if let Some(nt) = nt {
        scfg.nt = nt;
    }
    scfg.coupling = coupling;
    scfg.picard_max = picard_max;
    scfg.tol = tol;
    scfg.validate(s.n)?;
    let tr = solver_transform_of(&cfg, s, t_max)?;
    let (pf, pg) = (profile_fn(f, &s), profile_fn(g, &s));
    let fp = RadialProfile::from_fn(s, tr.rgrid.clone(), |r| amp * pf(r))?;
    let gp = RadialProfile::from_fn(s, tr.rgrid.clone(), |r| amp * pg(r))?;
    let res = ws::picard_solve(&tr, &fp, &gp, &scfg)?;
    let d = &res.diagnostics;
    println!("exponents 1/p = {:.6}, 1/q = {:.6}", scfg.inv_p, scfg.inv_q);
    println!("iterations {}, converged {}, blow-up suspected {}", d.increments.len(), d.converged, d.blow_up_suspected);
    println!("contraction ratios {:?}", d.contraction_ratios);
    println!("X-norm {:.6e}, residual {:.2e}, spectral tail {:.2e}", res.x_norm.total(), d.residual, d.spectral_tail);
    let params = [("gamma", param(gamma)), ("sigma", param(sigma)), ("T", param(t_max)), ("amp", param(amp))];
    let mut rep = Report::new(&cfg, &s.tag(), &params)?;
    let w = rep.csv(None, &[("space", s.tag()), ("dt", format!("{:e}", scfg.dt())), ("stride", stride.to_string())])?;
    ws::write_physical_csv(w, &scfg.times(), &tr.rgrid, &res.physical, stride)?;
    let w = rep.csv(Some("spectral"), &[("space", s.tag())])?;
    ws::write_spectral_csv(w, &res.trajectory, stride)?;
    rep.json(&json!({ "solve_config": scfg, "x_norm": res.x_norm, "diagnostics": d }))?;
    done(rep, &cfg)?;
    let mut problems = Vec::new();
    if !d.converged {
        problems.push(format!("Picard iteration did not converge (blow-up suspected: {})", d.blow_up_suspected));
    }
    if d.spectral_tail > 1e-6 {
        problems.push(format!("spectral tail {:.2e} > 1e-6", d.spectral_tail));
    }
    Ok(if problems.is_empty() { Outcome::Pass } else { Outcome::Fail(problems.join("; ")) })
}

fn appendix_verify(c: &Common, nu: f64, zetas: &[f64], m_order: u32) -> Result<Outcome> {
    let cfg = resolve(c, "appendixa verify", json!({ "nu": nu, "zeta": zetas, "m_order": m_order }))?;
    let decay = tf::compact_decay_check(nu, 0.1)?;
    let log = tf::log_growth_check()?;
    let scan = tf::boundary_scan(m_order, zetas)?;
    println!("compact symbol λ^{nu}: slope {:.4} (expected {:.4}) {}", decay.slope, decay.expected_slope, verdict(decay.passed));
    println!("order −1 symbol: |k| ≈ {:.4}·log(1/x), power slope {:.3} {}", log.log_coefficient, log.power_slope, verdict(log.passed));
    for (z, b, r) in &scan.bounds {
        println!("ζ = {z}: sup |∂^{m_order} k| = {b:.4e}, /(1+ζ²) = {r:.4e}");
    }
    println!("boundary scan {}", verdict(scan.passed));
    let mut rep = Report::new(&cfg, "1d", &[("nu", param(nu)), ("m", m_order.to_string())])?;
    let mut w = rep.csv(None, &[])?;
    writeln!(w, "check,value,expected,status")?;
    writeln!(w, "decay_slope,{:e},{:e},{}", decay.slope, decay.expected_slope, verdict(decay.passed))?;
    writeln!(w, "log_coefficient,{:e},,{}", log.log_coefficient, verdict(log.passed))?;
    for (z, b, _) in &scan.bounds {
        writeln!(w, "boundary_bound_zeta{},{:e},{:e},{}", param(*z), b, 1.0 + z * z, verdict(scan.passed))?;
    }
    w.flush()?;
    drop(w);
    rep.json(&json!({ "decay": decay, "log_growth": log, "boundary": scan }))?;
    done(rep, &cfg)?;
    let mut failed = Vec::new();
    for (ok, name) in [(decay.passed, "decay slope"), (log.passed, "logarithmic growth"), (scan.passed, "boundary scan")] {
        if !ok {
            failed.push(name);
        }
    }
    Ok(if failed.is_empty() { Outcome::Pass } else { Outcome::Fail(failed.join(", ")) })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}
