//! Free shifted wave flow: energy conservation and the Strichartz ratio.
use drwave::strichartz::AdmissiblePair;
use drwave::transform::RadialProfile;
use drwave::wavesolver::*;
use drwave::SpaceParams;

fn main() -> drwave::Result<()> {
    let s = SpaceParams::new(2, 1)?;
    let t_max = 20.0;
    let tr = solver_transform(s, t_max)?;
    let fh = tr.forward(&RadialProfile::from_fn(s, tr.rgrid.clone(), |r| (-r * r).exp())?)?;
    let gh = tr.forward(&RadialProfile::from_fn(s, tr.rgrid.clone(), |r| 0.5 * (-2.0 * r * r).exp())?)?;
    let e0 = energy(&s, &linear_propagate(&s, &fh, &gh, 0.0)?);
    for t in [1.0, 5.0, 20.0] {
        let st = linear_propagate(&s, &fh, &gh, t)?;
        println!("t={t:<5} E={:.14e} (drift {:.1e})", energy(&s, &st), (energy(&s, &st) - e0).abs() / e0);
    }
    let pair = AdmissiblePair::new(s.n, 0.275, 0.4)?;
    let cfg = SolveConfig { gamma: 2.0, nonlin: Nonlinearity::FocusingPower, t_max, nt: 200, picard_max: 1, inv_p: 0.275, inv_q: 0.4, sigma: 0.3, tol: 1e-8, coupling: 0.0 };
    let phys = linear_trajectory(&tr, &fh, &gh, &cfg)?;
    let setup = StrichartzSetup { pair, pair_tilde: pair, sigma: 0.3, sigma_tilde: 0.3 };
    println!("Strichartz ratio {:.4}", strichartz_ratio(&tr, &phys, cfg.dt(), &fh, &gh, None, &setup)?);
    Ok(())
}
