//! Small-data Picard iteration for u_tt − (Δ + Q²/4)u = |u|^{γ−1}u, and a
//! large amplitude where the iteration is flagged.
use drwave::transform::RadialProfile;
use drwave::wavesolver::*;
use drwave::SpaceParams;

fn main() -> drwave::Result<()> {
    let s = SpaceParams::new(2, 1)?;
    let cfg = SolveConfig::from_exponents(s.n, 2.0, 0.3, 10.0)?;
    let tr = solver_transform(s, cfg.t_max)?;
    let zero = RadialProfile::from_fn(s, tr.rgrid.clone(), |_| 0.0)?;
    for amp in [1e-3, 1e-2, 10.0] {
        let f = RadialProfile::from_fn(s, tr.rgrid.clone(), |r| amp * (-r * r).exp())?;
        let res = picard_solve(&tr, &f, &zero, &cfg)?;
        let d = &res.diagnostics;
        println!(
            "amp {amp:<6} converged {:<5} blow-up {:<5} iterations {:>2}  X-norm {:.4e}  ratios {:?}",
            d.converged, d.blow_up_suspected, d.increments.len(), res.x_norm.total(), d.contraction_ratios.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
