//! φ_λ(r) from the series and the ODE branches, their agreement in the
//! overlap, and the λ = 0 function.
use drwave::spherical::{branch_agreement, phi_zero, spherical_function, spherical_ode, spherical_series};
use drwave::SpaceParams;

fn main() -> drwave::Result<()> {
    let s = SpaceParams::new(2, 1)?;
    println!("{:>6} {:>6} {:>22} {:>22} {:>10}", "λ", "r", "series", "ode", "|diff|");
    // the series branch carries c(±λ), which has a pole at λ = 0
    for l in [0.25, 0.5, 1.0, 3.0, 10.0] {
        for r in [1.2, 1.6, 2.0] {
            let (a, b) = (spherical_series(&s, l, r)?, spherical_ode(&s, l, r)?);
            println!("{l:>6} {r:>6} {a:>22.15e} {b:>22.15e} {:>10.2e}", (a - b).abs());
        }
        println!("  worst overlap disagreement at λ={l}: {:.2e}", branch_agreement(&s, l)?);
    }
    for r in [0.0, 1.0, 5.0, 10.0] {
        println!("φ_0({r}) = {:.10e}  φ_0.5({r}) = {:.10e}", phi_zero(&s, r), spherical_function(&s, 0.5, r)?);
    }
    Ok(())
}
