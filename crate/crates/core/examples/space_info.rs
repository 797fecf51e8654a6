//! Geometry of a few Damek–Ricci spaces: dimensions, volume density, the
//! potential ω and the Plancherel constant.
use drwave::space::{density, omega, omega_coeffs, omega_growth_constant};
use drwave::spherical::{c_function, gamma_bound, plancherel_density};
use drwave::transform::{calibrated_cs, cs_closed_form};
use drwave::SpaceParams;
use num_complex::Complex64;

fn main() -> drwave::Result<()> {
    for (m, k) in [(2, 1), (4, 1), (2, 2), (4, 3)] {
        let s = SpaceParams::new(m, k)?;
        let gb = gamma_bound(&s);
        println!("m={m} k={k}: n={} Q={} Q~={}  c_S={:.6}  |Γ_l|(1+|λ|) ≤ {:.3}·l^{:.3}", s.n, s.q(), s.qtilde, cs_closed_form(&s), gb.c, gb.d);
        let w = omega_coeffs(&s, 6)?;
        print!("  ω_j:");
        for j in 1..=6 {
            print!(" {:+.4}", w.get(j));
        }
        println!("  (|ω_j| growth constant {:.3})", omega_growth_constant(&s));
        for r in [0.5, 1.0, 4.0] {
            println!("  r={r}: V={:.5e} ω={:+.5e}", density(&s, r)?, omega(&s, r)?);
        }
        for l in [0.5, 2.0] {
            let c = c_function(&s, Complex64::new(l, 0.0))?;
            println!("  λ={l}: |c(λ)|^-2 = {:.5e} (c = {:.4}{:+.4}i)", plancherel_density(&s, l), c.re, c.im);
        }
    }
    // the closed form is confirmed by a numerical Plancherel calibration
    let s = SpaceParams::new(2, 1)?;
    println!("(2,1) calibrated c_S = {:.12}, closed form {:.12}", calibrated_cs(&s)?, cs_closed_form(&s));
    Ok(())
}
