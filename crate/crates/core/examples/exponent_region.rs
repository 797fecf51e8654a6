//! The (γ, σ) regularity curve and exponent quadruples for n = 4 and n = 6.
use drwave::strichartz::{curve_samples, find_exponents, thresholds};

fn main() -> drwave::Result<()> {
    for n in [4, 6] {
        let th = thresholds(n)?;
        println!("n={n}: γ1={:.4} γ2={:.4} γ_conf={:.4} γ∞={:.4}", th.gamma1, th.gamma2, th.gamma_conf, th.gamma_inf);
        for (g, b) in curve_samples(n, 0.25)? {
            println!("  γ={g:.2}  σ > {:.4}  {:?}", b.sigma_min, b.case);
        }
    }
    for (n, gamma, sigma) in [(4, 2.0, 0.3), (4, 2.0, 0.2), (6, 1.5, 0.6)] {
        match find_exponents(n, gamma, sigma) {
            Ok(sol) => println!(
                "n={n} γ={gamma} σ={sigma}: 1/p={:.4} 1/q={:.4} 1/p~={:.4} 1/q~={:.4}",
                sol.inv_p, sol.inv_q, sol.inv_ptilde, sol.inv_qtilde
            ),
            Err(inf) => println!("n={n} γ={gamma} σ={sigma}: infeasible — {inf}"),
        }
    }
    Ok(())
}
