//! Small- and large-time decay rates of the L^{q'} → L^q kernel bound.
use drwave::kernels::dispersive_decay_fit;
use drwave::SpaceParams;

fn main() -> drwave::Result<()> {
    let s = SpaceParams::new(2, 1)?;
    let q = 4.0;
    let fit = dispersive_decay_fit(&s, q, 1.25, 1.0, &[0.05, 0.1, 0.2, 0.5, 32.0, 64.0, 128.0, 256.0])?;
    let theta = 1.0 - 2.0 / q;
    println!("small t: slope {:.4} ± {:.4}  (power law −(n−1)/2·θ = {:.4})", fit.small_t.slope, fit.small_t.half_width, -(s.nf() - 1.0) / 2.0 * theta);
    println!("large t: slope {:.4} ± {:.4}  (t^{{-3/2}}·t^{{τ-3/2}} = −2)", fit.large_t.slope, fit.large_t.half_width);
    for (t, v) in fit.small_samples.iter().chain(&fit.large_samples) {
        println!("  t={t:<6} {v:.4e}");
    }
    Ok(())
}
