//! Envelope scans of the wave-kernel pieces in every pointwise regime, plus
//! the negative controls (too-strong envelopes that must be flagged).
use drwave::kernels::*;
use drwave::SpaceParams;
use std::time::Instant;

fn main() -> drwave::Result<()> {
    let s = SpaceParams::new(2, 1)?;
    for regime in ALL_REGIMES {
        for spec in [standard_scan(&s, regime, 0.0)?, negative_control(&s, regime, 0.0)?] {
            let t0 = Instant::now();
            let rep = run_scan(&s, &spec)?;
            println!(
                "{:<36} max ratio {:.3e}  constant {:.3e}  tail slope {:+.2}  diverges {:<5}  ({:.1}s)",
                rep.region, rep.max_ratio, rep.fitted_constant, rep.tail_slope, rep.diverges, t0.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
