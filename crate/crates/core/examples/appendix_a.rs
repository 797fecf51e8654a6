//! Decay and boundedness checks for one-dimensional symbol Fourier integrals.
use drwave::transform::{boundary_scan, compact_decay_check, log_growth_check};

fn main() -> drwave::Result<()> {
    let d = compact_decay_check(0.5, 0.1)?;
    println!("χ₀λ^½: slope {:.4} (expected {:.2})", d.slope, d.expected_slope);
    let g = log_growth_check()?;
    println!("order −1: |k| ≈ {:.4}·log(1/x) + c, power slope {:.3}, line deviation {:.1e}", g.log_coefficient, g.power_slope, g.max_line_deviation);
    for m in [0, 1] {
        let s = boundary_scan(m, &[0.0, 1.0, 2.0, 4.0, 8.0])?;
        for (z, b, r) in s.bounds {
            println!("m = {m}, ζ = {z}: sup |∂^m k| = {b:.4}, /(1+ζ²) = {r:.4}");
        }
    }
    Ok(())
}
