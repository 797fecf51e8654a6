//! Spherical transform of the test family: round trip, Plancherel constant
//! and the inverse through the Abel transform.
use drwave::transform::{abel_inverse, test_family, CosineInverse, RadialProfile, SphericalTransform};
use drwave::SpaceParams;

fn main() -> drwave::Result<()> {
    let s = SpaceParams::new(2, 1)?;
    let tr = SphericalTransform::with_defaults(s)?;
    println!("c_S calibrated {:.12}", tr.c_s);
    for (name, f) in test_family(&s) {
        let p = RadialProfile::from_fn(s, tr.rgrid.clone(), &f)?;
        let hf = tr.forward(&p)?;
        let back = tr.inverse(&hf)?;
        let g = CosineInverse::new(&hf);
        let abel = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| Ok((abel_inverse(&s, &g, r)? - f(r)).abs()))
            .collect::<drwave::Result<Vec<f64>>>()?;
        println!(
            "{name:<10} roundtrip {:.2e}  ‖f‖²/‖Hf‖² {:.10}  Abel errors {:?}",
            tr.relative_l2(&back, &p),
            p.l2_squared() / hf.plancherel_mass(),
            abel.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
