//! Low- and high-frequency pieces of the wave kernel at a few times.
use drwave::kernels::{kernel_w_inf, KernelPart, KernelRequest, LowFrequencyKernel};
use drwave::SpaceParams;
use num_complex::Complex64;

fn main() -> drwave::Result<()> {
    let s = SpaceParams::new(2, 1)?;
    let radii: Vec<f64> = (0..=8).map(|i| 0.25 + i as f64).collect();
    let low = LowFrequencyKernel::new(s, &radii, 16.0)?;
    for t in [1.0, 4.0, 16.0] {
        let v = low.eval(&KernelRequest::real(1.0, 0.0, t, KernelPart::Low)?)?;
        println!("w0  t={t:<4} {}", v.iter().map(|z| format!("{:+.3e}", z.re)).collect::<Vec<_>>().join(" "));
    }
    // high part on the line Re σ = (n+1)/2, away from the light cone
    let sigma = Complex64::new((s.nf() + 1.0) / 2.0, 1.0);
    for t in [0.5, 2.0] {
        let k = kernel_w_inf(&s, &KernelRequest::new(sigma, 0.0, t, KernelPart::HighRegularized)?, &radii)?;
        println!("w∞  t={t:<4} {}", k.profile.values.iter().map(|z| format!("{:.3e}", z.norm())).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
