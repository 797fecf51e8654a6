use drwave::kernels::*;
use drwave::spherical::phi_zero;
use drwave::SpaceParams;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

/// ∫_0^2 χ₀|c|^{−2}λ^{−τ}(λ²+Q̃²/4)^{(τ−σ)/2}φ_λ(r)e^{itλ}dλ with φ_λ from ₂F₁
/// and c from its Gamma-function formula, at 30 digits:
/// ((m, k), σ, τ, t, r, value).
const W0: [((i64, i64), f64, f64, f64, f64, Complex64); 5] = [
    ((2, 1), 1.0, 0.0, 1.0, 0.25, Complex64::new(0.17453679609831576, 0.48470975986743335)),
    ((2, 1), 1.0, 0.0, 4.0, 3.25, Complex64::new(-0.019421935302208711, 0.0053585756046451949)),
    ((2, 1), 1.25, 1.0, 2.0, 1.0, Complex64::new(-0.29083675864636771, 0.35832826025201155)),
    ((2, 2), 1.0, 0.0, 1.0, 0.25, Complex64::new(0.024777204419681171, 0.083494757605183394)),
    ((2, 2), 1.0, 0.5, 8.0, 5.0, Complex64::new(6.5433452242271922e-5, -1.1595049596284192e-5)),
];

#[test]
fn low_kernel_matches_independent_quadrature() {
    for ((m, k), sigma, tau, t, r, want) in W0 {
        let s = SpaceParams::new(m, k).unwrap();
        let radii = [0.0, r];
        let got = LowFrequencyKernel::new(s, &radii, t).unwrap().eval(&KernelRequest::real(sigma, tau, t, KernelPart::Low).unwrap()).unwrap()[1];
        assert!((got - want).norm() < 1e-8 * want.norm(), "({m},{k}) σ={sigma} τ={tau} t={t} r={r}: {got}");
        let swept = low_kernel_sweep(&s, &radii, &[KernelRequest::real(sigma, tau, t, KernelPart::Low).unwrap()]).unwrap();
        assert!((swept[0][1] - want).norm() < 1e-8 * want.norm());
    }
}

#[test]
fn table_rejects_times_beyond_its_range() {
    let s = SpaceParams::new(2, 1).unwrap();
    let k = LowFrequencyKernel::new(s, &[0.0, 1.0], 2.0).unwrap();
    assert!(k.eval(&KernelRequest::real(1.0, 0.0, 3.0, KernelPart::Low).unwrap()).is_err());
    assert!(LowFrequencyKernel::new(s, &[1.0, 0.5], 2.0).is_err());
}

#[test]
fn outside_the_cone_envelope_holds_and_control_flags() {
    let s = SpaceParams::new(2, 1).unwrap();
    let ok = run_scan(&s, &standard_scan(&s, Regime::LowOutside, 0.0).unwrap()).unwrap();
    assert!(!ok.diverges && ok.fitted_constant.is_finite(), "{ok:?}");
    let bad = run_scan(&s, &negative_control(&s, Regime::LowOutside, 0.0).unwrap()).unwrap();
    assert!(bad.diverges, "{bad:?}");
}

#[test]
fn high_part_far_from_the_origin_decays() {
    let s = SpaceParams::new(2, 1).unwrap();
    let ok = run_scan(&s, &standard_scan(&s, Regime::HighSmallTimeFar, 0.0).unwrap()).unwrap();
    assert!(!ok.diverges, "{ok:?}");
    let bad = run_scan(&s, &negative_control(&s, Regime::HighSmallTimeFar, 0.0).unwrap()).unwrap();
    assert!(bad.diverges, "{bad:?}");
}

#[test]
fn high_part_rejects_sigma_beyond_the_endpoint() {
    let s = SpaceParams::new(2, 1).unwrap();
    let req = KernelRequest::real(3.0, 0.0, 1.0, KernelPart::HighRegularized).unwrap();
    assert!(kernel_w_inf(&s, &req, &[1.0]).is_err());
}

fn shared() -> &'static (SpaceParams, Vec<f64>, LowFrequencyKernel) {
    static K: OnceLock<(SpaceParams, Vec<f64>, LowFrequencyKernel)> = OnceLock::new();
    K.get_or_init(|| {
        let s = SpaceParams::new(2, 1).unwrap();
        let radii: Vec<f64> = (0..=24).map(|i| 0.5 * i as f64).collect();
        let k = LowFrequencyKernel::new(s, &radii, 10.0).unwrap();
        (s, radii, k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversing_time_conjugates_the_low_kernel(t in 0.05f64..10.0, sigma in 0.0f64..2.0, tau in 0.0f64..1.9) {
        let (_, _, k) = shared();
        let a = k.eval(&KernelRequest::real(sigma, tau, t, KernelPart::Low).unwrap()).unwrap();
        let b = k.eval(&KernelRequest::real(sigma, tau, -t, KernelPart::Low).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y.conj()).norm() <= 1e-13 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn low_kernel_is_dominated_by_phi_zero(t in 0.05f64..10.0, sigma in 0.0f64..2.0) {
        // |φ_λ| ≤ φ_0 gives |w_t^0(r)| ≤ φ_0(r)·∫χ₀|c|^{−2}(λ²+Q̃²/4)^{−σ/2}dλ
        let (s, radii, k) = shared();
        let w = k.eval(&KernelRequest::real(sigma, 0.0, t, KernelPart::Low).unwrap()).unwrap();
        let mass = k.eval(&KernelRequest::real(sigma, 0.0, 1e-12, KernelPart::Low).unwrap()).unwrap()[0].re;
        for (v, &r) in w.iter().zip(radii) {
            prop_assert!(v.norm() <= phi_zero(s, r) * mass * (1.0 + 1e-9));
        }
    }
}
