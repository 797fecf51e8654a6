use drwave::transform::*;
use drwave::SpaceParams;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn tr21() -> &'static SphericalTransform {
    static T: OnceLock<SphericalTransform> = OnceLock::new();
    T.get_or_init(|| SphericalTransform::with_defaults(SpaceParams::new(2, 1).unwrap()).unwrap())
}

fn tr22() -> &'static SphericalTransform {
    static T: OnceLock<SphericalTransform> = OnceLock::new();
    T.get_or_init(|| SphericalTransform::with_defaults(SpaceParams::new(2, 2).unwrap()).unwrap())
}

#[test]
fn roundtrip_and_plancherel_on_the_test_family() {
    for tr in [tr21(), tr22()] {
        let s = tr.space;
        // the calibrated constant is 2^{k−1}/π
        let want = 2f64.powi(s.k as i32 - 1) / PI;
        assert!((tr.c_s - want).abs() < 1e-10 * want, "{}: {}", s.tag(), tr.c_s);
        let mut ratios = Vec::new();
        for (name, f) in test_family(&s) {
            let p = RadialProfile::from_fn(s, tr.rgrid.clone(), &f).unwrap();
            let hf = tr.forward(&p).unwrap();
            let err = tr.relative_l2(&tr.inverse(&hf).unwrap(), &p);
            assert!(err < 1e-4, "{} {name}: {err:e}", s.tag());
            ratios.push(p.l2_squared() / hf.plancherel_mass());
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!((hi - lo) / tr.c_s < 1e-3);
    }
}

#[test]
fn abel_factorization_both_parities() {
    for tr in [tr21(), tr22()] {
        let s = tr.space;
        for (name, f) in test_family(&s) {
            let hf = tr.forward(&RadialProfile::from_fn(s, tr.rgrid.clone(), &f).unwrap()).unwrap();
            let g = CosineInverse::new(&hf);
            let (mut worst, mut scale) = (0.0f64, 0.0f64);
            for i in 0..=11 {
                let r = 0.5 + 0.5 * i as f64;
                worst = worst.max((abel_inverse(&s, &g, r).unwrap() - f(r)).abs());
                scale = scale.max(f(r).abs());
            }
            assert!(worst / scale < 1e-3, "{} {name}: {:e}", s.tag(), worst / scale);
        }
    }
}

#[test]
fn spectral_profiles_roundtrip_through_csv() {
    let tr = tr21();
    let hf = tr.forward(&RadialProfile::from_fn(tr.space, tr.rgrid.clone(), reference_gaussian).unwrap()).unwrap();
    let mut buf = Vec::new();
    hf.write_csv(&mut buf).unwrap();
    let back = SpectralProfile::read_csv(&buf[..]).unwrap();
    assert_eq!(back.values, hf.values);
    assert_eq!(back.grid.nodes, hf.grid.nodes);
}

#[test]
fn truncated_data_is_rejected() {
    let tr = tr21();
    // a slowly decaying profile leaves mass beyond the radial grid
    let p = RadialProfile::from_fn(tr.space, tr.rgrid.clone(), |r| (-0.5 * r).exp()).unwrap();
    assert!(tr.forward(&p).is_err());
}

#[test]
fn compact_symbol_decays_like_a_power() {
    let d = compact_decay_check(0.5, 0.1).unwrap();
    assert!(d.passed, "slope {}", d.slope);
    // ∫_0^2 χ₀(λ)λ^{1/2}e^{iλx}dλ at x = 10 and 50, 25-digit quadrature
    for (x, want) in [(10.0, Complex64::new(-0.0099382530537297787, 0.038002631360116847)), (50.0, Complex64::new(-0.0017607774716572662, 0.0017973079858206404))] {
        let b = FnSymbol {
            f: |mu: Complex64, _| Complex64::new(drwave::kernels::chi_cutoffs(mu.re).0 * mu.re.sqrt(), 0.0),
            order: 0.5,
            support: Support::HalfLine,
            cutoff: Some(2.0),
            analytic_from: 2.0,
        };
        let k = oscillatory_fourier(&b, x).unwrap();
        assert!((k - want).norm() < 1e-8 * want.norm(), "x = {x}: {k}");
    }
    // large x: |k| → Γ(3/2) x^{−3/2}
    let tail = d.samples.last().unwrap();
    assert!((tail.1 * tail.0.powf(1.5) / (0.5 * PI.sqrt()) - 1.0).abs() < 0.05);
}

#[test]
fn order_minus_one_symbol_grows_logarithmically() {
    let g = log_growth_check().unwrap();
    assert!(g.passed);
    // ∫_ℝ (1+λ²)^{−1/2} e^{iλx} dλ = 2K₀(|x|) ≈ 2 log(1/x) + const
    assert!((g.log_coefficient - 2.0).abs() < 1e-2, "{}", g.log_coefficient);
    let two_k0 = [(1e-4, 18.65254382690055), (1e-3, 14.047377601124763), (1e-2, 9.4424894603221899)];
    for (x, want) in two_k0 {
        let (_, k) = *g.samples.iter().min_by(|a, b| (a.0 - x).abs().partial_cmp(&(b.0 - x).abs()).unwrap()).unwrap();
        assert!((k / want - 1.0).abs() < 1e-6, "x = {x}: {k} vs {want}");
    }
}

#[test]
fn boundary_symbols_stay_bounded() {
    let scan = boundary_scan(1, &[1.0, 2.0, 4.0, 8.0]).unwrap();
    assert!(scan.passed, "{:?}", scan.bounds);
    assert!(scan.bounds.iter().all(|b| b.1 > 0.0 && b.1.is_finite()));
    assert!(boundary_scan(0, &[0.0, 1.0, 2.0]).unwrap().passed);
}

#[test]
fn abel_inverse_rejects_negative_radius() {
    let tr = tr21();
    let hf = tr.forward(&RadialProfile::from_fn(tr.space, tr.rgrid.clone(), reference_gaussian).unwrap()).unwrap();
    assert!(abel_inverse(&tr.space, &CosineInverse::new(&hf), -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn plancherel_holds_for_gaussians(a in 0.4f64..3.0, b in -0.5f64..0.5) {
        let tr = tr21();
        // smooth as a function on S: even in r
        let f = |r: f64| (-a * r * r).exp() * (1.0 + b * r * r);
        let p = RadialProfile::from_fn(tr.space, tr.rgrid.clone(), f).unwrap();
        let hf = tr.forward(&p).unwrap();
        prop_assert!((p.l2_squared() / hf.plancherel_mass() / tr.c_s - 1.0).abs() < 1e-6);
        prop_assert!(tr.relative_l2(&tr.inverse(&hf).unwrap(), &p) < 1e-4);
    }

    #[test]
    fn forward_transform_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let tr = tr22();
        let s = tr.space;
        let f1 = RadialProfile::from_fn(s, tr.rgrid.clone(), reference_gaussian).unwrap();
        let f2 = RadialProfile::from_fn(s, tr.rgrid.clone(), bump).unwrap();
        let mix = RadialProfile::from_fn(s, tr.rgrid.clone(), |r| a * reference_gaussian(r) + b * bump(r)).unwrap();
        let (h1, h2, hm) = (tr.forward(&f1).unwrap(), tr.forward(&f2).unwrap(), tr.forward(&mix).unwrap());
        let scale = h1.values.iter().chain(&h2.values).fold(0.0f64, |m, v| m.max(v.norm()));
        for ((x, y), z) in h1.values.iter().zip(&h2.values).zip(&hm.values) {
            prop_assert!((x * a + y * b - z).norm() <= 1e-12 * scale * (a.abs() + b.abs() + 1.0));
        }
    }
}
