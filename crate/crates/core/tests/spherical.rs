use drkernel::numeric::ode::OdeConfig;
use drkernel::spherical::{
    basis, c_function, c_function_in_window, phi, spherical_transform, SphericalConfig,
};
use drkernel::{Error, RadialFunction, SpaceParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn heis() -> SpaceParams {
    SpaceParams::heisenberg(1).unwrap()
}

#[test]
fn real_hyperbolic_closed_form() {
    let p = SpaceParams::real_hyperbolic();
    let radii: Vec<f64> = (0..=80).map(|i| 0.25 * i as f64).collect();
    for s in [0.1, 1.0, 4.0] {
        let sol = phi(&p, s, &radii, &OdeConfig::default()).unwrap();
        for (r, v) in radii.iter().zip(&sol.phi) {
            let want = if *r == 0.0 { 1.0 } else { (s * r).sin() / (2.0 * s * (0.5 * r).sinh()) };
            assert!((v - want).abs() < 1e-9, "s={s} r={r}: {v} vs {want}");
        }
    }
}

#[test]
fn real_hyperbolic_c_function() {
    // φ_s ~ e^{-r/2} (e^{isr} - e^{-isr}) / (2is), so c₊ = 1/(2is) and |c|^{-2} = 4s².
    let p = SpaceParams::real_hyperbolic();
    for s in [0.5, 2.0, 5.0] {
        let c = c_function(&p, s).unwrap();
        assert!((c.c_plus - Complex64::new(0.0, -0.5 / s)).norm() < 1e-9 / s);
        assert!((c.plancherel_density / (4.0 * s * s) - 1.0).abs() < 1e-8);
        assert!(c.reliable);
    }
}

#[test]
fn c_minus_is_conjugate_of_c_plus() {
    for p in SpaceParams::reference_spaces() {
        for s in [0.3, 1.0, 6.0] {
            let c = c_function(&p, s).unwrap();
            assert!((c.c_minus - c.c_plus.conj()).norm() < 1e-8 * c.c_plus.norm(), "{p} s={s}");
        }
    }
}

#[test]
fn fit_residual_shrinks_further_out() {
    let p = SpaceParams::new(4, 3).unwrap();
    let cfg = SphericalConfig::default();
    let residual = |w| c_function_in_window(&p, 0.7, w, &cfg).unwrap().residual;
    let near = residual((3.0, 8.0));
    let mid = residual((10.0, 20.0));
    let far = residual((25.0, 40.0));
    assert!(near > mid && mid > far, "{near:e} {mid:e} {far:e}");
}

#[test]
fn tiny_spectral_parameter_is_refused() {
    match c_function(&heis(), 1e-9) {
        Err(Error::IllConditioned { .. }) => {}
        other => panic!("expected IllConditioned, got {other:?}"),
    }
    assert!(phi(&heis(), -1.0, &[1.0], &OdeConfig::default()).is_err());
    assert!(phi(&heis(), 1.0, &[2.0, 1.0], &OdeConfig::default()).is_err());
}

#[test]
fn single_point_transform_matches_basis() {
    // Two routes to ℋf: one ODE solve per s with its own Gauss rule, and the
    // precomputed basis applied to samples.
    let p = heis();
    let b = basis(&p).unwrap();
    let f = RadialFunction::gaussian(0.8);
    let spec = b.forward(&b.sample(&f));
    for (i, &s) in b.spectrum().iter().enumerate().step_by(37) {
        let direct = spherical_transform(&p, &f, s).unwrap();
        assert!((direct - spec[i]).norm() < 1e-9 * direct.norm().max(1e-3), "s={s}");
    }
}

#[test]
fn plancherel_identity() {
    for p in SpaceParams::reference_spaces() {
        let b = basis(&p).unwrap();
        for width in [0.5, 2.0] {
            let f = b.sample(&RadialFunction::gaussian(width));
            let space = b.lq_norm(&f, 2.0);
            let spectral = b.spectral_l2_norm(&b.forward(&f));
            assert!((spectral / space - 1.0).abs() < 1e-6, "{p} width {width}: {spectral} vs {space}");
        }
    }
}

#[test]
fn round_trip_reproduces_samples() {
    let b = basis(&heis()).unwrap();
    let f = b.sample(&RadialFunction::gaussian(1.0));
    let back = b.inverse(&b.forward(&f));
    let worst = f.iter().zip(&back).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst:e}");
}

#[test]
fn calibration_is_stable_and_matches_frozen_constants() {
    use std::f64::consts::PI;
    let frozen = [0.5 / PI, 1.0 / PI, 2.0 / PI, 4.0 / PI];
    for (p, want) in SpaceParams::reference_spaces().iter().zip(frozen) {
        let b = basis(p).unwrap();
        let c1 = b.calibration().c_s;
        let c2 = b.calibrate(2.0).unwrap().c_s;
        assert!((c1 / want - 1.0).abs() < 1e-6, "{p}: {c1} vs {want}");
        assert!((c2 / c1 - 1.0).abs() < 1e-6, "{p}: {c2} vs {c1}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `φ_0` is positive and dominates every `|φ_s|`; `φ_s(0) = 1`.
    #[test]
    fn ground_spherical_function_dominates(s in 0.05..10.0f64, which in 0usize..4) {
        let p = SpaceParams::reference_spaces()[which];
        let radii: Vec<f64> = (0..=60).map(|i| 0.5 * i as f64).collect();
        let cfg = OdeConfig::default();
        let ground = phi(&p, 0.0, &radii, &cfg).unwrap();
        let sol = phi(&p, s, &radii, &cfg).unwrap();
        prop_assert!((sol.phi[0] - 1.0).abs() < 1e-12);
        for (a, g) in sol.phi.iter().zip(&ground.phi) {
            prop_assert!(*g > 0.0);
            prop_assert!(a.abs() <= g * (1.0 + 1e-8));
        }
    }
}
