use drkernel::kernels::{
    heat_residual, kernel_grid, kernel_h, lower_bound_envelope, schrodinger_kernel, sigma_kernel,
    upper_bound_envelope, KernelEvaluator, KernelMethod, Regime,
};
use drkernel::{ComplexTime, Execution, GroupPoint, SpaceParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn spaces() -> [SpaceParams; 4] {
    SpaceParams::reference_spaces()
}

#[test]
fn methods_follow_parity_of_k() {
    let even = kernel_h(&SpaceParams::real_hyperbolic(), ComplexTime::real(1.0).unwrap(), 1.0).unwrap();
    assert_eq!(even.method, KernelMethod::ClosedForm);
    let odd = kernel_h(&SpaceParams::heisenberg(1).unwrap(), ComplexTime::real(1.0).unwrap(), 1.0).unwrap();
    assert_ne!(odd.method, KernelMethod::ClosedForm);
}

#[test]
fn heat_kernel_is_positive_for_real_time() {
    let p = SpaceParams::heisenberg(1).unwrap();
    for t in [0.05, 0.5, 3.0, 40.0] {
        for r in [1e-3, 0.2, 1.0, 4.0, 15.0, 40.0] {
            let v = kernel_h(&p, ComplexTime::real(t).unwrap(), r).unwrap();
            assert!(v.value().re > 0.0 || v.ln_abs() < -700.0, "t={t} r={r}");
            assert!(v.scaled().arg().abs() < 1e-9, "t={t} r={r}");
        }
    }
}

#[test]
fn heat_kernel_decreases_in_r() {
    for p in spaces() {
        let tau = ComplexTime::real(0.7).unwrap();
        let ln: Vec<f64> = (1..60).map(|i| kernel_h(&p, tau, 0.25 * i as f64).unwrap().ln_abs()).collect();
        assert!(ln.windows(2).all(|w| w[1] < w[0]), "{p}");
    }
}

#[test]
fn heat_equation_holds() {
    for p in spaces() {
        for (t, r) in [(0.6, 0.7), (1.5, 3.0), (1.0, 8.0)] {
            let tau = ComplexTime::new(Complex64::new(t, 0.3)).unwrap();
            assert!(heat_residual(&p, tau, r, 0.03).unwrap() < 1e-5, "{p} t={t} r={r}");
        }
    }
}

#[test]
fn radii_below_floor_are_refused() {
    let p = SpaceParams::new(4, 3).unwrap();
    let tau = ComplexTime::real(1.0).unwrap();
    assert!(kernel_h(&p, tau, 1e-4).is_err());
    let ev = KernelEvaluator::new(p).with_r_min(1e-5);
    assert!(ev.eval(tau, 1e-4).is_ok());
}

#[test]
fn sequential_and_parallel_grids_agree_bitwise() {
    let p = SpaceParams::heisenberg(1).unwrap();
    let taus: Vec<ComplexTime> = [(0.3, 0.0), (1.0, 1.0), (0.0, 2.0)]
        .iter()
        .map(|&(a, b)| ComplexTime::new(Complex64::new(a, b)).unwrap())
        .collect();
    let radii = [0.01, 0.5, 2.0, 9.0];
    let a = kernel_grid(&p, &taus, &radii, Execution::Parallel);
    let b = kernel_grid(&p, &taus, &radii, Execution::Sequential);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.as_ref().unwrap().value(), y.as_ref().unwrap().value());
    }
}

#[test]
fn sigma_on_the_axis() {
    // On (0, 0, a) the distance is |ln a| and δ^{1/2} = a^{-Q/2}.
    let p = SpaceParams::heisenberg(1).unwrap();
    let q = p.homogeneous_dim();
    for a in [0.5, 2.0, 1e-3] {
        let x = GroupPoint::on_axis(&p, a).unwrap();
        let s = schrodinger_kernel(&p, 1.0, a.ln().abs()).unwrap().value();
        let want = s * a.powf(-0.5 * q) * Complex64::new(0.0, 0.25 * q * q).exp();
        let got = sigma_kernel(&p, 1.0, &x).unwrap().to_complex();
        assert!((got - want).norm() < 1e-12 * want.norm(), "a={a}");
    }
}

#[test]
fn envelopes() {
    let p = SpaceParams::heisenberg(1).unwrap();
    let small = upper_bound_envelope(&p, ComplexTime::real(0.5).unwrap(), 2.0);
    let large = upper_bound_envelope(&p, ComplexTime::real(10.0).unwrap(), 2.0);
    assert_eq!(small.regime, Regime::Small);
    assert_eq!(large.regime, Regime::Large);
    assert!(lower_bound_envelope(&p, 1.0, 4.0, 4.0).is_err());
    assert!(lower_bound_envelope(&p, 0.0, 10.0, 4.0).is_err());
    let v = lower_bound_envelope(&p, 1.0, 6.0, 4.0).unwrap();
    assert!((v - (1.5 * 6f64.ln() - 6.0)).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conjugate_time_gives_conjugate_kernel(
        re in 0.0..3.0f64,
        im in 0.05..3.0f64,
        r in 0.01..12.0f64,
        which in 0usize..4,
    ) {
        let p = spaces()[which];
        let a = kernel_h(&p, ComplexTime::new(Complex64::new(re, im)).unwrap(), r).unwrap();
        let b = kernel_h(&p, ComplexTime::new(Complex64::new(re, -im)).unwrap(), r).unwrap();
        let (x, y) = (a.scaled(), b.scaled());
        prop_assert!((x.ln_abs() - y.ln_abs()).abs() < 1e-9);
        let phase = (x.arg() + y.arg()).rem_euclid(2.0 * std::f64::consts::PI);
        prop_assert!(phase.min(2.0 * std::f64::consts::PI - phase) < 1e-8);
    }

    /// `|s_t(r)|` stays below the upper envelope; the sweep constant is about 0.2.
    #[test]
    fn schrodinger_kernel_below_envelope(t in 0.01..50.0f64, r in 0.001..30.0f64) {
        let p = SpaceParams::heisenberg(1).unwrap();
        let tau = ComplexTime::imaginary(t).unwrap();
        let v = kernel_h(&p, tau, r).unwrap();
        let env = upper_bound_envelope(&p, tau, r);
        prop_assert!(v.ln_abs().is_finite());
        prop_assert!(v.ln_abs() - env.ln_value < 0.0);
    }
}
