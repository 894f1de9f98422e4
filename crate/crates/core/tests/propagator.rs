use drkernel::kernels::{kernel_function, kernel_h};
use drkernel::propagator::{
    apply_multiplier, evolve_distinguished, evolve_schrodinger, inhomogeneous_solution, is_admissible,
    mixed_norm_unchecked, strichartz_window_norm, AdmissiblePair, Multiplier, RadialSamples,
};
use drkernel::spherical::{basis, SphericalBasis};
use drkernel::{ComplexTime, Execution, GroupPoint, RadialFunction, SpaceParams};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::Arc;

fn heis_basis() -> Arc<SphericalBasis> {
    basis(&SpaceParams::heisenberg(1).unwrap()).unwrap()
}

fn gaussian(b: &Arc<SphericalBasis>, width: f64) -> RadialSamples {
    RadialSamples::from_function(b.clone(), &RadialFunction::gaussian(width))
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn identity_multiplier_round_trips() {
    let b = heis_basis();
    let f = gaussian(&b, 1.0);
    let g = apply_multiplier(&Multiplier::identity(), &f);
    assert!(max_gap(&f.values, &g.values) < 1e-4);
}

#[test]
fn multipliers_compose() {
    let b = heis_basis();
    let q = b.params().homogeneous_dim();
    let f = gaussian(&b, 0.7);
    let m1 = Multiplier::heat(q, Complex64::new(0.3, 0.2));
    let m2 = Multiplier::schrodinger(q, 1.1);
    let twice = apply_multiplier(&m2, &apply_multiplier(&m1, &f));
    let once = apply_multiplier(&m1.then(&m2), &f);
    let scale = f.lq_norm(f64::INFINITY);
    assert!(max_gap(&twice.values, &once.values) < 2e-4 * scale);
    assert!(m2.sup_on(&b) <= 1.0 + 1e-15);
}

#[test]
fn heat_multiplier_reproduces_kernel() {
    let b = heis_basis();
    let p = *b.params();
    let q = p.homogeneous_dim();
    let h1 = RadialSamples::new(b.clone(), b.sample_kernel(ComplexTime::real(1.0).unwrap(), Execution::default()).unwrap())
        .unwrap();
    let rec = evolve_schrodinger(&h1, &[0.5, 2.0], Execution::default());
    for (i, t) in [0.5, 2.0].into_iter().enumerate() {
        for r in [0.5, 1.0, 3.0, 8.0] {
            let want = kernel_h(&p, ComplexTime::new(Complex64::new(1.0, t)).unwrap(), r).unwrap().value();
            let got = b.interpolate(&rec.samples[i], r);
            assert!((got - want).norm() < 1e-4 * want.norm(), "t={t} r={r}");
        }
    }
    // The Gaussian multiplier applied to a Gaussian-class datum equals convolution with h_1.
    let f = gaussian(&b, 0.5);
    let via_multiplier = apply_multiplier(&Multiplier::heat(q, Complex64::new(1.0, 0.0)), &f);
    let via_convolution = drkernel::estimates::radial_convolution(&b, &f.values, &h1.values);
    assert!(max_gap(&via_multiplier.values, &via_convolution) < 1e-8);
}

#[test]
fn evolution_conserves_l2_and_reverses() {
    let b = heis_basis();
    let f = gaussian(&b, 1.0);
    let times: Vec<f64> = (0..=25).map(|i| 0.2 * i as f64).collect();
    let rec = evolve_schrodinger(&f, &times, Execution::default());
    assert!(rec.max_l2_drift() < 1e-3);
    assert!(max_gap(&rec.samples[0], &f.values) < 1e-4);
    let back: Vec<f64> = times.iter().map(|t| -t).collect();
    let rev = evolve_schrodinger(&f.map(|z| z.conj()), &back, Execution::Sequential);
    for (u, v) in rec.samples.iter().zip(&rev.samples) {
        let conj: Vec<Complex64> = u.iter().map(|z| z.conj()).collect();
        assert!(max_gap(&conj, v) < 1e-6);
    }
}

#[test]
fn evolution_solves_the_schrodinger_equation() {
    // i ∂_t u + ∂_r² u + (A'/A) ∂_r u = 0, by central differences on interpolated samples.
    let b = heis_basis();
    let p = *b.params();
    let f = gaussian(&b, 1.0);
    let (t, dt, dr) = (0.8, 1e-3, 1e-2);
    let rec = evolve_schrodinger(&f, &[t - dt, t, t + dt], Execution::default());
    let u = |i: usize, r: f64| b.interpolate(&rec.samples[i], r);
    let scale = rec.samples[1].iter().map(|z| z.norm()).fold(0.0, f64::max);
    for k in 0..=30 {
        let r = 0.5 + 0.25 * k as f64;
        let du_t = (u(2, r) - u(0, r)) / (2.0 * dt);
        let du_r = (u(1, r + dr) - u(1, r - dr)) / (2.0 * dr);
        let du_rr = (u(1, r + dr) - 2.0 * u(1, r) + u(1, r - dr)) / (dr * dr);
        let residual = Complex64::i() * du_t + du_rr + p.log_derivative(r) * du_r;
        assert!(residual.norm() < 1e-3 * scale, "r={r}: {}", residual.norm());
    }
}

#[test]
fn twisted_evolution_on_the_unit_slice() {
    let b = heis_basis();
    let g = gaussian(&b, 1.0);
    let rec = evolve_distinguished(&g, &[0.0, 1.0], Execution::default());
    let p = *b.params();
    for i in 0..2 {
        for a in [0.3, 1.0, 4.0] {
            let x = GroupPoint::on_axis(&p, a).unwrap();
            let v = b.interpolate(&rec.core.samples[i], a.ln().abs());
            let u = rec.u(&b, i, &x);
            // |u| = δ^{1/2} |v| = a^{-Q/2} |v|.
            let want = a.powf(-0.5 * p.homogeneous_dim()) * v.norm();
            assert!((u.norm() - want).abs() < 1e-12 * want.max(1e-300), "a={a}");
        }
    }
}

#[test]
fn duhamel_with_constant_forcing() {
    let b = heis_basis();
    let q = b.params().homogeneous_dim();
    let zero = gaussian(&b, 1.0).map(|_| Complex64::new(0.0, 0.0));
    let h1 = b.sample_kernel(ComplexTime::real(1.0).unwrap(), Execution::default()).unwrap();
    let spec_h1 = b.forward(&h1);
    let times = [0.25, 1.0];
    let rec = inhomogeneous_solution(&zero, |_| h1.clone(), &times, 1e-8, Execution::default()).unwrap();
    let scale = spec_h1.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (i, t) in times.into_iter().enumerate() {
        let got = b.forward(&rec.samples[i]);
        for ((s, g), h) in b.spectrum().iter().zip(&got).zip(&spec_h1) {
            // -i ∫_0^t e^{-i(t-s)λ} ds ℋh_1 with λ = s² + Q²/4.
            let lam = s * s + 0.25 * q * q;
            let want = -Complex64::i() * h * (1.0 - Complex64::new(0.0, -t * lam).exp()) / (Complex64::i() * lam);
            assert!((g - want).norm() < 1e-3 * scale, "t={t} s={s}");
        }
    }
}

#[test]
fn duhamel_without_forcing_is_homogeneous() {
    let b = heis_basis();
    let f = gaussian(&b, 1.0);
    let zeros = vec![Complex64::new(0.0, 0.0); f.values.len()];
    let times = [0.0, 0.5, 1.5];
    let a = inhomogeneous_solution(&f, |_| zeros.clone(), &times, 1e-8, Execution::default()).unwrap();
    let h = evolve_schrodinger(&f, &times, Execution::default());
    for (x, y) in a.samples.iter().zip(&h.samples) {
        assert!(max_gap(x, y) < 1e-12);
    }
}

#[test]
fn duhamel_solves_the_forced_equation() {
    // i u_t + Δu = F on the transform side: i ∂_t ℋu - λ ℋu = ℋF.
    let b = heis_basis();
    let q = b.params().homogeneous_dim();
    let f = gaussian(&b, 1.0);
    let g = b.sample(&RadialFunction::gaussian(0.5));
    let forcing = |s: f64| g.iter().map(|v| v * (2.0 * s).cos()).collect::<Vec<_>>();
    let (t, dt) = (0.7, 1e-2);
    let times: Vec<f64> = (-2..=2).map(|k| t + dt * k as f64).collect();
    let rec = inhomogeneous_solution(&f, forcing, &times, 1e-8, Execution::default()).unwrap();
    let spec: Vec<Vec<Complex64>> = rec.samples.iter().map(|u| b.forward(u)).collect();
    let force = b.forward(&forcing(t));
    let scale = force.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (j, s) in b.spectrum().iter().enumerate().filter(|(_, s)| **s < 2.0) {
        let lam = s * s + 0.25 * q * q;
        let du = (spec[0][j] - 8.0 * spec[1][j] + 8.0 * spec[3][j] - spec[4][j]) / (12.0 * dt);
        let residual = Complex64::i() * du - lam * spec[2][j] - force[j];
        assert!(residual.norm() < 1e-4 * scale, "s={s}: {}", residual.norm());
    }
}

#[test]
fn window_norms_add_and_grow() {
    let b = heis_basis();
    let f = gaussian(&b, 1.0);
    let times: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
    let rec = evolve_schrodinger(&f, &times, Execution::default());
    let pair = AdmissiblePair::new(2.0, 4.0).unwrap();
    let whole = strichartz_window_norm(&rec, &b, pair, (0.0, 2.0)).unwrap();
    let first = strichartz_window_norm(&rec, &b, pair, (0.0, 1.0)).unwrap();
    let second = strichartz_window_norm(&rec, &b, pair, (1.0, 2.0)).unwrap();
    assert!((whole.powi(2) - first.powi(2) - second.powi(2)).abs() < 1e-12 * whole.powi(2));
    assert!(first < whole && second < whole);
    let bad = AdmissiblePair::new(2.0, 5.0).unwrap();
    assert!(strichartz_window_norm(&rec, &b, bad, (0.0, 2.0)).is_err());
    assert!(mixed_norm_unchecked(&rec, &b, 2.0, 5.0, (0.0, 2.0)).is_ok());
    assert!(mixed_norm_unchecked(&rec, &b, 2.0, 4.0, (0.0, 3.0)).is_err());
    assert!(mixed_norm_unchecked(&rec, &b, 2.0, 4.0, (0.01, 1.0)).is_err());
}

#[test]
fn admissibility_examples() {
    assert!(is_admissible(4, AdmissiblePair::new(2.0, 4.0).unwrap()));
    assert!(!is_admissible(4, AdmissiblePair::new(2.0, 5.0).unwrap()));
    assert!(is_admissible(4, AdmissiblePair::new(f64::INFINITY, 2.0).unwrap()));
    assert!(!is_admissible(4, AdmissiblePair::new(4.0, 4.0).unwrap()));
    assert!(!is_admissible(4, AdmissiblePair::new(f64::INFINITY, 4.0).unwrap()));
    assert!(AdmissiblePair::new(1.5, 4.0).is_err());
}

#[test]
fn samples_reject_wrong_length() {
    let b = heis_basis();
    assert!(RadialSamples::new(b, vec![Complex64::new(1.0, 0.0); 3]).is_err());
}

#[test]
fn kernel_function_is_usable_as_data() {
    let b = heis_basis();
    let h = kernel_function(b.params(), ComplexTime::real(1.0).unwrap());
    let direct = b.sample_kernel(ComplexTime::real(1.0).unwrap(), Execution::default()).unwrap();
    assert!(max_gap(&b.sample(&h), &direct) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Two steps of the propagator equal one step of the summed time.
    #[test]
    fn evolution_is_a_group(t1 in -3.0..3.0f64, t2 in -3.0..3.0f64, width in 0.3..2.0f64) {
        let b = heis_basis();
        let f = gaussian(&b, width);
        let one = evolve_schrodinger(&f, &[t1], Execution::default());
        let mid = RadialSamples::new(b.clone(), one.samples[0].clone()).unwrap();
        let two = evolve_schrodinger(&mid, &[t2], Execution::default());
        let direct = evolve_schrodinger(&f, &[t1 + t2], Execution::default());
        prop_assert!(max_gap(&two.samples[0], &direct.samples[0]) < 2e-4);
    }
}
