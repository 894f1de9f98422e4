//! The acceptance suite: one pass/fail outcome per criterion, with every
//! tolerance pinned here.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::time::Instant;

use crate::error::Result;
use crate::estimates::{
    axis_points, convolution_check, decay_fit, verify_lower_bound, verify_upper_bound, weighted_growth_check,
    DecayNorm, TimeRegime, UpperGrid,
};
use crate::exec::Execution;
use crate::geometry::{RadialFunction, SpaceParams};
use crate::kernels::{heat_residual, kernel_function, kernel_h};
use crate::numeric::ode::OdeConfig;
use crate::numeric::QuadBackend;
use crate::propagator::{
    evolve_schrodinger, is_admissible, mixed_norm_unchecked, AdmissiblePair, RadialSamples,
};
use crate::spherical::{basis, c_function, kernel_transform, phi};
use crate::symbolic::ComplexTime;

pub const TRANSFORM_TOL: f64 = 1e-4;
pub const PHI_TOL: f64 = 1e-8;
pub const DENSITY_TOL: f64 = 1e-3;
pub const HEAT_RESIDUAL_TOL: f64 = 1e-4;
pub const DRIFT_TOL: f64 = 0.05;
pub const SLOPE_TOL: f64 = 0.15;
pub const L2_DRIFT_TOL: f64 = 1e-3;
pub const REVERSAL_TOL: f64 = 1e-6;
pub const SEMIGROUP_TOL: f64 = 1e-4;
pub const GROWTH_SLOPE_TOL: f64 = 0.25;
pub const GROWTH_FACTOR: f64 = 10.0;
pub const STRICHARTZ_DRIFT_TOL: f64 = 0.02;

/// Large-time decay fits start at t = 20. Over [2, 200] the norms still carry a
/// `1 + c/t` correction and the log-log fit curves; that slope is printed too.
pub const LARGE_TIME_RANGE: (f64, f64) = (20.0, 2000.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    /// None of the criterion's spaces were selected.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        write!(f, "[{tag}] {:>2} {}: {} ({:.1}s)", self.id, self.title, self.detail, self.seconds)
    }
}

const RH3: (usize, usize) = (2, 0);
const HEIS: (usize, usize) = (2, 1);

fn select(spaces: &[SpaceParams], wanted: &[(usize, usize)]) -> Vec<SpaceParams> {
    spaces
        .iter()
        .filter(|p| wanted.contains(&(p.m(), p.k())))
        .cloned()
        .collect()
}

type Check = fn(&[SpaceParams], Execution) -> Result<(bool, String)>;

/// Runs every criterion on the selected spaces. Criteria tied to particular
/// spaces run on the intersection and are skipped when it is empty.
pub fn run(spaces: &[SpaceParams], exec: Execution) -> Vec<Outcome> {
    run_with(spaces, exec, |_| {})
}

/// As [`run`], reporting each outcome as soon as it is known.
pub fn run_with(spaces: &[SpaceParams], exec: Execution, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let all = spaces.to_vec();
    let plan: Vec<(u8, &'static str, Vec<SpaceParams>, Check)> = vec![
        (1, "transform identity", all.clone(), transform_identity),
        (2, "closed-form spherical functions", select(spaces, &[RH3]), closed_form_oracle),
        (3, "heat equation residual", all.clone(), heat_equation),
        (4, "pointwise upper bound", all.clone(), upper_bound),
        (5, "pointwise lower bound", select(spaces, &[HEIS, RH3]), lower_bound),
        (6, "dispersive decay exponents", all.clone(), decay_exponents),
        (7, "L2 conservation and time reversal", all.clone(), conservation),
        (8, "semigroup cross-route", all.clone(), semigroup),
        (9, "weighted unboundedness", select(spaces, &[HEIS, RH3]), weighted_growth),
        (10, "admissibility lattice", vec![SpaceParams::real_hyperbolic()], admissibility),
        (11, "Strichartz and convolution ratios", select(spaces, &[HEIS]), strichartz),
    ];
    plan.into_iter()
        .map(|(id, title, selected, check)| {
            let start = Instant::now();
            let (status, detail) = if selected.is_empty() {
                (Status::Skipped, "no applicable space selected".to_string())
            } else {
                match check(&selected, exec) {
                    Ok((true, d)) => (Status::Pass, d),
                    Ok((false, d)) => (Status::Fail, d),
                    Err(e) => (Status::Fail, format!("error: {e}")),
                }
            };
            let outcome = Outcome {
                id,
                title,
                status,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            };
            report(&outcome);
            outcome
        })
        .collect()
}

fn join(parts: Vec<String>) -> String {
    parts.join("; ")
}

fn transform_identity(spaces: &[SpaceParams], exec: Execution) -> Result<(bool, String)> {
    let taus = [
        Complex64::new(0.25, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(4.0, 0.0),
        Complex64::new(0.5, 0.5),
        Complex64::new(0.0, 0.7),
    ];
    let spectrum: Vec<f64> = (0..33).map(|i| 0.1 + 7.9 * i as f64 / 32.0).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in spaces {
        let q = p.homogeneous_dim();
        let (mut normalized, mut pointwise) = (0.0f64, 0.0f64);
        for &t in &taus {
            let tau = ComplexTime::new(t)?;
            let got = kernel_transform(p, tau, &spectrum, exec)?;
            let gap = (-0.25 * q * q * t).exp().norm();
            for (s, g) in spectrum.iter().zip(&got) {
                let want = (-0.25 * q * q * t - t * s * s).exp();
                normalized = normalized.max((g - want).norm() / gap);
                pointwise = pointwise.max((g - want).norm() / want.norm());
            }
        }
        ok &= normalized <= TRANSFORM_TOL;
        parts.push(format!("{p} max {normalized:.1e} (pointwise {pointwise:.1e})"));
    }
    Ok((ok, join(parts)))
}

fn closed_form_oracle(spaces: &[SpaceParams], _exec: Execution) -> Result<(bool, String)> {
    let p = &spaces[0];
    let radii: Vec<f64> = (0..=199).map(|i| 0.1 + 19.9 * i as f64 / 199.0).collect();
    let mut phi_err = 0.0f64;
    for s in [0.25, 0.5, 1.0, 2.0, 3.5, 5.0, 8.0] {
        let sol = phi(p, s, &radii, &OdeConfig::default())?;
        for (r, v) in radii.iter().zip(&sol.phi) {
            let want = (s * r).sin() / (2.0 * s * (0.5 * r).sinh());
            phi_err = phi_err.max((v - want).abs());
        }
    }
    let mut density_err = 0.0f64;
    for i in 0..=18 {
        let s = 0.5 + 0.25 * i as f64;
        let c = c_function(p, s)?;
        density_err = density_err.max((c.plancherel_density / (4.0 * s * s) - 1.0).abs());
    }
    Ok((
        phi_err <= PHI_TOL && density_err <= DENSITY_TOL,
        format!("{p} sup |φ - closed form| {phi_err:.1e}, density vs 4s² {density_err:.1e}"),
    ))
}

fn heat_equation(spaces: &[SpaceParams], _exec: Execution) -> Result<(bool, String)> {
    let steps = [0.05, 0.025];
    let mut ok = true;
    let mut parts = Vec::new();
    for p in spaces {
        let mut worst = [0.0f64; 2];
        for tau in [0.5, 0.8, 1.2, 2.0] {
            let tau = ComplexTime::real(tau)?;
            for i in 0..=19 {
                let r = 0.5 + 0.5 * i as f64;
                for (w, &h) in worst.iter_mut().zip(&steps) {
                    *w = w.max(heat_residual(p, tau, r, h)?);
                }
            }
        }
        ok &= worst.iter().all(|&w| w <= HEAT_RESIDUAL_TOL);
        parts.push(format!("{p} {:.1e} / {:.1e} (halved step)", worst[0], worst[1]));
    }
    Ok((ok, join(parts)))
}

fn upper_bound(spaces: &[SpaceParams], exec: Execution) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    let grid = UpperGrid::new((1e-2, 1e2), (1e-3, 30.0), 1);
    let refined = UpperGrid::new((1e-2, 1e2), (1e-3, 30.0), 2);
    for p in spaces {
        let rep = verify_upper_bound(p, &grid, &refined, exec)?;
        let both = rep.regimes.iter().all(|r| r.points > 0);
        ok &= rep.valid && rep.refinement_drift < DRIFT_TOL && both && rep.excluded == 0;
        parts.push(format!(
            "{p} sup {:.3} drift {:.1e} regimes {}",
            rep.refined_ratio,
            rep.refinement_drift,
            rep.regimes
                .iter()
                .map(|r| format!("{:?}:{}", r.regime, r.points))
                .collect::<Vec<_>>()
                .join(",")
        ));
    }
    Ok((ok, join(parts)))
}

fn lower_bound(spaces: &[SpaceParams], exec: Execution) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in spaces {
        let rep = verify_lower_bound(p, &[0.5, 1.0, 2.0], 4.0, 30.0, 30, &[], exec)?;
        ok &= rep.valid && rep.refinement_drift < DRIFT_TOL && rep.excluded == 0;
        parts.push(format!("{p} inf {:.4} drift {:.1e}", rep.refined_ratio, rep.refinement_drift));
    }
    Ok((ok, join(parts)))
}

fn decay_exponents(spaces: &[SpaceParams], exec: Execution) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    let small = TimeRegime::Small.default_range();
    for p in spaces {
        let n = p.dimension() as f64;
        let fits = [
            ("small q=4", decay_fit(p, 4.0, DecayNorm::Lq, small, 8, exec)?, -0.5 * n),
            ("small q=inf", decay_fit(p, f64::INFINITY, DecayNorm::Lq, small, 8, exec)?, -0.5 * n),
            ("large q=4", decay_fit(p, 4.0, DecayNorm::Lq, LARGE_TIME_RANGE, 8, exec)?, -1.5),
            ("large A_4", decay_fit(p, 4.0, DecayNorm::Aq, LARGE_TIME_RANGE, 8, exec)?, -1.5),
        ];
        let mut line = format!("{p}");
        for (name, fit, want) in &fits {
            ok &= (fit.slope - want).abs() <= SLOPE_TOL;
            line += &format!(" {name} {:.3} (want {want})", fit.slope);
        }
        let early = decay_fit(p, 4.0, DecayNorm::Lq, TimeRegime::Large.default_range(), 8, exec)?;
        line += &format!(" [q=4 on [2,200]: {:.3}, rms {:.2}]", early.slope, early.residual);
        parts.push(line);
    }
    Ok((ok, join(parts)))
}

fn conservation(spaces: &[SpaceParams], exec: Execution) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    let times: Vec<f64> = (0..=50).map(|i| 0.1 * i as f64).collect();
    let backwards: Vec<f64> = times.iter().map(|t| -t).collect();
    for p in spaces {
        let b = basis(p)?;
        let f = RadialSamples::from_function(b.clone(), &RadialFunction::gaussian(1.0));
        let rec = evolve_schrodinger(&f, &times, exec);
        let rev = evolve_schrodinger(&f.map(|z| z.conj()), &backwards, exec);
        let scale = f.lq_norm(f64::INFINITY);
        let reversal = rec
            .samples
            .iter()
            .zip(&rev.samples)
            .flat_map(|(u, v)| u.iter().zip(v).map(|(a, b)| (a.conj() - b).norm() / scale))
            .fold(0.0, f64::max);
        let drift = rec.max_l2_drift();
        ok &= drift <= L2_DRIFT_TOL && reversal <= REVERSAL_TOL;
        parts.push(format!("{p} L2 drift {drift:.1e} reversal {reversal:.1e}"));
    }
    Ok((ok, join(parts)))
}

fn semigroup(spaces: &[SpaceParams], exec: Execution) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in spaces {
        let b = basis(p)?;
        let a = b.forward(&b.sample_kernel(ComplexTime::real(0.5)?, exec)?);
        let c = b.forward(&b.sample_kernel(ComplexTime::real(0.7)?, exec)?);
        let product: Vec<Complex64> = a.iter().zip(&c).map(|(x, y)| x * y).collect();
        let rebuilt = b.inverse(&product);
        let mut worst = 0.0f64;
        for i in 0..=38 {
            let r = 0.5 + 0.25 * i as f64;
            let want = kernel_h(p, ComplexTime::real(1.2)?, r)?.value();
            worst = worst.max((b.interpolate(&rebuilt, r) - want).norm() / want.norm());
        }
        ok &= worst <= SEMIGROUP_TOL;
        parts.push(format!("{p} {worst:.1e}"));
    }
    Ok((ok, join(parts)))
}

fn weighted_growth(spaces: &[SpaceParams], _exec: Execution) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in spaces {
        let fit = weighted_growth_check(p, 1.0, &axis_points(10.0, 400.0, 12), 4.0)?;
        let want = 0.5 * (p.dimension() as f64 - 1.0);
        let growth = fit.max_over_reference();
        ok &= (fit.slope - want).abs() <= GROWTH_SLOPE_TOL && growth > GROWTH_FACTOR;
        parts.push(format!("{p} slope {:.3} (want {want}) max/|σ(a=0.1)| {growth:.0}", fit.slope));
    }
    Ok((ok, join(parts)))
}

/// Membership in the admissible triangle decided with exact rationals.
fn admissible_exact(n: i64, x: (i64, i64), y: (i64, i64)) -> bool {
    // x = 1/p, y = 1/q as reduced fractions num/den.
    let (xn, xd) = x;
    let (yn, yd) = y;
    if xn == 0 && 2 * yn == yd {
        return true;
    }
    let x_ok = xn > 0 && 2 * xn <= xd;
    let y_ok = yn > 0 && 2 * yn < yd;
    // 2x + n y >= n/2  <=>  4 xn yd + 2 n yn xd >= n xd yd
    x_ok && y_ok && 4 * xn * yd + 2 * n * yn * xd >= n * xd * yd
}

fn admissibility(_spaces: &[SpaceParams], _exec: Execution) -> Result<(bool, String)> {
    let mut mismatches = 0;
    let mut admitted = 0;
    let mut checked = 0;
    for n in [3usize, 4, 7, 8] {
        for i in 0..20i64 {
            for j in 0..10i64 {
                let (x, y) = ((i, 38), (j, 18));
                let p = if i == 0 { f64::INFINITY } else { 38.0 / i as f64 };
                let q = if j == 0 { f64::INFINITY } else { 18.0 / j as f64 };
                let fast = is_admissible(n, AdmissiblePair::new(p, q)?);
                let exact = admissible_exact(n as i64, x, y);
                admitted += exact as usize;
                mismatches += (fast != exact) as usize;
                checked += 1;
            }
        }
    }
    Ok((
        mismatches == 0,
        format!("{checked} lattice points over n = 3, 4, 7, 8, {admitted} admissible, {mismatches} mismatches"),
    ))
}

fn strichartz(spaces: &[SpaceParams], exec: Execution) -> Result<(bool, String)> {
    let p = &spaces[0];
    let b = basis(p)?;
    let f = RadialSamples::from_function(b.clone(), &RadialFunction::gaussian(1.0));
    let f2 = f.lq_norm(2.0);
    let mut ok = true;
    let mut parts = Vec::new();
    let records: Vec<_> = [0.1f64, 0.05]
        .iter()
        .map(|dt| {
            let steps = (4.0 / dt).round() as usize;
            let times: Vec<f64> = (0..=steps).map(|i| dt * i as f64).collect();
            evolve_schrodinger(&f, &times, exec)
        })
        .collect();
    for (pp, qq) in [(2.0, 4.0), (4.0, 4.0), (f64::INFINITY, 2.0)] {
        let admissible = is_admissible(p.dimension(), AdmissiblePair::new(pp, qq)?);
        let coarse = mixed_norm_unchecked(&records[0], &b, pp, qq, (0.0, 4.0))? / f2;
        let fine = mixed_norm_unchecked(&records[1], &b, pp, qq, (0.0, 4.0))? / f2;
        let drift = ((coarse - fine) / fine).abs();
        ok &= fine.is_finite() && drift < STRICHARTZ_DRIFT_TOL;
        parts.push(format!(
            "({pp},{qq}){} ratio {fine:.4} drift {drift:.1e}",
            if admissible { "" } else { " inadmissible" }
        ));
    }
    let h1 = kernel_function(p, ComplexTime::real(1.0)?);
    let data = [
        ("g(0.5)", RadialFunction::gaussian(0.5)),
        ("g(2)", RadialFunction::gaussian(2.0)),
        ("h1", h1.clone()),
    ];
    let kernels = [("g(1)", RadialFunction::gaussian(1.0)), ("h1", h1)];
    let mut ratios = Vec::new();
    for (fname, fd) in &data {
        for (kname, kd) in &kernels {
            let rep = convolution_check(&b, fd, kd, 4.0, QuadBackend::default())?;
            ok &= rep.ratio.is_finite() && rep.ratio > 0.0;
            ratios.push(format!("{fname}*{kname} {:.3}", rep.ratio));
        }
    }
    parts.push(format!("convolution q=4: {}", ratios.join(", ")));
    Ok((ok, join(parts)))
}
