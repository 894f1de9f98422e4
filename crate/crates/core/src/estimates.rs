//! Numerical checks of the kernel estimates: bound-ratio sweeps, kernel
//! norms and their decay rates in `t`, the `𝒜_q` norm, radial convolution
//! ratios and the weighted growth of `σ_t`.
//!
//! The constants in the estimates are existential, so sweeps report
//! empirical constants together with their stability under refinement.

use num_complex::Complex64;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{GroupPoint, RadialFunction, SpaceParams};
use crate::kernels::{evaluator, lower_bound_envelope, sigma_kernel, upper_bound_envelope, Regime};
use crate::numeric::ode::OdeConfig;
use crate::numeric::quad::{CompositeRule, QuadBackend, QuadConfig};
use crate::numeric::special::linear_fit;
use crate::spherical::{phi, SphericalBasis};
use crate::symbolic::ComplexTime;

pub const SCHEMA_VERSION: u32 = 1;

/// Reports whose ratio moves more than this under refinement are unstable.
pub const MAX_DRIFT: f64 = 0.05;

/// Log-log fits with a larger rms residual are flagged.
pub const FIT_RESIDUAL_FLAG: f64 = 0.05;

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| match i {
            0 => lo,
            _ if i == count - 1 => hi,
            _ => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// Grid for the upper-bound sweep: `|τ|` log-uniform, fixed phases, radii
/// geometric below 1 and uniform above.
#[derive(Clone, Debug, Serialize)]
pub struct UpperGrid {
    pub moduli: Vec<f64>,
    pub phases: Vec<f64>,
    pub radii: Vec<f64>,
}

impl UpperGrid {
    /// `level` 1 is the default density; each increment doubles it.
    pub fn new(tau_range: (f64, f64), r_range: (f64, f64), level: u32) -> Self {
        let scale = 1usize << (level.max(1) - 1);
        let decades = (tau_range.1 / tau_range.0).log10();
        let moduli = log_spaced(tau_range.0, tau_range.1, (4.0 * decades).round() as usize * scale + 1);
        let (r_lo, r_hi) = r_range;
        let mut radii = Vec::new();
        if r_lo < 1.0 {
            let count = ((-r_lo.log10()) * 3.0).round().max(1.0) as usize * scale;
            radii.extend(log_spaced(r_lo, 1.0, count + 1));
            radii.pop();
        }
        let from = r_lo.max(1.0);
        let steps = ((r_hi - from).ceil() as usize).max(1) * scale;
        radii.extend((0..=steps).map(|i| from + (r_hi - from) * i as f64 / steps as f64));
        UpperGrid {
            moduli,
            phases: vec![-0.5 * PI, -0.25 * PI, 0.0, 0.25 * PI, 0.5 * PI],
            radii,
        }
    }

    fn describe(&self) -> String {
        format!(
            "|τ| in [{:.3e}, {:.3e}] x {} phases x r in [{:.3e}, {}]; {} x {} x {} points",
            self.moduli[0],
            self.moduli[self.moduli.len() - 1],
            self.phases.len(),
            self.radii[0],
            self.radii[self.radii.len() - 1],
            self.moduli.len(),
            self.phases.len(),
            self.radii.len()
        )
    }
}

impl Default for UpperGrid {
    fn default() -> Self {
        UpperGrid::new((1e-2, 1e2), (1e-3, 30.0), 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeRatio {
    pub regime: Regime,
    pub ratio: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub kind: BoundKind,
    pub space: String,
    pub grid: String,
    /// Supremum (upper) or infimum (lower) of `|h| / envelope` on the grid.
    pub ratio: f64,
    pub refined_ratio: f64,
    pub refinement_drift: f64,
    pub regimes: Vec<RegimeRatio>,
    pub points: usize,
    /// Points whose evaluation failed; they do not enter the ratio.
    pub excluded: usize,
    /// For lower bounds: `(c, infimum, drift)` for the excluded region `r <= 1 + c t`.
    pub c_scan: Vec<(f64, f64, f64)>,
    pub valid: bool,
}

struct Sweep {
    ratio: f64,
    regimes: Vec<RegimeRatio>,
    points: usize,
    excluded: usize,
}

fn upper_sweep(p: &SpaceParams, grid: &UpperGrid, exec: Execution) -> Result<Sweep> {
    let ev = evaluator(p);
    let mut jobs = Vec::new();
    for &m in &grid.moduli {
        for &th in &grid.phases {
            let tau = ComplexTime::from_polar(m, th)?;
            jobs.extend(grid.radii.iter().map(|&r| (tau, r)));
        }
    }
    let ratios = exec.map(&jobs, |&(tau, r)| {
        let env = upper_bound_envelope(p, tau, r);
        ev.eval(tau, r).map(|v| (env.regime, (v.ln_abs() - env.ln_value).exp()))
    });
    let mut small = (0.0f64, 0usize);
    let mut large = (0.0f64, 0usize);
    let mut excluded = 0;
    for r in ratios {
        match r {
            Ok((Regime::Small, v)) => small = (small.0.max(v), small.1 + 1),
            Ok((Regime::Large, v)) => large = (large.0.max(v), large.1 + 1),
            Err(_) => excluded += 1,
        }
    }
    Ok(Sweep {
        ratio: small.0.max(large.0),
        regimes: vec![
            RegimeRatio { regime: Regime::Small, ratio: small.0, points: small.1 },
            RegimeRatio { regime: Regime::Large, ratio: large.0, points: large.1 },
        ],
        points: jobs.len(),
        excluded,
    })
}

fn drift(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Supremum of `|h_τ(r)|` over the upper envelope, on `grid` and on its 2×
/// refinement.
pub fn verify_upper_bound(
    p: &SpaceParams,
    grid: &UpperGrid,
    refined: &UpperGrid,
    exec: Execution,
) -> Result<BoundReport> {
    let coarse = upper_sweep(p, grid, exec)?;
    let fine = upper_sweep(p, refined, exec)?;
    let refinement_drift = drift(coarse.ratio, fine.ratio);
    let both_regimes = fine.regimes.iter().all(|r| r.points > 0);
    Ok(BoundReport {
        schema_version: SCHEMA_VERSION,
        kind: BoundKind::Upper,
        space: p.to_string(),
        grid: grid.describe(),
        ratio: coarse.ratio,
        refined_ratio: fine.ratio,
        refinement_drift,
        regimes: fine.regimes,
        points: coarse.points + fine.points,
        excluded: coarse.excluded + fine.excluded,
        c_scan: Vec::new(),
        valid: fine.ratio.is_finite() && refinement_drift < MAX_DRIFT && both_regimes,
    })
}

fn lower_radii(t: f64, c: f64, r_max: f64, count: usize) -> Vec<f64> {
    let lo = 1.0 + c * t;
    (1..=count)
        .map(|i| lo + (r_max - lo) * i as f64 / (count + 1) as f64)
        .collect()
}

fn lower_sweep(p: &SpaceParams, ts: &[f64], c: f64, r_max: f64, count: usize, exec: Execution) -> Result<Sweep> {
    let ev = evaluator(p);
    let mut jobs = Vec::new();
    for &t in ts {
        jobs.extend(lower_radii(t, c, r_max, count).into_iter().map(|r| (t, r)));
    }
    let ratios = exec.map(&jobs, |&(t, r)| -> Result<f64> {
        let env = lower_bound_envelope(p, t, r, c)?;
        let v = ev.eval(ComplexTime::imaginary(t)?, r)?;
        Ok((v.ln_abs() - env).exp())
    });
    let mut inf = f64::INFINITY;
    let mut excluded = 0;
    for r in ratios {
        match r {
            Ok(v) => inf = inf.min(v),
            Err(_) => excluded += 1,
        }
    }
    Ok(Sweep {
        ratio: inf,
        regimes: Vec::new(),
        points: jobs.len(),
        excluded,
    })
}

/// Infimum of `|s_t(r)|` over `t^{-n/2} r^{(n-1)/2} e^{-Qr/2}` on
/// `r in (1 + c t, r_max)` with `count` radii per time, and under 2×
/// refinement. `c_scan` lists the same for other values of `c`.
pub fn verify_lower_bound(
    p: &SpaceParams,
    ts: &[f64],
    c: f64,
    r_max: f64,
    count: usize,
    c_scan: &[f64],
    exec: Execution,
) -> Result<BoundReport> {
    if ts.iter().any(|&t| !(t > 0.0) || 1.0 + c * t >= r_max) {
        return Err(Error::domain("each t must be positive with 1 + c t < r_max"));
    }
    let coarse = lower_sweep(p, ts, c, r_max, count, exec)?;
    let fine = lower_sweep(p, ts, c, r_max, 2 * count + 1, exec)?;
    let refinement_drift = drift(coarse.ratio, fine.ratio);
    let mut scan = Vec::new();
    for &cc in c_scan {
        let usable: Vec<f64> = ts.iter().cloned().filter(|&t| 1.0 + cc * t < r_max).collect();
        let a = lower_sweep(p, &usable, cc, r_max, count, exec)?;
        let b = lower_sweep(p, &usable, cc, r_max, 2 * count + 1, exec)?;
        scan.push((cc, b.ratio, drift(a.ratio, b.ratio)));
    }
    Ok(BoundReport {
        schema_version: SCHEMA_VERSION,
        kind: BoundKind::Lower,
        space: p.to_string(),
        grid: format!("t in {ts:?}, r in (1 + {c} t, {r_max}), {count} radii per t"),
        ratio: coarse.ratio,
        refined_ratio: fine.ratio,
        refinement_drift,
        regimes: Vec::new(),
        points: coarse.points + fine.points,
        excluded: coarse.excluded + fine.excluded,
        c_scan: scan,
        valid: fine.ratio > 0.0 && fine.ratio.is_finite() && refinement_drift < MAX_DRIFT,
    })
}

/// `∫_0^∞ exp(g(r)) dr` for a log-integrand `g`, summed over unit panels
/// until the tail is negligible. Returns the log of the integral.
fn log_radial_integral<G>(g: G, backend: QuadBackend, rel_tol: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    const R_CAP: f64 = 1000.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let probe = |r: f64| match g(r) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let reference = [0.1, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&r| probe(r))
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    if !reference.is_finite() {
        return Err(Error::domain("integrand vanishes or overflows near the origin"));
    }
    let cfg = QuadConfig::with_tolerance(0.0, rel_tol);
    let mut total = 0.0;
    let mut quiet = 0;
    let mut lo = 0.0;
    while lo < R_CAP {
        let hi = lo + 1.0;
        let res = backend.integrate(|r| Complex64::new((probe(r) - reference).exp(), 0.0), lo, hi, &cfg);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let piece = res.value.re;
        if !piece.is_finite() {
            return Err(Error::Divergent(format!("integrand overflows near r = {lo}")));
        }
        total += piece;
        quiet = if piece <= 0.01 * rel_tol * total { quiet + 1 } else { 0 };
        lo = hi;
        if quiet >= 3 && lo >= 5.0 {
            return Ok(total.ln() + reference);
        }
    }
    Err(Error::Divergent(format!("tail not negligible at r = {R_CAP}")))
}

/// Largest value of `g` on `[r_min, ∞)`, by scanning and golden-section
/// refinement of the best bracket.
fn log_radial_sup<G>(g: G, r_min: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut grid = log_spaced(r_min, 1.0, 25);
    grid.extend((1..=400).map(|i| 1.0 + 0.25 * i as f64));
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut values = Vec::with_capacity(grid.len());
    for (i, &r) in grid.iter().enumerate() {
        let v = g(r)?;
        values.push(v);
        if v > best.0 {
            best = (v, i);
        }
        // Past the maximum by a wide margin: every profile here decays.
        if i > 40 && v < best.0 - 60.0 {
            break;
        }
    }
    let i = best.1;
    if i == 0 {
        return Ok(best.0);
    }
    let (mut a, mut b) = (grid[i - 1], grid[(i + 1).min(values.len() - 1)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut f1, mut f2) = (g(x1)?, g(x2)?);
    for _ in 0..40 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = g(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = g(x2)?;
        }
    }
    Ok(best.0.max(f1).max(f2))
}

/// Which radial norm of a kernel to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormKind {
    /// `(∫ |h|^q A dr)^{1/q}`.
    Strong,
    /// Weak type: `sup_r V(r)^{1/q} |h(r)|`.
    Weak,
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 2.0) {
        return Err(Error::domain(format!("kernel norms need q > 2, got {q}")));
    }
    Ok(())
}

/// `‖h_τ‖_q` (strong or weak type); `q = ∞` is the supremum over `r >= r_min`.
pub fn lq_kernel_norm(
    p: &SpaceParams,
    tau: ComplexTime,
    q: f64,
    kind: NormKind,
    backend: QuadBackend,
) -> Result<f64> {
    check_q(q)?;
    let ev = evaluator(p);
    let r_min = ev.r_min();
    let ln_h = |r: f64| ev.eval(tau, r.max(r_min)).map(|v| v.ln_abs());
    if q.is_infinite() {
        return Ok(log_radial_sup(ln_h, r_min)?.exp());
    }
    match kind {
        NormKind::Strong => {
            let ln_int = log_radial_integral(|r| Ok(q * ln_h(r)? + p.log_density(r)), backend, 1e-9)?;
            Ok((ln_int / q).exp())
        }
        NormKind::Weak => {
            let g = |r: f64| Ok(p.ball_volume(r).ln() / q + ln_h(r)?);
            Ok(log_radial_sup(g, r_min)?.exp())
        }
    }
}

/// `φ_0` on `[0, r_max]`, interpolated from a composite rule.
#[derive(Clone, Debug)]
pub struct GroundSpherical {
    q: f64,
    rule: CompositeRule,
    /// `e^{Qr/2} φ_0(r)` on the nodes; grows only linearly.
    scaled: Vec<Complex64>,
}

impl GroundSpherical {
    pub fn new(p: &SpaceParams, r_max: f64) -> Result<Self> {
        let rule = CompositeRule::with_panel_width(0.0, r_max, 1.0, 16);
        let q = p.homogeneous_dim();
        let sol = phi(p, 0.0, &rule.nodes, &OdeConfig::default())?;
        let scaled = sol
            .phi
            .iter()
            .zip(&rule.nodes)
            .map(|(f, r)| Complex64::new(f * (0.5 * q * r).exp(), 0.0))
            .collect();
        Ok(GroundSpherical { q, rule, scaled })
    }

    pub fn r_max(&self) -> f64 {
        self.rule.b
    }

    pub fn ln_phi0(&self, r: f64) -> f64 {
        self.rule.interpolate(&self.scaled, r).re.ln() - 0.5 * self.q * r
    }
}

fn aq_from_log<G>(p: &SpaceParams, ln_k: G, q: f64, r_min: f64, backend: QuadBackend) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    if !(q >= 2.0) {
        return Err(Error::domain(format!("𝒜_q needs q >= 2, got {q}")));
    }
    if q.is_infinite() {
        return Ok(log_radial_sup(ln_k, r_min)?.exp());
    }
    let ground = GroundSpherical::new(p, 1000.0)?;
    let ln_int = log_radial_integral(
        |r| Ok(0.5 * q * ln_k(r)? + ground.ln_phi0(r) + p.log_density(r)),
        backend,
        1e-9,
    )?;
    Ok((2.0 * ln_int / q).exp())
}

/// `‖κ‖_{𝒜_q} = (∫ |κ|^{q/2} φ_0 A dr)^{2/q}`; `q = ∞` is the sup norm.
pub fn aq_norm(p: &SpaceParams, kappa: &RadialFunction, q: f64, backend: QuadBackend) -> Result<f64> {
    aq_from_log(p, |r| Ok(kappa.eval(r).norm().ln()), q, 1e-3, backend)
}

/// `‖h_τ‖_{𝒜_q}`.
pub fn aq_kernel_norm(p: &SpaceParams, tau: ComplexTime, q: f64, backend: QuadBackend) -> Result<f64> {
    let ev = evaluator(p);
    let r_min = ev.r_min();
    aq_from_log(p, |r| ev.eval(tau, r.max(r_min)).map(|v| v.ln_abs()), q, r_min, backend)
}

/// `(∫ |f|^q A dr)^{1/q}` for a radial function; `q = ∞` is the sup norm.
pub fn radial_lq_norm(p: &SpaceParams, f: &RadialFunction, q: f64, backend: QuadBackend) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::domain(format!("norm exponent must be at least 1, got {q}")));
    }
    let ln_f = |r: f64| Ok(f.eval(r).norm().ln());
    if q.is_infinite() {
        return Ok(log_radial_sup(ln_f, 1e-3)?.exp());
    }
    let ln_int = log_radial_integral(|r| Ok(q * ln_f(r)? + p.log_density(r)), backend, 1e-10)?;
    Ok((ln_int / q).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TimeRegime {
    Small,
    Large,
}

impl TimeRegime {
    pub fn default_range(&self) -> (f64, f64) {
        match self {
            TimeRegime::Small => (0.02, 0.8),
            TimeRegime::Large => (2.0, 200.0),
        }
    }
}

/// Which norm of `s_t` a decay fit follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecayNorm {
    Lq,
    WeakLq,
    Aq,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub q: f64,
    pub norm: DecayNorm,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    /// The residual exceeds `FIT_RESIDUAL_FLAG`: the data is not a clean power law.
    pub flagged: bool,
}

/// Least-squares slope of `log ‖s_t‖` against `log t` over `per_decade`
/// log-uniform samples per decade of `range`.
pub fn decay_fit(
    p: &SpaceParams,
    q: f64,
    norm: DecayNorm,
    range: (f64, f64),
    per_decade: usize,
    exec: Execution,
) -> Result<DecayFit> {
    if !(range.0 > 0.0 && range.1 > range.0) {
        return Err(Error::domain(format!("bad time range {range:?}")));
    }
    let count = ((range.1 / range.0).log10() * per_decade as f64).ceil() as usize + 1;
    let times = log_spaced(range.0, range.1, count.max(3));
    let norms = exec
        .map(&times, |&t| {
            let tau = ComplexTime::imaginary(t)?;
            match norm {
                DecayNorm::Lq => lq_kernel_norm(p, tau, q, NormKind::Strong, QuadBackend::default()),
                DecayNorm::WeakLq => lq_kernel_norm(p, tau, q, NormKind::Weak, QuadBackend::default()),
                DecayNorm::Aq => aq_kernel_norm(p, tau, q, QuadBackend::default()),
            }
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (_, slope, slope_stderr, residual) = linear_fit(&x, &y);
    Ok(DecayFit {
        q,
        norm,
        times,
        norms,
        slope,
        slope_stderr,
        residual,
        flagged: residual > FIT_RESIDUAL_FLAG,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionReport {
    pub q: f64,
    pub convolution_norm: f64,
    pub kernel_aq_norm: f64,
    pub data_norm: f64,
    /// `‖f ∗ κ‖_q / (‖κ‖_{𝒜_q} ‖f‖_{q'})`.
    pub ratio: f64,
}

/// Radial convolution through the spherical transform: `ℋ(f ∗ κ) = ℋf ℋκ`.
pub fn radial_convolution(basis: &SphericalBasis, f: &[Complex64], kappa: &[Complex64]) -> Vec<Complex64> {
    let a = basis.forward(f);
    let b = basis.forward(kappa);
    let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    basis.inverse(&prod)
}

/// Empirical constant of `‖f ∗ κ‖_q <= C ‖κ‖_{𝒜_q} ‖f‖_{q'}` for `2 < q < ∞`.
pub fn convolution_check(
    basis: &SphericalBasis,
    f: &RadialFunction,
    kappa: &RadialFunction,
    q: f64,
    backend: QuadBackend,
) -> Result<ConvolutionReport> {
    if !(q > 2.0 && q.is_finite()) {
        return Err(Error::domain(format!("convolution check needs 2 < q < ∞, got {q}")));
    }
    let p = basis.params();
    let conv = radial_convolution(basis, &basis.sample(f), &basis.sample(kappa));
    let convolution_norm = basis.lq_norm(&conv, q);
    let kernel_aq_norm = aq_norm(p, kappa, q, backend)?;
    let data_norm = radial_lq_norm(p, f, q / (q - 1.0), backend)?;
    Ok(ConvolutionReport {
        q,
        convolution_norm,
        kernel_aq_norm,
        data_norm,
        ratio: convolution_norm / (kernel_aq_norm * data_norm),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub t: f64,
    pub a: Vec<f64>,
    /// `ln |σ_t(0, 0, a)|`.
    pub ln_sigma: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub residual: f64,
    /// `ln |σ_t(0, 0, 0.1)|`.
    pub ln_reference: f64,
}

impl GrowthFit {
    /// Largest `|σ_t|` in the sample relative to its value at `a = 0.1`.
    pub fn max_over_reference(&self) -> f64 {
        let top = self.ln_sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (top - self.ln_reference).exp()
    }
}

/// Fits `ln |σ_t(0,0,a)|` against `ln ln(1/a)`. Every `a` must satisfy
/// `ln(1/a) > 1 + c |t|`.
pub fn weighted_growth_check(p: &SpaceParams, t: f64, a_list: &[f64], c: f64) -> Result<GrowthFit> {
    if a_list.len() < 3 {
        return Err(Error::domain("need at least three values of a"));
    }
    for &a in a_list {
        if !(a > 0.0 && a < 1.0) || (1.0 / a).ln() <= 1.0 + c * t.abs() {
            return Err(Error::domain(format!("a = {a} outside the region ln(1/a) > 1 + {c}|t|")));
        }
    }
    let ln_sigma_at = |a: f64| -> Result<f64> {
        let x = GroupPoint::on_axis(p, a)?;
        Ok(sigma_kernel(p, t, &x)?.ln_abs())
    };
    let ln_sigma = a_list.iter().map(|&a| ln_sigma_at(a)).collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = a_list.iter().map(|a| (1.0 / a).ln().ln()).collect();
    let (_, slope, slope_stderr, residual) = linear_fit(&x, &ln_sigma);
    Ok(GrowthFit {
        t,
        a: a_list.to_vec(),
        ln_sigma,
        slope,
        slope_stderr,
        residual,
        ln_reference: ln_sigma_at(0.1)?,
    })
}

/// `a = exp(-ρ)` for `count` values of `ρ` log-uniform in `[ρ_lo, ρ_hi]`.
pub fn axis_points(rho_lo: f64, rho_hi: f64, count: usize) -> Vec<f64> {
    log_spaced(rho_lo, rho_hi, count).into_iter().map(|r| (-r).exp()).collect()
}
