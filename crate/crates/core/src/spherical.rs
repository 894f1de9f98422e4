//! Spherical functions `φ_s`, the c-function and the spherical transform
//! `ℋf(s) = ∫ f φ_s A dr` with its inverse
//! `f(r) = c_S ∫ ℋf(s) φ_s(r) |c(s)|^{-2} ds`.
//!
//! `φ_s` is obtained from the radial eigen-equation
//! `u'' + (A'/A) u' + (s² + Q²/4) u = 0` written for `w = e^{Qr/2} φ_s`,
//! which oscillates with bounded amplitude:
//! `w'' + (B - Q) w' + (s² + Q²/2 - QB/2) w = 0`, `B = A'/A`.
//! For large `r`, `w ≈ c e^{isr} + c̄ e^{-isr}` and `c` is the c-function.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{RadialFunction, SpaceParams};
use crate::kernels::{evaluator, kernel_h};
use crate::numeric::accel::WynnEpsilon;
use crate::numeric::ode::{self, OdeConfig};
use crate::numeric::quad::{integrate_adaptive, CompositeRule, QuadConfig};
use crate::numeric::scaled::ScaledComplex;
use crate::symbolic::ComplexTime;

/// Start of the numerical integration; below it the Taylor seed is used.
const R0: f64 = 1e-3;
const S_MIN: f64 = 1e-6;

/// Sampled spherical function.
#[derive(Clone, Debug, Serialize)]
pub struct SphericalSolution {
    pub s: f64,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub ode_tolerance: f64,
}

/// `w(r) ≈ c_plus e^{isr} + c_minus e^{-isr}` at large `r`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CFunctionEstimate {
    pub s: f64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    /// Largest relative spread of the pointwise estimates over the window.
    pub residual: f64,
    pub plancherel_density: f64,
    pub reliable: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphericalCalibration {
    pub c_s: f64,
    /// Largest relative error of the reconstructed reference kernel at the
    /// validation radii.
    pub reference_error: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SphericalConfig {
    pub ode: OdeConfig,
    pub r_max: f64,
    pub r_panel: f64,
    pub r_order: usize,
    pub s_max: f64,
    pub s_panel: f64,
    pub s_order: usize,
    pub fit_window: (f64, f64),
    pub fit_residual: f64,
}

impl Default for SphericalConfig {
    fn default() -> Self {
        SphericalConfig {
            ode: OdeConfig::default(),
            r_max: 60.0,
            r_panel: 0.5,
            r_order: 20,
            s_max: 14.0,
            s_panel: 0.5,
            s_order: 16,
            fit_window: (25.0, 40.0),
            fit_residual: 1e-6,
        }
    }
}

/// `(φ, φ')` from the fourth order expansion at the origin.
fn taylor_seed(p: &SpaceParams, s: f64, r: f64) -> (f64, f64) {
    let n = p.dimension() as f64;
    let q = p.homogeneous_dim();
    let lam = s * s + 0.25 * q * q;
    let a = -lam / (2.0 * n);
    let c1 = (p.m() + p.k()) as f64 / 12.0 + p.k() as f64 / 4.0;
    let b = -a * (2.0 * c1 + lam) / (4.0 * (n + 2.0));
    let r2 = r * r;
    (1.0 + a * r2 + b * r2 * r2, 2.0 * a * r + 4.0 * b * r2 * r)
}

/// `(w, w')` with `w = e^{Qr/2} φ_s` at each output radius (ascending, `>= 0`).
fn scaled_states(p: &SpaceParams, s: f64, outputs: &[f64], cfg: &OdeConfig) -> Result<Vec<[f64; 2]>> {
    let q = p.homogeneous_dim();
    let to_w = |r: f64| {
        let (f, df) = taylor_seed(p, s, r);
        let e = (0.5 * q * r).exp();
        [e * f, e * (df + 0.5 * q * f)]
    };
    let split = outputs.partition_point(|&r| r <= R0);
    let mut states: Vec<[f64; 2]> = outputs[..split].iter().map(|&r| to_w(r)).collect();
    if split == outputs.len() {
        return Ok(states);
    }
    let lam = s * s + 0.5 * q * q;
    let rhs = |r: f64, y: &[f64; 2]| {
        let b = p.log_derivative(r);
        [y[1], -(b - q) * y[1] - (lam - 0.5 * q * b) * y[0]]
    };
    let rest = ode::solve(rhs, R0, to_w(R0), &outputs[split..], cfg)
        .map_err(|e| Error::Ode { r: e.x, reason: e.reason })?;
    states.extend(rest);
    Ok(states)
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::domain("radii must be finite and nonnegative"));
    }
    if r_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("radial grid must be ascending"));
    }
    Ok(())
}

/// `φ_s` on an ascending grid of radii.
pub fn phi(p: &SpaceParams, s: f64, r_grid: &[f64], cfg: &OdeConfig) -> Result<SphericalSolution> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("spectral parameter must be real and >= 0, got {s}")));
    }
    check_grid(r_grid)?;
    let q = p.homogeneous_dim();
    let states = scaled_states(p, s, r_grid, cfg)?;
    let (phi, dphi) = r_grid
        .iter()
        .zip(&states)
        .map(|(&r, w)| {
            let e = (-0.5 * q * r).exp();
            (e * w[0], e * (w[1] - 0.5 * q * w[0]))
        })
        .unzip();
    Ok(SphericalSolution {
        s,
        r: r_grid.to_vec(),
        phi,
        dphi,
        ode_tolerance: cfg.rtol,
    })
}

fn window_points(window: (f64, f64)) -> Vec<f64> {
    let n = 31;
    (0..n)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / (n - 1) as f64)
        .collect()
}

/// The c-function from states `(w, w')` sampled at radii `rs`.
///
/// At each radius `c e^{isr} = (w - i w'/s) / 2`; the estimates are averaged
/// and their spread is the residual.
fn c_from_states(s: f64, rs: &[f64], states: &[[f64; 2]], threshold: f64) -> CFunctionEstimate {
    let n = rs.len() as f64;
    let pointwise = |sign: f64| -> Vec<Complex64> {
        rs.iter()
            .zip(states)
            .map(|(&r, w)| {
                let osc = Complex64::from_polar(1.0, -sign * s * r);
                osc * Complex64::new(w[0], -sign * w[1] / s) * 0.5
            })
            .collect()
    };
    let plus = pointwise(1.0);
    let minus = pointwise(-1.0);
    let c_plus = plus.iter().sum::<Complex64>() / n;
    let c_minus = minus.iter().sum::<Complex64>() / n;
    let residual = plus
        .iter()
        .map(|c| (c - c_plus).norm())
        .fold(0.0, f64::max)
        / c_plus.norm();
    CFunctionEstimate {
        s,
        c_plus,
        c_minus,
        residual,
        plancherel_density: c_plus.norm_sqr().recip(),
        reliable: residual <= threshold,
    }
}

/// The c-function at `s > 0` fitted on the default window `[25, 40]`.
pub fn c_function(p: &SpaceParams, s: f64) -> Result<CFunctionEstimate> {
    let cfg = SphericalConfig::default();
    c_function_in_window(p, s, cfg.fit_window, &cfg)
}

pub fn c_function_in_window(
    p: &SpaceParams,
    s: f64,
    window: (f64, f64),
    cfg: &SphericalConfig,
) -> Result<CFunctionEstimate> {
    if !(s >= S_MIN) || !s.is_finite() {
        return Err(Error::IllConditioned {
            s,
            reason: format!("asymptotics degenerate below s = {S_MIN}"),
        });
    }
    if !(window.0 > 1.0 && window.1 > window.0) {
        return Err(Error::domain(format!("bad fit window {window:?}")));
    }
    let rs = window_points(window);
    let states = scaled_states(p, s, &rs, &cfg.ode)?;
    Ok(c_from_states(s, &rs, &states, cfg.fit_residual))
}

/// Radial rule on `[0, r_max]` reaching far enough for the given decay class.
fn radial_rule(f: &RadialFunction, cfg: &SphericalConfig) -> CompositeRule {
    let r_max = f.decay.effective_radius().clamp(1.0, cfg.r_max);
    CompositeRule::with_panel_width(0.0, r_max, cfg.r_panel, cfg.r_order)
}

/// `ℋf(s) = ∫ f φ_s A dr` for a single `s`.
///
/// Two Gauss rules of different order on the same panels must agree,
/// otherwise the profile is under-resolved.
pub fn spherical_transform(p: &SpaceParams, f: &RadialFunction, s: f64) -> Result<Complex64> {
    let cfg = SphericalConfig::default();
    let fine = radial_rule(f, &cfg);
    let coarse = CompositeRule::new(fine.a, fine.b, fine.panels, cfg.r_order - 6);
    let mut estimates = [Complex64::new(0.0, 0.0); 2];
    let mut scale = 0.0;
    for (slot, rule) in estimates.iter_mut().zip([&fine, &coarse]) {
        let sol = phi(p, s, &rule.nodes, &cfg.ode)?;
        let vals: Vec<Complex64> = rule
            .nodes
            .iter()
            .zip(&sol.phi)
            .map(|(&r, ph)| f.eval(r) * *ph * p.density(r))
            .collect();
        scale = vals
            .iter()
            .zip(&rule.weights)
            .map(|(v, w)| v.norm() * w)
            .sum::<f64>();
        *slot = rule.integrate(&vals);
    }
    let gap = (estimates[0] - estimates[1]).norm();
    if gap > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonConvergence {
            context: format!("spherical transform at s = {s}"),
            value: estimates[0],
            estimate: gap,
        });
    }
    Ok(estimates[0])
}

/// `ℋh_τ(s)` for each `s`, from kernel samples.
///
/// When the Gaussian factor `exp(-r² Re(1/τ) / 4)` does not decay within
/// the radial range (nearly imaginary τ), the integral is not absolutely
/// convergent. Then the range is split at `R` beyond the stationary point of
/// the phase, `φ_s` is replaced by its two-term asymptotics on `[R, ∞)`,
/// and the tail is summed cell by cell with Wynn's epsilon algorithm
/// (Abel summation).
pub fn kernel_transform(
    p: &SpaceParams,
    tau: ComplexTime,
    spectrum: &[f64],
    exec: Execution,
) -> Result<Vec<Complex64>> {
    let cfg = SphericalConfig::default();
    if spectrum.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::domain("spectral parameters must be finite and >= 0"));
    }
    let t = tau.value();
    // The transform of h at conj(τ) is the conjugate.
    if t.im < 0.0 {
        let conj = ComplexTime::new(t.conj())?;
        return Ok(kernel_transform(p, conj, spectrum, exec)?
            .into_iter()
            .map(|z| z.conj())
            .collect());
    }
    let inv = t.inv();
    let decay = 0.25 * inv.re;
    let beta = -0.25 * inv.im;
    let s_top = spectrum.iter().cloned().fold(0.0, f64::max);
    let direct_reach = (90.0 / decay.max(1e-300)).sqrt();
    let q = p.homogeneous_dim();

    if direct_reach <= cfg.r_max {
        let r_end = direct_reach.max(5.0);
        let rate = 2.0 * beta * r_end + s_top;
        let width = cfg.r_panel.min(15.0 / rate.max(1e-9));
        let rule = CompositeRule::with_panel_width(0.0, r_end, width, cfg.r_order);
        let weighted = weighted_kernel(p, tau, &rule, exec)?;
        return exec
            .map(spectrum, |&s| {
                let sol = phi(p, s, &rule.nodes, &cfg.ode)?;
                Ok(weighted.iter().zip(&sol.phi).map(|(v, ph)| v * ph).sum())
            })
            .into_iter()
            .collect();
    }

    if beta <= 0.0 {
        return Err(Error::domain(format!(
            "transform of h_τ at τ = {t} needs a radial range beyond {}",
            cfg.r_max
        )));
    }
    let split = (s_top / (2.0 * beta) + 10.0).max(30.0);
    let rate = 2.0 * beta * split + s_top;
    let width = cfg.r_panel.min(15.0 / rate);
    let near = CompositeRule::with_panel_width(0.0, split, width, cfg.r_order);
    let weighted = weighted_kernel(p, tau, &near, exec)?;

    // Smooth part of the tail integrand, G = amp · e^{-Q²τ/4} e^{-Qr/2} A.
    let min_cells = 80.0;
    let tail_len = ((split * split + min_cells * PI / beta).sqrt() - split).max(5.0);
    let tail = CompositeRule::with_panel_width(split, split + tail_len, 1.0, 16);
    let ev = evaluator(p);
    let smooth: Vec<Result<Complex64>> = exec.map(&tail.nodes, |&r| {
        let kv = ev.eval(tau, r)?;
        let shift = -0.25 * q * q * t + (p.log_density(r) - 0.5 * q * r);
        Ok((kv.amplitude * ScaledComplex::exp(shift)).to_complex())
    });
    let smooth = smooth.into_iter().collect::<Result<Vec<_>>>()?;

    exec.map(spectrum, |&s| {
        if s < S_MIN {
            return Err(Error::IllConditioned {
                s,
                reason: "tail asymptotics need s > 0".into(),
            });
        }
        // The fit window lies beyond the split, so near nodes stay first.
        let fit = window_points((split, split + 15.0));
        let mut outputs = near.nodes.clone();
        outputs.extend(&fit);
        let states = scaled_states(p, s, &outputs, &cfg.ode)?;
        let near_sum: Complex64 = near
            .nodes
            .iter()
            .zip(&states)
            .zip(&weighted)
            .map(|((&r, w), v)| v * (w[0] * (-0.5 * q * r).exp()))
            .sum();
        let at = near.len();
        let est = c_from_states(s, &fit, &states[at..], cfg.fit_residual);
        let mut total = near_sum;
        for (c, sign) in [(est.c_plus, 1.0), (est.c_minus, -1.0)] {
            total += c * chirp_tail(&tail, &smooth, inv, beta, sign * s, near_sum.norm())?;
        }
        Ok(total)
    })
    .into_iter()
    .collect()
}

/// `h_τ(r_j) A(r_j) w_j` on the nodes of `rule`.
fn weighted_kernel(
    p: &SpaceParams,
    tau: ComplexTime,
    rule: &CompositeRule,
    exec: Execution,
) -> Result<Vec<Complex64>> {
    let ev = evaluator(p);
    let vals: Vec<Result<Complex64>> = exec.map_range(rule.len(), |j| {
        let r = rule.nodes[j];
        let kv = ev.eval(tau, r)?;
        let z = kv.scaled() * ScaledComplex::exp(Complex64::new(p.log_density(r), 0.0));
        Ok(z.to_complex() * rule.weights[j])
    });
    vals.into_iter().collect()
}

/// Abel sum of `∫_R^∞ G(r) e^{-r²/4τ + iσr} dr` with `G` interpolated from
/// `smooth` on `tail`. Cells are delimited where the phase `βr² + σr`
/// advances by π.
fn chirp_tail(
    tail: &CompositeRule,
    smooth: &[Complex64],
    inv_tau: Complex64,
    beta: f64,
    sigma: f64,
    scale: f64,
) -> Result<Complex64> {
    let start = tail.a;
    let psi0 = beta * start * start + sigma * start;
    let cell_edge = |n: usize| {
        let c = psi0 + n as f64 * PI;
        (-sigma + (sigma * sigma + 4.0 * beta * c).sqrt()) / (2.0 * beta)
    };
    let integrand = |r: f64| {
        let g = tail.interpolate(smooth, r);
        g * (Complex64::new(0.0, sigma * r) - 0.25 * r * r * inv_tau).exp()
    };
    let cfg = QuadConfig::with_tolerance(1e-15 * scale, 1e-12);
    let mut wynn = WynnEpsilon::new();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut n = 0;
    loop {
        let (a, b) = (cell_edge(n), cell_edge(n + 1));
        if b > tail.b {
            return Err(Error::NonConvergence {
                context: format!("chirped tail beyond r = {start}"),
                value: partial,
                estimate: wynn.push(partial).error,
            });
        }
        partial += integrate_adaptive(integrand, a, b, &cfg).value;
        let ext = wynn.push(partial);
        n += 1;
        if n >= 8 && ext.error <= 1e-11 * (scale + ext.value.norm()) {
            return Ok(ext.value);
        }
    }
}

/// Precomputed `φ_{s_i}(r_j)` on a spectral rule × radial rule, with the
/// Plancherel density and the inversion constant.
#[derive(Clone, Debug)]
pub struct SphericalBasis {
    params: SpaceParams,
    config: SphericalConfig,
    radial: CompositeRule,
    spectral: CompositeRule,
    /// Row-major in `s`: `phi[i * nr + j] = φ_{s_i}(r_j)`.
    phi: Vec<f64>,
    /// `A(r_j) · weight_j`.
    area: Vec<f64>,
    c_plus: Vec<Complex64>,
    density: Vec<f64>,
    fit_residual: Vec<f64>,
    calibration: SphericalCalibration,
}

impl SphericalBasis {
    pub fn new(p: &SpaceParams, config: SphericalConfig, exec: Execution) -> Result<Self> {
        let radial = CompositeRule::with_panel_width(0.0, config.r_max, config.r_panel, config.r_order);
        let spectral = CompositeRule::with_panel_width(0.0, config.s_max, config.s_panel, config.s_order);
        let nr = radial.len();
        let fit = window_points(config.fit_window);
        let mut outputs: Vec<(f64, Option<usize>)> = radial
            .nodes
            .iter()
            .enumerate()
            .map(|(j, &r)| (r, Some(j)))
            .chain(fit.iter().map(|&r| (r, None)))
            .collect();
        outputs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let radii: Vec<f64> = outputs.iter().map(|o| o.0).collect();
        let q = p.homogeneous_dim();

        let rows: Vec<Result<(Vec<f64>, CFunctionEstimate)>> = exec.map(&spectral.nodes, |&s| {
            let states = scaled_states(p, s, &radii, &config.ode)?;
            let mut row = vec![0.0; nr];
            let mut fit_states = Vec::with_capacity(fit.len());
            for ((r, slot), w) in outputs.iter().zip(&states) {
                match slot {
                    Some(j) => row[*j] = w[0] * (-0.5 * q * r).exp(),
                    None => fit_states.push(*w),
                }
            }
            Ok((row, c_from_states(s, &fit, &fit_states, config.fit_residual)))
        });
        let mut phi = Vec::with_capacity(nr * spectral.len());
        let (mut c_plus, mut density, mut fit_residual) = (vec![], vec![], vec![]);
        for row in rows {
            let (row, est) = row?;
            phi.extend(row);
            c_plus.push(est.c_plus);
            density.push(est.plancherel_density);
            fit_residual.push(est.residual);
        }
        let area = radial
            .nodes
            .iter()
            .zip(&radial.weights)
            .map(|(&r, w)| p.density(r) * w)
            .collect();
        let mut basis = SphericalBasis {
            params: *p,
            config,
            radial,
            spectral,
            phi,
            area,
            c_plus,
            density,
            fit_residual,
            calibration: SphericalCalibration {
                c_s: 1.0,
                reference_error: f64::NAN,
            },
        };
        basis.calibration = basis.calibrate(1.0)?;
        Ok(basis)
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    pub fn config(&self) -> &SphericalConfig {
        &self.config
    }

    pub fn radii(&self) -> &[f64] {
        &self.radial.nodes
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectral.nodes
    }

    pub fn radial_rule(&self) -> &CompositeRule {
        &self.radial
    }

    pub fn spectral_rule(&self) -> &CompositeRule {
        &self.spectral
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn c_plus(&self) -> &[Complex64] {
        &self.c_plus
    }

    pub fn max_fit_residual(&self) -> f64 {
        self.fit_residual.iter().cloned().fold(0.0, f64::max)
    }

    pub fn calibration(&self) -> SphericalCalibration {
        self.calibration
    }

    /// `φ_{s_i}` on the radial nodes.
    pub fn phi_row(&self, i: usize) -> &[f64] {
        let nr = self.radial.len();
        &self.phi[i * nr..(i + 1) * nr]
    }

    /// Samples of `f` on the radial nodes.
    pub fn sample(&self, f: &RadialFunction) -> Vec<Complex64> {
        self.radial.nodes.iter().map(|&r| f.eval(r)).collect()
    }

    /// Samples of a spectral function on the spectral nodes.
    pub fn sample_spectrum(&self, m: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        self.spectral.nodes.iter().map(|&s| m(s)).collect()
    }

    /// Heat or Schrödinger kernel on the radial nodes.
    pub fn sample_kernel(&self, tau: ComplexTime, exec: Execution) -> Result<Vec<Complex64>> {
        let ev = evaluator(&self.params);
        exec.map(&self.radial.nodes, |&r| ev.eval(tau, r).map(|v| v.value()))
            .into_iter()
            .collect()
    }

    /// `ℋf` on the spectral nodes from samples on the radial nodes.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.radial.len());
        let weighted: Vec<Complex64> = values.iter().zip(&self.area).map(|(v, a)| v * a).collect();
        (0..self.spectral.len())
            .map(|i| {
                self.phi_row(i)
                    .iter()
                    .zip(&weighted)
                    .map(|(ph, v)| v * ph)
                    .sum()
            })
            .collect()
    }

    /// Inverse transform without the constant `c_S`.
    fn inverse_raw(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(spectrum.len(), self.spectral.len());
        let nr = self.radial.len();
        let mut out = vec![Complex64::new(0.0, 0.0); nr];
        for (i, h) in spectrum.iter().enumerate() {
            let c = h * self.spectral.weights[i] * self.density[i];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, ph) in out.iter_mut().zip(self.phi_row(i)) {
                *o += c * ph;
            }
        }
        out
    }

    /// Values on the radial nodes of the function whose transform is given
    /// on the spectral nodes.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let c = self.calibration.c_s;
        self.inverse_raw(spectrum).into_iter().map(|v| v * c).collect()
    }

    /// Interpolates node values at an arbitrary radius in `[0, r_max]`.
    pub fn interpolate(&self, values: &[Complex64], r: f64) -> Complex64 {
        self.radial.interpolate(values, r)
    }

    /// `(∫ |v|^q A dr)^{1/q}` from node values; `q = ∞` is the largest sample.
    pub fn lq_norm(&self, values: &[Complex64], q: f64) -> f64 {
        if q.is_infinite() {
            return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let sum: f64 = values
            .iter()
            .zip(&self.area)
            .map(|(v, a)| v.norm().powf(q) * a)
            .sum();
        sum.powf(1.0 / q)
    }

    /// `(c_S ∫ |ℋf|² |c|^{-2} ds)^{1/2}`.
    pub fn spectral_l2_norm(&self, spectrum: &[Complex64]) -> f64 {
        let sum: f64 = spectrum
            .iter()
            .zip(&self.spectral.weights)
            .zip(&self.density)
            .map(|((h, w), d)| h.norm_sqr() * w * d)
            .sum();
        (self.calibration.c_s * sum).sqrt()
    }

    /// Chooses `c_S` so that the inverse transform of `e^{-Q²τ/4} e^{-τs²}`
    /// reproduces `h_τ(2)`, and validates the choice at ten more radii.
    pub fn calibrate(&self, tau: f64) -> Result<SphericalCalibration> {
        let t = ComplexTime::real(tau)?;
        let q = self.params.homogeneous_dim();
        let spec = self.sample_spectrum(|s| Complex64::new((-0.25 * q * q * tau - tau * s * s).exp(), 0.0));
        let raw = self.inverse_raw(&spec);
        let h = |r: f64| kernel_h(&self.params, t, r).map(|v| v.value().re);
        let ratio = h(2.0)? / self.interpolate(&raw, 2.0).re;
        if !(ratio > 0.0) || !ratio.is_finite() {
            return Err(Error::Calibration(format!("non-positive constant {ratio}")));
        }
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            let r = 0.5 + i as f64;
            let want = h(r)?;
            let got = ratio * self.interpolate(&raw, r).re;
            worst = worst.max(((got - want) / want).abs());
        }
        if worst > 1e-4 {
            return Err(Error::Calibration(format!(
                "reconstruction of h_{tau} off by {worst:.2e} for {}",
                self.params
            )));
        }
        Ok(SphericalCalibration {
            c_s: ratio,
            reference_error: worst,
        })
    }
}

type BasisCache = RwLock<HashMap<SpaceParams, Arc<SphericalBasis>>>;

/// Shared basis with the default configuration, built on first use.
pub fn basis(p: &SpaceParams) -> Result<Arc<SphericalBasis>> {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().expect("basis cache poisoned").get(p) {
        return Ok(b.clone());
    }
    let b = Arc::new(SphericalBasis::new(p, SphericalConfig::default(), Execution::default())?);
    Ok(cache
        .write()
        .expect("basis cache poisoned")
        .entry(*p)
        .or_insert(b)
        .clone())
}
