//! Complex-time heat kernels `h_τ` as radial profiles.
//!
//! For even `k` the kernel is a finite sum obtained from the Gaussian by the
//! operator chain in [`crate::symbolic`]. For odd `k` one more Abel integral
//! `∫_r^∞ G(s) dν(s)`, `dν = (cosh s - cosh r)^{-1/2} sinh s ds`, remains and
//! is evaluated numerically after the substitution `s = r + v²`.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{distance_to_identity, Decay, GroupPoint, RadialFunction, SpaceParams};
use crate::numeric::accel::WynnEpsilon;
use crate::numeric::quad::{integrate_adaptive, QuadConfig};
use crate::numeric::scaled::ScaledComplex;
use crate::numeric::special::{gamma_half_integer, ln_sinh};
use crate::symbolic::{kernel_chain, kernel_operators, ChainEvaluator, ComplexTime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelMethod {
    ClosedForm,
    AbelIntegral,
}

impl KernelMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelMethod::ClosedForm => "even-closed-form",
            KernelMethod::AbelIntegral => "odd-abel-integral",
        }
    }
}

/// `h_τ(r) = amplitude · exp(exponent)` with `exponent = -Q²τ/4 - r²/4τ`.
///
/// The split keeps the fast chirp of the Schrödinger kernel separate from
/// its slowly varying amplitude.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelValue {
    pub amplitude: ScaledComplex,
    pub exponent: Complex64,
    pub method: KernelMethod,
    /// Estimated relative error of the value.
    pub rel_error: f64,
    /// Number of integration cells (zero for the closed form).
    pub cells: usize,
}

impl KernelValue {
    pub fn scaled(&self) -> ScaledComplex {
        self.amplitude * ScaledComplex::exp(self.exponent)
    }

    pub fn value(&self) -> Complex64 {
        self.scaled().to_complex()
    }

    pub fn ln_abs(&self) -> f64 {
        self.amplitude.ln_abs() + self.exponent.re
    }
}

/// Precompiled kernel evaluator for one space.
#[derive(Clone, Debug)]
pub struct KernelEvaluator {
    params: SpaceParams,
    chain: ChainEvaluator,
    ln_prefactor: f64,
    r_min: f64,
    tol: f64,
    max_cells: usize,
}

impl KernelEvaluator {
    pub fn new(params: SpaceParams) -> Self {
        let chain = ChainEvaluator::new(&kernel_chain(&params))
            .expect("kernel chains are analytic at the origin");
        let n = params.dimension();
        let k = params.k() as f64;
        let mut ln_prefactor = (0.5 * k + 1.0 - n as f64) * LN_2 - gamma_half_integer(n).ln();
        if params.k() % 2 == 1 {
            ln_prefactor -= 0.5 * PI.ln();
        }
        let r_min = 1e-3;
        KernelEvaluator {
            params,
            chain,
            ln_prefactor,
            r_min,
            tol: 1e-10,
            max_cells: 4000,
        }
    }

    /// Relative accuracy target of the Abel integral.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_r_min(mut self, r_min: f64) -> Self {
        self.r_min = r_min;
        self
    }

    pub fn with_max_cells(mut self, cells: usize) -> Self {
        self.max_cells = cells;
        self
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn method(&self) -> KernelMethod {
        if self.params.k().is_multiple_of(2) {
            KernelMethod::ClosedForm
        } else {
            KernelMethod::AbelIntegral
        }
    }

    pub fn chain_length(&self) -> usize {
        kernel_operators(&self.params).len()
    }

    pub fn eval(&self, tau: ComplexTime, r: f64) -> Result<KernelValue> {
        if !(r >= self.r_min) || !r.is_finite() {
            return Err(Error::domain(format!(
                "r = {r} outside [{}, ∞) for {}",
                self.r_min, self.params
            )));
        }
        let t = tau.value();
        let q = self.params.homogeneous_dim();
        let exponent = -q * q * t / 4.0 - r * r / (4.0 * t);
        let pre = ScaledComplex::new(t.powf(-0.5), self.ln_prefactor);
        if self.params.k().is_multiple_of(2) {
            let (amp, cond) = self.chain.amplitude(r, t);
            return Ok(KernelValue {
                amplitude: pre * amp,
                exponent,
                method: KernelMethod::ClosedForm,
                rel_error: 4.0 * f64::EPSILON * cond,
                cells: 0,
            });
        }
        let (integral, rel_error, cells) = self.abel_integral(r, t)?;
        Ok(KernelValue {
            amplitude: pre * integral,
            exponent,
            method: KernelMethod::AbelIntegral,
            rel_error,
            cells,
        })
    }

    /// `∫_r^∞ E(s) e^{-(s² - r²)/4τ} dν(s)` where `E` is the chain without its
    /// Gaussian. With `s = r + v²`,
    /// `dν = 2 sinh s · sqrt(x / sinh x) / sqrt(sinh((s+r)/2)) dv`, `x = v²/2`.
    ///
    /// The `v` axis is cut into cells over which the Gaussian phase advances
    /// by about π (or decays by `e^{-2π}` for real τ). Cell sums are added
    /// until they are negligible; for strongly oscillating τ the partial sums
    /// are also passed through Wynn's epsilon algorithm.
    fn abel_integral(&self, r: f64, tau: Complex64) -> Result<(ScaledComplex, f64, usize)> {
        let ln_weight = |v: f64, s: f64| {
            let x = 0.5 * v * v;
            let ln_ratio = if x < 1e-4 { -x * x / 6.0 } else { x.ln() - ln_sinh(x) };
            LN_2 + ln_sinh(s) + 0.5 * ln_ratio - 0.5 * ln_sinh(0.5 * (s + r))
        };
        let (amp0, cond0) = self.chain.amplitude(r, tau);
        let reference = amp0.ln_abs() + ln_weight(0.0, r);
        let reference = if reference.is_finite() { reference } else { 0.0 };
        let integrand = |v: f64| {
            let s = r + v * v;
            let (amp, _) = self.chain.amplitude(s, tau);
            let g = -v * v * (s + r) / (4.0 * tau);
            let lw = ln_weight(v, s);
            let z = amp * ScaledComplex::exp(g + lw);
            z.rescaled(reference)
        };

        let sin_theta = (tau.im / tau.norm()).abs();
        let delta = 4.0 * PI * tau.norm() / sin_theta.max(0.5);
        let oscillatory = sin_theta >= 0.5;
        let v_at = |n: usize| {
            let nd = n as f64 * delta;
            let sn = (r * r + nd).sqrt();
            (nd / (sn + r)).sqrt()
        };

        let mut wynn = WynnEpsilon::new();
        let mut partial = Complex64::new(0.0, 0.0);
        let mut quad_err = 0.0;
        let mut scale: f64 = 0.0;
        let mut quiet = 0;
        let mut prev_cell = f64::INFINITY;
        for n in 0..self.max_cells {
            let (a, b) = (v_at(n), v_at(n + 1));
            let cfg = QuadConfig {
                abs_tol: 0.01 * self.tol * scale,
                rel_tol: 0.01 * self.tol,
                max_intervals: 200,
            };
            let cell = integrate_adaptive(integrand, a, b, &cfg);
            partial += cell.value;
            quad_err += cell.error;
            scale = scale.max(partial.norm()).max(cell.value.norm());
            let cell_abs = cell.value.norm();

            if cell_abs <= 0.1 * self.tol * partial.norm() && cell_abs <= prev_cell {
                quiet += 1;
            } else {
                quiet = 0;
            }
            prev_cell = cell_abs;
            if quiet >= 2 {
                let rel = (quad_err + 2.0 * cell_abs) / partial.norm() + 4.0 * f64::EPSILON * cond0;
                return Ok((ScaledComplex::new(partial, reference), rel, n + 1));
            }
            if oscillatory {
                let ext = wynn.push(partial);
                if n >= 4 && ext.error <= self.tol * ext.value.norm() {
                    let rel = (ext.error + quad_err) / ext.value.norm() + 4.0 * f64::EPSILON * cond0;
                    return Ok((ScaledComplex::new(ext.value, reference), rel, n + 1));
                }
            }
        }
        let estimate = if oscillatory {
            wynn.push(partial).error
        } else {
            prev_cell
        };
        Err(Error::NonConvergence {
            context: format!("Abel integral at r = {r}, τ = {tau}"),
            value: ScaledComplex::new(partial, reference).to_complex(),
            estimate,
        })
    }
}

type EvaluatorCache = RwLock<HashMap<SpaceParams, Arc<KernelEvaluator>>>;

fn cache() -> &'static EvaluatorCache {
    static CACHE: OnceLock<EvaluatorCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared evaluator with default settings, built on first use.
pub fn evaluator(p: &SpaceParams) -> Arc<KernelEvaluator> {
    if let Some(e) = cache().read().expect("kernel cache poisoned").get(p) {
        return e.clone();
    }
    let e = Arc::new(KernelEvaluator::new(*p));
    cache()
        .write()
        .expect("kernel cache poisoned")
        .entry(*p)
        .or_insert(e)
        .clone()
}

/// `h_τ(r)`.
pub fn kernel_h(p: &SpaceParams, tau: ComplexTime, r: f64) -> Result<KernelValue> {
    evaluator(p).eval(tau, r)
}

/// Schrödinger kernel `s_t = h_{it}`.
pub fn schrodinger_kernel(p: &SpaceParams, t: f64, r: f64) -> Result<KernelValue> {
    kernel_h(p, ComplexTime::imaginary(t)?, r)
}

/// `σ_t(x) = δ(x)^{1/2} e^{iQ²t/4} s_t(r(x))`.
pub fn sigma_kernel(p: &SpaceParams, t: f64, x: &GroupPoint) -> Result<ScaledComplex> {
    let q = p.homogeneous_dim();
    let r = distance_to_identity(x);
    let s = schrodinger_kernel(p, t, r)?;
    let shift = Complex64::new(-0.5 * q * x.a.ln(), 0.25 * q * q * t);
    Ok(s.scaled() * ScaledComplex::exp(shift))
}

/// Kernel values on a `τ × r` grid, row-major in `τ`.
pub fn kernel_grid(
    p: &SpaceParams,
    taus: &[ComplexTime],
    radii: &[f64],
    exec: Execution,
) -> Vec<Result<KernelValue>> {
    let ev = evaluator(p);
    let jobs: Vec<(ComplexTime, f64)> = taus
        .iter()
        .flat_map(|&t| radii.iter().map(move |&r| (t, r)))
        .collect();
    exec.map(&jobs, |&(t, r)| ev.eval(t, r))
}

/// `h_τ` as a radial function, extended by its value at `r_min` below it.
/// Evaluation failures become NaN.
pub fn kernel_function(p: &SpaceParams, tau: ComplexTime) -> RadialFunction {
    let ev = evaluator(p);
    let r_min = ev.r_min();
    let inv = 1.0 / tau.value();
    let decay = if inv.re > 0.0 {
        Decay::Gaussian { scale: 1.0 / inv.re }
    } else {
        Decay::Unknown
    };
    RadialFunction::new(
        move |r| {
            ev.eval(tau, r.max(r_min))
                .map(|v| v.value())
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        },
        r_min,
        decay,
    )
}

/// Residual of `∂_τ h = Δ h` at `(τ, r)` by fourth-order central differences,
/// relative to the summed sizes of `∂_τ h`, `∂_r² h` and `(A'/A) ∂_r h`. `step` is dimensionless: the actual steps are `step` divided by
/// the rate at which `ln |h|` varies in each variable.
pub fn heat_residual(p: &SpaceParams, tau: ComplexTime, r: f64, step: f64) -> Result<f64> {
    let modulus = tau.modulus();
    let q = p.homogeneous_dim();
    let rate_t = 0.25 * r * r / (modulus * modulus) + 0.5 * p.dimension() as f64 / modulus + 0.25 * q * q;
    let rate_r = 0.5 * r / modulus + 0.5 * q + 1.0 / r;
    let (step_t, step_r) = (step / rate_t.max(1.0), step / rate_r.max(1.0));
    if !(step > 0.0) || r - 2.0 * step_r <= 0.0 || modulus - 2.0 * step_t <= 0.0 {
        return Err(Error::domain(format!("step {step} too large at τ = {}, r = {r}", tau.value())));
    }
    let ev = evaluator(p);
    let centre = ev.eval(tau, r)?.scaled();
    let reference = centre.ln_abs();
    let at = |dt: f64, dr: f64| -> Result<Complex64> {
        let t = ComplexTime::new(tau.value() + dt)?;
        Ok(ev.eval(t, r + dr)?.scaled().rescaled(reference))
    };
    let offsets = [-2.0, -1.0, 1.0, 2.0];
    let d1 = [1.0, -8.0, 8.0, -1.0];
    let d2 = [-1.0, 16.0, 16.0, -1.0];
    let mut dtau = Complex64::new(0.0, 0.0);
    let mut dr = Complex64::new(0.0, 0.0);
    let mut drr = -30.0 * centre.rescaled(reference);
    for (i, &o) in offsets.iter().enumerate() {
        let along_t = at(o * step_t, 0.0)?;
        let along_r = at(0.0, o * step_r)?;
        dtau += d1[i] * along_t;
        dr += d1[i] * along_r;
        drr += d2[i] * along_r;
    }
    dtau /= 12.0 * step_t;
    dr /= 12.0 * step_r;
    drr /= 12.0 * step_r * step_r;
    let drift = p.log_derivative(r) * dr;
    Ok((dtau - drr - drift).norm() / (dtau.norm() + drr.norm() + drift.norm()))
}

/// Branch of the pointwise upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Regime {
    /// `|τ| <= 1 + r`
    Small,
    /// `|τ| > 1 + r`
    Large,
}

/// Envelope kept in log form; it underflows for small `|τ|` at moderate `r`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundEnvelope {
    pub regime: Regime,
    pub ln_value: f64,
}

impl BoundEnvelope {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// `|τ|^{-n/2} (1+r)^{(n-1)/2}` for `|τ| <= 1 + r`, else `|τ|^{-3/2} (1+r)`,
/// times `e^{-Qr/2} e^{-Re(Q²τ + r²/τ)/4}`.
pub fn upper_bound_envelope(p: &SpaceParams, tau: ComplexTime, r: f64) -> BoundEnvelope {
    let t = tau.value();
    let modulus = tau.modulus();
    let n = p.dimension() as f64;
    let q = p.homogeneous_dim();
    let common = -0.5 * q * r - 0.25 * (q * q * t + r * r / t).re;
    let (regime, ln_poly) = if modulus <= 1.0 + r {
        (Regime::Small, -0.5 * n * modulus.ln() + 0.5 * (n - 1.0) * r.ln_1p())
    } else {
        (Regime::Large, -1.5 * modulus.ln() + r.ln_1p())
    };
    BoundEnvelope {
        regime,
        ln_value: ln_poly + common,
    }
}

/// `ln` of `t^{-n/2} r^{(n-1)/2} e^{-Qr/2}`, valid for `r > 1 + c t`.
pub fn lower_bound_envelope(p: &SpaceParams, t: f64, r: f64, c: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("lower bound needs t > 0, got {t}")));
    }
    if !(r > 1.0 + c * t) {
        return Err(Error::domain(format!("r = {r} inside the excluded region r <= 1 + {c}·{t}")));
    }
    let n = p.dimension() as f64;
    Ok(-0.5 * n * t.ln() + 0.5 * (n - 1.0) * r.ln() - 0.5 * p.homogeneous_dim() * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_kernel_on_real_hyperbolic_space() {
        // Closed form for m = 2, k = 0, normalized against A(r) = 4 sinh²(r/2).
        let p = SpaceParams::real_hyperbolic();
        for (t, r) in [(0.5, 0.3), (1.0, 2.0), (3.0, 10.0)] {
            let v = kernel_h(&p, ComplexTime::real(t).unwrap(), r).unwrap().value().re;
            let want = r * (-t / 4.0 - r * r / (4.0 * t)).exp()
                / (4.0 * PI.sqrt() * t.powf(1.5) * (0.5 * r).sinh());
            assert!((v - want).abs() < 1e-13 * want, "t={t} r={r}: {v} vs {want}");
        }
    }

    #[test]
    fn envelope_regimes() {
        let p = SpaceParams::heisenberg(1).unwrap();
        let at = |t: f64, r: f64| upper_bound_envelope(&p, ComplexTime::real(t).unwrap(), r);
        assert_eq!(at(3.0, 2.0).regime, Regime::Small);
        assert_eq!(at(3.0 + 1e-12, 2.0).regime, Regime::Large);
        let e = at(1.0, 10.0);
        assert!((e.ln_value - (1.5 * 11f64.ln() - 10.0 - 1.0 - 25.0)).abs() < 1e-12);
        let imag = upper_bound_envelope(&p, ComplexTime::imaginary(2.0).unwrap(), 10.0);
        assert!((imag.ln_value - (1.5 * 11f64.ln() - 2.0 * 2f64.ln() - 10.0)).abs() < 1e-12);
        let low = lower_bound_envelope(&p, 1.0, 10.0, 4.0).unwrap();
        assert!((low - (1.5 * 10f64.ln() - 10.0)).abs() < 1e-12);
        assert!(lower_bound_envelope(&p, 1.0, 5.0, 4.0).is_err());
    }

    #[test]
    fn rejects_radius_below_floor() {
        let p = SpaceParams::quaternionic(1).unwrap();
        let e = evaluator(&p);
        assert!(e.eval(ComplexTime::real(1.0).unwrap(), 0.5 * e.r_min()).is_err());
    }
}
