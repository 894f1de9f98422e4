//! Radial functional calculus through the spherical transform:
//! `m(-Δ_Q) f = ℋ^{-1}[m(s²) ℋf]`, Schrödinger evolution, the twisted
//! evolution for the distinguished Laplacian, Strichartz window norms and
//! the inhomogeneous (Duhamel) problem.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{distance_to_identity, GroupPoint, RadialFunction};
use crate::spherical::SphericalBasis;

type Symbol = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A spectral multiplier `v ↦ m(v)`, applied as `m(s²)` on the transform side.
#[derive(Clone)]
pub struct Multiplier {
    symbol: Symbol,
    pub description: String,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier").field("description", &self.description).finish()
    }
}

impl Multiplier {
    pub fn new<F>(symbol: F, description: impl Into<String>) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Multiplier {
            symbol: Arc::new(symbol),
            description: description.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(|_| Complex64::new(1.0, 0.0), "1")
    }

    /// `e^{-τ(v + Q²/4)}`, the multiplier of `h_τ`.
    pub fn heat(q: f64, tau: Complex64) -> Self {
        Self::new(move |v| (-tau * (v + 0.25 * q * q)).exp(), format!("exp(-({tau})(v + Q²/4))"))
    }

    /// `e^{-it(v + Q²/4)}`, the multiplier of `e^{itΔ_S}`.
    pub fn schrodinger(q: f64, t: f64) -> Self {
        Self::heat(q, Complex64::new(0.0, t))
    }

    pub fn eval(&self, v: f64) -> Complex64 {
        (self.symbol)(v)
    }

    /// Pointwise product.
    pub fn then(&self, other: &Multiplier) -> Multiplier {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        Multiplier::new(move |v| a(v) * b(v), format!("({})·({})", self.description, other.description))
    }

    /// Largest `|m(s²)|` on the spectral nodes of `basis`.
    pub fn sup_on(&self, basis: &SphericalBasis) -> f64 {
        basis
            .spectrum()
            .iter()
            .map(|s| self.eval(s * s).norm())
            .fold(0.0, f64::max)
    }
}

/// A radial function sampled on the radial nodes of a basis.
#[derive(Clone, Debug)]
pub struct RadialSamples {
    pub basis: Arc<SphericalBasis>,
    pub values: Vec<Complex64>,
}

impl RadialSamples {
    pub fn new(basis: Arc<SphericalBasis>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != basis.radii().len() {
            return Err(Error::DimensionMismatch {
                expected: basis.radii().len(),
                got: values.len(),
            });
        }
        Ok(RadialSamples { basis, values })
    }

    pub fn from_function(basis: Arc<SphericalBasis>, f: &RadialFunction) -> Self {
        let values = basis.sample(f);
        RadialSamples { basis, values }
    }

    /// Interpolated value; zero beyond the last radial panel.
    pub fn eval(&self, r: f64) -> Complex64 {
        if r > self.basis.radial_rule().b {
            return Complex64::new(0.0, 0.0);
        }
        self.basis.interpolate(&self.values, r)
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        self.basis.lq_norm(&self.values, q)
    }

    pub fn transform(&self) -> Vec<Complex64> {
        self.basis.forward(&self.values)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        RadialSamples {
            basis: self.basis.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn into_function(self) -> RadialFunction {
        let r_max = self.basis.radial_rule().b;
        RadialFunction::new(move |r| self.eval(r), 0.0, crate::geometry::Decay::Compact { radius: r_max })
    }
}

fn spectral_multiply(basis: &SphericalBasis, spectrum: &[Complex64], m: &Multiplier) -> Vec<Complex64> {
    basis
        .spectrum()
        .iter()
        .zip(spectrum)
        .map(|(s, h)| h * m.eval(s * s))
        .collect()
}

/// `m(-Δ_Q) f`.
pub fn apply_multiplier(m: &Multiplier, f: &RadialSamples) -> RadialSamples {
    let basis = &f.basis;
    let spec = spectral_multiply(basis, &f.transform(), m);
    RadialSamples {
        basis: basis.clone(),
        values: basis.inverse(&spec),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    /// `samples[i][j] = u(times[i], radii[j])`.
    pub samples: Vec<Vec<Complex64>>,
    pub l2_norms: Vec<f64>,
    pub initial_l2: f64,
}

impl EvolutionRecord {
    /// `sup_t |‖u(t)‖₂ - ‖f‖₂| / ‖f‖₂`.
    pub fn max_l2_drift(&self) -> f64 {
        self.l2_norms
            .iter()
            .map(|n| (n - self.initial_l2).abs() / self.initial_l2)
            .fold(0.0, f64::max)
    }
}

/// `u(t) = e^{itΔ_S} f` for each `t`.
pub fn evolve_schrodinger(f: &RadialSamples, times: &[f64], exec: Execution) -> EvolutionRecord {
    let basis = &f.basis;
    let q = basis.params().homogeneous_dim();
    let spec = f.transform();
    let samples = exec.map(times, |&t| basis.inverse(&spectral_multiply(basis, &spec, &Multiplier::schrodinger(q, t))));
    let l2_norms = samples.iter().map(|u| basis.lq_norm(u, 2.0)).collect();
    EvolutionRecord {
        times: times.to_vec(),
        radii: basis.radii().to_vec(),
        samples,
        l2_norms,
        initial_l2: f.lq_norm(2.0),
    }
}

/// Evolution under the distinguished Laplacian, carried by its radial core.
///
/// For data `f = δ^{1/2} g` with `g` radial, `e^{itℒ} f = e^{iQ²t/4} δ^{1/2}
/// (g ∗ s_t)`. The record holds `v(t) = e^{itΔ_S} g`; `u` is recovered
/// through the twist.
#[derive(Clone, Debug, Serialize)]
pub struct DistinguishedRecord {
    pub q: f64,
    pub core: EvolutionRecord,
}

impl DistinguishedRecord {
    /// `u(times[i], x)`.
    pub fn u(&self, basis: &SphericalBasis, i: usize, x: &GroupPoint) -> Complex64 {
        let t = self.core.times[i];
        let r = distance_to_identity(x);
        let v = if r > basis.radial_rule().b {
            Complex64::new(0.0, 0.0)
        } else {
            basis.interpolate(&self.core.samples[i], r)
        };
        let twist = Complex64::new(-0.5 * self.q * x.a.ln(), 0.25 * self.q * self.q * t).exp();
        v * twist
    }
}

/// `e^{itℒ}` applied to `δ^{1/2} g`, where `core = g`.
pub fn evolve_distinguished(core: &RadialSamples, times: &[f64], exec: Execution) -> DistinguishedRecord {
    DistinguishedRecord {
        q: core.basis.params().homogeneous_dim(),
        core: evolve_schrodinger(core, times, exec),
    }
}

/// Strichartz exponent pair `(p, q)`, each in `[2, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdmissiblePair {
    pub p: f64,
    pub q: f64,
}

impl AdmissiblePair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 2.0 && q >= 2.0) {
            return Err(Error::domain(format!("exponents must lie in [2, ∞], got ({p}, {q})")));
        }
        Ok(AdmissiblePair { p, q })
    }
}

/// Whether `(1/p, 1/q)` lies in the admissible triangle `T_n`:
/// `(0, 1/2] × (0, 1/2)` with `2/p + n/q >= n/2`, plus the point `(0, 1/2)`.
pub fn is_admissible(n: usize, pair: AdmissiblePair) -> bool {
    let (x, y) = (1.0 / pair.p, 1.0 / pair.q);
    if x == 0.0 && y == 0.5 {
        return true;
    }
    let n = n as f64;
    let lhs = 2.0 * x + n * y;
    let rhs = 0.5 * n;
    x > 0.0 && x <= 0.5 && y > 0.0 && y < 0.5 && lhs >= rhs - 4.0 * f64::EPSILON * rhs
}

fn time_index(times: &[f64], t: f64) -> Option<usize> {
    let tol = 1e-9 * (1.0 + t.abs());
    times.iter().position(|&s| (s - t).abs() <= tol)
}

/// `(∫_window ‖u(t)‖_q^p dt)^{1/p}` by the trapezoid rule on the record's
/// time grid, for any exponents. The window ends must be grid times.
pub fn mixed_norm_unchecked(
    rec: &EvolutionRecord,
    basis: &SphericalBasis,
    p: f64,
    q: f64,
    window: (f64, f64),
) -> Result<f64> {
    let (Some(a), Some(b)) = (time_index(&rec.times, window.0), time_index(&rec.times, window.1)) else {
        return Err(Error::domain(format!("window {window:?} is not covered by the record's time grid")));
    };
    if b <= a {
        return Err(Error::domain(format!("empty window {window:?}")));
    }
    let norms: Vec<f64> = rec.samples[a..=b].iter().map(|u| basis.lq_norm(u, q)).collect();
    if p.is_infinite() {
        return Ok(norms.iter().cloned().fold(0.0, f64::max));
    }
    let ts = &rec.times[a..=b];
    let integral: f64 = ts
        .windows(2)
        .zip(norms.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(p) + v[1].powf(p)))
        .sum();
    Ok(integral.powf(1.0 / p))
}

/// As [`mixed_norm_unchecked`], but only for admissible pairs.
pub fn strichartz_window_norm(
    rec: &EvolutionRecord,
    basis: &SphericalBasis,
    pair: AdmissiblePair,
    window: (f64, f64),
) -> Result<f64> {
    let n = basis.params().dimension();
    if !is_admissible(n, pair) {
        return Err(Error::domain(format!("({}, {}) is not admissible for n = {n}", pair.p, pair.q)));
    }
    mixed_norm_unchecked(rec, basis, pair.p, pair.q, window)
}

/// (∫₀¹ e^{zθ} dθ, ∫₀¹ θ e^{zθ} dθ), by series near zero.
fn filon_weights(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        let (mut e1, mut e2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut term = Complex64::new(1.0, 0.0); // z^k / k!
        for k in 0..16 {
            e1 += term / (k + 1) as f64;
            e2 += term / (k + 2) as f64;
            term *= z / (k + 1) as f64;
        }
        (e1, e2)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez * (z - 1.0) + 1.0) / (z * z))
    }
}

/// Solution of `i ∂_t u + Δ_S u = F`, `u(0) = f`:
/// `u(t) = e^{itΔ_S} f - i ∫_0^t e^{i(t-s)Δ_S} F(s) ds`.
///
/// The time integral is done on the transform side, with the forcing linear in
/// time on each piece and the phase integrated exactly. Pieces are halved, with
/// Richardson extrapolation, until two passes agree to `rel_tol` relative to
/// the largest transform value.
pub fn inhomogeneous_solution<F>(
    f: &RadialSamples,
    forcing: F,
    times: &[f64],
    rel_tol: f64,
    exec: Execution,
) -> Result<EvolutionRecord>
where
    F: Fn(f64) -> Vec<Complex64> + Sync,
{
    let basis = &f.basis;
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::domain("times must be ascending and nonnegative"));
    }
    let q = basis.params().homogeneous_dim();
    let lambda: Vec<f64> = basis.spectrum().iter().map(|s| s * s + 0.25 * q * q).collect();
    let f_spec = f.transform();

    // ∫_0^t e^{-i(t-s)λ} ℋF(s) ds with ℋF linear on each step and the phase integrated
    // exactly, so the step size only has to resolve the forcing, not λ.
    let duhamel = |t: f64, spectra: &[Vec<Complex64>]| -> Vec<Complex64> {
        let steps = spectra.len() - 1;
        let h = t / steps as f64;
        let mut acc = vec![Complex64::new(0.0, 0.0); lambda.len()];
        for (idx, l) in lambda.iter().enumerate() {
            let (e1, e2) = filon_weights(Complex64::new(0.0, l * h));
            let (w0, w1) = (h * (e1 - e2), h * e2);
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..steps {
                let phase = Complex64::new(0.0, -(t - h * j as f64) * l).exp();
                sum += phase * (w0 * spectra[j][idx] + w1 * spectra[j + 1][idx]);
            }
            acc[idx] = sum;
        }
        acc
    };
    let converged = |t: f64| -> Result<Vec<Complex64>> {
        if t == 0.0 {
            return Ok(vec![Complex64::new(0.0, 0.0); lambda.len()]);
        }
        let mut steps = 8;
        let nodes: Vec<f64> = (0..=steps).map(|i| t * i as f64 / steps as f64).collect();
        let mut spectra = exec.map(&nodes, |&s| basis.forward(&forcing(s)));
        let mut prev = duhamel(t, &spectra);
        let mut prev_extrapolated: Option<Vec<Complex64>> = None;
        loop {
            let mids: Vec<f64> = (0..steps).map(|i| t * (2 * i + 1) as f64 / (2 * steps) as f64).collect();
            let fresh = exec.map(&mids, |&s| basis.forward(&forcing(s)));
            let mut merged = Vec::with_capacity(2 * steps + 1);
            for (old, new) in spectra.into_iter().zip(fresh.into_iter().map(Some).chain(std::iter::once(None))) {
                merged.push(old);
                merged.extend(new);
            }
            spectra = merged;
            steps *= 2;
            let next = duhamel(t, &spectra);
            // The error is O(h²); one Richardson step removes the leading term.
            let extrapolated: Vec<Complex64> = next.iter().zip(&prev).map(|(a, b)| a + (a - b) / 3.0).collect();
            let reference = prev_extrapolated.as_ref().unwrap_or(&prev);
            let scale = next.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let gap = extrapolated
                .iter()
                .zip(reference)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if gap <= rel_tol * scale.max(f64::MIN_POSITIVE) {
                return Ok(extrapolated);
            }
            if steps >= 1 << 12 {
                return Err(Error::NonConvergence {
                    context: format!("Duhamel integral at t = {t}"),
                    value: Complex64::new(scale, 0.0),
                    estimate: gap,
                });
            }
            prev = next;
            prev_extrapolated = Some(extrapolated);
        }
    };
    let integral = times.iter().map(|&t| converged(t)).collect::<Result<Vec<_>>>()?;

    let samples: Vec<Vec<Complex64>> = times
        .iter()
        .zip(&integral)
        .map(|(&t, duh)| {
            let spec: Vec<Complex64> = f_spec
                .iter()
                .zip(&lambda)
                .zip(duh)
                .map(|((fh, l), d)| fh * Complex64::new(0.0, -t * l).exp() - Complex64::i() * d)
                .collect();
            basis.inverse(&spec)
        })
        .collect();
    let l2_norms = samples.iter().map(|u| basis.lq_norm(u, 2.0)).collect();
    Ok(EvolutionRecord {
        times: times.to_vec(),
        radii: basis.radii().to_vec(),
        samples,
        l2_norms,
        initial_l2: f.lq_norm(2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        let at = |p, q| is_admissible(4, AdmissiblePair::new(p, q).unwrap());
        assert!(at(2.0, 4.0));
        assert!(!at(2.0, 5.0));
        assert!(at(f64::INFINITY, 2.0));
        assert!(!at(4.0, 4.0));
        assert!(!at(f64::INFINITY, 4.0));
        assert!(AdmissiblePair::new(1.5, 4.0).is_err());
    }
}
