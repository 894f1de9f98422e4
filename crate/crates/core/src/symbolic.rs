//! Exact iterated radial derivatives of the Gaussian `e^{-r²/4τ}`.
//!
//! Every expression produced by `D1 = -(1/sinh r) ∂_r` and
//! `D2 = -(1/sinh(r/2)) ∂_r` acting on the Gaussian is a finite sum of
//! monomials
//!
//! `c · r^p · τ^{-j} · sinh^a(r) cosh^b(r) sinh^c(r/2) cosh^d(r/2) · e^{-r²/4τ}`
//!
//! with rational `c`. The sums are kept in canonical form (sorted by
//! exponents, like terms merged, zero coefficients dropped) so two
//! derivations of the same chain compare equal term by term.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::numeric::scaled::{sum_scaled, ScaledComplex};
use crate::numeric::special::{ln_cosh, ln_sinh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Exponents {
    /// Power of `r`.
    pub p: u32,
    /// Power of `τ^{-1}`.
    pub j: u32,
    pub sinh: i32,
    pub cosh: i32,
    pub sinh_half: i32,
    pub cosh_half: i32,
}

impl Exponents {
    const ONE: Exponents = Exponents {
        p: 0,
        j: 0,
        sinh: 0,
        cosh: 0,
        sinh_half: 0,
        cosh_half: 0,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialOperator {
    /// `-(1/sinh r) ∂_r`
    D1,
    /// `-(1/sinh(r/2)) ∂_r`
    D2,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolicSum {
    terms: BTreeMap<Exponents, BigRational>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl SymbolicSum {
    /// The bare Gaussian `e^{-r²/4τ}`.
    pub fn gaussian() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Exponents::ONE, BigRational::one());
        SymbolicSum { terms }
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// `∂_r` of the sum, including the Gaussian factor.
    pub fn derivative(&self) -> SymbolicSum {
        let mut out = SymbolicSum::default();
        for (e, c) in &self.terms {
            if e.p > 0 {
                out.add_term(Exponents { p: e.p - 1, ..*e }, c * rat(e.p as i64, 1));
            }
            if e.sinh != 0 {
                let n = Exponents {
                    sinh: e.sinh - 1,
                    cosh: e.cosh + 1,
                    ..*e
                };
                out.add_term(n, c * rat(e.sinh as i64, 1));
            }
            if e.cosh != 0 {
                let n = Exponents {
                    cosh: e.cosh - 1,
                    sinh: e.sinh + 1,
                    ..*e
                };
                out.add_term(n, c * rat(e.cosh as i64, 1));
            }
            if e.sinh_half != 0 {
                let n = Exponents {
                    sinh_half: e.sinh_half - 1,
                    cosh_half: e.cosh_half + 1,
                    ..*e
                };
                out.add_term(n, c * rat(e.sinh_half as i64, 2));
            }
            if e.cosh_half != 0 {
                let n = Exponents {
                    cosh_half: e.cosh_half - 1,
                    sinh_half: e.sinh_half + 1,
                    ..*e
                };
                out.add_term(n, c * rat(e.cosh_half as i64, 2));
            }
            // ∂_r e^{-r²/4τ} = -(r / 2τ) e^{-r²/4τ}
            let n = Exponents {
                p: e.p + 1,
                j: e.j + 1,
                ..*e
            };
            out.add_term(n, c * rat(-1, 2));
        }
        out
    }

    pub fn apply(&self, op: RadialOperator) -> SymbolicSum {
        let d = self.derivative();
        let mut out = SymbolicSum::default();
        for (e, c) in d.terms {
            let n = match op {
                RadialOperator::D1 => Exponents { sinh: e.sinh - 1, ..e },
                RadialOperator::D2 => Exponents {
                    sinh_half: e.sinh_half - 1,
                    ..e
                },
            };
            out.add_term(n, -c);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponents) -> Option<&BigRational> {
        self.terms.get(e)
    }

    pub fn compile(&self) -> CompiledSum {
        CompiledSum {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let v = c.to_f64().expect("coefficient fits in f64");
                    CompiledTerm {
                        ln_coeff: v.abs().ln(),
                        negative: c.is_negative(),
                        exps: *e,
                    }
                })
                .collect(),
        }
    }

    /// JSON listing `{"exponents": [p, j, sinh, cosh, sinh_half, cosh_half], "coeff": "a/b"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    serde_json::json!({
                        "exponents": [e.p, e.j, e.sinh, e.cosh, e.sinh_half, e.cosh_half],
                        "coeff": c.to_string(),
                    })
                })
                .collect(),
        )
    }
}

/// Truncated power series in `u` with exact coefficients.
type Series = Vec<BigRational>;

fn series_mul(a: &Series, b: &Series, order: usize) -> Series {
    let mut out = vec![BigRational::zero(); order];
    for (i, x) in a.iter().enumerate().take(order) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_inv(a: &Series, order: usize) -> Series {
    let mut out = vec![BigRational::zero(); order];
    out[0] = a[0].recip();
    for n in 1..order {
        let mut acc = BigRational::zero();
        for k in 1..=n.min(a.len() - 1) {
            acc += &a[k] * &out[n - k];
        }
        out[n] = -acc * &out[0];
    }
    out
}

fn series_pow(a: &Series, e: i32, order: usize) -> Series {
    let base = if e < 0 { series_inv(a, order) } else { a.clone() };
    let mut out = vec![BigRational::zero(); order];
    out[0] = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        out = series_mul(&out, &base, order);
    }
    out
}

/// `sinh(√u·c)/(√u·c)` or `cosh(√u·c)` as series in `u`, with `c² = scale`.
fn hyperbolic_series(odd: bool, scale: &BigRational, order: usize) -> Series {
    let mut out = Vec::with_capacity(order);
    let mut fact = BigRational::one();
    let mut pw = BigRational::one();
    for n in 0..order {
        let k = if odd { 2 * n + 1 } else { 2 * n };
        if n > 0 {
            let lo = if odd { 2 * n } else { 2 * n - 1 };
            fact *= rat((lo * k) as i64, 1);
            pw *= scale;
        }
        out.push(&pw / &fact);
    }
    out
}

impl SymbolicSum {
    /// Taylor coefficients in `r²` of the coefficient of each `τ^{-j}`.
    ///
    /// Every chain expression is an even function of `r` that is analytic
    /// for `|r| < π`, so the negative powers produced by `1/sinh` cancel
    /// exactly; a leftover singular coefficient is reported as an error.
    pub fn taylor_in_r_squared(&self, order: usize) -> Result<Vec<(u32, Series)>> {
        let depth = self
            .terms
            .keys()
            .map(|e| (e.p as i32 + e.sinh + e.sinh_half).min(0).unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let work = order + depth / 2 + 2;
        let one = BigRational::one();
        let quarter = rat(1, 4);
        let sh = hyperbolic_series(true, &one, work);
        let ch = hyperbolic_series(false, &one, work);
        let sh2 = hyperbolic_series(true, &quarter, work);
        let ch2 = hyperbolic_series(false, &quarter, work);
        // Laurent series in r, keyed by the power offset, collected per j.
        let mut per_j: BTreeMap<u32, BTreeMap<i64, BigRational>> = BTreeMap::new();
        let bases = [&sh, &ch, &sh2, &ch2];
        let mut powers: BTreeMap<(usize, i32), Series> = BTreeMap::new();
        let mut power = |which: usize, e: i32| {
            powers
                .entry((which, e))
                .or_insert_with(|| series_pow(bases[which], e, work))
                .clone()
        };
        for (e, c) in &self.terms {
            let mut ser = power(0, e.sinh);
            ser = series_mul(&ser, &power(1, e.cosh), work);
            ser = series_mul(&ser, &power(2, e.sinh_half), work);
            ser = series_mul(&ser, &power(3, e.cosh_half), work);
            // sinh(r/2)^c = (r/2)^c · S(r²/4)^c
            let half = if e.sinh_half >= 0 {
                rat(1, 1i64 << e.sinh_half)
            } else {
                rat(1i64 << (-e.sinh_half), 1)
            };
            let shift = e.p as i64 + e.sinh as i64 + e.sinh_half as i64;
            let slot = per_j.entry(e.j).or_default();
            for (n, a) in ser.into_iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let pw = shift + 2 * n as i64;
                *slot.entry(pw).or_insert_with(BigRational::zero) += a * c * &half;
            }
        }
        let mut out = Vec::new();
        for (j, laurent) in per_j {
            let mut coeffs = vec![BigRational::zero(); order];
            for (pw, a) in laurent {
                if a.is_zero() {
                    continue;
                }
                if pw < 0 || pw % 2 != 0 {
                    return Err(Error::domain(format!(
                        "chain coefficient of τ^-{j} has a nonzero r^{pw} term"
                    )));
                }
                let idx = (pw / 2) as usize;
                if idx < order {
                    coeffs[idx] = a;
                }
            }
            out.push((j, coeffs));
        }
        Ok(out)
    }
}

/// Operator sequence whose action on the Gaussian gives the kernel profile:
/// `D1^{k/2} D2^{m/2}` for even `k`, `D1^{(k+1)/2} D2^{m/2}` (the integrand of
/// the remaining Abel integral) for odd `k`. `D2` acts first.
pub fn kernel_operators(p: &SpaceParams) -> Vec<RadialOperator> {
    let d1 = p.k().div_ceil(2);
    let mut ops = vec![RadialOperator::D2; p.m() / 2];
    ops.extend(std::iter::repeat_n(RadialOperator::D1, d1));
    ops
}

pub fn kernel_chain(p: &SpaceParams) -> SymbolicSum {
    kernel_operators(p)
        .into_iter()
        .fold(SymbolicSum::gaussian(), |acc, op| acc.apply(op))
}

#[derive(Clone, Copy, Debug)]
struct CompiledTerm {
    ln_coeff: f64,
    negative: bool,
    exps: Exponents,
}

/// Floating-point evaluator of a [`SymbolicSum`] working in log space.
#[derive(Clone, Debug)]
pub struct CompiledSum {
    terms: Vec<CompiledTerm>,
}

/// Logarithms of the radial building blocks at one radius.
#[derive(Clone, Copy, Debug)]
pub struct RadialLogs {
    pub r: f64,
    ln_r: f64,
    ln_sinh: f64,
    ln_cosh: f64,
    ln_sinh_half: f64,
    ln_cosh_half: f64,
}

impl RadialLogs {
    pub fn new(r: f64) -> Self {
        RadialLogs {
            r,
            ln_r: r.ln(),
            ln_sinh: ln_sinh(r),
            ln_cosh: ln_cosh(r),
            ln_sinh_half: ln_sinh(0.5 * r),
            ln_cosh_half: ln_cosh(0.5 * r),
        }
    }
}

impl CompiledSum {
    /// The sum without its Gaussian factor, together with the ratio
    /// `Σ|term| / |Σ term|` that bounds the cancellation loss.
    pub fn amplitude(&self, logs: &RadialLogs, tau: Complex64) -> (ScaledComplex, f64) {
        let ln_tau = tau.norm().ln();
        let arg_tau = tau.arg();
        let mut parts = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let e = &t.exps;
            let ln_mag = t.ln_coeff
                + e.p as f64 * logs.ln_r
                + e.sinh as f64 * logs.ln_sinh
                + e.cosh as f64 * logs.ln_cosh
                + e.sinh_half as f64 * logs.ln_sinh_half
                + e.cosh_half as f64 * logs.ln_cosh_half
                - e.j as f64 * ln_tau;
            let phase = -(e.j as f64) * arg_tau;
            let sign = if t.negative { -1.0 } else { 1.0 };
            parts.push(ScaledComplex {
                mant: Complex64::from_polar(sign, phase),
                log_scale: ln_mag,
            });
        }
        let total = sum_scaled(&parts);
        let top = parts.iter().map(|p| p.log_scale).fold(f64::NEG_INFINITY, f64::max);
        let abs_sum: f64 = parts.iter().map(|p| (p.log_scale - top).exp()).sum();
        let cond = if total.is_zero() {
            f64::INFINITY
        } else {
            (abs_sum.ln() + top - total.ln_abs()).exp()
        };
        (total, cond)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Floating-point form of [`SymbolicSum::taylor_in_r_squared`].
#[derive(Clone, Debug)]
pub struct CompiledTaylor {
    per_j: Vec<(u32, Vec<f64>, Vec<f64>)>,
}

impl CompiledTaylor {
    /// Same contract as [`CompiledSum::amplitude`], valid for `r` well inside `π`.
    pub fn amplitude(&self, r: f64, tau: Complex64) -> (ScaledComplex, f64) {
        let u = r * r;
        let ln_tau = Complex64::new(tau.norm().ln(), tau.arg());
        let mut parts = Vec::with_capacity(self.per_j.len());
        let mut bound = Vec::with_capacity(self.per_j.len());
        for (j, c, abs_c) in &self.per_j {
            let horner = |cs: &[f64]| cs.iter().rev().fold(0.0, |acc, a| acc * u + a);
            let w = ScaledComplex::exp(-ln_tau * *j as f64);
            parts.push(w * Complex64::new(horner(c), 0.0));
            bound.push(w.scale_real(horner(abs_c)));
        }
        let total = sum_scaled(&parts);
        let abs_sum = bound.iter().map(|b| b.ln_abs()).fold(f64::NEG_INFINITY, |acc, x| {
            let hi = acc.max(x);
            if hi == f64::NEG_INFINITY {
                hi
            } else {
                hi + ((acc - hi).exp() + (x - hi).exp()).ln()
            }
        });
        let cond = (abs_sum - total.ln_abs()).exp();
        (total, cond.max(1.0))
    }
}

/// Chain evaluator that switches to the Taylor form near the origin, where
/// the closed form cancels catastrophically.
#[derive(Clone, Debug)]
pub struct ChainEvaluator {
    closed: CompiledSum,
    series: CompiledTaylor,
    switch: f64,
}

impl ChainEvaluator {
    pub const SWITCH_RADIUS: f64 = 1.0;
    const ORDER: usize = 26;

    pub fn new(sum: &SymbolicSum) -> Result<Self> {
        let per_j = sum
            .taylor_in_r_squared(Self::ORDER)?
            .into_iter()
            .map(|(j, c)| {
                let f: Vec<f64> = c.iter().map(|a| a.to_f64().unwrap_or(0.0)).collect();
                let abs = f.iter().map(|v| v.abs()).collect();
                (j, f, abs)
            })
            .collect();
        Ok(ChainEvaluator {
            closed: sum.compile(),
            series: CompiledTaylor { per_j },
            switch: Self::SWITCH_RADIUS,
        })
    }

    pub fn amplitude(&self, r: f64, tau: Complex64) -> (ScaledComplex, f64) {
        if r < self.switch {
            self.series.amplitude(r, tau)
        } else {
            self.closed.amplitude(&RadialLogs::new(r), tau)
        }
    }

    pub fn closed_form(&self) -> &CompiledSum {
        &self.closed
    }

    pub fn taylor_form(&self) -> &CompiledTaylor {
        &self.series
    }
}

/// Validated complex time: `Re τ >= 0`, `τ != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexTime(Complex64);

impl ComplexTime {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.re >= 0.0) || !tau.im.is_finite() || !tau.re.is_finite() {
            return Err(Error::domain(format!("complex time needs Re τ >= 0, got {tau}")));
        }
        if tau.norm() == 0.0 {
            return Err(Error::domain("complex time must be nonzero"));
        }
        Ok(ComplexTime(tau))
    }

    pub fn real(t: f64) -> Result<Self> {
        Self::new(Complex64::new(t, 0.0))
    }

    /// Purely imaginary time `i t`, the Schrödinger case.
    pub fn imaginary(t: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, t))
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Result<Self> {
        if phase.abs() > std::f64::consts::FRAC_PI_2 + 1e-15 {
            return Err(Error::domain(format!("phase {phase} outside [-π/2, π/2]")));
        }
        let mut z = Complex64::from_polar(modulus, phase);
        if z.re < 0.0 {
            z.re = 0.0;
        }
        Self::new(z)
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }
}

/// Evaluates a chain expression including the Gaussian factor.
pub fn evaluate(sum: &CompiledSum, r: f64, tau: ComplexTime, r_min: f64) -> Result<ScaledComplex> {
    if !(r >= r_min) {
        return Err(Error::domain(format!("r = {r} below reliable radius {r_min}")));
    }
    let (amp, _) = sum.amplitude(&RadialLogs::new(r), tau.value());
    Ok(amp * ScaledComplex::exp(-r * r / (4.0 * tau.value())))
}
