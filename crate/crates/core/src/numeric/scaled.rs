use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

/// A complex number stored as `mant * exp(log_scale)`.
///
/// Kernel values span hundreds of orders of magnitude across a sweep, so
/// anything that compares them keeps the exponent separate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    pub mant: Complex64,
    pub log_scale: f64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mant: Complex64 { re: 0.0, im: 0.0 },
        log_scale: 0.0,
    };

    pub fn new(mant: Complex64, log_scale: f64) -> Self {
        ScaledComplex { mant, log_scale }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0.0)
    }

    /// `exp(z)` without ever forming the exponential of `Re z`.
    pub fn exp(z: Complex64) -> Self {
        ScaledComplex {
            mant: Complex64::from_polar(1.0, z.im),
            log_scale: z.re,
        }
    }

    fn normalized(self) -> Self {
        let a = self.mant.norm();
        if a == 0.0 || !a.is_finite() {
            return ScaledComplex {
                mant: self.mant,
                log_scale: if a == 0.0 { 0.0 } else { self.log_scale },
            };
        }
        let shift = a.ln();
        ScaledComplex {
            mant: self.mant / a,
            log_scale: self.log_scale + shift,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.norm() == 0.0
    }

    /// `ln |z|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        let a = self.mant.norm();
        if a == 0.0 {
            f64::NEG_INFINITY
        } else {
            a.ln() + self.log_scale
        }
    }

    pub fn arg(&self) -> f64 {
        self.mant.arg()
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mant * self.log_scale.exp()
    }

    /// Value relative to `exp(reference)`, i.e. `z * exp(-reference)`.
    pub fn rescaled(&self, reference: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mant * (self.log_scale - reference).exp()
    }

    pub fn scale_real(self, c: f64) -> Self {
        ScaledComplex::new(self.mant * c, self.log_scale)
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: ScaledComplex) -> ScaledComplex {
        ScaledComplex::new(self.mant * rhs.mant, self.log_scale + rhs.log_scale)
    }
}

impl Mul<Complex64> for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: Complex64) -> ScaledComplex {
        ScaledComplex::new(self.mant * rhs, self.log_scale)
    }
}

/// Sums terms given as `(value, log_scale)` pairs by rescaling to the largest
/// exponent and adding with compensation.
pub fn sum_scaled(terms: &[ScaledComplex]) -> ScaledComplex {
    let top = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.log_scale)
        .fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return ScaledComplex::ZERO;
    }
    let mut acc = super::sum::CompensatedComplex::default();
    for t in terms {
        acc.add(t.rescaled(top));
    }
    ScaledComplex::new(acc.total(), top)
}
