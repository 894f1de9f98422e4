//! Damek-Ricci spaces `S = N ⋊ R+` in upper-half-space coordinates `(X, Z, a)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::quad::{integrate_adaptive, QuadConfig};
use crate::numeric::special::{gamma_half_integer, ln_cosh, ln_sinh};

/// Dimensions of the center-free part `m = dim 𝔳` and the center `k = dim 𝔷`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceParams {
    m: usize,
    k: usize,
}

impl SpaceParams {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("m must be even and at least 2, got {m}")));
        }
        Ok(SpaceParams { m, k })
    }

    /// Real hyperbolic 3-space.
    pub fn real_hyperbolic() -> Self {
        SpaceParams { m: 2, k: 0 }
    }

    /// Heisenberg group `H^d` extended by `R+` (complex hyperbolic space).
    pub fn heisenberg(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("Heisenberg dimension must be positive".into()));
        }
        SpaceParams::new(2 * d, 1)
    }

    /// Quaternionic Heisenberg group extended by `R+`.
    pub fn quaternionic(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("quaternionic dimension must be positive".into()));
        }
        SpaceParams::new(4 * d, 3)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Homogeneous dimension `Q = (m + 2k) / 2`.
    pub fn homogeneous_dim(&self) -> f64 {
        (self.m / 2 + self.k) as f64
    }

    /// Manifold dimension `n = m + k + 1`.
    pub fn dimension(&self) -> usize {
        self.m + self.k + 1
    }

    /// `ln A(r)` where `A(r) = 2^{m+k} sinh^{m+k}(r/2) cosh^k(r/2)`.
    pub fn log_density(&self, r: f64) -> f64 {
        let mk = (self.m + self.k) as f64;
        mk * LN_2 + mk * ln_sinh(0.5 * r) + self.k as f64 * ln_cosh(0.5 * r)
    }

    /// Radial density `A(r)` of the Haar measure in geodesic polar form.
    pub fn density(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        self.log_density(r).exp()
    }

    /// `A'(r) / A(r)`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        let h = 0.5 * r;
        0.5 * (self.m + self.k) as f64 / h.tanh() + 0.5 * self.k as f64 * h.tanh()
    }

    /// Volume of the geodesic ball `V(r) = ∫_0^r A`.
    pub fn ball_volume(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let cfg = QuadConfig::with_tolerance(0.0, 1e-13);
        integrate_adaptive(|s| Complex64::new(self.density(s), 0.0), 0.0, r, &cfg)
            .value
            .re
    }

    /// Area of the unit sphere in `R^n`. For radial `F`,
    /// `∫_S F(r(x)) dλ(x) = polar_constant · ∫ F(r) A(r) dr`.
    /// Radial norms in this crate use `A(r) dr` without this factor.
    pub fn polar_constant(&self) -> f64 {
        let n = self.dimension();
        2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
    }

    /// The four spaces used throughout the test suites.
    pub fn reference_spaces() -> [SpaceParams; 4] {
        [
            SpaceParams { m: 2, k: 0 },
            SpaceParams { m: 2, k: 1 },
            SpaceParams { m: 4, k: 2 },
            SpaceParams { m: 4, k: 3 },
        ]
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S(m={}, k={})", self.m, self.k)
    }
}

/// Accepts `heisenberg:<d>`, `quaternionic:<d>`, `hyperbolic` or `<m>,<k>`.
impl FromStr for SpaceParams {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot parse space '{s}'"));
        let s = s.trim();
        if s == "hyperbolic" {
            return Ok(SpaceParams::real_hyperbolic());
        }
        if let Some((name, d)) = s.split_once(':') {
            let d: usize = d.trim().parse().map_err(|_| bad())?;
            return match name.trim() {
                "heisenberg" => SpaceParams::heisenberg(d),
                "quaternionic" => SpaceParams::quaternionic(d),
                _ => Err(bad()),
            };
        }
        let (m, k) = s.split_once(',').ok_or_else(bad)?;
        SpaceParams::new(m.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?)
    }
}

/// Point `(X, Z, a)` of `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub a: f64,
}

impl GroupPoint {
    pub fn new(x: Vec<f64>, z: Vec<f64>, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain(format!("a must be positive, got {a}")));
        }
        Ok(GroupPoint { x, z, a })
    }

    pub fn identity(p: &SpaceParams) -> Self {
        GroupPoint {
            x: vec![0.0; p.m],
            z: vec![0.0; p.k],
            a: 1.0,
        }
    }

    /// The point `(0, 0, a)` on the geodesic through the identity.
    pub fn on_axis(p: &SpaceParams, a: f64) -> Result<Self> {
        GroupPoint::new(vec![0.0; p.m], vec![0.0; p.k], a)
    }

    /// Modular function `δ(x) = a^{-Q}`.
    pub fn modular(&self, p: &SpaceParams) -> f64 {
        self.a.powf(-p.homogeneous_dim())
    }

    /// Weight `δ^{1 - q/2}` for finite `q >= 2`.
    pub fn weight(&self, p: &SpaceParams, q: f64) -> Result<f64> {
        if !(q.is_finite() && q >= 2.0) {
            return Err(Error::domain(format!("weight needs finite q >= 2, got {q}")));
        }
        Ok(self.modular(p).powf(1.0 - 0.5 * q))
    }
}

/// An explicit H-type algebra `𝔫 = 𝔳 ⊕ 𝔷` given by skew maps `J_1..J_k` on `𝔳`
/// with `J_i J_j + J_j J_i = -2 δ_ij`. The bracket is `[X, Y]_l = <J_l X, Y>`.
#[derive(Clone, Debug)]
pub struct HTypeGroup {
    params: SpaceParams,
    j: Vec<Vec<f64>>,
}

const QUAT_UNITS: [[[f64; 4]; 4]; 3] = [
    // left multiplication by i, j, k on (1, i, j, k)
    [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]],
    [[0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]],
    [[0.0, 0.0, 0.0, -1.0], [0.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]],
];

impl HTypeGroup {
    /// Builds the standard module for `k = 0`, `k = 1`, or `k ∈ {2, 3}` with `4 | m`.
    pub fn new(params: SpaceParams) -> Result<Self> {
        let m = params.m;
        let block = |unit: &dyn Fn(usize, usize) -> f64, size: usize| {
            let mut mat = vec![0.0; m * m];
            for b in 0..m / size {
                for r in 0..size {
                    for c in 0..size {
                        mat[(b * size + r) * m + b * size + c] = unit(r, c);
                    }
                }
            }
            mat
        };
        let j = match params.k {
            0 => vec![],
            1 => vec![block(
                &|r, c| match (r, c) {
                    (0, 1) => -1.0,
                    (1, 0) => 1.0,
                    _ => 0.0,
                },
                2,
            )],
            2 | 3 if m.is_multiple_of(4) => (0..params.k)
                .map(|l| block(&|r, c| QUAT_UNITS[l][r][c], 4))
                .collect(),
            _ => {
                return Err(Error::InvalidParams(format!(
                    "no explicit H-type module implemented for {params}"
                )))
            }
        };
        Ok(HTypeGroup { params, j })
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    fn check(&self, x: &GroupPoint) -> Result<()> {
        if x.x.len() != self.params.m {
            return Err(Error::DimensionMismatch {
                expected: self.params.m,
                got: x.x.len(),
            });
        }
        if x.z.len() != self.params.k {
            return Err(Error::DimensionMismatch {
                expected: self.params.k,
                got: x.z.len(),
            });
        }
        if !(x.a > 0.0) {
            return Err(Error::domain("a must be positive"));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let m = self.params.m;
        self.j
            .iter()
            .map(|j| {
                let mut s = 0.0;
                for r in 0..m {
                    let jx: f64 = (0..m).map(|c| j[r * m + c] * x[c]).sum();
                    s += jx * y[r];
                }
                s
            })
            .collect()
    }

    /// `(X, Z, a)(X', Z', a') = (X + a^{1/2} X', Z + a Z' + ½ a^{1/2} [X, X'], a a')`.
    pub fn product(&self, p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint> {
        self.check(p)?;
        self.check(q)?;
        let sa = p.a.sqrt();
        let br = self.bracket(&p.x, &q.x);
        Ok(GroupPoint {
            x: p.x.iter().zip(&q.x).map(|(u, v)| u + sa * v).collect(),
            z: (0..self.params.k)
                .map(|l| p.z[l] + p.a * q.z[l] + 0.5 * sa * br[l])
                .collect(),
            a: p.a * q.a,
        })
    }

    pub fn inverse(&self, p: &GroupPoint) -> Result<GroupPoint> {
        self.check(p)?;
        let isa = 1.0 / p.a.sqrt();
        Ok(GroupPoint {
            x: p.x.iter().map(|u| -isa * u).collect(),
            z: p.z.iter().map(|u| -u / p.a).collect(),
            a: 1.0 / p.a,
        })
    }

    /// Geodesic distance to the identity.
    pub fn distance_to_identity(&self, p: &GroupPoint) -> Result<f64> {
        self.check(p)?;
        Ok(distance_to_identity(p))
    }

    pub fn distance(&self, p: &GroupPoint, q: &GroupPoint) -> Result<f64> {
        let d = self.product(&self.inverse(p)?, q)?;
        Ok(distance_to_identity(&d))
    }
}

/// Geodesic distance from `(X, Z, a)` to the identity, from
/// `cosh²(r/2) = ((a^{1/2} + a^{-1/2})/2 + a^{-1/2}|X|²/8)² + a^{-1}|Z|²/4`.
///
/// Writing the right side as `1 + d` with `d` assembled from non-negative
/// pieces gives `r = 2 asinh(sqrt d)`, which keeps full precision near the
/// identity.
pub fn distance_to_identity(p: &GroupPoint) -> f64 {
    let b = p.a.sqrt();
    let x2: f64 = p.x.iter().map(|v| v * v).sum();
    let z2: f64 = p.z.iter().map(|v| v * v).sum();
    let u = (b - 1.0).powi(2) / (2.0 * b) + x2 / (8.0 * b);
    let d = 2.0 * u + u * u + z2 / (4.0 * p.a);
    assert!(d >= 0.0, "cosh^2(r/2) below one: excess {d}");
    2.0 * d.sqrt().asinh()
}

/// How a radial profile decays, used to choose integration ranges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Decay {
    /// Like `exp(-r² / (4 scale))`.
    Gaussian { scale: f64 },
    /// Like `exp(-rate r)` times a polynomial.
    Exponential { rate: f64 },
    /// Vanishes beyond `radius`.
    Compact { radius: f64 },
    Unknown,
}

impl Decay {
    /// A radius beyond which the profile is expected to be negligible.
    pub fn effective_radius(&self) -> f64 {
        match *self {
            Decay::Gaussian { scale } => 2.0 * (scale * 200.0).sqrt() + 2.0,
            Decay::Exponential { rate } => (40.0 / rate.max(1e-3)).min(400.0),
            Decay::Compact { radius } => radius,
            Decay::Unknown => 60.0,
        }
    }
}

type Profile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A function of the distance to the identity, lifted to `S`.
///
/// Below `r_min` the profile is extended by its value at `r_min`.
#[derive(Clone)]
pub struct RadialFunction {
    profile: Profile,
    pub r_min: f64,
    pub decay: Decay,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("r_min", &self.r_min)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

impl RadialFunction {
    pub fn new<F>(profile: F, r_min: f64, decay: Decay) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        RadialFunction {
            profile: Arc::new(profile),
            r_min,
            decay,
        }
    }

    pub fn real<F>(profile: F, decay: Decay) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(move |r| Complex64::new(profile(r), 0.0), 0.0, decay)
    }

    /// `exp(-r² / (4 width))`.
    pub fn gaussian(width: f64) -> Self {
        Self::real(move |r| (-r * r / (4.0 * width)).exp(), Decay::Gaussian { scale: width })
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        (self.profile)(r.max(self.r_min))
    }

    pub fn eval_at(&self, p: &GroupPoint) -> Complex64 {
        self.eval(distance_to_identity(p))
    }

    /// Norm in `L^q(S, λ)` computed as `(∫_0^∞ |f(r)|^q A(r) dr)^{1/q}`;
    /// `q = ∞` gives the supremum over a fine radial grid.
    pub fn lq_norm(&self, p: &SpaceParams, q: f64) -> Result<f64> {
        lq_norm_left(p, self, q)
    }
}

/// See [`RadialFunction::lq_norm`].
pub fn lq_norm_left(p: &SpaceParams, f: &RadialFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::domain(format!("norm exponent must be at least 1, got {q}")));
    }
    let reach = f.decay.effective_radius();
    if q.is_infinite() {
        let n = 4000;
        let top = reach.max(1.0);
        return Ok((0..=n)
            .map(|i| f.eval(top * i as f64 / n as f64).norm())
            .fold(0.0, f64::max));
    }
    const R_CAP: f64 = 600.0;
    let cfg = QuadConfig::with_tolerance(0.0, 1e-11);
    let integrand = |r: f64| {
        let v = f.eval(r).norm();
        if v == 0.0 || r == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((q * v.ln() + p.log_density(r)).exp(), 0.0)
        }
    };
    let mut total = 0.0;
    let mut quiet = 0;
    let mut lo = 0.0;
    let width = 1.0;
    while lo < R_CAP {
        let hi = lo + width;
        let piece = integrate_adaptive(integrand, lo, hi, &cfg).value.re;
        if !piece.is_finite() {
            return Err(Error::Divergent(format!("L^{q} integrand overflows near r = {lo}")));
        }
        total += piece;
        if piece <= 1e-15 * total {
            quiet += 1;
        } else {
            quiet = 0;
        }
        lo = hi;
        if quiet >= 3 && lo >= reach.min(R_CAP) {
            return Ok(total.powf(1.0 / q));
        }
        if let Decay::Compact { radius } = f.decay {
            if lo >= radius {
                return Ok(total.powf(1.0 / q));
            }
        }
    }
    Err(Error::Divergent(format!(
        "L^{q} tail not negligible at r = {R_CAP}"
    )))
}
