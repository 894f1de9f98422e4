use num_complex::Complex64;
use std::collections::BinaryHeap;

use super::sum::CompensatedComplex;

#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_intervals: 400,
        }
    }
}

impl QuadConfig {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// One 21-point Gauss-Kronrod panel. Returns the Kronrod value and the
/// difference to the embedded 10-point Gauss value.
pub fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK21[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let x = h * XGK21[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK21[j];
        if j % 2 == 1 {
            gauss += s * WG10[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod quadrature: the panel with the largest
/// error estimate is bisected until the total estimate meets the tolerance.
pub fn integrate_adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let (value, error) = gk21(&mut f, a, b);
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > cfg.target(total) && heap.len() < cfg.max_intervals {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        let mut acc = CompensatedComplex::default();
        let mut err = 0.0;
        for p in heap.iter() {
            acc.add(p.value);
            err += p.error;
        }
        total = acc.total();
        total_err = err;
    }
    QuadResult {
        value: total,
        error: total_err,
        evaluations,
        converged: total_err <= cfg.target(total),
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on equal panels, with barycentric
/// interpolation inside each panel.
#[derive(Clone, Debug)]
pub struct CompositeRule {
    pub a: f64,
    pub b: f64,
    pub panels: usize,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    reference: Vec<f64>,
    bary: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        assert!(b > a && panels > 0 && order > 0);
        let (xr, wr) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in xr.iter().zip(&wr) {
                nodes.push(lo + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        let bary = (0..order)
            .map(|j| {
                let prod: f64 = (0..order)
                    .filter(|&k| k != j)
                    .map(|k| xr[j] - xr[k])
                    .product();
                1.0 / prod
            })
            .collect::<Vec<_>>();
        let scale = bary.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bary = bary.into_iter().map(|v| v / scale).collect();
        CompositeRule {
            a,
            b,
            panels,
            order,
            nodes,
            weights,
            reference: xr,
            bary,
        }
    }

    /// Rule on [a, b] whose panels are at most `width` wide.
    pub fn with_panel_width(a: f64, b: f64, width: f64, order: usize) -> Self {
        let panels = ((b - a) / width).ceil().max(1.0) as usize;
        Self::new(a, b, panels, order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        let mut acc = CompensatedComplex::default();
        for (v, w) in values.iter().zip(&self.weights) {
            acc.add(v * w);
        }
        acc.total()
    }

    pub fn integrate_real(&self, values: &[f64]) -> f64 {
        super::sum::compensated_sum(values.iter().zip(&self.weights).map(|(v, w)| v * w))
    }

    /// Polynomial interpolation of node values inside the panel containing x.
    pub fn interpolate(&self, values: &[Complex64], x: f64) -> Complex64 {
        let h = (self.b - self.a) / self.panels as f64;
        let p = (((x - self.a) / h).floor().max(0.0) as usize).min(self.panels - 1);
        let lo = self.a + h * p as f64;
        let t = 2.0 * (x - lo) / h - 1.0;
        let base = p * self.order;
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..self.order {
            let d = t - self.reference[j];
            if d == 0.0 {
                return values[base + j];
            }
            let c = self.bary[j] / d;
            num += values[base + j] * c;
            den += c;
        }
        num / den
    }
}

/// Composite Gauss-Legendre with panel doubling until two successive levels
/// agree. Used as an independent backend to cross-check `integrate_adaptive`.
pub fn integrate_panel_doubling<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> QuadResult {
    const ORDER: usize = 10;
    let (xr, wr) = gauss_legendre(ORDER);
    let rule = |panels: usize, f: &mut F| {
        let h = (b - a) / panels as f64;
        let mut acc = CompensatedComplex::default();
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in xr.iter().zip(&wr) {
                acc.add(f(lo + 0.5 * h * (x + 1.0)) * (0.5 * h * w));
            }
        }
        acc.total()
    };
    let mut panels = 1;
    let mut prev = rule(panels, &mut f);
    let mut evaluations = ORDER;
    loop {
        panels *= 2;
        let next = rule(panels, &mut f);
        evaluations += ORDER * panels;
        let error = (next - prev).norm();
        if error <= cfg.target(next) || panels >= cfg.max_intervals * 16 {
            return QuadResult {
                value: next,
                error,
                evaluations,
                converged: error <= cfg.target(next),
            };
        }
        prev = next;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QuadBackend {
    #[default]
    GaussKronrod,
    PanelDoubling,
}

impl QuadBackend {
    pub fn integrate<F: FnMut(f64) -> Complex64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        cfg: &QuadConfig,
    ) -> QuadResult {
        match self {
            QuadBackend::GaussKronrod => integrate_adaptive(f, a, b, cfg),
            QuadBackend::PanelDoubling => integrate_panel_doubling(f, a, b, cfg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 12, 20, 40] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n = {n}: {s}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate_adaptive(re(|x: f64| 1.0 / x.sqrt()), 0.0, 1.0, &QuadConfig::default());
        assert!((r.value.re - 2.0).abs() < 1e-10, "{:?}", r);
    }

    #[test]
    fn backends_agree_on_oscillatory_integrand() {
        let cfg = QuadConfig::with_tolerance(1e-300, 1e-12);
        let f = |x: f64| Complex64::new(0.0, 30.0 * x).exp() * (-x).exp();
        let exact = {
            let z = Complex64::new(-1.0, 30.0);
            ((z * 3.0).exp() - 1.0) / z
        };
        let a = integrate_adaptive(f, 0.0, 3.0, &cfg);
        let b = integrate_panel_doubling(f, 0.0, 3.0, &cfg);
        assert!((a.value - exact).norm() < 1e-12);
        assert!((b.value - exact).norm() < 1e-12);
    }

    #[test]
    fn composite_interpolation_is_spectral() {
        let rule = CompositeRule::new(0.0, 4.0, 8, 16);
        let vals: Vec<Complex64> = rule
            .nodes
            .iter()
            .map(|&x| Complex64::new((3.0 * x).sin(), x.cos()))
            .collect();
        for x in [0.0, 0.013, 1.7, 2.5, 3.999, 4.0] {
            let z = rule.interpolate(&vals, x);
            assert!((z - Complex64::new((3.0 * x).sin(), x.cos())).norm() < 1e-12, "x = {x}");
        }
    }
}
