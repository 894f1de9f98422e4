// Frozen oracle values keep every digit the oracle produced.
#![allow(clippy::excessive_precision)]

//! Chain values against an independent computer-algebra derivation
//! (sympy differentiation, evaluated at 30 digits).

use drkernel::symbolic::{evaluate, kernel_chain, ComplexTime, RadialLogs, RadialOperator, SymbolicSum};
use drkernel::SpaceParams;
use num_complex::Complex64;

type Case = ((usize, usize), f64, (f64, f64), (f64, f64));

const ORACLE: [Case; 12] = [
    ((2, 0), 0.5, (1.0, 0.0), (0.92969839582966401013, 0.0)),
    ((2, 0), 1.7, (0.3, 0.8), (0.70593179831404309456, -0.31545708816125584687)),
    ((2, 0), 6.0, (0.0, 2.0), (-0.14636788611581845402, 0.031562951368162139690)),
    ((2, 1), 0.5, (1.0, 0.0), (0.52006145146811881773, 0.0)),
    ((2, 1), 1.7, (0.3, 0.8), (0.018234325388603218653, -0.30633496279935905499)),
    ((2, 1), 6.0, (0.0, 2.0), (-0.0000089660962610049972083, 0.0011409828050354295602)),
    ((4, 2), 0.5, (1.0, 0.0), (0.69038070966640895736, 0.0)),
    ((4, 2), 1.7, (0.3, 0.8), (-0.28466601256471150563, -0.21724758149971359111)),
    ((4, 2), 6.0, (0.0, 2.0), (0.00016801846027746789146, 0.000078317601672035074669)),
    ((4, 3), 0.5, (1.0, 0.0), (0.66733985728633783139, 0.0)),
    ((4, 3), 1.7, (0.3, 0.8), (-0.19456042657753029917, 0.0071953459111930554490)),
    ((4, 3), 6.0, (0.0, 2.0), (0.0000018287878121232018753, -6.1167133149340560489E-7)),
];

#[test]
fn chain_values_match_computer_algebra() {
    for ((m, k), r, (tr, ti), (vr, vi)) in ORACLE {
        let p = SpaceParams::new(m, k).unwrap();
        let chain = kernel_chain(&p).compile();
        let tau = ComplexTime::new(Complex64::new(tr, ti)).unwrap();
        let got = evaluate(&chain, r, tau, 1e-3).unwrap().to_complex();
        let want = Complex64::new(vr, vi);
        let rel = (got - want).norm() / want.norm();
        // Cancellation between terms is the only expected loss.
        let (_, cond) = chain.amplitude(&RadialLogs::new(r), tau.value());
        assert!(rel < 1e-13 + 4.0 * f64::EPSILON * cond, "m={m} k={k} r={r} τ={tr}+{ti}i: {got} vs {want} (rel {rel:e})");
    }
}

#[test]
fn chain_json_lists_rational_coefficients() {
    let p = SpaceParams::heisenberg(1).unwrap();
    let json = kernel_chain(&p).to_json();
    let arr = json.as_array().unwrap();
    assert!(!arr.is_empty());
    for t in arr {
        assert_eq!(t["exponents"].as_array().unwrap().len(), 6);
        assert!(t["coeff"].is_string());
    }
}

#[test]
fn second_operator_on_the_gaussian() {
    // -(1/sinh(r/2)) ∂_r e^{-r²/4τ} = r/(2τ sinh(r/2)) e^{-r²/4τ}; at r = τ = 1 that is
    // e^{-1/4} / (2 sinh(1/2)).
    let s = SymbolicSum::gaussian().apply(RadialOperator::D2);
    assert_eq!(s.len(), 1);
    let v = evaluate(&s.compile(), 1.0, ComplexTime::real(1.0).unwrap(), 0.0).unwrap().to_complex();
    assert!((v.re - 0.747_272_883_540_446_4).abs() < 1e-15);
    assert_eq!(v.im, 0.0);
}

/// The two operators do not commute: `[D1, D2] f = f' / (4 sinh(r/2) cosh²(r/2))`,
/// so the order in the kernel chain matters.
#[test]
fn commutator_of_radial_operators() {
    let g = SymbolicSum::gaussian();
    // `apply` composes on the left: `a = D1 D2 g`, `b = D2 D1 g`.
    let a = g.apply(RadialOperator::D2).apply(RadialOperator::D1);
    let b = g.apply(RadialOperator::D1).apply(RadialOperator::D2);
    assert_ne!(a, b);
    let (a, b) = (a.compile(), b.compile());
    for (r, t) in [(0.4, 0.5), (1.3, 1.0), (3.0, 2.5)] {
        let tau = ComplexTime::real(t).unwrap();
        let lhs = evaluate(&a, r, tau, 0.0).unwrap().to_complex().re - evaluate(&b, r, tau, 0.0).unwrap().to_complex().re;
        let dg = -r / (2.0 * t) * (-r * r / (4.0 * t)).exp();
        let want = dg / (4.0 * (0.5 * r).sinh() * (0.5 * r).cosh().powi(2));
        assert!((lhs - want).abs() < 1e-13 * want.abs(), "r={r} τ={t}: {lhs} vs {want}");
    }
}
