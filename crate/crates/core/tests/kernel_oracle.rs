// Frozen oracle values keep every digit the oracle produced.
#![allow(clippy::excessive_precision)]

//! Kernel values against an independent high-precision evaluation: the
//! operator chain derived with computer algebra, evaluated at 30 digits, and
//! for odd `k` the remaining integral taken along a rotated ray
//! `s = r + e^{i arg(τ)/2} u` where the Gaussian decays without oscillating.
//! Each entry is `((m, k), τ, r, ln|h|, arg h)`.

use drkernel::kernels::{kernel_h, KernelMethod};
use drkernel::{ComplexTime, SpaceParams};
use num_complex::Complex64;
use std::f64::consts::PI;

type Entry = ((usize, usize), (f64, f64), f64, f64, f64);

#[rustfmt::skip]
const ORACLE: &[Entry] = &[
    ((2, 0), (0.01, 0.0), 0.3, 3.3859959639864025248, 0.0),
    ((2, 0), (0.01, 0.0), 1.0, -19.401581699115425964, 0.0),
    ((2, 0), (0.01, 0.0), 5.0, -620.24405818261890643, 0.0),
    ((2, 0), (0.01, 0.0), 25.0, -15628.641381019620094, 0.0),
    ((2, 0), (0.5, 0.0), 0.3, -0.39953854415581674184, 0.0),
    ((2, 0), (0.5, 0.0), 1.0, -0.89211620725764554134, 0.0),
    ((2, 0), (0.5, 0.0), 5.0, -13.7345926907611385, 0.0),
    ((2, 0), (0.5, 0.0), 25.0, -322.13191552776263874, 0.0),
    ((2, 0), (1.0, 0.0), 0.3, -1.5417593149957347076, 0.0),
    ((2, 0), (1.0, 0.0), 1.0, -1.8068369780975635055, 0.0),
    ((2, 0), (1.0, 0.0), 5.0, -8.6493134616010564641, 0.0),
    ((2, 0), (1.0, 0.0), 25.0, -167.0466362986025567, 0.0),
    ((2, 0), (30.0, 0.0), 0.3, -13.871805387488967772, 0.0),
    ((2, 0), (30.0, 0.0), 1.0, -13.916966383924129902, 0.0),
    ((2, 0), (30.0, 0.0), 5.0, -14.959442867427622861, 0.0),
    ((2, 0), (30.0, 0.0), 25.0, -28.3567657044291231, 0.0),
    ((2, 0), (2.0, 1.0), 0.3, -2.9853377493213099896, -0.94097141350120917465),
    ((2, 0), (2.0, 1.0), 1.0, -3.1139154124231387864, -0.89547141350120917432),
    ((2, 0), (2.0, 1.0), 5.0, -6.356391895926631745, 0.30452858649879082568),
    ((2, 0), (2.0, 1.0), 25.0, -74.753714732928131984, -1.1113979493991415589),
    ((2, 0), (0.29999999999999999, -2.0), 0.3, -2.4023184092849337475, 2.6218571237903240008),
    ((2, 0), (0.29999999999999999, -2.0), 1.0, -2.4565831139515547193, 2.5106101800250428262),
    ((2, 0), (0.29999999999999999, -2.0), 5.0, -3.7391573969660501073, -0.42337515004830681184),
    ((2, 0), (0.29999999999999999, -2.0), 25.0, -23.138925221742611082, 1.6252152842729899605),
    ((2, 0), (0.0, 1.0), 0.3, -1.2692593149957347093, -2.5836944901923449305),
    ((2, 0), (0.0, 1.0), 1.0, -1.3068369780975635055, -2.3561944901923449288),
    ((2, 0), (0.0, 1.0), 5.0, -2.1493134616010564641, -2.6393797973719314058),
    ((2, 0), (0.0, 1.0), 25.0, -10.546636298602556703, 2.8473581374975796249),
    ((2, 0), (0.0, -0.69999999999999996), 0.3, -0.73424689908763604577, 2.4990516330494877752),
    ((2, 0), (0.0, -0.69999999999999996), 1.0, -0.77182456218946484194, 2.1740516330494877522),
    ((2, 0), (0.0, -0.69999999999999996), 5.0, -1.6143010456929578005, -0.1141916311994977432),
    ((2, 0), (0.0, -0.69999999999999996), 25.0, -10.01162388269445804, -0.77160547280785683659),
    ((2, 0), (0.0, 0.050000000000000003), 0.3, 3.2243390953352516976, -1.9186944901923449878),
    ((2, 0), (0.0, 0.050000000000000003), 1.0, 3.1867614322334229014, 2.6313055098076547929),
    ((2, 0), (0.0, 0.050000000000000003), 5.0, 2.3442849487299299428, -3.0324006337840814069),
    ((2, 0), (0.0, 0.050000000000000003), 25.0, -6.0530378882715702965, -0.11179215844699743376),
    ((2, 1), (0.01, 0.0), 0.3, 4.8596793537682131807, 0.0),
    ((2, 1), (0.01, 0.0), 1.0, -18.001107126489624123, 0.0),
    ((2, 1), (0.01, 0.0), 5.0, -620.11137356109518928, 0.0),
    ((2, 1), (0.01, 0.0), 25.0, -15637.70412584050999, 0.0),
    ((2, 1), (0.5, 0.0), 0.3, -1.2458659217889631161, 0.0),
    ((2, 1), (0.5, 0.0), 1.0, -1.8104564731882717325, 0.0),
    ((2, 1), (0.5, 0.0), 5.0, -15.914562419367536784, 0.0),
    ((2, 1), (0.5, 0.0), 25.0, -333.51385620569513274, 0.0),
    ((2, 1), (1.0, 0.0), 0.3, -3.1016437077482633148, 0.0),
    ((2, 1), (1.0, 0.0), 1.0, -3.4380522343349934062, 0.0),
    ((2, 1), (1.0, 0.0), 5.0, -11.539175458163009041, 0.0),
    ((2, 1), (1.0, 0.0), 25.0, -179.14574102556509634, 0.0),
    ((2, 1), (30.0, 0.0), 0.3, -38.313330710909477683, 0.0),
    ((2, 1), (30.0, 0.0), 1.0, -38.430794299242622315, 0.0),
    ((2, 1), (30.0, 0.0), 5.0, -40.786533989795828647, 0.0),
    ((2, 1), (30.0, 0.0), 25.0, -63.676050002224893339, 0.0),
    ((2, 1), (2.0, 1.0), 0.3, -5.6765032993269530053, -1.8968192258364887966),
    ((2, 1), (2.0, 1.0), 1.0, -5.875595883553588108, -1.8510201444856160289),
    ((2, 1), (2.0, 1.0), 5.0, -10.374435016206590963, -0.65240553825576764443),
    ((2, 1), (2.0, 1.0), 25.0, -87.996350055862560379, -2.0843883564909942387),
    ((2, 1), (0.29999999999999999, -2.0), 0.3, -3.8267820491479147785, -1.4899941110154001325),
    ((2, 1), (0.29999999999999999, -2.0), 1.0, -3.9507299132921213864, -1.6029603605801721132),
    ((2, 1), (0.29999999999999999, -2.0), 5.0, -6.4771714111483795132, 1.7401133395345396182),
    ((2, 1), (0.29999999999999999, -2.0), 25.0, -35.07139151888480065, -2.464657143004250555),
    ((2, 1), (0.0, 1.0), 0.3, -2.1041617762567658711, 2.1706459841704908276),
    ((2, 1), (0.0, 1.0), 1.0, -2.2133138505726196841, 2.4004644139764784886),
    ((2, 1), (0.0, 1.0), 5.0, -4.3136575130047702291, 2.1301940885441707389),
    ((2, 1), (0.0, 1.0), 25.0, -21.904570200749324227, 1.3207628090554668567),
    ((2, 1), (0.0, -0.69999999999999996), 0.3, -1.3845591487501149225, -2.4763453298934488131),
    ((2, 1), (0.0, -0.69999999999999996), 1.0, -1.494427928724382484, -2.8032703010462213054),
    ((2, 1), (0.0, -0.69999999999999996), 5.0, -3.5994390452623290469, 1.1811112217163357082),
    ((2, 1), (0.0, -0.69999999999999996), 25.0, -21.191212163020131125, 0.53263171911409425814),
    ((2, 1), (0.0, 0.050000000000000003), 0.3, 3.900757205167740714, -2.741573133537982473),
    ((2, 1), (0.0, 0.050000000000000003), 1.0, 3.7899433384445795219, 1.8085940203832541463),
    ((2, 1), (0.0, 0.050000000000000003), 5.0, 1.6795324578033855756, 2.4289541735815333224),
    ((2, 1), (0.0, 0.050000000000000003), 25.0, -15.913089706975609722, -0.93425032149069901326),
    ((4, 2), (0.01, 0.0), 0.3, 8.450776033830413667, 0.0),
    ((4, 2), (0.01, 0.0), 1.0, -14.520937155197398866, 0.0),
    ((4, 2), (0.01, 0.0), 5.0, -618.74305512295546928, 0.0),
    ((4, 2), (0.01, 0.0), 25.0, -15653.930882707226174, 0.0),
    ((4, 2), (0.5, 0.0), 0.3, -4.765240057489760058, 0.0),
    ((4, 2), (0.5, 0.0), 1.0, -5.4452163925546986057, 0.0),
    ((4, 2), (0.5, 0.0), 5.0, -21.72257149926450084, 0.0),
    ((4, 2), (0.5, 0.0), 25.0, -357.02966962649229635, 0.0),
    ((4, 2), (1.0, 0.0), 0.3, -8.9564703615331527298, 0.0),
    ((4, 2), (1.0, 0.0), 1.0, -9.4116840959691833348, 0.0),
    ((4, 2), (1.0, 0.0), 5.0, -19.736381869633544256, 0.0),
    ((4, 2), (1.0, 0.0), 25.0, -205.15282890696609032, 0.0),
    ((4, 2), (30.0, 0.0), 0.3, -132.95934324114869448, 0.0),
    ((4, 2), (30.0, 0.0), 1.0, -133.21670880434618109, 0.0),
    ((4, 2), (30.0, 0.0), 5.0, -138.17131528178363745, 0.0),
    ((4, 2), (30.0, 0.0), 25.0, -180.19888323293662879, 0.0),
    ((4, 2), (2.0, 1.0), 0.3, -15.363151194214264932, 0.9998949059433479436),
    ((4, 2), (2.0, 1.0), 1.0, -15.686612310796237509, 1.0419390637220717424),
    ((4, 2), (2.0, 1.0), 5.0, -22.494956811987497931, 2.1790899838782990079),
    ((4, 2), (2.0, 1.0), 25.0, -118.11532165222014192, 0.59314517688573304951),
    ((4, 2), (0.29999999999999999, -2.0), 0.3, -8.7138132934928417963, -0.4814815449698751069),
    ((4, 2), (0.29999999999999999, -2.0), 1.0, -8.9589268211454882411, -0.58149398063377413698),
    ((4, 2), (0.29999999999999999, -2.0), 5.0, -13.727239563175954004, 2.9638931829085465424),
    ((4, 2), (0.29999999999999999, -2.0), 25.0, -60.090555171087842771, -0.81325365861292710373),
    ((4, 2), (0.0, 1.0), 0.3, -5.3253018633680929249, -2.7010111006871619113),
    ((4, 2), (0.0, 1.0), 1.0, -5.5484686476024495624, -2.4806098555439233618),
    ((4, 2), (0.0, 1.0), 5.0, -9.7921820861622404762, -2.8834651682627342251),
    ((4, 2), (0.0, 1.0), 25.0, -45.006810710497947408, 2.3492135182940518999),
    ((4, 2), (0.0, -0.69999999999999996), 0.3, -4.1057208295828004911, 1.6358071851068136693),
    ((4, 2), (0.0, -0.69999999999999996), 1.0, -4.328120083003698684, 1.3158801409640623406),
    ((4, 2), (0.0, -0.69999999999999996), 5.0, -8.560348271074154443, -0.88716156208577197993),
    ((4, 2), (0.0, -0.69999999999999996), 25.0, -43.760115093155167759, -1.3654309780716511929),
    ((4, 2), (0.0, 0.050000000000000003), 0.3, 5.1029020585893870764, 1.0603597057338288282),
    ((4, 2), (0.0, 0.050000000000000003), 1.0, 4.8812586953590571925, -0.67319513258465938724),
    ((4, 2), (0.0, 0.050000000000000003), 5.0, 0.66031692798755631911, -0.059901446307734807635),
    ((4, 2), (0.0, 0.050000000000000003), 25.0, -34.525010877917834249, 2.8478204779383409281),
    ((4, 3), (0.01, 0.0), 0.3, 9.4435835997952444434, 0.0),
    ((4, 3), (0.01, 0.0), 1.0, -13.601532303060601757, 0.0),
    ((4, 3), (0.01, 0.0), 5.0, -619.09316583255403332, 0.0),
    ((4, 3), (0.01, 0.0), 25.0, -15663.478063567779316, 0.0),
    ((4, 3), (0.5, 0.0), 0.3, -6.6597618438617456764, 0.0),
    ((4, 3), (0.5, 0.0), 1.0, -7.4187093911832926651, 0.0),
    ((4, 3), (0.5, 0.0), 5.0, -25.023838369525642024, 0.0),
    ((4, 3), (0.5, 0.0), 25.0, -369.60420074061714219, 0.0),
    ((4, 3), (1.0, 0.0), 0.3, -12.190456580072805046, 0.0),
    ((4, 3), (1.0, 0.0), 1.0, -12.727783679428224812, 0.0),
    ((4, 3), (1.0, 0.0), 5.0, -24.417647943410739389, 0.0),
    ((4, 3), (1.0, 0.0), 25.0, -219.16893718642483754, 0.0),
    ((4, 3), (30.0, 0.0), 0.3, -201.76527590755259379, 0.0),
    ((4, 3), (30.0, 0.0), 1.0, -202.11397456170806704, 0.0),
    ((4, 3), (30.0, 0.0), 5.0, -208.57625082254100882, 0.0),
    ((4, 3), (30.0, 0.0), 25.0, -260.41665387667060985, 0.0),
    ((4, 3), (2.0, 1.0), 0.3, -21.030923435365225639, -1.3232369520802710856),
    ((4, 3), (2.0, 1.0), 1.0, -21.440497797934181562, -1.2832593961505224579),
    ((4, 3), (2.0, 1.0), 5.0, -29.666567627858973858, -0.17611429685872090162),
    ((4, 3), (2.0, 1.0), 25.0, -134.72588594347000098, -1.8364039745328989473),
    ((4, 3), (0.29999999999999999, -2.0), 0.3, -10.668243524937444344, -2.0392204752566305904),
    ((4, 3), (0.29999999999999999, -2.0), 1.0, -11.000671054517011305, -2.131560398218805424),
    ((4, 3), (0.29999999999999999, -2.0), 5.0, -17.187568871168048277, 1.5255392759438347913),
    ((4, 3), (0.29999999999999999, -2.0), 25.0, -72.911460574405050024, -2.0096322016497506631),
    ((4, 3), (0.0, 1.0), 0.3, -6.492503604962635795, 0.89914428044735704822),
    ((4, 3), (0.0, 1.0), 1.0, -6.7967810186239227929, 1.1098643681888144592),
    ((4, 3), (0.0, 1.0), 5.0, -12.376304969466142647, 0.59339016699192431647),
    ((4, 3), (0.0, 1.0), 25.0, -56.830670175441701731, -0.62091384109591148103),
    ((4, 3), (0.0, -0.69999999999999996), 0.3, -5.1502480738169144638, -2.5523766411442079392),
    ((4, 3), (0.0, -0.69999999999999996), 1.0, -5.4507516340828208029, -2.863822195595968666),
    ((4, 3), (0.0, -0.69999999999999996), 5.0, -10.989832579351526682, 1.3082616711664285046),
    ((4, 3), (0.0, -0.69999999999999996), 25.0, -55.407701421826337091, 0.94916057931340419427),
    ((4, 3), (0.0, 0.050000000000000003), 0.3, 5.3097631505371623782, 0.18319691476237393653),
    ((4, 3), (0.0, 0.050000000000000003), 1.0, 5.0148440137118227643, -1.5511664726097812452),
    ((4, 3), (0.0, 0.050000000000000003), 5.0, -0.47430256452330515171, -0.94566515175113604496),
    ((4, 3), (0.0, 0.050000000000000003), 25.0, -44.855056057253335838, 1.9532022730479397191),
];

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[test]
fn kernel_matches_high_precision_oracle() {
    let mut worst: f64 = 0.0;
    for &((m, k), (tr, ti), r, ln_abs, arg) in ORACLE {
        let p = SpaceParams::new(m, k).unwrap();
        let tau = ComplexTime::new(Complex64::new(tr, ti)).unwrap();
        let v = kernel_h(&p, tau, r).unwrap();
        let expected = if k % 2 == 0 { KernelMethod::ClosedForm } else { KernelMethod::AbelIntegral };
        assert_eq!(v.method, expected);
        let s = v.scaled();
        let d_mod = (s.ln_abs() - ln_abs).abs();
        let d_arg = wrap(s.arg() - arg).abs();
        let err = d_mod.max(d_arg);
        worst = worst.max(err);
        assert!(
            err < 1e-9,
            "m={m} k={k} τ={tr}+{ti}i r={r}: ln|h| {} vs {ln_abs}, arg {} vs {arg}",
            s.ln_abs(),
            s.arg()
        );
    }
    println!("worst relative deviation {worst:.2e}");
}
