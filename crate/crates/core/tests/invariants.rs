use drinfeld_core::base_arith::{APoly, PolyRing, ResidueRing};
use drinfeld_core::forms::{Depth, FormsContext};
use drinfeld_core::tate_drinfeld::TateDrinfeld;
use drinfeld_core::Ring;
use proptest::prelude::*;

const CONFIGS: [(u64, &str, &str); 4] = [(2, "t", "1"), (2, "t", "t"), (3, "t", "1"), (2, "t^2+t+1", "1")];

fn td(q: u64, wp: &str, f: &str, n: i64) -> (PolyRing, APoly, TateDrinfeld<PolyRing>) {
    let a = PolyRing::with_q(q).unwrap();
    let wp = a.parse(wp).unwrap();
    let f = a.parse(f).unwrap();
    let t = TateDrinfeld::new(&a, &a, &f, n, 3.max(wp.deg0() + 1)).unwrap();
    (a, wp, t)
}

#[test]
fn tate_drinfeld_identities() {
    for (q, wp, f) in CONFIGS {
        for n in [8, 12] {
            let (a, wp, t) = td(q, wp, f, n);
            let s = t.series();
            assert!(t.residuals().iter().all(|r| r.is_zero_to_prec()));
            assert!(s.is_in_subring_q_minus_1(t.a1()) && s.is_in_subring_q_minus_1(t.a2()));
            let scale = (q as i64).pow(t.f().deg0() as u32);
            assert_eq!(t.a2().valuation(), Some((q as i64 - 1) * scale));
            assert!(t.ordinarity(&wp).unwrap().ordinary);
            let iso = t.canonical_isogeny(&wp).unwrap();
            assert_eq!(iso.psi.coeff(0), s.constant(wp.clone()));
            assert!(iso.residuals_vanish() && iso.divides_phi());
            assert!(t.verify_tdquot(&iso, &APoly::t()).unwrap().ok);
            let lam = t.verify_tdquot(&iso, &APoly::constant(a.fq().elem(1))).unwrap();
            assert!(lam.ok);
        }
    }
}

#[test]
fn kodaira_spencer_has_a_simple_pole() {
    for q in [2, 3, 4, 5] {
        let a = PolyRing::with_q(q).unwrap();
        let t = TateDrinfeld::new(&a, &a, &APoly::one(), 2 * q as i64 + 2, 3).unwrap();
        let ks = t.kodaira_spencer().unwrap();
        assert_eq!(ks.l.valuation(), Some(-1), "q={q}");
        assert_eq!(t.series().coeff(&ks.l, -1), Some(APoly::one()));
    }
}

#[test]
fn hasse_lift_is_one_mod_wp_at_every_precision() {
    for (q, wp) in [(2u64, "t"), (2, "t^2+t+1"), (3, "t"), (2, "t+1"), (3, "t^2+1")] {
        let a = PolyRing::with_q(q).unwrap();
        let wp = a.parse(wp).unwrap();
        for n in [4, 9, 16] {
            let c = FormsContext::new(&a, &wp, n, 1).unwrap();
            let s = c.series();
            assert!(c.series_valuation(&s.sub(&c.hasse_lift().series, &s.one())) >= 1);
        }
    }
}

#[test]
fn expansion_over_residue_ring_is_the_reduction() {
    let a = PolyRing::with_q(2).unwrap();
    let wp = a.parse("t^2+t+1").unwrap();
    let r = ResidueRing::prime_power(&a, &wp, 3).unwrap();
    let exact = TateDrinfeld::new(&a, &a, &APoly::one(), 10, 3).unwrap();
    let red = TateDrinfeld::new(&a, &r, &APoly::one(), 10, 3).unwrap();
    let mapped = exact.series().map_to(red.series(), exact.a2(), |c| r.reduce(c));
    assert_eq!(&mapped, red.a2());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn limit_sequence_is_cauchy(alpha in 0u64..4, beta in 0u64..3, s1 in 0u64..16) {
        let a = PolyRing::with_q(2).unwrap();
        let c = FormsContext::new(&a, &APoly::t(), 20, 6).unwrap();
        let f = c.monomial(alpha, beta, 0);
        let chi = drinfeld_core::forms::WeightChar { s0: 0, s1, precision: 4 };
        let hs = c.padic_limit_sequence(&f, &chi, 5).unwrap();
        for n in 1..hs.len() {
            let d = c.congruence_depth(&hs[n], &hs[n - 1], 6).unwrap();
            prop_assert!(matches!(d, Depth::Depth(m) if m as usize >= n));
        }
    }

    #[test]
    fn audit_never_passes_below_the_modulus(alpha in 0u64..5, beta in 0u64..3, l in 1u32..3, shift in 1i64..8) {
        let a = PolyRing::with_q(3).unwrap();
        let c = FormsContext::new(&a, &APoly::t(), 40, 10).unwrap();
        let f = c.monomial(alpha, beta, 0);
        let g = c.mul(&f, &c.pow_p_power(&c.hasse_lift(), l));
        let mut h = g.clone();
        h.weight += shift;
        let au = c.weight_congruence_audit(&f, &h, 10).unwrap();
        let m = au.modulus.unwrap() as i64;
        prop_assert_eq!(au.pass(), (g.weight - f.weight + shift) % m == 0);
    }
}
