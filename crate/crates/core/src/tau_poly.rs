//! Twisted polynomials B{τ}: aτ^i · bτ^j = a b^(q^i) τ^(i+j).
//!
//! Σ b_i τ^i acts as the additive polynomial X -> Σ b_i X^(q^i), and the
//! product is composition: (f·g)(X) = f(g(X)).

use crate::base_arith::Degree;
use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, Debug)]
pub struct TauPoly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for TauPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<R: Ring> TauPoly<R> {
    pub fn new(ring: &R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        TauPoly { ring: ring.clone(), coeffs }
    }
    pub fn zero(ring: &R) -> Self {
        TauPoly { ring: ring.clone(), coeffs: Vec::new() }
    }
    pub fn constant(ring: &R, c: R::Elem) -> Self {
        Self::new(ring, vec![c])
    }
    pub fn one(ring: &R) -> Self {
        Self::constant(ring, ring.one())
    }
    /// `c τ^k`.
    pub fn monomial(ring: &R, c: R::Elem, k: usize) -> Self {
        let mut v = vec![ring.zero(); k];
        v.push(c);
        Self::new(ring, v)
    }
    pub fn tau_pow(ring: &R, k: usize) -> Self {
        Self::monomial(ring, ring.one(), k)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> R::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }
    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn leading(&self) -> Option<&R::Elem> {
        self.coeffs.last()
    }

    pub fn add(&self, g: &Self) -> Self {
        let n = self.coeffs.len().max(g.coeffs.len());
        let c = (0..n).map(|i| self.ring.add(&self.coeff(i), &g.coeff(i))).collect();
        Self::new(&self.ring, c)
    }
    pub fn sub(&self, g: &Self) -> Self {
        let n = self.coeffs.len().max(g.coeffs.len());
        let c = (0..n).map(|i| self.ring.sub(&self.coeff(i), &g.coeff(i))).collect();
        Self::new(&self.ring, c)
    }
    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|c| self.ring.neg(c)).collect())
    }
    /// `c · f` (left scalar multiplication).
    pub fn scale_left(&self, c: &R::Elem) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|x| self.ring.mul(c, x)).collect())
    }

    /// The twisted product self·g.
    pub fn mul(&self, g: &Self) -> Self {
        if self.is_zero() || g.is_zero() {
            return Self::zero(&self.ring);
        }
        let r = &self.ring;
        let mut out = vec![r.zero(); self.coeffs.len() + g.coeffs.len() - 1];
        let mut tw = g.coeffs.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                tw = tw.iter().map(|b| r.frobenius(b)).collect();
            }
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in tw.iter().enumerate() {
                out[i + j] = r.add(&out[i + j], &r.mul(a, b));
            }
        }
        Self::new(r, out)
    }

    /// Every coefficient raised to the q^k power.
    pub fn twist(&self, k: usize) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|c| self.ring.frobenius_pow(c, k)).collect())
    }

    /// Σ b_i x^(q^i).
    pub fn eval(&self, x: &R::Elem) -> R::Elem {
        let r = &self.ring;
        let mut acc = r.zero();
        let mut xp = x.clone();
        for (i, b) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xp = r.frobenius(&xp);
            }
            acc = r.add(&acc, &r.mul(b, &xp));
        }
        acc
    }

    /// Right division: self = quo·u + rem with deg rem < deg u.
    pub fn rdivmod(&self, u: &Self) -> Result<(Self, Self)> {
        let r = &self.ring;
        let du = match u.degree() {
            Degree::NegInfinity => return Err(Error::DivisionByZero),
            Degree::Finite(d) => d,
        };
        let lead = u.leading().expect("nonzero");
        if r.inv(lead).is_none() {
            return Err(Error::NotUnit(format!("leading coefficient {}", r.fmt_elem(lead))));
        }
        if self.coeffs.len() <= du {
            return Ok((Self::zero(r), self.clone()));
        }
        let mut h = self.coeffs.clone();
        let top = h.len() - 1 - du;
        let mut quo = vec![r.zero(); top + 1];
        for s in (0..=top).rev() {
            let c = h[s + du].clone();
            if !r.is_zero(&c) {
                // q_s = c · (ℓ^(q^s))^-1, subtract q_s τ^s · u
                let ls = r.frobenius_pow(lead, s);
                let qs = r.mul(&c, &r.inv(&ls).expect("twist of a unit is a unit"));
                for (j, uj) in u.coeffs.iter().enumerate().take(du) {
                    let term = r.mul(&qs, &r.frobenius_pow(uj, s));
                    h[s + j] = r.sub(&h[s + j], &term);
                }
                quo[s] = qs;
            }
            h.pop();
        }
        Ok((Self::new(r, quo), Self::new(r, h)))
    }

    /// Coefficientwise image in another ring.
    pub fn map<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> TauPoly<S> {
        TauPoly::new(target, self.coeffs.iter().map(f).collect())
    }

    pub fn format(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| self.ring.fmt_elem(c)).collect()
    }

    /// Text form as an additive polynomial in `var`.
    pub fn format_additive(&self, var: &str) -> String {
        let q = self.ring.q();
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.ring.is_zero(c) {
                continue;
            }
            let e = q.pow(i as u32);
            let mon = if e == 1 { var.to_string() } else { format!("{var}^{e}") };
            let cs = self.ring.fmt_elem(c);
            parts.push(if cs == "1" {
                mon
            } else if cs.contains('+') {
                format!("({cs})*{mon}")
            } else {
                format!("{cs}*{mon}")
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_arith::{APoly, Fq, FqField, PolyRing, ResidueRing};
    use crate::ring::ThetaRing;
    use crate::series::SeriesRing;
    use proptest::prelude::*;

    #[test]
    fn tau_times_scalar() {
        let a = PolyRing::with_q(3).unwrap();
        let b = a.parse("t+2").unwrap();
        let lhs = TauPoly::tau_pow(&a, 1).mul(&TauPoly::constant(&a, b.clone()));
        assert_eq!(lhs, TauPoly::monomial(&a, a.frobenius(&b), 1));
    }

    #[test]
    fn square_of_theta_plus_tau() {
        for q in [2u64, 3, 4] {
            let a = PolyRing::with_q(q).unwrap();
            let th = a.theta();
            let f = TauPoly::new(&a, vec![th.clone(), APoly::one()]);
            let expect = TauPoly::new(&a, vec![a.mul(&th, &th), a.add(&a.frobenius(&th), &th), APoly::one()]);
            assert_eq!(f.mul(&f), expect);
            assert_eq!(f.mul(&TauPoly::one(&a)), f);
        }
    }

    #[test]
    fn evaluation_examples() {
        let a = PolyRing::with_q(2).unwrap();
        let f = TauPoly::new(&a, vec![a.theta(), APoly::one()]);
        assert_eq!(f.eval(&APoly::one()), a.parse("t+1").unwrap());
        assert!(f.eval(&APoly::zero()).is_zero());
        let f2 = FqField::new(2).unwrap();
        let s = SeriesRing::new(f2.clone(), 20);
        let x = s.from_coeffs(1, vec![Fq::ONE, Fq::ONE], 20);
        let v = TauPoly::tau_pow(&s, 2).eval(&x);
        let mut expect = vec![Fq::ZERO; 5];
        expect[0] = Fq::ONE;
        expect[4] = Fq::ONE;
        assert_eq!(v, s.from_coeffs(4, expect, 20));
    }

    #[test]
    fn division_examples() {
        let a = PolyRing::with_q(2).unwrap();
        let k = ResidueRing::new(&a, &a.parse("t^2+t+1").unwrap()).unwrap();
        let u0 = k.theta();
        let u = TauPoly::new(&k, vec![u0, APoly::one()]);
        let h = TauPoly::tau_pow(&k, 2);
        let (qt, r) = h.rdivmod(&u).unwrap();
        assert!(r.degree() <= Degree::Finite(0));
        assert_eq!(qt.mul(&u).add(&r), h);
        let (qt, r) = u.rdivmod(&u).unwrap();
        assert_eq!((qt, r), (TauPoly::one(&k), TauPoly::zero(&k)));
        let (qt, r) = u.rdivmod(&h).unwrap();
        assert_eq!((qt, r), (TauPoly::zero(&k), u.clone()));
        let bad = TauPoly::new(&a, vec![APoly::one(), APoly::t()]);
        assert!(matches!(h.map(&a, |_| APoly::one()).rdivmod(&bad), Err(Error::NotUnit(_))));
    }

    #[test]
    fn twist_examples() {
        let a = PolyRing::with_q(3).unwrap();
        let f = TauPoly::new(&a, vec![a.theta(), APoly::one()]);
        assert_eq!(f.twist(1), TauPoly::new(&a, vec![a.frobenius(&a.theta()), APoly::one()]));
        assert_eq!(f.twist(0), f);
        assert_eq!(f.twist(1).twist(1), f.twist(2));
    }

    fn field() -> ResidueRing {
        let a = PolyRing::with_q(3).unwrap();
        ResidueRing::new(&a, &a.parse("t^3+2t+1").unwrap()).unwrap()
    }

    fn arb_tau(max: usize) -> impl Strategy<Value = TauPoly<ResidueRing>> {
        prop::collection::vec(0u64..27, 0..max).prop_map(|v| {
            let k = field();
            let c = v.into_iter().map(|n| k.poly_ring().from_index(n, 3)).collect();
            TauPoly::new(&k, c)
        })
    }

    proptest! {
        #[test]
        fn product_is_associative_and_distributive(f in arb_tau(4), g in arb_tau(4), h in arb_tau(4)) {
            prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
            prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
            prop_assert_eq!(g.add(&h).mul(&f), g.mul(&f).add(&h.mul(&f)));
        }

        #[test]
        fn evaluation_is_composition(f in arb_tau(4), g in arb_tau(4), n in 0u64..27) {
            let k = field();
            let x = k.poly_ring().from_index(n, 3);
            prop_assert_eq!(f.mul(&g).eval(&x), f.eval(&g.eval(&x)));
        }

        #[test]
        fn evaluation_on_series_is_composition(fc in prop::collection::vec(0u64..9, 0..3),
                                               gc in prop::collection::vec(0u64..9, 0..3),
                                               xc in prop::collection::vec(0u32..2, 1..6)) {
            let a = PolyRing::with_q(2).unwrap();
            let s = SeriesRing::new(a.clone(), 40);
            let mk = |v: &[u64]| TauPoly::new(&s, v.iter().map(|&n| s.constant(a.from_index(n, 3))).collect());
            let (f, g) = (mk(&fc), mk(&gc));
            let x = s.from_coeffs(1, xc.iter().map(|&c| APoly::from_coeffs(vec![a.fq().elem(c)])).collect(), 40);
            let l = f.mul(&g).eval(&x);
            let r = f.eval(&g.eval(&x));
            prop_assert!(s.agrees_to(&l, &r, 40));
        }

        #[test]
        fn right_division_round_trip(h in arb_tau(6), u in arb_tau(4)) {
            prop_assume!(!u.is_zero());
            let (qt, r) = h.rdivmod(&u).unwrap();
            prop_assert!(r.degree() < u.degree());
            prop_assert_eq!(qt.mul(&u).add(&r), h);
        }

        #[test]
        fn twist_is_a_ring_map(f in arb_tau(4), g in arb_tau(4)) {
            prop_assert_eq!(f.mul(&g).twist(1), f.twist(1).mul(&g.twist(1)));
        }
    }
}
