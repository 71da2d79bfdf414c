//! Quotient rings A/(m) and finite fields carrying a distinguished θ.

use std::fmt;
use std::sync::Arc;

use super::fq::{Fq, FqField};
use super::poly::{APoly, Degree, PolyRing};
use crate::error::{Error, Result};
use crate::ring::{Ring, ThetaRing};

/// Largest field that root search will enumerate.
pub const MAX_ENUMERATED_FIELD: u64 = 1 << 18;

struct ResInner {
    poly: PolyRing,
    modulus: APoly,
    theta: APoly,
    var: char,
    is_field: bool,
    /// `var^(q i) mod modulus` for i < deg(modulus).
    frob_basis: Vec<APoly>,
}

/// The ring F_q[var]/(modulus) with an element θ; for A/(m) the
/// variable is t and θ = t. Cheap to clone.
#[derive(Clone)]
pub struct ResidueRing(Arc<ResInner>);

impl fmt::Debug for ResidueRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}[{}]/({})",
            self.0.poly.fq().q(),
            self.0.var,
            self.0.poly.format_in(&self.0.modulus, &self.0.var.to_string())
        )
    }
}

impl ResidueRing {
    /// A/(modulus) with θ = t.
    pub fn new(poly: &PolyRing, modulus: &APoly) -> Result<ResidueRing> {
        Self::build(poly, modulus, None, 't')
    }

    /// A/(℘^n).
    pub fn prime_power(poly: &PolyRing, wp: &APoly, n: u32) -> Result<ResidueRing> {
        Self::new(poly, &poly.pow_p(wp, n as u64))
    }

    fn build(poly: &PolyRing, modulus: &APoly, theta: Option<APoly>, var: char) -> Result<ResidueRing> {
        if !modulus.is_monic() {
            return Err(Error::InvalidInput(format!("modulus {} must be monic", poly.format(modulus))));
        }
        let n = match modulus.degree() {
            Degree::Finite(n) if n >= 1 => n,
            _ => return Err(Error::InvalidInput("modulus must have positive degree".into())),
        };
        let q = poly.fq().q() as u64;
        let mut frob_basis = Vec::with_capacity(n);
        let xq = poly.powmod(&APoly::t(), q, modulus)?;
        let mut cur = APoly::one();
        for _ in 0..n {
            frob_basis.push(cur.clone());
            cur = poly.rem(&poly.mul_p(&cur, &xq), modulus)?;
        }
        let theta = match theta {
            Some(th) => poly.rem(&th, modulus)?,
            None => poly.rem(&APoly::t(), modulus)?,
        };
        let is_field = poly.is_irreducible(modulus);
        Ok(ResidueRing(Arc::new(ResInner {
            poly: poly.clone(),
            modulus: modulus.clone(),
            theta,
            var,
            is_field,
            frob_basis,
        })))
    }

    /// F_{q^(d m)} with θ a root of the irreducible ℘ (d = deg ℘).
    ///
    /// For m = 1 this is A/(℘) with θ = t; otherwise the field is
    /// F_q[s]/(g) for the first irreducible g of degree d·m and θ is
    /// the smallest root of ℘ in it.
    pub fn field_with_theta(poly: &PolyRing, wp: &APoly, m: usize) -> Result<ResidueRing> {
        if !poly.is_irreducible(wp) {
            return Err(Error::Reducible(poly.format(wp)));
        }
        let k = Self::new(poly, wp)?;
        if m == 1 {
            return Ok(k);
        }
        Ok(k.extension(m)?.0)
    }

    /// The degree-m extension F of this field, with an embedding of
    /// this field into F; θ of F is the image of θ.
    pub fn extension(&self, m: usize) -> Result<(ResidueRing, Embedding)> {
        if !self.is_field() {
            return Err(Error::InvalidInput(format!("{self:?} is not a field")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        let poly = &self.0.poly;
        let n = self.degree() * m;
        let size = (poly.fq().q() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if size > MAX_ENUMERATED_FIELD {
            return Err(Error::Unsupported(format!("field of size {size} is too large to search")));
        }
        let g = poly.first_irreducible(n);
        let big = Self::build(poly, &g, Some(APoly::zero()), 's')?;
        let h = &self.0.modulus;
        let root = big
            .elements()
            .find(|r| big.is_zero(&eval_in(&big, h, r)))
            .ok_or_else(|| Error::Consistency("no root of the base modulus in its extension".into()))?;
        let emb = Embedding { target: big.clone(), image: root };
        let theta = emb.apply(&self.0.theta);
        let target = Self::build(poly, &g, Some(theta), 's')?;
        let emb = Embedding { target: target.clone(), image: emb.image };
        Ok((target, emb))
    }

    pub fn poly_ring(&self) -> &PolyRing {
        &self.0.poly
    }
    pub fn fq(&self) -> &FqField {
        self.0.poly.fq()
    }
    pub fn modulus(&self) -> &APoly {
        &self.0.modulus
    }
    pub fn degree(&self) -> usize {
        self.0.modulus.deg0()
    }
    pub fn var(&self) -> char {
        self.0.var
    }
    pub fn is_field(&self) -> bool {
        self.0.is_field
    }
    /// Number of elements.
    pub fn size(&self) -> u64 {
        (self.fq().q() as u64).saturating_pow(self.degree() as u32)
    }

    pub fn reduce(&self, a: &APoly) -> APoly {
        if a.c_len() <= self.degree() {
            return a.clone();
        }
        self.0.poly.rem(a, &self.0.modulus).expect("monic modulus")
    }

    /// The canonical representative of degree < deg(modulus).
    pub fn lift(&self, a: &APoly) -> APoly {
        a.clone()
    }

    /// Coordinates on the power basis, length deg(modulus).
    pub fn coords(&self, a: &APoly) -> Vec<Fq> {
        (0..self.degree()).map(|i| a.coeff(i)).collect()
    }
    pub fn from_coords(&self, c: &[Fq]) -> APoly {
        APoly::from_coeffs(c.to_vec())
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = APoly> + '_ {
        self.0.poly.below_degree(self.degree())
    }

    /// The minimal polynomial of `a` over F_q, from its Frobenius orbit.
    pub fn minimal_polynomial(&self, a: &APoly) -> Result<APoly> {
        if !self.is_field() {
            return Err(Error::InvalidInput("minimal polynomials need a field".into()));
        }
        let mut orbit = vec![a.clone()];
        let mut x = self.frobenius(a);
        while &x != a {
            orbit.push(x.clone());
            x = self.frobenius(&x);
        }
        // ∏ (X - a_i), coefficients low degree first
        let mut prod: Vec<APoly> = vec![self.one()];
        for r in &orbit {
            let mut next = vec![self.zero(); prod.len() + 1];
            for (i, c) in prod.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], c);
                next[i] = self.sub(&next[i], &self.mul(c, r));
            }
            prod = next;
        }
        let mut out = Vec::with_capacity(prod.len());
        for c in prod {
            if c.deg0() > 0 {
                return Err(Error::Consistency("minimal polynomial has non-constant coefficients".into()));
            }
            out.push(c.coeff(0));
        }
        Ok(APoly::from_coeffs(out))
    }

    pub fn format(&self, a: &APoly) -> String {
        self.0.poly.format_in(a, &self.0.var.to_string())
    }

    pub fn parse(&self, s: &str) -> Result<APoly> {
        Ok(self.reduce(&super::text::parse_poly(&self.0.poly, s, self.0.var)?))
    }
}

impl APoly {
    pub(crate) fn c_len(&self) -> usize {
        self.coeffs().len()
    }
}

/// Horner evaluation of an F_q-polynomial at an element of `r`.
fn eval_in(r: &ResidueRing, h: &APoly, x: &APoly) -> APoly {
    h.coeffs()
        .iter()
        .rev()
        .fold(r.zero(), |acc, &c| r.add(&r.mul(&acc, x), &APoly::constant(c)))
}

/// A field embedding determined by the image of the source generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    target: ResidueRing,
    image: APoly,
}

impl Embedding {
    pub fn target(&self) -> &ResidueRing {
        &self.target
    }
    pub fn apply(&self, a: &APoly) -> APoly {
        eval_in(&self.target, a, &self.image)
    }
}

impl Ring for ResidueRing {
    type Elem = APoly;

    fn zero(&self) -> APoly {
        APoly::zero()
    }
    fn one(&self) -> APoly {
        APoly::one()
    }
    fn is_zero(&self, a: &APoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &APoly, b: &APoly) -> APoly {
        self.0.poly.add_p(a, b)
    }
    fn sub(&self, a: &APoly, b: &APoly) -> APoly {
        self.0.poly.sub_p(a, b)
    }
    fn neg(&self, a: &APoly) -> APoly {
        self.0.poly.neg_p(a)
    }
    fn mul(&self, a: &APoly, b: &APoly) -> APoly {
        self.reduce(&self.0.poly.mul_p(a, b))
    }
    fn inv(&self, a: &APoly) -> Option<APoly> {
        let (g, s, _) = self.0.poly.ext_gcd(a, &self.0.modulus);
        g.is_one().then(|| self.reduce(&s))
    }
    fn frobenius(&self, a: &APoly) -> APoly {
        let poly = &self.0.poly;
        let mut acc = APoly::zero();
        for (i, &c) in a.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = poly.add_p(&acc, &poly.scale(c, &self.0.frob_basis[i]));
            }
        }
        acc
    }
    fn from_int(&self, n: i64) -> APoly {
        APoly::constant(self.fq().from_int(n))
    }
    fn from_fq(&self, c: Fq) -> APoly {
        APoly::constant(c)
    }
    fn q(&self) -> u64 {
        self.fq().q() as u64
    }
    fn characteristic(&self) -> u64 {
        self.fq().p() as u64
    }
    fn fmt_elem(&self, a: &APoly) -> String {
        self.format(a)
    }
}

impl ThetaRing for ResidueRing {
    fn theta(&self) -> APoly {
        self.0.theta.clone()
    }
    fn from_apoly(&self, a: &APoly) -> APoly {
        if self.0.var == 't' && self.0.theta == APoly::t() {
            return self.reduce(a);
        }
        eval_in(self, a, &self.0.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(q: u64) -> PolyRing {
        PolyRing::with_q(q).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let a2 = a(2);
        let r = ResidueRing::prime_power(&a2, &APoly::t(), 2).unwrap();
        assert_eq!(r.reduce(&a2.parse("t^3+t").unwrap()), APoly::t());
        assert_eq!(r.reduce(&APoly::zero()), APoly::zero());
        let f = ResidueRing::new(&a2, &a2.parse("t^2+t+1").unwrap()).unwrap();
        assert_eq!(f.reduce(&a2.parse("t^2").unwrap()), a2.parse("t+1").unwrap());
    }

    #[test]
    fn theta_examples() {
        let a2 = a(2);
        let k = ResidueRing::field_with_theta(&a2, &APoly::t(), 1).unwrap();
        assert_eq!(k.size(), 2);
        assert!(k.theta().is_zero());
        let k = ResidueRing::field_with_theta(&a2, &a2.parse("t+1").unwrap(), 1).unwrap();
        assert_eq!(k.theta(), APoly::one());
        let wp = a2.parse("t^2+t+1").unwrap();
        let k = ResidueRing::field_with_theta(&a2, &wp, 1).unwrap();
        assert_eq!(k.size(), 4);
        assert!(k.is_zero(&k.from_apoly(&wp)));
        assert!(ResidueRing::field_with_theta(&a2, &a2.parse("t^2+1").unwrap(), 1).is_err());
    }

    #[test]
    fn theta_has_the_prime_as_minimal_polynomial() {
        for q in [2u64, 3, 4] {
            let aq = a(q);
            for d in 1..=3 {
                for wp in aq.irreducibles_of_degree(d) {
                    for m in 1..=2 {
                        if q.pow((d * m) as u32) > 4096 {
                            continue;
                        }
                        let k = ResidueRing::field_with_theta(&aq, &wp, m).unwrap();
                        assert_eq!(k.size(), q.pow((d * m) as u32));
                        assert_eq!(k.minimal_polynomial(&k.theta()).unwrap(), wp);
                    }
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let a3 = a(3);
        let k = ResidueRing::new(&a3, &a3.parse("t^2+1").unwrap()).unwrap();
        let (big, emb) = k.extension(2).unwrap();
        let els: Vec<APoly> = k.elements().collect();
        for x in &els {
            for y in &els {
                assert_eq!(emb.apply(&k.mul(x, y)), big.mul(&emb.apply(x), &emb.apply(y)));
                assert_eq!(emb.apply(&k.add(x, y)), big.add(&emb.apply(x), &emb.apply(y)));
            }
        }
        assert_eq!(emb.apply(&k.theta()), big.theta());
    }

    #[test]
    fn non_units_have_no_inverse() {
        let a2 = a(2);
        let r = ResidueRing::prime_power(&a2, &APoly::t(), 3).unwrap();
        assert!(r.inv(&APoly::t()).is_none());
        let u = a2.parse("t+1").unwrap();
        assert_eq!(r.mul(&u, &r.inv(&u).unwrap()), APoly::one());
    }

    proptest! {
        #[test]
        fn quotient_ring_axioms(q in prop::sample::select(vec![2u64, 3, 4]),
                                x in prop::collection::vec(0u32..4, 0..9),
                                y in prop::collection::vec(0u32..4, 0..9),
                                z in prop::collection::vec(0u32..4, 0..9)) {
            let aq = a(q);
            let r = ResidueRing::prime_power(&aq, &aq.parse("t^2+t+1").unwrap_or(APoly::t()), 2).unwrap();
            let mk = |v: &[u32]| r.reduce(&APoly::from_coeffs(v.iter().map(|&c| aq.fq().elem(c)).collect()));
            let (x, y, z) = (mk(&x), mk(&y), mk(&z));
            prop_assert_eq!(r.mul(&r.mul(&x, &y), &z), r.mul(&x, &r.mul(&y, &z)));
            prop_assert_eq!(r.mul(&x, &r.add(&y, &z)), r.add(&r.mul(&x, &y), &r.mul(&x, &z)));
            prop_assert_eq!(r.frobenius(&r.add(&x, &y)), r.add(&r.frobenius(&x), &r.frobenius(&y)));
            prop_assert_eq!(r.frobenius(&r.mul(&x, &y)), r.mul(&r.frobenius(&x), &r.frobenius(&y)));
            prop_assert_eq!(r.frobenius(&x), r.pow(&x, q));
            if let Some(xi) = r.inv(&x) {
                prop_assert_eq!(r.mul(&x, &xi), APoly::one());
            }
        }
    }
}
