//! The polynomial ring A = F_q[t].

use std::fmt;

use super::fq::{Fq, FqField};
use crate::error::{Error, Result};
use crate::ring::{Ring, ThetaRing};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial over F_q, low degree first, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct APoly {
    c: Vec<Fq>,
}

impl fmt::Debug for APoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<u32> = self.c.iter().map(|x| x.index()).collect();
        write!(f, "APoly{v:?}")
    }
}

impl APoly {
    pub fn zero() -> APoly {
        APoly { c: Vec::new() }
    }
    pub fn one() -> APoly {
        APoly { c: vec![Fq::ONE] }
    }
    pub fn constant(c: Fq) -> APoly {
        APoly::from_coeffs(vec![c])
    }
    /// `c * t^k`.
    pub fn monomial(c: Fq, k: usize) -> APoly {
        let mut v = vec![Fq::ZERO; k + 1];
        v[k] = c;
        APoly::from_coeffs(v)
    }
    pub fn t() -> APoly {
        APoly::monomial(Fq::ONE, 1)
    }
    pub fn from_coeffs(mut c: Vec<Fq>) -> APoly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        APoly { c }
    }
    pub fn coeffs(&self) -> &[Fq] {
        &self.c
    }
    pub fn coeff(&self, i: usize) -> Fq {
        self.c.get(i).copied().unwrap_or(Fq::ZERO)
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == Fq::ONE
    }
    pub fn degree(&self) -> Degree {
        match self.c.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }
    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.c.len().saturating_sub(1)
    }
    pub fn leading(&self) -> Fq {
        self.c.last().copied().unwrap_or(Fq::ZERO)
    }
    pub fn is_monic(&self) -> bool {
        self.leading() == Fq::ONE
    }
}

/// The ring A = F_q[t]. Cheap to clone.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing {
    fq: FqField,
}

impl PolyRing {
    pub fn new(fq: FqField) -> PolyRing {
        PolyRing { fq }
    }
    pub fn with_q(q: u64) -> Result<PolyRing> {
        Ok(PolyRing::new(FqField::new(q)?))
    }
    pub fn fq(&self) -> &FqField {
        &self.fq
    }

    pub fn add_p(&self, a: &APoly, b: &APoly) -> APoly {
        let (long, short) = if a.c.len() >= b.c.len() { (a, b) } else { (b, a) };
        let mut c = long.c.clone();
        for (x, y) in c.iter_mut().zip(&short.c) {
            *x = self.fq.add(*x, *y);
        }
        APoly::from_coeffs(c)
    }
    pub fn neg_p(&self, a: &APoly) -> APoly {
        APoly { c: a.c.iter().map(|&x| self.fq.neg(x)).collect() }
    }
    pub fn sub_p(&self, a: &APoly, b: &APoly) -> APoly {
        let n = a.c.len().max(b.c.len());
        let c = (0..n).map(|i| self.fq.sub(a.coeff(i), b.coeff(i))).collect();
        APoly::from_coeffs(c)
    }
    pub fn scale(&self, c: Fq, a: &APoly) -> APoly {
        if c.is_zero() {
            return APoly::zero();
        }
        APoly { c: a.c.iter().map(|&x| self.fq.mul(c, x)).collect() }
    }
    /// `a * t^k`.
    pub fn shift(&self, a: &APoly, k: usize) -> APoly {
        if a.is_zero() {
            return APoly::zero();
        }
        let mut c = vec![Fq::ZERO; k];
        c.extend_from_slice(&a.c);
        APoly { c }
    }

    pub fn mul_p(&self, a: &APoly, b: &APoly) -> APoly {
        if a.is_zero() || b.is_zero() {
            return APoly::zero();
        }
        let n = a.c.len() + b.c.len() - 1;
        if self.fq.is_prime() {
            let p = self.fq.p() as u64;
            let mut acc = vec![0u64; n];
            for (i, x) in a.c.iter().enumerate() {
                let xv = x.0 as u64;
                if xv == 0 {
                    continue;
                }
                for (slot, y) in acc[i..].iter_mut().zip(&b.c) {
                    *slot += xv * y.0 as u64;
                }
                if p > 256 && i % 1024 == 1023 {
                    acc.iter_mut().for_each(|s| *s %= p);
                }
            }
            return APoly::from_coeffs(acc.into_iter().map(|s| Fq((s % p) as u16)).collect());
        }
        let mut c = vec![Fq::ZERO; n];
        for (i, &x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (slot, &y) in c[i..].iter_mut().zip(&b.c) {
                *slot = self.fq.add(*slot, self.fq.mul(x, y));
            }
        }
        APoly::from_coeffs(c)
    }

    pub fn pow_p(&self, a: &APoly, mut e: u64) -> APoly {
        let mut acc = APoly::one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_p(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_p(&base, &base);
            }
        }
        acc
    }

    /// Euclidean division; `b` must be nonzero.
    pub fn divrem(&self, a: &APoly, b: &APoly) -> Result<(APoly, APoly)> {
        let db = match b.degree() {
            Degree::NegInfinity => return Err(Error::DivisionByZero),
            Degree::Finite(d) => d,
        };
        if a.c.len() <= db {
            return Ok((APoly::zero(), a.clone()));
        }
        let lead_inv = self.fq.inv(b.leading())?;
        let mut r = a.c.clone();
        let mut quo = vec![Fq::ZERO; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = r[k];
            if c.is_zero() {
                continue;
            }
            let f = self.fq.mul(c, lead_inv);
            quo[k - db] = f;
            let nf = self.fq.neg(f);
            for (i, &bi) in b.c.iter().enumerate() {
                if !bi.is_zero() {
                    r[k - db + i] = self.fq.add(r[k - db + i], self.fq.mul(nf, bi));
                }
            }
        }
        r.truncate(db);
        Ok((APoly::from_coeffs(quo), APoly::from_coeffs(r)))
    }

    pub fn rem(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        Ok(self.divrem(a, b)?.1)
    }

    /// Whether `b` divides `a`.
    pub fn divides(&self, b: &APoly, a: &APoly) -> bool {
        if b.is_zero() {
            return a.is_zero();
        }
        self.rem(a, b).map(|r| r.is_zero()).unwrap_or(false)
    }

    pub fn make_monic(&self, a: &APoly) -> APoly {
        if a.is_zero() {
            return APoly::zero();
        }
        let inv = self.fq.inv(a.leading()).expect("nonzero leading coefficient");
        self.scale(inv, a)
    }

    pub fn gcd(&self, a: &APoly, b: &APoly) -> APoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        self.make_monic(&x)
    }

    /// Returns (g, s, u) with s·a + u·b = g = gcd(a, b), g monic.
    pub fn ext_gcd(&self, a: &APoly, b: &APoly) -> (APoly, APoly, APoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (APoly::one(), APoly::zero());
        let (mut u0, mut u1) = (APoly::zero(), APoly::one());
        while !r1.is_zero() {
            let (qt, r) = self.divrem(&r0, &r1).expect("nonzero divisor");
            let s = self.sub_p(&s0, &self.mul_p(&qt, &s1));
            let u = self.sub_p(&u0, &self.mul_p(&qt, &u1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            u0 = std::mem::replace(&mut u1, u);
        }
        if r0.is_zero() {
            return (r0, s0, u0);
        }
        let inv = self.fq.inv(r0.leading()).expect("nonzero");
        (self.scale(inv, &r0), self.scale(inv, &s0), self.scale(inv, &u0))
    }

    /// `a^e mod m`.
    pub fn powmod(&self, a: &APoly, mut e: u64, m: &APoly) -> Result<APoly> {
        let mut acc = self.rem(&APoly::one(), m)?;
        let mut base = self.rem(a, m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul_p(&acc, &base), m)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.rem(&self.mul_p(&base, &base), m)?;
            }
        }
        Ok(acc)
    }

    /// Ben-Or test: f is irreducible iff gcd(t^(q^i) - t, f) = 1 for
    /// 1 ≤ i ≤ deg f / 2.
    pub fn is_irreducible(&self, f: &APoly) -> bool {
        let n = match f.degree() {
            Degree::Finite(n) if n >= 1 => n,
            _ => return false,
        };
        let q = self.fq.q() as u64;
        let t = APoly::t();
        let mut x = self.rem(&t, f).expect("nonzero");
        for _ in 0..n / 2 {
            x = self.powmod(&x, q, f).expect("nonzero");
            let g = self.gcd(&self.sub_p(&x, &t), f);
            if !g.is_one() {
                return false;
            }
        }
        true
    }

    /// Value at a constant.
    pub fn eval(&self, a: &APoly, x: Fq) -> Fq {
        a.c.iter().rev().fold(Fq::ZERO, |acc, &c| self.fq.add(self.fq.mul(acc, x), c))
    }

    /// The polynomial whose coefficient digits (base q) spell `n`.
    pub fn from_index(&self, mut n: u64, len: usize) -> APoly {
        let q = self.fq.q() as u64;
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            c.push(Fq((n % q) as u16));
            n /= q;
        }
        APoly::from_coeffs(c)
    }

    /// All monic polynomials of degree `d`, in index order.
    pub fn monic_of_degree(&self, d: usize) -> impl Iterator<Item = APoly> + '_ {
        let count = (self.fq.q() as u64).pow(d as u32);
        (0..count).map(move |n| {
            let mut p = self.from_index(n, d).c;
            p.resize(d, Fq::ZERO);
            p.push(Fq::ONE);
            APoly { c: p }
        })
    }

    /// All polynomials of degree < `d`, in index order.
    pub fn below_degree(&self, d: usize) -> impl Iterator<Item = APoly> + '_ {
        let count = (self.fq.q() as u64).pow(d as u32);
        (0..count).map(move |n| self.from_index(n, d))
    }

    /// Monic irreducible polynomials of degree `d`.
    pub fn irreducibles_of_degree(&self, d: usize) -> Vec<APoly> {
        self.monic_of_degree(d).filter(|f| self.is_irreducible(f)).collect()
    }

    /// The first monic irreducible of degree `d` in index order.
    pub fn first_irreducible(&self, d: usize) -> APoly {
        self.monic_of_degree(d)
            .find(|f| self.is_irreducible(f))
            .expect("irreducible polynomials exist in every degree")
    }

    /// The largest v with b^v dividing a; `None` for a = 0.
    pub fn valuation_at(&self, b: &APoly, a: &APoly) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let mut v = 0;
        let mut x = a.clone();
        loop {
            let (qt, r) = self.divrem(&x, b).ok()?;
            if !r.is_zero() {
                return Some(v);
            }
            x = qt;
            v += 1;
        }
    }

    /// Text form in the variable `var`, highest degree first.
    pub fn format_in(&self, a: &APoly, var: &str) -> String {
        let terms: Vec<(usize, String)> = a
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| {
                let s = self.fq.format(c);
                if self.fq.format_is_compound(c) {
                    (i, format!("({s})"))
                } else {
                    (i, s)
                }
            })
            .collect();
        super::text::format_terms(&terms, var, |s| s == "1")
    }

    pub fn format(&self, a: &APoly) -> String {
        self.format_in(a, "t")
    }

    pub fn parse(&self, s: &str) -> Result<APoly> {
        super::text::parse_poly(self, s, 't')
    }
}

impl Ring for PolyRing {
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
        self.add_p(a, b)
    }
    fn sub(&self, a: &APoly, b: &APoly) -> APoly {
        self.sub_p(a, b)
    }
    fn neg(&self, a: &APoly) -> APoly {
        self.neg_p(a)
    }
    fn mul(&self, a: &APoly, b: &APoly) -> APoly {
        self.mul_p(a, b)
    }
    fn inv(&self, a: &APoly) -> Option<APoly> {
        match a.degree() {
            Degree::Finite(0) => Some(APoly::constant(self.fq.inv(a.c[0]).ok()?)),
            _ => None,
        }
    }
    fn frobenius(&self, a: &APoly) -> APoly {
        // constants are fixed by the q-power map, so a(t)^q = a(t^q)
        if a.is_zero() {
            return APoly::zero();
        }
        let q = self.fq.q() as usize;
        let mut c = vec![Fq::ZERO; q * (a.c.len() - 1) + 1];
        for (i, &x) in a.c.iter().enumerate() {
            c[q * i] = x;
        }
        APoly { c }
    }
    fn from_int(&self, n: i64) -> APoly {
        APoly::constant(self.fq.from_int(n))
    }
    fn from_fq(&self, c: Fq) -> APoly {
        APoly::constant(c)
    }
    fn q(&self) -> u64 {
        self.fq.q() as u64
    }
    fn characteristic(&self) -> u64 {
        self.fq.p() as u64
    }
    fn fmt_elem(&self, a: &APoly) -> String {
        self.format(a)
    }
}

impl ThetaRing for PolyRing {
    fn theta(&self) -> APoly {
        APoly::t()
    }
    fn from_apoly(&self, a: &APoly) -> APoly {
        a.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(q: u64) -> PolyRing {
        PolyRing::with_q(q).unwrap()
    }

    #[test]
    fn irreducibility_examples() {
        let a = ring(2);
        assert!(a.is_irreducible(&a.parse("t^2+t+1").unwrap()));
        assert!(!a.is_irreducible(&a.parse("t^2").unwrap()));
        let b = ring(3);
        assert!(b.is_irreducible(&b.parse("t^2+1").unwrap()));
    }

    fn brute_irreducible(a: &PolyRing, f: &APoly) -> bool {
        let n = f.deg0();
        if n == 0 {
            return false;
        }
        (1..=n / 2).all(|d| a.monic_of_degree(d).all(|g| !a.divides(&g, f)))
    }

    #[test]
    fn irreducible_counts_match_brute_force() {
        // number of monic irreducibles of degree n: (1/n) Σ μ(d) q^(n/d)
        let expected = [(2u64, vec![2usize, 1, 2, 3, 6]), (3, vec![3, 3, 8, 18])];
        for (q, counts) in expected {
            let a = ring(q);
            for (i, &c) in counts.iter().enumerate() {
                let irr = a.irreducibles_of_degree(i + 1);
                assert_eq!(irr.len(), c, "q={q} degree {}", i + 1);
                for f in &irr {
                    assert!(brute_irreducible(&a, f));
                }
            }
        }
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(APoly::zero().degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
    }

    #[test]
    fn frobenius_is_q_power() {
        let a = ring(3);
        let f = a.parse("t^2+2t+1").unwrap();
        assert_eq!(a.frobenius(&f), a.pow_p(&f, 3));
    }

    fn arb_poly(q: u64, max_len: usize) -> impl Strategy<Value = APoly> {
        prop::collection::vec(0..q as u32, 0..max_len)
            .prop_map(move |v| APoly::from_coeffs(v.into_iter().map(|x| Fq(x as u16)).collect()))
    }

    proptest! {
        #[test]
        fn ring_axioms(q in prop::sample::select(vec![2u64, 3, 4, 9]),
                       seed in prop::collection::vec(0u32..9, 0..18)) {
            let a = ring(q);
            let mk = |s: &[u32]| APoly::from_coeffs(s.iter().map(|&x| a.fq().elem(x)).collect());
            let n = seed.len() / 3;
            let (x, y, z) = (mk(&seed[..n]), mk(&seed[n..2 * n]), mk(&seed[2 * n..]));
            prop_assert_eq!(a.mul(&x, &a.add(&y, &z)), a.add(&a.mul(&x, &y), &a.mul(&x, &z)));
            prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
            prop_assert_eq!(a.sub(&a.add(&x, &y), &y), x.clone());
            prop_assert_eq!(a.frobenius(&a.add(&x, &y)), a.add(&a.frobenius(&x), &a.frobenius(&y)));
            prop_assert_eq!(a.frobenius(&a.mul(&x, &y)), a.mul(&a.frobenius(&x), &a.frobenius(&y)));
        }

        #[test]
        fn division_round_trip(x in arb_poly(5, 9), y in arb_poly(5, 5)) {
            let a = ring(5);
            prop_assume!(!y.is_zero());
            let (qt, r) = a.divrem(&x, &y).unwrap();
            prop_assert!(r.degree() < y.degree());
            prop_assert_eq!(a.add(&a.mul(&qt, &y), &r), x);
        }

        #[test]
        fn bezout(x in arb_poly(3, 7), y in arb_poly(3, 7)) {
            let a = ring(3);
            let (g, s, u) = a.ext_gcd(&x, &y);
            prop_assert_eq!(a.add(&a.mul(&s, &x), &a.mul(&u, &y)), g.clone());
            if !g.is_zero() {
                prop_assert!(a.divides(&g, &x) && a.divides(&g, &y));
            }
        }

        #[test]
        fn text_round_trip(x in arb_poly(4, 7)) {
            let a = ring(4);
            prop_assert_eq!(a.parse(&a.format(&x)).unwrap(), x.clone());
        }
    }
}
