//! The constant field F_q = F_p[u]/(m(u)), table driven.
//!
//! An element is stored as the integer Σ d_i p^i where d_i is the
//! coefficient of u^i.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An element of F_q, in the integer encoding of its F_p-digits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub(crate) u16);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn index(self) -> u32 {
        self.0 as u32
    }
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({})", self.0)
    }
}

#[derive(Debug)]
enum AddMode {
    Xor,
    Prime,
    Table(Vec<u16>),
    Digits,
}

#[derive(Debug)]
struct FqInner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: AddMode,
    neg: Vec<u16>,
    log: Vec<u32>,
    exp: Vec<u16>,
}

/// Handle on a finite field F_q. Cheap to clone.
#[derive(Clone)]
pub struct FqField(Arc<FqInner>);

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

const MAX_Q: u64 = 1 << 15;

/// Splits `q` as p^e, if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut e = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p as u32, e))
}

fn default_modulus(p: u32, e: u32) -> Option<Vec<u32>> {
    match (p, e) {
        (_, 1) => Some(vec![0, 1]),
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![1, 0, 1]),
        _ => None,
    }
}

fn digits(mut n: u32, p: u32, e: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(e as usize);
    for _ in 0..e {
        d.push(n % p);
        n /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Product in F_p[u]/(m) on digit encodings; used only to build tables.
fn slow_mul(a: u32, b: u32, p: u32, m: &[u32]) -> u32 {
    let e = m.len() - 1;
    let da = digits(a, p, e as u32);
    let db = digits(b, p, e as u32);
    let mut prod = vec![0u64; 2 * e];
    for i in 0..e {
        for j in 0..e {
            prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p as u64;
        }
    }
    for k in (e..2 * e).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &mi) in m.iter().enumerate().take(e) {
            let idx = k - e + i;
            prod[idx] = (prod[idx] + (p as u64 - c) * mi as u64) % p as u64;
        }
    }
    let d: Vec<u32> = prod[..e].iter().map(|&x| x as u32).collect();
    undigits(&d, p)
}

/// Builds the exp table from a primitive element, or fails if the
/// quotient ring is not a field.
fn exp_table(p: u32, q: u32, m: &[u32]) -> Option<Vec<u16>> {
    if q == 2 {
        return Some(vec![1]);
    }
    'cand: for g in 2..q {
        let mut seen = vec![false; q as usize];
        let mut table = Vec::with_capacity(q as usize - 1);
        let mut x = 1u32;
        for _ in 0..q - 1 {
            if x == 0 || seen[x as usize] {
                continue 'cand;
            }
            seen[x as usize] = true;
            table.push(x as u16);
            x = slow_mul(x, g, p, m);
        }
        if x == 1 {
            return Some(table);
        }
    }
    None
}

impl FqField {
    /// F_q with the built-in modulus when one exists, otherwise the
    /// lexicographically first monic irreducible of degree e over F_p.
    pub fn new(q: u64) -> Result<FqField> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::InvalidInput(format!("q = {q} is not a prime power")))?;
        if q > MAX_Q {
            return Err(Error::Unsupported(format!("q = {q} exceeds {MAX_Q}")));
        }
        if let Some(m) = default_modulus(p, e) {
            return Self::with_modulus(p, m);
        }
        let count = (p as u64).pow(e);
        for n in 0..count {
            let mut m = digits(n as u32, p, e);
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            if let Ok(f) = Self::with_modulus(p, m) {
                return Ok(f);
            }
        }
        Err(Error::Consistency(format!("no irreducible modulus found for q = {q}")))
    }

    /// F_p[u]/(m(u)); `m` is monic, low degree first.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<FqField> {
        if prime_power(p as u64) != Some((p, 1)) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let e = modulus.len().saturating_sub(1) as u32;
        if e == 0 || modulus[e as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("field modulus must be monic of positive degree over F_p".into()));
        }
        let q64 = (p as u64).pow(e);
        if q64 > MAX_Q {
            return Err(Error::Unsupported(format!("q = {q64} exceeds {MAX_Q}")));
        }
        let q = q64 as u32;
        let exp1 = exp_table(p, q, &modulus).ok_or_else(|| Error::Reducible(format!("{modulus:?} over F_{p}")))?;
        let mut log = vec![0u32; q as usize];
        for (k, &x) in exp1.iter().enumerate() {
            log[x as usize] = k as u32;
        }
        let mut exp = exp1.clone();
        exp.extend_from_slice(&exp1);
        let neg: Vec<u16> = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, e).iter().map(|&x| (p - x) % p).collect();
                undigits(&d, p) as u16
            })
            .collect();
        let add = if p == 2 {
            AddMode::Xor
        } else if e == 1 {
            AddMode::Prime
        } else if q <= 256 {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    let da = digits(a, p, e);
                    let db = digits(b, p, e);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * q + b) as usize] = undigits(&s, p) as u16;
                }
            }
            AddMode::Table(t)
        } else {
            AddMode::Digits
        };
        Ok(FqField(Arc::new(FqInner { p, e, q, modulus, add, neg, log, exp })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn e(&self) -> u32 {
        self.0.e
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn is_prime(&self) -> bool {
        self.0.e == 1
    }
    /// The F_p-modulus of the tower, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The element with integer encoding `n`, reduced mod q.
    pub fn elem(&self, n: u32) -> Fq {
        Fq((n % self.0.q) as u16)
    }
    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.0.q).map(|n| Fq(n as u16))
    }
    /// The class of u, the generator over F_p (zero when e = 1).
    pub fn u(&self) -> Fq {
        if self.0.e == 1 {
            Fq(0)
        } else {
            Fq(self.0.p as u16)
        }
    }

    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.0.p as i64) as u16)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        match &self.0.add {
            AddMode::Xor => Fq(a.0 ^ b.0),
            AddMode::Prime => {
                let s = a.0 as u32 + b.0 as u32;
                Fq(if s >= self.0.p { s - self.0.p } else { s } as u16)
            }
            AddMode::Table(t) => Fq(t[(a.0 as u32 * self.0.q + b.0 as u32) as usize]),
            AddMode::Digits => {
                let (p, e) = (self.0.p, self.0.e);
                let da = digits(a.0 as u32, p, e);
                let db = digits(b.0 as u32, p, e);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                Fq(undigits(&s, p) as u16)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        Fq(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        if self.0.q == 2 {
            return Fq(1);
        }
        let l = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        Fq(self.0.exp[l as usize])
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if self.0.q == 2 {
            return Ok(a);
        }
        let n = self.0.q - 1;
        Ok(Fq(self.0.exp[((n - self.0.log[a.0 as usize]) % n) as usize]))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq(0);
        }
        if self.0.q == 2 {
            return a;
        }
        let n = (self.0.q - 1) as u64;
        let l = (self.0.log[a.0 as usize] as u64 * (e % n)) % n;
        Fq(self.0.exp[l as usize])
    }

    /// The absolute Frobenius a -> a^p.
    pub fn frobenius_p(&self, a: Fq) -> Fq {
        self.pow(a, self.0.p as u64)
    }

    /// Text form: an integer for prime q, a u-polynomial otherwise.
    pub fn format(&self, a: Fq) -> String {
        if self.0.e == 1 {
            return a.0.to_string();
        }
        let d = digits(a.0 as u32, self.0.p, self.0.e);
        let terms: Vec<(usize, String)> = d
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c.to_string()))
            .collect();
        super::text::format_terms(&terms, "u", |s| s == "1")
    }

    /// Whether the text form of `a` needs parentheses as a coefficient.
    pub(crate) fn format_is_compound(&self, a: Fq) -> bool {
        self.format(a).contains('+')
    }
}

impl crate::ring::Ring for FqField {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq::ZERO
    }
    fn one(&self) -> Fq {
        Fq::ONE
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        FqField::add(self, *a, *b)
    }
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        FqField::sub(self, *a, *b)
    }
    fn neg(&self, a: &Fq) -> Fq {
        FqField::neg(self, *a)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        FqField::mul(self, *a, *b)
    }
    fn inv(&self, a: &Fq) -> Option<Fq> {
        FqField::inv(self, *a).ok()
    }
    fn frobenius(&self, a: &Fq) -> Fq {
        *a
    }
    fn from_int(&self, n: i64) -> Fq {
        FqField::from_int(self, n)
    }
    fn from_fq(&self, c: Fq) -> Fq {
        c
    }
    fn q(&self) -> u64 {
        self.0.q as u64
    }
    fn characteristic(&self) -> u64 {
        self.0.p as u64
    }
    fn fmt_elem(&self, a: &Fq) -> String {
        self.format(*a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f4_conjugates_multiply_to_one() {
        let f = FqField::new(4).unwrap();
        let u = f.u();
        let u1 = f.add(u, Fq::ONE);
        assert_eq!(f.mul(u, u1), Fq::ONE);
        assert_eq!(f.frobenius_p(u), u1);
        assert_eq!(f.format(u1), "u+1");
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        let f = FqField::new(5).unwrap();
        assert_eq!(f.inv(Fq::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(matches!(FqField::with_modulus(2, vec![1, 0, 1]), Err(Error::Reducible(_))));
        assert!(FqField::new(6).is_err());
    }

    #[test]
    fn searched_modulus_for_sixteen_and_twenty_five() {
        for q in [16u64, 25, 27, 7, 49] {
            let f = FqField::new(q).unwrap();
            assert_eq!(f.q() as u64, q);
            for a in f.elements().skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
            }
        }
    }

    fn field_axioms(q: u64) {
        let f = FqField::new(q).unwrap();
        let els: Vec<Fq> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
            assert_eq!(f.pow(a, q), a);
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in els.iter().step_by(3) {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                }
                // the absolute Frobenius is additive
                assert_eq!(f.frobenius_p(f.add(a, b)), f.add(f.frobenius_p(a), f.frobenius_p(b)));
            }
        }
    }

    #[test]
    fn axioms_on_built_in_fields() {
        for q in [2, 3, 4, 5, 8, 9] {
            field_axioms(q);
        }
    }

    proptest! {
        #[test]
        fn frobenius_iterates_to_identity(q in prop::sample::select(vec![4u64, 8, 9, 16, 27]), n in 0u32..1000) {
            let f = FqField::new(q).unwrap();
            let a = f.elem(n);
            let mut r = a;
            for _ in 0..f.e() {
                r = f.frobenius_p(r);
            }
            prop_assert_eq!(r, a);
        }
    }
}
