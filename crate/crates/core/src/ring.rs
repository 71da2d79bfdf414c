//! The ring abstraction shared by every algebraic layer.
//!
//! A ring is a context object; its elements are plain data and all
//! operations go through the context.

use std::fmt::Debug;

use crate::base_arith::{APoly, Fq};

pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// The inverse of `a`, or `None` when `a` is not a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// The q-power map, q being the order of the constant field F_q.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem;
    /// The image of an integer (through the prime field).
    fn from_int(&self, n: i64) -> Self::Elem;
    fn from_fq(&self, c: Fq) -> Self::Elem;
    /// The order q of the constant field.
    fn q(&self) -> u64;
    fn characteristic(&self) -> u64;
    fn fmt_elem(&self, a: &Self::Elem) -> String;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a^(q^k)`.
    fn frobenius_pow(&self, a: &Self::Elem, k: usize) -> Self::Elem {
        let mut r = a.clone();
        for _ in 0..k {
            r = self.frobenius(&r);
        }
        r
    }
}

/// A ring that is an A-algebra, with θ the image of t.
pub trait ThetaRing: Ring {
    fn theta(&self) -> Self::Elem;

    /// The structure map A -> R, t -> θ.
    fn from_apoly(&self, a: &APoly) -> Self::Elem {
        let th = self.theta();
        let mut acc = self.zero();
        for c in a.coeffs().iter().rev() {
            acc = self.mul(&acc, &th);
            acc = self.add(&acc, &self.from_fq(*c));
        }
        acc
    }
}
