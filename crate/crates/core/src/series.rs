//! Truncated Laurent series R((x)) with absolute x-precision.
//!
//! A series is known modulo x^prec. Its stored coefficients run densely
//! from order `val` to `prec - 1`; the first one is nonzero unless the
//! series is zero to precision, in which case nothing is stored and
//! `val == prec`.

use crate::base_arith::Fq;
use crate::error::{Error, Result};
use crate::ring::{Ring, ThetaRing};

#[derive(Clone, Debug, PartialEq)]
pub struct Series<E> {
    val: i64,
    coeffs: Vec<E>,
    prec: i64,
}

impl<E> Series<E> {
    /// Order of the first stored coefficient (`prec` when zero).
    pub fn val(&self) -> i64 {
        self.val
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    /// Coefficients of orders `val..prec`.
    pub fn stored(&self) -> &[E] {
        &self.coeffs
    }
    /// Whether the series vanishes modulo x^prec.
    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// The valuation, or `None` when zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }
}

/// The ring R((x)) truncated at absolute precision `cap`.
#[derive(Clone, Debug)]
pub struct SeriesRing<R: Ring> {
    base: R,
    cap: i64,
}

impl<R: Ring> SeriesRing<R> {
    pub fn new(base: R, cap: i64) -> Self {
        SeriesRing { base, cap }
    }
    pub fn base(&self) -> &R {
        &self.base
    }
    pub fn cap(&self) -> i64 {
        self.cap
    }
    /// The same coefficient ring at a different cap.
    pub fn with_cap(&self, cap: i64) -> Self {
        SeriesRing { base: self.base.clone(), cap }
    }

    /// Builds `Σ coeffs[i] x^(val+i) + O(x^prec)`, normalizing.
    pub fn from_coeffs(&self, val: i64, mut coeffs: Vec<R::Elem>, prec: i64) -> Series<R::Elem> {
        let prec = prec.min(self.cap);
        let skip = coeffs.iter().take_while(|c| self.base.is_zero(c)).count();
        let val = val + skip as i64;
        if val >= prec {
            return self.zero_to(prec);
        }
        coeffs.drain(..skip);
        let len = (prec - val) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, self.base.zero());
        Series { val, coeffs, prec }
    }

    /// `O(x^prec)`.
    pub fn zero_to(&self, prec: i64) -> Series<R::Elem> {
        let prec = prec.min(self.cap);
        Series { val: prec, coeffs: Vec::new(), prec }
    }

    pub fn constant(&self, c: R::Elem) -> Series<R::Elem> {
        self.from_coeffs(0, vec![c], self.cap)
    }

    /// `c * x^k`, exact to the cap.
    pub fn monomial(&self, c: R::Elem, k: i64) -> Series<R::Elem> {
        self.from_coeffs(k, vec![c], self.cap)
    }

    pub fn x(&self) -> Series<R::Elem> {
        self.monomial(self.base.one(), 1)
    }

    /// The coefficient of x^k, or `None` when k ≥ prec.
    pub fn coeff(&self, s: &Series<R::Elem>, k: i64) -> Option<R::Elem> {
        if k >= s.prec {
            return None;
        }
        if k < s.val {
            return Some(self.base.zero());
        }
        Some(s.coeffs[(k - s.val) as usize].clone())
    }

    fn coeff_or_zero(&self, s: &Series<R::Elem>, k: i64) -> R::Elem {
        if k < s.val || k >= s.prec {
            self.base.zero()
        } else {
            s.coeffs[(k - s.val) as usize].clone()
        }
    }

    pub fn truncate(&self, s: &Series<R::Elem>, prec: i64) -> Series<R::Elem> {
        self.from_coeffs(s.val, s.coeffs.clone(), s.prec.min(prec))
    }

    /// Multiplication by x^k.
    pub fn shift(&self, s: &Series<R::Elem>, k: i64) -> Series<R::Elem> {
        if s.is_zero_to_prec() {
            return self.zero_to(s.prec + k);
        }
        self.from_coeffs(s.val + k, s.coeffs.clone(), s.prec + k)
    }

    pub fn scale(&self, c: &R::Elem, s: &Series<R::Elem>) -> Series<R::Elem> {
        let coeffs = s.coeffs.iter().map(|x| self.base.mul(c, x)).collect();
        self.from_coeffs(s.val, coeffs, s.prec)
    }

    pub fn add_s(&self, a: &Series<R::Elem>, b: &Series<R::Elem>) -> Series<R::Elem> {
        self.combine(a, b, |x, y| self.base.add(x, y))
    }

    pub fn sub_s(&self, a: &Series<R::Elem>, b: &Series<R::Elem>) -> Series<R::Elem> {
        self.combine(a, b, |x, y| self.base.sub(x, y))
    }

    fn combine(
        &self,
        a: &Series<R::Elem>,
        b: &Series<R::Elem>,
        op: impl Fn(&R::Elem, &R::Elem) -> R::Elem,
    ) -> Series<R::Elem> {
        let prec = a.prec.min(b.prec).min(self.cap);
        let lo = a.val.min(b.val).min(prec);
        let coeffs = (lo..prec)
            .map(|k| op(&self.coeff_or_zero(a, k), &self.coeff_or_zero(b, k)))
            .collect();
        self.from_coeffs(lo, coeffs, prec)
    }

    pub fn mul_s(&self, a: &Series<R::Elem>, b: &Series<R::Elem>) -> Series<R::Elem> {
        let prec = (a.val + b.prec).min(b.val + a.prec).min(self.cap);
        if a.is_zero_to_prec() || b.is_zero_to_prec() {
            return self.zero_to(prec);
        }
        let val = a.val + b.val;
        if val >= prec {
            return self.zero_to(prec);
        }
        let n = (prec - val) as usize;
        let mut out = vec![self.base.zero(); n];
        for (i, x) in a.coeffs.iter().enumerate().take(n) {
            if self.base.is_zero(x) {
                continue;
            }
            for (slot, y) in out[i..].iter_mut().zip(&b.coeffs) {
                if !self.base.is_zero(y) {
                    *slot = self.base.add(slot, &self.base.mul(x, y));
                }
            }
        }
        self.from_coeffs(val, out, prec)
    }

    /// Inverse of a series whose leading coefficient is a unit.
    ///
    /// The relative precision is preserved: val -v, prec p - 2v.
    pub fn try_inv(&self, a: &Series<R::Elem>) -> Result<Series<R::Elem>> {
        if a.is_zero_to_prec() {
            return Err(Error::PrecisionUnderflow(format!("inverting O(x^{})", a.prec)));
        }
        let lead = &a.coeffs[0];
        let inv0 = self
            .base
            .inv(lead)
            .ok_or_else(|| Error::NotUnit(format!("leading coefficient {}", self.base.fmt_elem(lead))))?;
        let val = -a.val;
        let prec = (a.prec - 2 * a.val).min(self.cap);
        if prec <= val {
            return Ok(self.zero_to(prec));
        }
        let n = (prec - val) as usize;
        let neg_inv0 = self.base.neg(&inv0);
        let mut b: Vec<R::Elem> = Vec::with_capacity(n);
        b.push(inv0);
        for k in 1..n {
            let mut acc = self.base.zero();
            for i in 1..=k.min(a.coeffs.len() - 1) {
                if !self.base.is_zero(&a.coeffs[i]) {
                    acc = self.base.add(&acc, &self.base.mul(&a.coeffs[i], &b[k - i]));
                }
            }
            b.push(self.base.mul(&neg_inv0, &acc));
        }
        Ok(self.from_coeffs(val, b, prec))
    }

    pub fn div_s(&self, a: &Series<R::Elem>, b: &Series<R::Elem>) -> Result<Series<R::Elem>> {
        Ok(self.mul_s(a, &self.try_inv(b)?))
    }

    /// `Σ c_i^q x^(q i)`: the q-power map on coefficients composed with x -> x^q.
    pub fn frobenius_s(&self, a: &Series<R::Elem>) -> Series<R::Elem> {
        let q = self.base.q() as i64;
        let prec = (a.prec.saturating_mul(q)).min(self.cap);
        if a.is_zero_to_prec() {
            return self.zero_to(prec);
        }
        let val = a.val * q;
        if val >= prec {
            return self.zero_to(prec);
        }
        let n = (prec - val) as usize;
        let mut out = vec![self.base.zero(); n];
        for (i, c) in a.coeffs.iter().enumerate() {
            let k = i * q as usize;
            if k >= n {
                break;
            }
            out[k] = self.base.frobenius(c);
        }
        self.from_coeffs(val, out, prec)
    }

    /// Formal derivative; precision drops by one.
    pub fn derivative(&self, a: &Series<R::Elem>) -> Series<R::Elem> {
        if a.is_zero_to_prec() {
            return self.zero_to(a.prec - 1);
        }
        let coeffs = a
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = a.val + i as i64;
                self.base.mul(&self.base.from_int(k), c)
            })
            .collect();
        self.from_coeffs(a.val - 1, coeffs, a.prec - 1)
    }

    /// The composite f(g(x)).
    ///
    /// Requires val(g) ≥ 1; negative powers of g are taken through its
    /// inverse. Precision is whatever the term-wise bookkeeping
    /// certifies, further capped by val(g) · prec(f).
    pub fn substitute(&self, f: &Series<R::Elem>, g: &Series<R::Elem>) -> Result<Series<R::Elem>> {
        let vg = g
            .valuation()
            .ok_or_else(|| Error::PrecisionUnderflow("substituting a series that is zero to precision".into()))?;
        if vg <= 0 {
            return Err(Error::InvalidInput(format!(
                "substitution needs positive valuation, got {vg}"
            )));
        }
        let mut acc = self.zero_to(f.prec.saturating_mul(vg));
        if f.is_zero_to_prec() {
            return Ok(acc);
        }
        let top = f.prec;
        if f.val < 0 {
            let gi = self.try_inv(g)?;
            let mut pw = self.one_s();
            for k in (f.val..0).rev() {
                pw = self.mul_s(&pw, &gi);
                let c = self.coeff_or_zero(f, k);
                if !self.base.is_zero(&c) {
                    acc = self.add_s(&acc, &self.scale(&c, &pw));
                }
            }
        }
        let mut pw = self.one_s();
        for k in 0..top {
            if k > 0 {
                pw = self.mul_s(&pw, g);
            }
            if k >= f.val {
                let c = self.coeff_or_zero(f, k);
                if !self.base.is_zero(&c) {
                    acc = self.add_s(&acc, &self.scale(&c, &pw));
                }
            }
            if k * vg >= acc.prec {
                break;
            }
        }
        Ok(acc)
    }

    fn one_s(&self) -> Series<R::Elem> {
        self.constant(self.base.one())
    }

    /// Every stored coefficient of order prime to q-1 vanishes.
    pub fn is_in_subring_q_minus_1(&self, a: &Series<R::Elem>) -> bool {
        let m = self.base.q() as i64 - 1;
        a.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| (a.val + i as i64).rem_euclid(m) == 0 || self.base.is_zero(c))
    }

    /// Agreement modulo x^n (n capped by both precisions).
    pub fn agrees_to(&self, a: &Series<R::Elem>, b: &Series<R::Elem>, n: i64) -> bool {
        let d = self.sub_s(a, b);
        d.is_zero_to_prec() && d.prec >= n.min(a.prec).min(b.prec)
    }

    /// Coefficientwise image in another ring.
    pub fn map_to<S: Ring>(
        &self,
        target: &SeriesRing<S>,
        a: &Series<R::Elem>,
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> Series<S::Elem> {
        target.from_coeffs(a.val, a.coeffs.iter().map(f).collect(), a.prec)
    }

    pub fn format(&self, a: &Series<R::Elem>) -> String {
        let mut parts = Vec::new();
        for (i, c) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(c) {
                continue;
            }
            let k = a.val + i as i64;
            let cs = self.base.fmt_elem(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            parts.push(match k {
                0 => cs,
                1 if cs == "1" => "x".to_string(),
                _ if cs == "1" => format!("x^{k}"),
                1 => format!("{cs}*x"),
                _ => format!("{cs}*x^{k}"),
            });
        }
        parts.push(format!("O(x^{})", a.prec));
        parts.join(" + ")
    }
}

impl<R: Ring> Ring for SeriesRing<R> {
    type Elem = Series<R::Elem>;

    fn zero(&self) -> Self::Elem {
        self.zero_to(self.cap)
    }
    fn one(&self) -> Self::Elem {
        self.one_s()
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero_to_prec()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add_s(a, b)
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub_s(a, b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        let coeffs = a.coeffs.iter().map(|c| self.base.neg(c)).collect();
        self.from_coeffs(a.val, coeffs, a.prec)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul_s(a, b)
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.try_inv(a).ok()
    }
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.frobenius_s(a)
    }
    fn from_int(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }
    fn from_fq(&self, c: Fq) -> Self::Elem {
        self.constant(self.base.from_fq(c))
    }
    fn q(&self) -> u64 {
        self.base.q()
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn fmt_elem(&self, a: &Self::Elem) -> String {
        self.format(a)
    }
}

impl<R: ThetaRing> ThetaRing for SeriesRing<R> {
    fn theta(&self) -> Self::Elem {
        self.constant(self.base.theta())
    }
    fn from_apoly(&self, a: &crate::base_arith::APoly) -> Self::Elem {
        self.constant(self.base.from_apoly(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_arith::{APoly, FqField, PolyRing};
    use proptest::prelude::*;

    fn sa(q: u64, cap: i64) -> SeriesRing<PolyRing> {
        SeriesRing::new(PolyRing::with_q(q).unwrap(), cap)
    }

    fn ps(s: &SeriesRing<PolyRing>, val: i64, c: &[&str], prec: i64) -> Series<APoly> {
        let v = c.iter().map(|x| s.base().parse(x).unwrap()).collect();
        s.from_coeffs(val, v, prec)
    }

    #[test]
    fn geometric_series() {
        let s = sa(3, 4);
        let f = ps(&s, 0, &["1", "2"], 4);
        assert_eq!(s.try_inv(&f).unwrap(), ps(&s, 0, &["1", "1", "1", "1"], 4));
        let s2 = sa(2, 3);
        let g = ps(&s2, 0, &["1", "t"], 10);
        assert_eq!(s2.try_inv(&g).unwrap(), ps(&s2, 0, &["1", "t", "t^2"], 3));
    }

    #[test]
    fn laurent_product() {
        let s = sa(2, 20);
        let f = ps(&s, 1, &["1", "1"], 20);
        let xi = s.try_inv(&s.x()).unwrap();
        let g = s.mul_s(&f, &xi);
        assert_eq!(g.val(), 0);
        assert_eq!(s.coeff(&g, 0), Some(APoly::one()));
        assert_eq!(s.coeff(&g, 1), Some(APoly::one()));
        assert_eq!(s.coeff(&g, 2), Some(APoly::zero()));
    }

    #[test]
    fn precision_propagation() {
        let s = sa(2, 100);
        let a = ps(&s, 1, &["1"], 5);
        let b = ps(&s, 2, &["1"], 9);
        assert_eq!(s.mul_s(&a, &b).prec(), 7);
        assert_eq!(s.add_s(&a, &b).prec(), 5);
        assert_eq!(s.derivative(&b).prec(), 8);
        assert!(s.try_inv(&s.zero_to(3)).is_err());
        let t = ps(&s, 0, &["t"], 4);
        assert!(matches!(s.try_inv(&t), Err(Error::NotUnit(_))));
    }

    #[test]
    fn substitution_examples() {
        let s = sa(2, 12);
        let f = ps(&s, 0, &["1", "1"], 12);
        let g = s.monomial(APoly::one(), 2);
        assert_eq!(s.substitute(&f, &g).unwrap(), ps(&s, 0, &["1", "0", "1"], 12));
        // F_t = 1/(θ/x + 1/x^2) = x^2/(1 + θx)
        let phi = ps(&s, -2, &["1", "t"], 12);
        let ft = s.try_inv(&phi).unwrap();
        assert_eq!(s.coeff(&ft, 2), Some(APoly::one()));
        assert_eq!(s.coeff(&ft, 3), Some(APoly::t()));
        assert_eq!(s.coeff(&ft, 4), Some(s.base().parse("t^2").unwrap()));
        assert_eq!(s.substitute(&s.x(), &ft).unwrap(), ft);
        assert!(s.substitute(&f, &s.one()).is_err());
    }

    #[test]
    fn derivative_examples() {
        let s = sa(2, 10);
        let x3 = s.monomial(APoly::one(), 3);
        assert_eq!(s.derivative(&x3), s.truncate(&s.monomial(APoly::one(), 2), 9));
        let x2 = s.monomial(APoly::one(), 2);
        assert!(s.derivative(&x2).is_zero_to_prec());
        let f = ps(&s, 0, &["1", "t"], 10);
        assert_eq!(s.derivative(&f), ps(&s, 0, &["t"], 9));
    }

    #[test]
    fn subring_examples() {
        let s = sa(3, 6);
        assert!(s.is_in_subring_q_minus_1(&ps(&s, 0, &["1", "0", "1", "0", "1"], 6)));
        assert!(!s.is_in_subring_q_minus_1(&ps(&s, 0, &["1", "1"], 6)));
        let s2 = sa(2, 6);
        assert!(s2.is_in_subring_q_minus_1(&ps(&s2, 0, &["1", "t", "1"], 6)));
    }

    #[test]
    fn series_over_a_finite_field() {
        let f = FqField::new(4).unwrap();
        let s = SeriesRing::new(f.clone(), 10);
        let a = s.from_coeffs(0, vec![Fq::ONE, f.u()], 10);
        let ai = s.try_inv(&a).unwrap();
        assert!(s.agrees_to(&s.mul_s(&a, &ai), &s.one(), 10));
    }

    fn arb_series(q: u64, cap: i64) -> impl Strategy<Value = Series<APoly>> {
        let s = sa(q, cap);
        (-2i64..3, prop::collection::vec(prop::collection::vec(0u32..q as u32, 0..3), 0..8), 3i64..12)
            .prop_map(move |(v, cs, extra)| {
                let coeffs = cs
                    .into_iter()
                    .map(|c| APoly::from_coeffs(c.into_iter().map(|x| s.base().fq().elem(x)).collect()))
                    .collect();
                s.from_coeffs(v, coeffs, v + extra)
            })
    }

    proptest! {
        #[test]
        fn derivation_rule(a in arb_series(3, 40), b in arb_series(3, 40)) {
            let s = sa(3, 40);
            let lhs = s.derivative(&s.mul_s(&a, &b));
            let rhs = s.add_s(&s.mul_s(&a, &s.derivative(&b)), &s.mul_s(&b, &s.derivative(&a)));
            prop_assert!(s.agrees_to(&lhs, &rhs, lhs.prec().min(rhs.prec())));
        }

        #[test]
        fn multiplication_is_associative(a in arb_series(2, 40), b in arb_series(2, 40), c in arb_series(2, 40)) {
            let s = sa(2, 40);
            let l = s.mul_s(&s.mul_s(&a, &b), &c);
            let r = s.mul_s(&a, &s.mul_s(&b, &c));
            let n = l.prec().min(r.prec());
            prop_assert!(s.agrees_to(&l, &r, n));
        }

        #[test]
        fn precision_soundness(a in arb_series(2, 60), extra in 1i64..5) {
            // computing at a higher cap and truncating changes nothing
            let lo = sa(2, 12);
            let hi = sa(2, 12 + extra);
            let a_lo = lo.truncate(&a, 12);
            let inv_hi = hi.try_inv(&a);
            let inv_lo = lo.try_inv(&a_lo);
            if let (Ok(h), Ok(l)) = (inv_hi, inv_lo) {
                prop_assert_eq!(hi.truncate(&h, l.prec()), l);
            }
        }

        #[test]
        fn substitution_is_associative(f in arb_series(2, 30), gc in prop::collection::vec(0u32..2, 1..5), hc in prop::collection::vec(0u32..2, 1..5)) {
            let s = sa(2, 30);
            let mut gcs: Vec<APoly> = gc.iter().map(|&x| APoly::from_coeffs(vec![s.base().fq().elem(x)])).collect();
            gcs[0] = APoly::one();
            let mut hcs: Vec<APoly> = hc.iter().map(|&x| APoly::from_coeffs(vec![s.base().fq().elem(x)])).collect();
            hcs[0] = APoly::one();
            let g = s.from_coeffs(1, gcs, 30);
            let h = s.from_coeffs(1, hcs, 30);
            let l = s.substitute(&s.substitute(&f, &g).unwrap(), &h).unwrap();
            let r = s.substitute(&f, &s.substitute(&g, &h).unwrap()).unwrap();
            prop_assert!(s.agrees_to(&l, &r, l.prec().min(r.prec())));
        }
    }
}
