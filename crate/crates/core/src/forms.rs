//! x-expansions of Drinfeld modular forms built from Tate-Drinfeld data.
//!
//! Expansions are computed over A/(℘^M), so every congruence mod ℘^n with
//! n ≤ M is decided exactly. The Hasse lift is α_d, the τ^d coefficient
//! of Φ_℘ on the Tate-Drinfeld module.

use crate::base_arith::{APoly, PolyRing, ResidueRing};
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::series::{Series, SeriesRing};
use crate::tate_drinfeld::TateDrinfeld;

type Coeff = Series<APoly>;

/// Smallest l with p^l ≥ n.
pub fn lp(n: u64, p: u64) -> u32 {
    let mut l = 0;
    let mut pl = 1u64;
    while pl < n {
        pl = pl.saturating_mul(p);
        l += 1;
    }
    l
}

/// An x-expansion with its weight and type.
#[derive(Clone, Debug, PartialEq)]
pub struct FormExpansion {
    pub weight: i64,
    /// Type modulo q - 1.
    pub type_m: u64,
    pub series: Coeff,
    /// Coefficients are known modulo ℘^wp_prec.
    pub wp_prec: u32,
}

/// f1 ≡ f2 mod ℘^n for the largest admissible n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    /// f1 ≢ f2 mod ℘.
    NotCongruent,
    /// f1 ≡ f2 mod ℘^n only where f1 ≡ 0 mod ℘^n as well.
    CongruentToZero(u32),
    Depth(u32),
}

impl Depth {
    pub fn value(self) -> Option<u32> {
        match self {
            Depth::Depth(n) => Some(n),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The congruence hypothesis does not hold.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Audit {
    pub depth: Depth,
    pub modulus: Option<u64>,
    pub delta_k: i64,
    pub verdict: Verdict,
}

impl Audit {
    pub fn pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// A point of Z/(q^d - 1) × Z_p, the p-adic part stored mod p^precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightChar {
    pub s0: u64,
    pub s1: u64,
    pub precision: u32,
}

/// One constructed pair (f, f·α_d^{p^l}) and its audit.
#[derive(Clone, Debug)]
pub struct HarnessCase {
    pub alpha: u32,
    pub beta: u32,
    pub l: u32,
    pub weight_shift: i64,
    pub audit: Audit,
}

#[derive(Clone, Debug)]
pub struct HarnessReport {
    pub cases: Vec<HarnessCase>,
    pub negatives: Vec<HarnessCase>,
}

impl HarnessReport {
    /// Every constructed pair passes with depth exactly p^l.
    pub fn cases_pass(&self, p: u64) -> bool {
        self.cases
            .iter()
            .all(|c| c.audit.pass() && c.audit.depth == Depth::Depth(p.pow(c.l) as u32))
    }
    pub fn negatives_fail(&self) -> bool {
        self.negatives.iter().all(|c| c.audit.verdict == Verdict::Fail)
    }
}

/// Tate-Drinfeld data over A/(℘^M) at x-precision N.
#[derive(Debug)]
pub struct FormsContext {
    a: PolyRing,
    wp: APoly,
    d: usize,
    wp_prec: u32,
    td: TateDrinfeld<ResidueRing>,
    alphas: Vec<Coeff>,
}

impl FormsContext {
    /// Fails with a consistency error if α_d ≢ 1 or α_i ≢ 0 (0 < i < d) mod ℘.
    pub fn new(a: &PolyRing, wp: &APoly, x_prec: i64, wp_prec: u32) -> Result<Self> {
        if !wp.is_monic() {
            return Err(Error::InvalidInput(format!("{} is not monic", a.format(wp))));
        }
        if !a.is_irreducible(wp) {
            return Err(Error::Reducible(a.format(wp)));
        }
        if wp_prec == 0 {
            return Err(Error::InvalidInput("℘-adic precision must be positive".into()));
        }
        let d = wp.deg0();
        let r = ResidueRing::prime_power(a, wp, wp_prec)?;
        let td = TateDrinfeld::new(a, &r, &APoly::one(), x_prec, 3.max(d + 1))?;
        let phi = td.module().phi(wp);
        let alphas: Vec<Coeff> = (0..=2 * d).map(|i| phi.coeff(i)).collect();
        let ctx = FormsContext { a: a.clone(), wp: wp.clone(), d, wp_prec, td, alphas };
        let s = ctx.series();
        if ctx.series_valuation(&s.sub(&ctx.alphas[d], &s.one())) == 0 {
            return Err(Error::Consistency("α_d is not ≡ 1 mod ℘".into()));
        }
        if (1..d).any(|i| ctx.series_valuation(&ctx.alphas[i]) == 0) {
            return Err(Error::Consistency("α_i is not ≡ 0 mod ℘ below degree d".into()));
        }
        Ok(ctx)
    }

    pub fn a_ring(&self) -> &PolyRing {
        &self.a
    }
    pub fn wp(&self) -> &APoly {
        &self.wp
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn q(&self) -> u64 {
        self.a.fq().q() as u64
    }
    pub fn p(&self) -> u64 {
        self.a.fq().p() as u64
    }
    pub fn wp_prec(&self) -> u32 {
        self.wp_prec
    }
    pub fn x_prec(&self) -> i64 {
        self.td.prec()
    }
    pub fn series(&self) -> &SeriesRing<ResidueRing> {
        self.td.series()
    }
    pub fn tate_drinfeld(&self) -> &TateDrinfeld<ResidueRing> {
        &self.td
    }
    /// α_0..α_{2d}, the coefficients of Φ_℘.
    pub fn alphas(&self) -> &[Coeff] {
        &self.alphas
    }
    /// q^d - 1.
    pub fn hasse_weight(&self) -> i64 {
        self.q().pow(self.d as u32) as i64 - 1
    }

    fn tagged(&self, weight: i64, series: Coeff) -> FormExpansion {
        FormExpansion { weight, type_m: 0, series, wp_prec: self.wp_prec }
    }

    pub fn a1(&self) -> FormExpansion {
        self.tagged(self.q() as i64 - 1, self.td.a1().clone())
    }
    pub fn a2(&self) -> FormExpansion {
        self.tagged((self.q() * self.q()) as i64 - 1, self.td.a2().clone())
    }
    /// α_d, of weight q^d - 1 and type 0.
    pub fn hasse_lift(&self) -> FormExpansion {
        self.tagged(self.hasse_weight(), self.alphas[self.d].clone())
    }
    pub fn one(&self) -> FormExpansion {
        self.tagged(0, self.series().one())
    }

    pub fn mul(&self, f: &FormExpansion, g: &FormExpansion) -> FormExpansion {
        let qm1 = self.q() - 1;
        FormExpansion {
            weight: f.weight + g.weight,
            type_m: if qm1 == 1 { 0 } else { (f.type_m + g.type_m) % qm1 },
            series: self.series().mul(&f.series, &g.series),
            wp_prec: f.wp_prec.min(g.wp_prec),
        }
    }

    pub fn pow(&self, f: &FormExpansion, e: u64) -> FormExpansion {
        let qm1 = self.q() - 1;
        FormExpansion {
            weight: f.weight * e as i64,
            type_m: if qm1 == 1 { 0 } else { (f.type_m * (e % qm1)) % qm1 },
            series: self.series().pow(&f.series, e),
            wp_prec: f.wp_prec,
        }
    }

    /// f^{p^l} through the p-power Frobenius on coefficients and x.
    pub fn pow_p_power(&self, f: &FormExpansion, l: u32) -> FormExpansion {
        let s = self.series();
        if self.a.fq().is_prime() {
            let mut out = f.clone();
            for _ in 0..l {
                out.series = s.frobenius(&out.series);
            }
            out.weight = f.weight * self.p().pow(l) as i64;
            out
        } else {
            self.pow(f, self.p().pow(l))
        }
    }

    /// a1^α a2^β α_d^γ.
    pub fn monomial(&self, alpha: u64, beta: u64, gamma: u64) -> FormExpansion {
        let f = self.mul(&self.pow(&self.a1(), alpha), &self.pow(&self.a2(), beta));
        self.mul(&f, &self.pow(&self.hasse_lift(), gamma))
    }

    /// v_℘ of a coefficient, capped at M.
    pub fn valuation(&self, c: &APoly) -> u32 {
        self.a.valuation_at(&self.wp, c).map_or(self.wp_prec, |v| v.min(self.wp_prec))
    }

    /// Minimum v_℘ over the known coefficients.
    pub fn series_valuation(&self, s: &Coeff) -> u32 {
        s.stored().iter().map(|c| self.valuation(c)).min().unwrap_or(self.wp_prec)
    }

    pub fn congruence_depth(&self, f1: &FormExpansion, f2: &FormExpansion, max_n: u32) -> Result<Depth> {
        let cap = f1.wp_prec.min(f2.wp_prec);
        if max_n == 0 || max_n > cap {
            return Err(Error::InvalidInput(format!("max_n must lie in 1..={cap}")));
        }
        let s = self.series();
        let diff = s.sub(&f1.series, &f2.series);
        let n = self.series_valuation(&diff).min(max_n);
        let v1 = self.series_valuation(&s.truncate(&f1.series, diff.prec()));
        Ok(if n == 0 {
            Depth::NotCongruent
        } else if n <= v1 {
            Depth::CongruentToZero(n)
        } else {
            Depth::Depth(n)
        })
    }

    /// (q^d - 1) p^{l_p(n)}.
    pub fn weight_modulus(&self, n: u32) -> u64 {
        self.hasse_weight() as u64 * self.p().pow(lp(n as u64, self.p()))
    }

    pub fn weight_congruence_audit(&self, f1: &FormExpansion, f2: &FormExpansion, max_n: u32) -> Result<Audit> {
        let depth = self.congruence_depth(f1, f2, max_n)?;
        let delta_k = f1.weight - f2.weight;
        Ok(match depth {
            Depth::Depth(n) => {
                let m = self.weight_modulus(n);
                let verdict = if delta_k.rem_euclid(m as i64) == 0 { Verdict::Pass } else { Verdict::Fail };
                Audit { depth, modulus: Some(m), delta_k, verdict }
            }
            _ => Audit { depth, modulus: None, delta_k, verdict: Verdict::Vacuous },
        })
    }

    pub fn weight_embed(&self, k: i64, precision: u32) -> WeightChar {
        let m0 = self.hasse_weight();
        let m1 = self.p().pow(precision) as i64;
        WeightChar { s0: k.rem_euclid(m0) as u64, s1: k.rem_euclid(m1) as u64, precision }
    }

    pub fn weight_congruent(&self, chi: &WeightChar, k: i64, n: u32) -> Result<bool> {
        let l = lp(n as u64, self.p());
        if l > chi.precision {
            return Err(Error::PrecisionUnderflow(format!(
                "weight stored to p^{} but p^{l} is needed",
                chi.precision
            )));
        }
        let m0 = self.hasse_weight();
        let m1 = self.p().pow(l) as i64;
        Ok(k.rem_euclid(m0) as u64 == chi.s0 % m0 as u64 && (k - chi.s1 as i64).rem_euclid(m1) == 0)
    }

    /// h_n = f·α_d^{(k_n - k)/(q^d - 1)} with k_n the least integer
    /// ≥ max(k, k_{n-1}) that is ≡ χ mod (q^d - 1) p^{l_p(n)}.
    pub fn padic_limit_sequence(&self, f: &FormExpansion, chi: &WeightChar, steps: u32) -> Result<Vec<FormExpansion>> {
        let m0 = self.hasse_weight();
        if f.weight.rem_euclid(m0) as u64 != chi.s0 % m0 as u64 {
            return Err(Error::InvalidInput("χ is not in the weight class of f mod q^d - 1".into()));
        }
        let p = self.p();
        let mut out: Vec<FormExpansion> = Vec::with_capacity(steps as usize);
        let mut k_prev = f.weight;
        let hasse = self.hasse_lift();
        for n in 1..=steps {
            let l = lp(n as u64, p);
            if l > chi.precision {
                return Err(Error::PrecisionUnderflow(format!("χ is stored only to p^{}", chi.precision)));
            }
            let pl = p.pow(l) as i64;
            // k_n = k_prev + m0·j with k_n ≡ s1 mod p^l
            let mut k = k_prev;
            while (k - chi.s1 as i64).rem_euclid(pl) != 0 {
                k += m0;
            }
            let e = ((k - f.weight) / m0) as u64;
            let h = self.mul(f, &self.pow(&hasse, e));
            debug_assert_eq!(h.weight, k);
            if let Some(prev) = out.last() {
                let want = n - 1;
                let depth = self.congruence_depth(&h, prev, self.wp_prec)?;
                if want > 0 && !matches!(depth, Depth::Depth(m) if m >= want) {
                    return Err(Error::Consistency(format!("h_{n} ≢ h_{want} mod ℘^{want}")));
                }
            }
            out.push(h);
            k_prev = k;
        }
        Ok(out)
    }

    /// Audits (f, f·α_d^{p^l}) for every a1^α a2^β of weight ≤ max_weight
    /// and l ≤ l_max, and a weight-shifted negative control for each l ≥ 1.
    /// Needs ℘-adic precision above p^{l_max}.
    pub fn constructed_congruence_harness(&self, max_weight: i64, l_max: u32) -> Result<HarnessReport> {
        let p = self.p();
        let max_n = p.pow(l_max) as u32 + 1;
        if max_n > self.wp_prec {
            return Err(Error::InvalidInput(format!("℘-adic precision must be at least {max_n}")));
        }
        let hasse = self.hasse_lift();
        let shifts: Vec<FormExpansion> = (0..=l_max).map(|l| self.pow_p_power(&hasse, l)).collect();
        let (w1, w2) = (self.q() as i64 - 1, (self.q() * self.q()) as i64 - 1);
        let a2 = self.a2();
        let a1 = self.a1();
        let mut cases = Vec::new();
        let mut negatives = Vec::new();
        let mut row = self.one();
        let mut beta = 0u32;
        while w2 * beta as i64 <= max_weight {
            let mut f = row.clone();
            let mut alpha = 0u32;
            while f.weight <= max_weight {
                for (l, shift) in shifts.iter().enumerate() {
                    let l = l as u32;
                    let g = self.mul(&f, shift);
                    let audit = self.weight_congruence_audit(&f, &g, max_n)?;
                    cases.push(HarnessCase { alpha, beta, l, weight_shift: 0, audit });
                    if l >= 1 {
                        let perturbed = FormExpansion { weight: g.weight + self.hasse_weight(), ..g };
                        let audit = self.weight_congruence_audit(&f, &perturbed, max_n)?;
                        negatives.push(HarnessCase { alpha, beta, l, weight_shift: self.hasse_weight(), audit });
                    }
                }
                f = self.mul(&f, &a1);
                alpha += 1;
                let _ = w1;
            }
            row = self.mul(&row, &a2);
            beta += 1;
        }
        Ok(HarnessReport { cases, negatives })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(q: u64, wp: &str, n: i64, m: u32) -> FormsContext {
        let a = PolyRing::with_q(q).unwrap();
        let wp = a.parse(wp).unwrap();
        FormsContext::new(&a, &wp, n, m).unwrap()
    }

    #[test]
    fn lp_examples() {
        assert_eq!(lp(1, 2), 0);
        assert_eq!(lp(3, 2), 2);
        assert_eq!(lp(3, 3), 1);
        assert_eq!(lp(4, 2), 2);
        assert_eq!(lp(5, 2), 3);
    }

    #[test]
    fn hasse_lift_q2_t() {
        let c = ctx(2, "t", 8, 1);
        let h = c.hasse_lift();
        assert_eq!(h.weight, 1);
        assert_eq!(h.type_m, 0);
        assert_eq!(h.series, c.series().one());
    }

    #[test]
    fn hasse_lift_tags() {
        for (q, wp) in [(2, "t^2+t+1"), (3, "t"), (3, "t^2+1")] {
            let c = ctx(q, wp, 10, 2);
            assert_eq!(c.hasse_lift().weight, (q as i64).pow(c.d() as u32) - 1);
        }
    }

    #[test]
    fn depth_examples() {
        let c = ctx(2, "t", 12, 5);
        let s = c.series();
        let f = c.monomial(2, 1, 0);
        assert_eq!(c.congruence_depth(&f, &f, 5).unwrap(), Depth::Depth(5));
        let wp2 = s.constant(c.a_ring().parse("t^2").unwrap());
        let g = FormExpansion { series: s.add(&f.series, &s.mul(&wp2, &s.add(&s.one(), &s.x()))), ..f.clone() };
        assert_eq!(c.congruence_depth(&f, &g, 5).unwrap(), Depth::Depth(2));
        let z = FormExpansion { series: s.zero(), ..f.clone() };
        assert_eq!(c.congruence_depth(&z, &z, 5).unwrap(), Depth::CongruentToZero(5));
        let one = c.one();
        assert_eq!(c.congruence_depth(&f, &one, 5).unwrap(), Depth::NotCongruent);
        assert!(c.congruence_depth(&f, &f, 6).is_err());
    }

    #[test]
    fn audit_examples() {
        let c = ctx(3, "t", 20, 4);
        let f = c.monomial(1, 1, 0);
        assert!(c.weight_congruence_audit(&f, &f, 4).unwrap().pass());
        let g = c.mul(&f, &c.pow_p_power(&c.hasse_lift(), 1));
        let a = c.weight_congruence_audit(&f, &g, 4).unwrap();
        assert_eq!(a.depth, Depth::Depth(3));
        assert_eq!(a.modulus, Some(6));
        assert!(a.pass());
        let bad = FormExpansion { weight: f.weight + 2, ..f.clone() };
        let a = c.weight_congruence_audit(&f, &bad, 4).unwrap();
        assert_eq!(a.verdict, Verdict::Fail);
        assert_eq!(a.modulus, Some(2 * 9));
    }

    #[test]
    fn weight_char_examples() {
        let c = ctx(2, "t", 4, 2);
        let chi = WeightChar { s0: 0, s1: 2, precision: 4 };
        assert!(c.weight_congruent(&chi, 2, 2).unwrap());
        assert!(!c.weight_congruent(&chi, 3, 2).unwrap());
        assert!(!c.weight_congruent(&chi, 4, 3).unwrap());
        assert!(c.weight_congruent(&chi, 2, 17).is_err());
        let c3 = ctx(3, "t", 4, 2);
        assert_eq!(c3.weight_modulus(2), 6);
        assert_eq!(c3.weight_modulus(4), 18);
        let chi = c3.weight_embed(8, 3);
        for n in 1..=27 {
            assert!(c3.weight_congruent(&chi, 8, n).unwrap());
        }
    }

    #[test]
    fn padic_limit_constant_and_moving() {
        let c = ctx(2, "t", 16, 6);
        let f = c.monomial(1, 1, 0);
        let chi = c.weight_embed(f.weight, 4);
        let hs = c.padic_limit_sequence(&f, &chi, 4).unwrap();
        assert!(hs.iter().all(|h| *h == f));
        let chi = WeightChar { s0: 0, s1: (f.weight + 1 + 2 + 4 + 8) as u64 % 16, precision: 4 };
        let hs = c.padic_limit_sequence(&f, &chi, 4).unwrap();
        for n in 1..4 {
            let d = c.congruence_depth(&hs[n], &hs[n - 1], 6).unwrap();
            assert!(matches!(d, Depth::Depth(m) if m as usize >= n));
        }
        let wrong = WeightChar { s0: 1, s1: 0, precision: 4 };
        let c3 = ctx(3, "t", 8, 3);
        assert!(c3.padic_limit_sequence(&c3.a1(), &wrong, 2).is_err());
    }

    #[test]
    fn harness_small() {
        let c = ctx(2, "t", 24, 5);
        let r = c.constructed_congruence_harness(6, 2).unwrap();
        assert!(r.cases_pass(2));
        assert!(r.negatives_fail());
        assert!(!r.negatives.is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn products_add_weights(a1 in 0u64..4, b1 in 0u64..3, g1 in 0u64..3, a2 in 0u64..4, b2 in 0u64..3, g2 in 0u64..3) {
            let c = ctx(3, "t", 12, 3);
            let f = c.monomial(a1, b1, g1);
            let g = c.monomial(a2, b2, g2);
            let fg = c.mul(&f, &g);
            prop_assert_eq!(fg.weight, f.weight + g.weight);
            prop_assert_eq!(&fg, &c.monomial(a1 + a2, b1 + b2, g1 + g2));
            prop_assert!(c.series().is_in_subring_q_minus_1(&fg.series));
        }
    }
}
