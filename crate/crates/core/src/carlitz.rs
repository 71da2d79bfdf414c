//! The Carlitz module Φ^C_t = θ + τ.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::base_arith::{APoly, Degree, PolyRing, ResidueRing};
use crate::error::{Error, Result};
use crate::ring::{Ring, ThetaRing};
use crate::tau_poly::TauPoly;
use crate::upoly::DensePoly;

/// Φ^C_a by Horner's rule on the t-expansion of a.
pub fn carlitz_phi<R: ThetaRing>(ring: &R, a: &APoly) -> TauPoly<R> {
    let phi_t = TauPoly::new(ring, vec![ring.theta(), ring.one()]);
    let mut acc = TauPoly::zero(ring);
    for c in a.coeffs().iter().rev() {
        acc = acc.mul(&phi_t).add(&TauPoly::constant(ring, ring.from_fq(*c)));
    }
    acc
}

/// Φ^C over a fixed base, memoized by a.
#[derive(Debug)]
pub struct CarlitzAction<R: ThetaRing> {
    ring: R,
    cache: RwLock<HashMap<APoly, TauPoly<R>>>,
}

impl<R: ThetaRing> CarlitzAction<R> {
    pub fn new(ring: &R) -> Self {
        CarlitzAction { ring: ring.clone(), cache: RwLock::new(HashMap::new()) }
    }
    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn phi(&self, a: &APoly) -> TauPoly<R> {
        if let Some(f) = self.cache.read().expect("cache lock").get(a) {
            return f.clone();
        }
        let f = carlitz_phi(&self.ring, a);
        self.cache.write().expect("cache lock").entry(a.clone()).or_insert(f).clone()
    }
    pub fn cached(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }
}

/// Φ^C_a(Z) over A with θ = t.
pub fn carlitz_torsion_poly(a_ring: &PolyRing, a: &APoly) -> Result<TauPoly<PolyRing>> {
    if a.is_zero() {
        return Err(Error::InvalidInput("the torsion polynomial of 0 is undefined".into()));
    }
    Ok(carlitz_phi(a_ring, a))
}

/// Outcome of the Eisenstein check on Φ^C_℘(Z).
#[derive(Clone, Debug)]
pub struct EisensteinReport {
    pub monic: bool,
    pub coefficients_divisible: bool,
    pub linear_exact: bool,
    /// Φ^C_℘ with coefficients reduced mod ℘.
    pub reduction: TauPoly<ResidueRing>,
}

impl EisensteinReport {
    pub fn eisenstein(&self) -> bool {
        self.monic && self.coefficients_divisible && self.linear_exact
    }
    /// Whether the reduction is Z^(q^d).
    pub fn reduction_is_frobenius(&self) -> bool {
        let r = &self.reduction;
        let d = r.coeffs().len().saturating_sub(1);
        r.coeffs().iter().take(d).all(|c| c.is_zero()) && r.leading().is_some_and(|c| c.is_one())
    }
}

pub fn check_eisenstein(a_ring: &PolyRing, wp: &APoly) -> Result<EisensteinReport> {
    if !wp.is_monic() || !a_ring.is_irreducible(wp) {
        return Err(Error::Reducible(a_ring.format(wp)));
    }
    let phi = carlitz_torsion_poly(a_ring, wp)?;
    let d = wp.deg0();
    let monic = phi.degree() == Degree::Finite(d) && phi.leading().is_some_and(|c| c.is_one());
    let coefficients_divisible = phi.coeffs().iter().take(d).all(|c| a_ring.divides(wp, c));
    let linear_exact = a_ring.valuation_at(wp, &phi.coeff(0)) == Some(1);
    let k = ResidueRing::new(a_ring, wp)?;
    let reduction = phi.map(&k, |c| k.reduce(c));
    Ok(EisensteinReport { monic, coefficients_divisible, linear_exact, reduction })
}

/// Möbius data of n from its factorization: pairs (m, μ(n/m)) for the
/// divisors m with n/m squarefree.
fn mobius_divisors(a_ring: &PolyRing, n: &APoly, factors: &[(APoly, u32)]) -> Vec<(APoly, i32)> {
    let k = factors.len();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0u32..(1 << k) {
        let mut m = n.clone();
        for (i, (p, _)) in factors.iter().enumerate() {
            if mask & (1 << i) != 0 {
                m = a_ring.divrem(&m, p).expect("nonzero").0;
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        out.push((m, sign));
    }
    out
}

/// W_n(X) = ∏_{m | n} Φ^C_m(X)^μ(n/m), by exact division.
pub fn carlitz_cyclotomic(a_ring: &PolyRing, n: &APoly, factors: &[(APoly, u32)]) -> Result<DensePoly<PolyRing>> {
    if !n.is_monic() || n.deg0() == 0 {
        return Err(Error::InvalidInput("n must be monic and nonconstant".into()));
    }
    let mut prod = APoly::one();
    for (p, e) in factors {
        if !p.is_monic() || !a_ring.is_irreducible(p) {
            return Err(Error::Reducible(a_ring.format(p)));
        }
        if *e == 0 {
            return Err(Error::InvalidInput("factor exponents must be positive".into()));
        }
        prod = a_ring.mul_p(&prod, &a_ring.pow_p(p, *e as u64));
    }
    if &prod != n || factors.iter().enumerate().any(|(i, (p, _))| factors[..i].iter().any(|(f, _)| f == p)) {
        return Err(Error::InvalidInput("the factorization does not match n".into()));
    }
    let mut num = DensePoly::one(a_ring);
    let mut den = DensePoly::one(a_ring);
    for (m, sign) in mobius_divisors(a_ring, n, factors) {
        let phi = DensePoly::from_additive(&carlitz_phi(a_ring, &m));
        if sign > 0 {
            num = num.mul(&phi);
        } else {
            den = den.mul(&phi);
        }
    }
    let (w, rem) = num.divrem(&den)?;
    if rem.degree() != Degree::NegInfinity {
        return Err(Error::Consistency("W_n division is not exact".into()));
    }
    Ok(w)
}

/// Σ μ(n/m) q^deg m over the divisors used by [`carlitz_cyclotomic`].
pub fn cyclotomic_degree(a_ring: &PolyRing, n: &APoly, factors: &[(APoly, u32)]) -> i64 {
    let q = a_ring.q() as i64;
    mobius_divisors(a_ring, n, factors)
        .into_iter()
        .map(|(m, s)| s as i64 * q.pow(m.deg0() as u32))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(q: u64) -> PolyRing {
        PolyRing::with_q(q).unwrap()
    }

    #[test]
    fn phi_examples() {
        for q in [2u64, 3, 4] {
            let ar = a(q);
            let th = ar.theta();
            assert_eq!(carlitz_phi(&ar, &APoly::t()), TauPoly::new(&ar, vec![th.clone(), APoly::one()]));
            assert_eq!(carlitz_phi(&ar, &APoly::one()), TauPoly::one(&ar));
            let t2 = ar.parse("t^2").unwrap();
            let expect = TauPoly::new(&ar, vec![ar.mul(&th, &th), ar.add(&ar.frobenius(&th), &th), APoly::one()]);
            assert_eq!(carlitz_phi(&ar, &t2), expect);
        }
    }

    #[test]
    fn torsion_examples() {
        let ar = a(2);
        let t2 = ar.parse("t^2").unwrap();
        let phi = carlitz_torsion_poly(&ar, &t2).unwrap();
        assert_eq!(phi.format_additive("Z"), "Z^4+(t^2+t)*Z^2+t^2*Z");
        let a3 = a(3);
        let c = a3.parse("2").unwrap();
        assert_eq!(carlitz_torsion_poly(&a3, &c).unwrap().format_additive("Z"), "2*Z");
        assert!(carlitz_torsion_poly(&ar, &APoly::zero()).is_err());
    }

    #[test]
    fn eisenstein_examples() {
        let ar = a(2);
        let r = check_eisenstein(&ar, &APoly::t()).unwrap();
        assert!(r.eisenstein() && r.reduction_is_frobenius());
        assert_eq!(carlitz_phi(&ar, &APoly::t()).format_additive("Z"), "Z^2+t*Z");
        let wp = ar.parse("t^2+t+1").unwrap();
        let r = check_eisenstein(&ar, &wp).unwrap();
        assert!(r.coefficients_divisible && r.eisenstein());
        assert_eq!(r.reduction.format_additive("Z"), "Z^4");
        let a3 = a(3);
        assert!(check_eisenstein(&a3, &APoly::t()).unwrap().eisenstein());
        assert!(check_eisenstein(&ar, &ar.parse("t^2+1").unwrap()).is_err());
    }

    #[test]
    fn eisenstein_for_all_small_primes() {
        for (q, dmax) in [(2u64, 4usize), (3, 3)] {
            let ar = a(q);
            for d in 1..=dmax {
                for wp in ar.irreducibles_of_degree(d) {
                    let r = check_eisenstein(&ar, &wp).unwrap();
                    assert!(r.eisenstein() && r.reduction_is_frobenius(), "q={q} wp={wp:?}");
                }
            }
        }
    }

    #[test]
    fn cyclotomic_examples() {
        let ar = a(2);
        let t = APoly::t();
        let w = carlitz_cyclotomic(&ar, &t, &[(t.clone(), 1)]).unwrap();
        assert_eq!(w.format("X"), "X+t");
        let t2 = ar.parse("t^2").unwrap();
        let w2 = carlitz_cyclotomic(&ar, &t2, &[(t.clone(), 2)]).unwrap();
        assert_eq!(w2.degree(), Degree::Finite(2));
        // W_{t^2} · Φ_t = Φ_{t^2}
        let lhs = w2.mul(&DensePoly::from_additive(&carlitz_phi(&ar, &t)));
        assert_eq!(lhs, DensePoly::from_additive(&carlitz_phi(&ar, &t2)));
        let wp = ar.parse("t^3+t+1").unwrap();
        let w3 = carlitz_cyclotomic(&ar, &wp, &[(wp.clone(), 1)]).unwrap();
        assert_eq!(w3.degree(), Degree::Finite(7));
        assert!(carlitz_cyclotomic(&ar, &t2, &[(t.clone(), 1)]).is_err());
    }

    #[test]
    fn cyclotomic_degree_matches_mobius_sum() {
        let ar = a(2);
        let p1 = APoly::t();
        let p2 = ar.parse("t+1").unwrap();
        let p3 = ar.parse("t^2+t+1").unwrap();
        let cases = vec![
            vec![(p1.clone(), 1), (p2.clone(), 1)],
            vec![(p1.clone(), 2), (p2.clone(), 1)],
            vec![(p3.clone(), 1), (p1.clone(), 1)],
            vec![(p1.clone(), 3)],
        ];
        for f in cases {
            let n = f.iter().fold(APoly::one(), |acc, (p, e)| ar.mul_p(&acc, &ar.pow_p(p, *e as u64)));
            let w = carlitz_cyclotomic(&ar, &n, &f).unwrap();
            assert_eq!(w.degree().finite().unwrap() as i64, cyclotomic_degree(&ar, &n, &f));
            let phi_n = DensePoly::from_additive(&carlitz_phi(&ar, &n));
            assert_eq!(phi_n.divrem(&w).unwrap().1.degree(), Degree::NegInfinity);
        }
    }

    #[test]
    fn cache_is_consistent_across_threads() {
        let ar = a(3);
        let c = CarlitzAction::new(&ar);
        let polys: Vec<APoly> = ar.below_degree(3).collect();
        std::thread::scope(|s| {
            for chunk in polys.chunks(7) {
                let c = &c;
                s.spawn(move || {
                    for p in chunk {
                        assert_eq!(c.phi(p), carlitz_phi(c.ring(), p));
                    }
                });
            }
        });
        assert_eq!(c.cached(), polys.len());
    }

    proptest! {
        #[test]
        fn phi_is_a_ring_map(x in 0u64..81, y in 0u64..81) {
            let ar = a(3);
            let (f, g) = (ar.from_index(x, 4), ar.from_index(y, 4));
            let (pf, pg) = (carlitz_phi(&ar, &f), carlitz_phi(&ar, &g));
            prop_assert_eq!(carlitz_phi(&ar, &ar.mul(&f, &g)), pf.mul(&pg));
            prop_assert_eq!(pf.mul(&pg), pg.mul(&pf));
            prop_assert_eq!(carlitz_phi(&ar, &ar.add(&f, &g)), pf.add(&pg));
            prop_assert_eq!(pf.degree(), f.degree());
        }
    }
}
