//! The Tate-Drinfeld module TD(fΛ) at finite x-precision.
//!
//! The lattice is fΛ = {Φ^C_{fa}(1/x) : a ∈ A}. With u_a = 1/Φ^C_{fa}(1/x)
//! the exponential is e(X) = X ∏_{a monic} (1 - u_a^(q-1) X^(q-1)), and
//! Φ_t = θ + a1 τ + a2 τ² is read off from Φ_t ∘ e = e ∘ Φ^C_t.
//!
//! Coefficients live in any A-algebra R whose elements are polynomial
//! representatives: A itself or A/(℘^n).

use crate::base_arith::{APoly, PolyRing, ResidueRing};
use crate::carlitz::CarlitzAction;
use crate::drinfeld::DrinfeldRank2;
use crate::error::{Error, Result};
use crate::ring::{Ring, ThetaRing};
use crate::series::{Series, SeriesRing};
use crate::tau_poly::TauPoly;

pub type Coeff = Series<APoly>;

/// Lower bound for val(e_i) over the full lattice: the sum of the
/// (q^i - 1)/(q - 1) smallest valuations (q-1) q^deg(fa).
pub fn exponential_val_lower_bound(q: u64, deg_f: usize, i: usize) -> i64 {
    let mut need = (q.pow(i as u32) - 1) / (q - 1);
    let mut total = 0i64;
    let mut j = 0u32;
    while need > 0 {
        let count = q.pow(j).min(need);
        let v = (q - 1) as i64 * q.pow(deg_f as u32 + j) as i64;
        total = total.saturating_add(v.saturating_mul(count as i64));
        need -= count;
        j += 1;
    }
    total
}

/// F_g(x) = 1/Φ^C_g(1/x), of valuation q^deg g.
pub fn lattice_inverse<R: ThetaRing<Elem = APoly>>(
    carlitz: &CarlitzAction<PolyRing>,
    s: &SeriesRing<R>,
    g: &APoly,
) -> Result<Coeff> {
    let phi = carlitz.phi(g);
    let q = s.q() as i64;
    let dg = g.deg0() as u32;
    let top = q.pow(dg);
    let mut coeffs = vec![s.base().zero(); top as usize + 1];
    for (i, c) in phi.coeffs().iter().enumerate() {
        // c x^(-q^i) sits at offset top - q^i from x^(-top)
        coeffs[(top - q.pow(i as u32)) as usize] = s.base().from_apoly(c);
    }
    let laurent = s.from_coeffs(-top, coeffs, s.cap());
    s.try_inv(&laurent)
}

/// e_0..e_{i_max} of e_{fΛ} to x-precision `s.cap()`.
///
/// Also returns the largest precision-certified coefficient of a
/// non-q-power monomial X^(1+(q-1)k), which must vanish.
pub fn td_exponential<R: ThetaRing<Elem = APoly>>(
    carlitz: &CarlitzAction<PolyRing>,
    s: &SeriesRing<R>,
    f: &APoly,
    i_max: usize,
) -> Result<(Vec<Coeff>, bool)> {
    if f.is_zero() {
        return Err(Error::InvalidInput("the lattice scaling f must be nonzero".into()));
    }
    let n = s.cap();
    if n < 1 {
        return Err(Error::InvalidInput("precision must be positive".into()));
    }
    let q = s.q();
    let a = carlitz.ring();
    let k_top = ((q.pow(i_max as u32) - 1) / (q - 1)) as usize;
    let mut prod: Vec<Coeff> = vec![s.zero(); k_top + 1];
    prod[0] = s.one();
    let df = f.deg0();
    let mut deg = 0usize;
    while (q as i64).saturating_pow((df + deg) as u32) <= n {
        for m in a.monic_of_degree(deg) {
            let fa = a.mul(f, &m);
            let u = lattice_inverse(carlitz, s, &fa)?;
            let w = s.neg(&s.pow(&u, q - 1));
            let vw = w.val();
            for k in (1..=k_top).rev() {
                let prev = &prod[k - 1];
                if prev.is_zero_to_prec() || prev.val() + vw >= n {
                    continue;
                }
                let term = s.mul(&w, prev);
                prod[k] = s.add(&prod[k], &term);
            }
        }
        deg += 1;
    }
    let mut e = Vec::with_capacity(i_max + 1);
    let mut additive = true;
    let mut next = 1u64;
    for (k, c) in prod.into_iter().enumerate() {
        if (k as u64) == (next - 1) / (q - 1) {
            e.push(c);
            next *= q;
        } else if !c.is_zero_to_prec() {
            additive = false;
        }
    }
    Ok((e, additive))
}

/// Φ_t ∘ e - e ∘ Φ^C_t at the coefficient of τ^i.
fn functional_residual_at<R: ThetaRing<Elem = APoly>>(
    s: &SeriesRing<R>,
    e: &[Coeff],
    a1: &Coeff,
    a2: &Coeff,
    i: usize,
) -> Coeff {
    let th = s.theta();
    let mut lhs = s.mul(&th, &e[i]);
    if i >= 1 {
        lhs = s.add(&lhs, &s.mul(a1, &s.frobenius(&e[i - 1])));
    }
    if i >= 2 {
        lhs = s.add(&lhs, &s.mul(a2, &s.frobenius_pow(&e[i - 2], 2)));
    }
    let mut rhs = s.mul(&e[i], &s.frobenius_pow(&th, i));
    if i >= 1 {
        rhs = s.add(&rhs, &e[i - 1]);
    }
    s.sub(&lhs, &rhs)
}

/// A Tate-Drinfeld module over R((x)).
#[derive(Debug)]
pub struct TateDrinfeld<R: ThetaRing<Elem = APoly>> {
    carlitz: CarlitzAction<PolyRing>,
    series: SeriesRing<R>,
    f: APoly,
    e: Vec<Coeff>,
    additive: bool,
    module: DrinfeldRank2<SeriesRing<R>>,
}

/// Ψ_℘ with the data certifying it.
#[derive(Clone, Debug)]
pub struct CanonicalIsogeny<R: ThetaRing<Elem = APoly>> {
    pub wp: APoly,
    pub psi: TauPoly<SeriesRing<R>>,
    /// Residuals of Ψ ∘ e_{fΛ} = e_{℘fΛ} ∘ Φ^C_℘ at τ^k, d < k ≤ i_max.
    pub residuals: Vec<Coeff>,
    /// ρ with Φ_℘ = ρ Ψ.
    pub rho: TauPoly<SeriesRing<R>>,
    pub remainder: TauPoly<SeriesRing<R>>,
}

impl<R: ThetaRing<Elem = APoly>> CanonicalIsogeny<R> {
    pub fn residuals_vanish(&self) -> bool {
        self.residuals.iter().all(|r| r.is_zero_to_prec())
    }
    pub fn divides_phi(&self) -> bool {
        self.remainder.is_zero()
    }
}

/// Outcome of comparing two twisted polynomials with series coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesCheck {
    pub ok: bool,
    /// Smallest precision at which a coefficient was compared.
    pub certified_prec: i64,
}

fn compare<R: Ring>(s: &SeriesRing<R>, a: &TauPoly<SeriesRing<R>>, b: &TauPoly<SeriesRing<R>>) -> SeriesCheck {
    let n = a.coeffs().len().max(b.coeffs().len());
    let mut ok = true;
    let mut prec = s.cap();
    for i in 0..n {
        let d = s.sub(&a.coeff(i), &b.coeff(i));
        ok &= d.is_zero_to_prec();
        prec = prec.min(d.prec());
    }
    SeriesCheck { ok, certified_prec: prec }
}

/// Reduction of Φ_℘ mod ℘ and its verdict.
#[derive(Clone, Debug)]
pub struct Ordinarity {
    pub ordinary: bool,
    /// x-valuation of each reduced τ^i coefficient (None: zero to precision).
    pub newton: Vec<Option<i64>>,
    pub prec: i64,
}

/// l(x) with an independent recomputation.
#[derive(Clone, Debug)]
pub struct KodairaSpencer {
    pub l: Coeff,
    pub oracle: Coeff,
}

/// e_{fΛ}(Z) modulo Φ^C_m(Z) and the A-linearity residual.
#[derive(Clone, Debug)]
pub struct LevelImage<R: ThetaRing<Elem = APoly>> {
    pub image: TauPoly<SeriesRing<R>>,
    pub residual: TauPoly<SeriesRing<R>>,
    pub terms_used: usize,
}

impl<R: ThetaRing<Elem = APoly>> TateDrinfeld<R> {
    /// Builds TD(fΛ) over R((x)) mod x^prec with e up to i_max ≥ 3.
    pub fn new(a: &PolyRing, base: &R, f: &APoly, prec: i64, i_max: usize) -> Result<Self> {
        if i_max < 3 {
            return Err(Error::InvalidInput("i_max must be at least 3".into()));
        }
        let carlitz = CarlitzAction::new(a);
        let s = SeriesRing::new(base.clone(), prec);
        let (e, additive) = td_exponential(&carlitz, &s, f, i_max)?;
        let th = s.theta();
        let q = s.q();
        let _ = q;
        let a1 = s.add(&s.one(), &s.mul(&e[1], &s.sub(&s.frobenius(&th), &th)));
        let a2 = s.add(
            &s.mul(&e[2], &s.sub(&s.frobenius_pow(&th, 2), &th)),
            &s.sub(&e[1], &s.mul(&a1, &s.frobenius(&e[1]))),
        );
        let module = DrinfeldRank2::new(&s, a1, a2)
            .map_err(|_| Error::Consistency("a2 is not a unit of R((x))".into()))?;
        let td = TateDrinfeld { carlitz, series: s, f: f.clone(), e, additive, module };
        if !td.residuals().iter().all(|r| r.is_zero_to_prec()) {
            return Err(Error::Consistency("functional equation residual does not vanish".into()));
        }
        Ok(td)
    }

    pub fn series(&self) -> &SeriesRing<R> {
        &self.series
    }
    pub fn prec(&self) -> i64 {
        self.series.cap()
    }
    pub fn f(&self) -> &APoly {
        &self.f
    }
    pub fn a_ring(&self) -> &PolyRing {
        self.carlitz.ring()
    }
    pub fn exponential(&self) -> &[Coeff] {
        &self.e
    }
    pub fn i_max(&self) -> usize {
        self.e.len() - 1
    }
    /// Whether the product had no non-q-power monomials.
    pub fn exponential_is_additive(&self) -> bool {
        self.additive
    }
    pub fn a1(&self) -> &Coeff {
        self.module.a1()
    }
    pub fn a2(&self) -> &Coeff {
        self.module.a2()
    }
    pub fn module(&self) -> &DrinfeldRank2<SeriesRing<R>> {
        &self.module
    }

    /// The functional equation residuals at τ^i, 0 ≤ i ≤ i_max.
    pub fn residuals(&self) -> Vec<Coeff> {
        (0..=self.i_max())
            .map(|i| functional_residual_at(&self.series, &self.e, self.a1(), self.a2(), i))
            .collect()
    }

    pub fn j_invariant(&self) -> Coeff {
        self.module.j_invariant()
    }

    /// ν_g^♯ : x -> F_g(x) applied to a coefficient.
    pub fn nu_subst(&self, c: &Coeff, g: &APoly) -> Result<Coeff> {
        if g.deg0() == 0 {
            return Ok(c.clone());
        }
        let fg = lattice_inverse(&self.carlitz, &self.series, g)?;
        self.series.substitute(c, &fg)
    }

    fn nu_subst_with(&self, c: &Coeff, fg: &Coeff) -> Result<Coeff> {
        self.series.substitute(c, fg)
    }

    /// The exponential of ℘fΛ computed directly from its lattice.
    pub fn scaled_exponential(&self, g: &APoly) -> Result<Vec<Coeff>> {
        let fg = self.a_ring().mul(&self.f, g);
        Ok(td_exponential(&self.carlitz, &self.series, &fg, self.i_max())?.0)
    }

    /// ν_g^*(e_{fΛ}) coefficientwise.
    pub fn pulled_back_exponential(&self, g: &APoly) -> Result<Vec<Coeff>> {
        let fg = lattice_inverse(&self.carlitz, &self.series, g)?;
        self.e.iter().map(|c| self.nu_subst_with(c, &fg)).collect()
    }

    /// Ψ_℘ = Σ_{i ≤ d} c_i τ^i from Ψ ∘ e_{fΛ} = e_{℘fΛ} ∘ Φ^C_℘.
    pub fn canonical_isogeny(&self, wp: &APoly) -> Result<CanonicalIsogeny<R>> {
        let s = &self.series;
        let d = wp.deg0();
        if d == 0 || !wp.is_monic() {
            return Err(Error::InvalidInput("℘ must be monic of positive degree".into()));
        }
        if self.i_max() < d + 1 {
            return Err(Error::InvalidInput(format!("i_max must be at least {}", d + 1)));
        }
        if self.e[0] != s.one() {
            return Err(Error::Consistency("e_0 is not 1".into()));
        }
        let ep = self.pulled_back_exponential(wp)?;
        let phi_c: Vec<Coeff> = self.carlitz.phi(wp).coeffs().iter().map(|c| s.from_apoly(c)).collect();
        // coefficient of τ^k in e' ∘ Φ^C_℘
        let rhs = |k: usize| -> Coeff {
            let mut acc = s.zero();
            for (j, pj) in phi_c.iter().enumerate().take(k + 1) {
                let i = k - j;
                if i < ep.len() {
                    acc = s.add(&acc, &s.mul(&ep[i], &s.frobenius_pow(pj, i)));
                }
            }
            acc
        };
        let mut c: Vec<Coeff> = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let mut v = rhs(k);
            for (i, ci) in c.iter().enumerate() {
                v = s.sub(&v, &s.mul(ci, &s.frobenius_pow(&self.e[k - i], i)));
            }
            c.push(v);
        }
        let residuals = (d + 1..=self.i_max())
            .map(|k| {
                let mut lhs = s.zero();
                for (i, ci) in c.iter().enumerate() {
                    lhs = s.add(&lhs, &s.mul(ci, &s.frobenius_pow(&self.e[k - i], i)));
                }
                s.sub(&lhs, &rhs(k))
            })
            .collect();
        let psi = TauPoly::new(s, c);
        if psi.degree().finite() != Some(d) {
            return Err(Error::Consistency("Ψ does not have τ-degree d".into()));
        }
        let (rho, remainder) = self.module.phi(wp).rdivmod(&psi)?;
        Ok(CanonicalIsogeny { wp: wp.clone(), psi, residuals, rho, remainder })
    }

    /// Ψ Φ_a = ν_℘^*(Φ_a) Ψ.
    pub fn verify_tdquot(&self, iso: &CanonicalIsogeny<R>, a: &APoly) -> Result<SeriesCheck> {
        let s = &self.series;
        let phi_a = self.module.phi(a);
        let fw = lattice_inverse(&self.carlitz, s, &iso.wp)?;
        let pulled: Vec<Coeff> = phi_a.coeffs().iter().map(|c| self.nu_subst_with(c, &fw)).collect::<Result<_>>()?;
        let nu_phi = TauPoly::new(s, pulled);
        Ok(compare(s, &iso.psi.mul(&phi_a), &nu_phi.mul(&iso.psi)))
    }

    /// Φ_℘ reduced mod ℘: ordinary when the τ^i coefficients vanish for
    /// i < d and the τ^d coefficient is an x-adic unit.
    pub fn ordinarity(&self, wp: &APoly) -> Result<Ordinarity> {
        let a = self.a_ring();
        let k = ResidueRing::new(a, wp)?;
        let sk = SeriesRing::new(k.clone(), self.prec());
        let phi = self.module.phi(wp);
        let d = wp.deg0();
        let reduced: Vec<Series<APoly>> = (0..=2 * d)
            .map(|i| self.series.map_to(&sk, &phi.coeff(i), |c| k.reduce(c)))
            .collect();
        let newton: Vec<Option<i64>> = reduced.iter().map(|c| c.valuation()).collect();
        let prec = reduced.iter().map(|c| c.prec()).min().unwrap_or(self.prec());
        if newton[d].is_none() {
            return Err(Error::PrecisionUnderflow(format!(
                "τ^{d} coefficient of Φ_℘ mod ℘ is zero to x-precision {prec}"
            )));
        }
        let ordinary = newton[..d].iter().all(|v| v.is_none()) && newton[d] == Some(0);
        Ok(Ordinarity { ordinary, newton, prec })
    }

    /// l(x) = a1' - (a1/a2) a2'.
    pub fn kodaira_spencer(&self) -> Result<KodairaSpencer> {
        let s = &self.series;
        let (a1, a2) = (self.a1(), self.a2());
        let (da1, da2) = (s.derivative(a1), s.derivative(a2));
        let l = s.sub(&da1, &s.mul(&s.div_s(a1, a2)?, &da2));
        let oracle = s.div_s(&s.sub(&s.mul(&da1, a2), &s.mul(a1, &da2)), a2)?;
        if l.prec() <= -1 {
            return Err(Error::PrecisionUnderflow("x-precision too low to see the pole of l(x)".into()));
        }
        Ok(KodairaSpencer { l, oracle })
    }

    /// e_{fΛ}(Z) mod (Φ^C_m(Z), x^N) as an additive polynomial of
    /// τ-degree < deg m, with the residual of Φ_t(λ) = λ(Φ^C_t(Z)).
    pub fn level_structure_image(&self, m: &APoly) -> Result<LevelImage<R>> {
        let s = &self.series;
        if m.is_zero() {
            return Err(Error::InvalidInput("m must be nonzero".into()));
        }
        let q = s.q();
        let n = self.prec();
        let mut terms = 1;
        while exponential_val_lower_bound(q, self.f.deg0(), terms) < n {
            terms += 1;
        }
        let e_ext;
        let e: &[Coeff] = if terms <= self.i_max() + 1 {
            &self.e
        } else {
            e_ext = td_exponential(&self.carlitz, s, &self.f, terms)?.0;
            &e_ext
        };
        let phi_m = self.carlitz.phi(m).map(s, |c| s.from_apoly(c));
        let monic = self.a_ring().make_monic(m);
        let phi_m = if monic == *m {
            phi_m
        } else {
            let inv = s.from_apoly(&APoly::constant(self.a_ring().fq().inv(m.leading())?));
            phi_m.scale_left(&inv)
        };
        let mut image = TauPoly::zero(s);
        for (i, ei) in e.iter().enumerate().take(terms) {
            let r = TauPoly::tau_pow(s, i).rdivmod(&phi_m)?.1;
            image = image.add(&r.scale_left(ei));
        }
        let phi_c_t = self.carlitz.phi(&APoly::t()).map(s, |c| s.from_apoly(c));
        let lhs = self.module.phi_t().mul(&image);
        let rhs = image.mul(&phi_c_t);
        let residual = lhs.sub(&rhs).rdivmod(&phi_m)?.1;
        Ok(LevelImage { image, residual, terms_used: terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td(q: u64, f: &str, n: i64, i_max: usize) -> TateDrinfeld<PolyRing> {
        let a = PolyRing::with_q(q).unwrap();
        let f = a.parse(f).unwrap();
        TateDrinfeld::new(&a, &a, &f, n, i_max).unwrap()
    }

    fn ser(s: &SeriesRing<PolyRing>, val: i64, c: &[&str], prec: i64) -> Coeff {
        s.from_coeffs(val, c.iter().map(|x| s.base().parse(x).unwrap()).collect(), prec)
    }

    #[test]
    fn exponential_q2_f1_n3() {
        let t = td(2, "1", 3, 3);
        let s = t.series();
        assert_eq!(t.exponential()[0], s.one());
        // e_1 = x + x^3 mod x^4 needs precision 4
        let t4 = td(2, "1", 4, 3);
        let s4 = t4.series();
        assert_eq!(t4.exponential()[1], ser(s4, 1, &["1", "0", "1"], 4));
        assert!(t4.exponential_is_additive());
    }

    #[test]
    fn a1_q2_f1() {
        let t = td(2, "1", 4, 3);
        let s = t.series();
        assert_eq!(t.a1(), &ser(s, 0, &["1", "t^2+t", "0", "t^2+t"], 4));
    }

    #[test]
    fn lattice_inverse_q2_t() {
        let a = PolyRing::with_q(2).unwrap();
        let c = CarlitzAction::new(&a);
        let s = SeriesRing::new(a.clone(), 6);
        let f = lattice_inverse(&c, &s, &APoly::t()).unwrap();
        assert_eq!(f, ser(&s, 2, &["1", "t", "t^2", "t^3"], 6));
    }

    #[test]
    fn val_bound_examples() {
        assert_eq!(exponential_val_lower_bound(2, 0, 1), 1);
        assert_eq!(exponential_val_lower_bound(2, 0, 2), 5);
        assert_eq!(exponential_val_lower_bound(3, 0, 1), 2);
        for (q, f) in [(2u64, "1"), (3, "1"), (2, "t")] {
            let t = td(q, f, 12, 4);
            for (i, e) in t.exponential().iter().enumerate() {
                let b = exponential_val_lower_bound(q, t.f().deg0(), i);
                assert!(e.is_zero_to_prec() || e.val() >= b, "q={q} i={i}");
            }
        }
    }

    #[test]
    fn nu_pullback_matches_scaled_lattice() {
        for (q, f, wp) in [(2u64, "1", "t"), (2, "t", "t"), (3, "1", "t"), (2, "1", "t^2+t+1")] {
            let t = td(q, f, 10, 3);
            let wp = t.a_ring().parse(wp).unwrap();
            let direct = t.scaled_exponential(&wp).unwrap();
            let pulled = t.pulled_back_exponential(&wp).unwrap();
            for (a, b) in direct.iter().zip(&pulled) {
                assert!(t.series().agrees_to(a, b, 10), "q={q}");
            }
            assert_eq!(t.nu_subst(t.a1(), &APoly::one()).unwrap(), *t.a1());
        }
    }

    #[test]
    fn precision_soundness() {
        let lo = td(3, "1", 8, 3);
        let hi = td(3, "1", 14, 3);
        assert_eq!(hi.series().truncate(hi.a1(), 8), *lo.a1());
        assert_eq!(hi.series().truncate(hi.a2(), 8), *lo.a2());
        let a = PolyRing::with_q(3).unwrap();
        let r = ResidueRing::prime_power(&a, &APoly::t(), 3).unwrap();
        let red = TateDrinfeld::new(&a, &r, &APoly::one(), 8, 3).unwrap();
        let sr = red.series();
        assert_eq!(lo.series().map_to(sr, lo.a2(), |c| r.reduce(c)), *red.a2());
    }

    #[test]
    fn verify_tdquot_q2() {
        let t = td(2, "1", 8, 3);
        let iso = t.canonical_isogeny(&APoly::t()).unwrap();
        for a in ["1", "t", "t+1"] {
            let a = t.a_ring().parse(a).unwrap();
            let c = t.verify_tdquot(&iso, &a).unwrap();
            assert!(c.ok && c.certified_prec == 8);
        }
    }

    #[test]
    fn level_structure_examples() {
        let t = td(2, "1", 4, 3);
        let s = t.series();
        let img = t.level_structure_image(&APoly::t()).unwrap();
        assert!(img.residual.is_zero());
        assert_eq!(s.truncate(&img.image.coeff(0), 1), s.truncate(&s.one(), 1));
        assert!(t.level_structure_image(&APoly::one()).unwrap().image.is_zero());
        let t3 = td(3, "1", 8, 3);
        let m = t3.a_ring().parse("t^2+1").unwrap();
        assert!(t3.level_structure_image(&m).unwrap().residual.is_zero());
    }
}
