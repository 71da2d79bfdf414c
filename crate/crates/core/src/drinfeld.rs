//! Rank-2 Drinfeld modules Φ_t = θ + a1 τ + a2 τ² with trivialized line
//! bundle, Taguchi duality and the structure of Φ_℘ in characteristic ℘.

use crate::base_arith::APoly;
use crate::error::{Error, Result};
use crate::ring::ThetaRing;
use crate::tau_poly::TauPoly;

#[derive(Clone, Debug)]
pub struct DrinfeldRank2<R: ThetaRing> {
    ring: R,
    a1: R::Elem,
    a2: R::Elem,
}

/// Result of testing u·Φ^E_t = Φ^F_t·u.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsogenyCheck {
    pub morphism: bool,
    pub isogeny: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Ordinary,
    Supersingular,
}

impl Reduction {
    pub fn name(self) -> &'static str {
        match self {
            Reduction::Ordinary => "ordinary",
            Reduction::Supersingular => "supersingular",
        }
    }
}

/// Φ_℘ = (α_d + … + α_{rd} τ^((r-1)d)) τ^d over a base of characteristic ℘.
#[derive(Clone, Debug)]
pub struct WpFactorization<R: ThetaRing> {
    pub d: usize,
    /// α_d, …, α_{rd}.
    pub alphas: Vec<R::Elem>,
    pub v_d: TauPoly<R>,
    pub f_d: TauPoly<R>,
}

impl<R: ThetaRing> WpFactorization<R> {
    /// Splits off τ^d from `phi_wp`, checking that the coefficients
    /// below τ^d vanish.
    pub fn from_phi(phi_wp: &TauPoly<R>, d: usize) -> Result<Self> {
        let r = phi_wp.ring();
        if let Some(i) = (0..d).find(|&i| !r.is_zero(&phi_wp.coeff(i))) {
            return Err(Error::InvalidInput(format!(
                "τ^{i} coefficient of Φ_℘ is nonzero; θ is not a root of ℘ in the base"
            )));
        }
        let alphas: Vec<R::Elem> = phi_wp.coeffs().iter().skip(d).cloned().collect();
        let v_d = TauPoly::new(r, alphas.clone());
        Ok(WpFactorization { d, alphas, v_d, f_d: TauPoly::tau_pow(r, d) })
    }

    pub fn alpha_d(&self) -> &R::Elem {
        &self.alphas[0]
    }
}

impl<R: ThetaRing> DrinfeldRank2<R> {
    pub fn new(ring: &R, a1: R::Elem, a2: R::Elem) -> Result<Self> {
        if ring.inv(&a2).is_none() {
            return Err(Error::NotUnit(format!("a2 = {}", ring.fmt_elem(&a2))));
        }
        Ok(DrinfeldRank2 { ring: ring.clone(), a1, a2 })
    }
    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn a1(&self) -> &R::Elem {
        &self.a1
    }
    pub fn a2(&self) -> &R::Elem {
        &self.a2
    }

    pub fn phi_t(&self) -> TauPoly<R> {
        TauPoly::new(&self.ring, vec![self.ring.theta(), self.a1.clone(), self.a2.clone()])
    }

    /// Φ_a by Horner's rule.
    pub fn phi(&self, a: &APoly) -> TauPoly<R> {
        let r = &self.ring;
        let phi_t = self.phi_t();
        let mut acc = TauPoly::zero(r);
        for c in a.coeffs().iter().rev() {
            acc = acc.mul(&phi_t).add(&TauPoly::constant(r, r.from_fq(*c)));
        }
        acc
    }

    /// j = a1^(q+1) / a2.
    pub fn j_invariant(&self) -> R::Elem {
        let r = &self.ring;
        let a2i = r.inv(&self.a2).expect("a2 is a unit");
        r.mul(&r.pow(&self.a1, r.q() + 1), &a2i)
    }

    /// The Taguchi dual: a1' = -a1/a2, a2' = a2^(-q).
    pub fn taguchi_dual(&self) -> Self {
        let r = &self.ring;
        let a2i = r.inv(&self.a2).expect("a2 is a unit");
        DrinfeldRank2 {
            ring: r.clone(),
            a1: r.neg(&r.mul(&self.a1, &a2i)),
            a2: r.frobenius(&a2i),
        }
    }

    /// The scalar c = a2^(-1), an isomorphism E -> dual(dual(E)).
    pub fn double_dual_isomorphism(&self) -> R::Elem {
        self.ring.inv(&self.a2).expect("a2 is a unit")
    }

    /// E^(q^k): coefficients raised to the q^k power.
    pub fn twist(&self, k: usize) -> Self {
        let r = &self.ring;
        DrinfeldRank2 { ring: r.clone(), a1: r.frobenius_pow(&self.a1, k), a2: r.frobenius_pow(&self.a2, k) }
    }

    /// Whether u: self -> target intertwines Φ_t.
    pub fn is_isogeny(&self, u: &TauPoly<R>, target: &Self) -> IsogenyCheck {
        let morphism = u.mul(&self.phi_t()) == target.phi_t().mul(u);
        IsogenyCheck { morphism, isogeny: morphism && !u.is_zero() }
    }

    /// Factors Φ_℘ = V_d · τ^d; θ must be a root of ℘ in the base.
    pub fn wp_factorize(&self, wp: &APoly) -> Result<WpFactorization<R>> {
        if !self.ring.is_zero(&self.ring.from_apoly(wp)) {
            return Err(Error::InvalidInput("the base does not have characteristic ℘".into()));
        }
        WpFactorization::from_phi(&self.phi(wp), wp.deg0())
    }

    /// The identities V·F = Φ_℘, F·V = Φ_℘ of E^(q^d) and their n = 2
    /// analogues V²F² = Φ_{℘²}, F²V² = Φ_{℘²} of E^(q^{2d}).
    pub fn check_factorization(&self, wp: &APoly, fac: &WpFactorization<R>) -> Vec<(&'static str, bool)> {
        let d = fac.d;
        let (v, f) = (&fac.v_d, &fac.f_d);
        let phi = self.phi(wp);
        // Φ_{℘²} = Φ_℘ Φ_℘, the action being a ring map
        let phi2 = phi.mul(&phi);
        let v2 = v.mul(&v.twist(d));
        let f2 = f.twist(d).mul(f);
        vec![
            ("V F = Φ_℘", v.mul(f) == phi),
            ("F V = Φ_℘ of E^(q^d)", f.mul(v) == phi.twist(d)),
            ("V² F² = Φ_℘²", v2.mul(&f2) == phi2),
            ("F² V² = Φ_℘² of E^(q^2d)", f2.mul(&v2) == phi2.twist(2 * d)),
        ]
    }

    /// Ordinary iff α_d is a unit; when α_d = 0 the middle coefficients
    /// α_i, d < i < 2d, must vanish too.
    pub fn classify_reduction(&self, wp: &APoly) -> Result<Reduction> {
        let fac = self.wp_factorize(wp)?;
        let r = &self.ring;
        if r.inv(fac.alpha_d()).is_some() {
            return Ok(Reduction::Ordinary);
        }
        if !r.is_zero(fac.alpha_d()) {
            return Err(Error::InvalidInput("α_d is neither zero nor a unit; the base is not a field".into()));
        }
        let d = fac.d;
        if (1..d).any(|k| !r.is_zero(&fac.alphas[k])) {
            return Err(Error::Consistency("supersingular module with a nonzero middle coefficient".into()));
        }
        Ok(Reduction::Supersingular)
    }
}
