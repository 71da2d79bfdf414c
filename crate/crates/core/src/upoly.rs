//! Dense univariate polynomials over a ring, for the ordinary (not
//! additive) polynomial computations such as W_n.

use crate::base_arith::Degree;
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::tau_poly::TauPoly;

#[derive(Clone, Debug)]
pub struct DensePoly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for DensePoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<R: Ring> DensePoly<R> {
    pub fn new(ring: &R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        DensePoly { ring: ring.clone(), coeffs }
    }
    pub fn one(ring: &R) -> Self {
        Self::new(ring, vec![ring.one()])
    }
    /// Σ b_i X^(q^i) written out densely.
    pub fn from_additive(f: &TauPoly<R>) -> Self {
        let r = f.ring();
        let q = r.q() as usize;
        let Some(d) = f.degree().finite() else {
            return Self::new(r, Vec::new());
        };
        let mut c = vec![r.zero(); q.pow(d as u32) + 1];
        for (i, b) in f.coeffs().iter().enumerate() {
            c[q.pow(i as u32)] = b.clone();
        }
        Self::new(r, c)
    }
    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }
    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }
    pub fn mul(&self, g: &Self) -> Self {
        let r = &self.ring;
        if self.coeffs.is_empty() || g.coeffs.is_empty() {
            return Self::new(r, Vec::new());
        }
        let mut out = vec![r.zero(); self.coeffs.len() + g.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in g.coeffs.iter().enumerate() {
                out[i + j] = r.add(&out[i + j], &r.mul(a, b));
            }
        }
        Self::new(r, out)
    }
    /// Euclidean division by a polynomial with unit leading coefficient.
    pub fn divrem(&self, g: &Self) -> Result<(Self, Self)> {
        let r = &self.ring;
        let dg = g.degree().finite().ok_or(Error::DivisionByZero)?;
        let li = r
            .inv(g.coeffs.last().unwrap())
            .ok_or_else(|| Error::NotUnit("leading coefficient of divisor".into()))?;
        if self.coeffs.len() <= dg {
            return Ok((Self::new(r, Vec::new()), self.clone()));
        }
        let mut h = self.coeffs.clone();
        let mut quo = vec![r.zero(); h.len() - dg];
        for k in (dg..h.len()).rev() {
            let c = r.mul(&h[k], &li);
            if r.is_zero(&c) {
                continue;
            }
            for (i, gi) in g.coeffs.iter().enumerate() {
                h[k - dg + i] = r.sub(&h[k - dg + i], &r.mul(&c, gi));
            }
            quo[k - dg] = c;
        }
        h.truncate(dg);
        Ok((Self::new(r, quo), Self::new(r, h)))
    }
    pub fn format(&self, var: &str) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.ring.is_zero(c) {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = self.ring.fmt_elem(c);
            parts.push(match (mon.is_empty(), cs.as_str()) {
                (true, _) => cs.clone(),
                (false, "1") => mon,
                _ if cs.contains('+') => format!("({cs})*{mon}"),
                _ => format!("{cs}*{mon}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}
