//! Finite v-sheaves as matrix triples (P, Psi, V) over a base ring.
//!
//! `P` is the matrix of φ: E^(q) -> E on the bases {f_j ⊗ 1} -> {f_i},
//! `Psi` the matrix of ψ_t and `V` the matrix of v: E -> E^(q). The
//! coordinates of x ⊗ 1 in E^(q) are the q-powers of those of x.

use crate::base_arith::{APoly, Embedding, Fq, FqField, ResidueRing};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::ring::{Ring, ThetaRing};
use crate::tau_poly::TauPoly;

/// The three defining identities of a v-sheaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// Psi = θ I + P V.
    PsiIsThetaPlusPV,
    /// Psi^[q] V = V Psi.
    VCommutesWithPsi,
    /// P Psi^[q] = Psi P.
    PCommutesWithPsi,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::PsiIsThetaPlusPV => "psi = theta + P V",
            Axiom::VCommutesWithPsi => "psi^[q] V = V psi",
            Axiom::PCommutesWithPsi => "P psi^[q] = psi P",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VSheaf<R: ThetaRing> {
    ring: R,
    p: Matrix<R::Elem>,
    psi: Matrix<R::Elem>,
    v: Matrix<R::Elem>,
}

impl<R: ThetaRing> PartialEq for VSheaf<R> {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.psi == o.psi && self.v == o.v
    }
}

fn check_square<E>(m: &Matrix<E>, n: usize) -> bool {
    m.len() == n && m.iter().all(|row| row.len() == n)
}

impl<R: ThetaRing> VSheaf<R> {
    pub fn new(ring: &R, p: Matrix<R::Elem>, psi: Matrix<R::Elem>, v: Matrix<R::Elem>) -> Result<Self> {
        let n = psi.len();
        if !(check_square(&p, n) && check_square(&psi, n) && check_square(&v, n)) {
            return Err(Error::InvalidInput("P, Psi, V must be square of one size".into()));
        }
        Ok(VSheaf { ring: ring.clone(), p, psi, v })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn rank(&self) -> usize {
        self.psi.len()
    }
    pub fn p(&self) -> &Matrix<R::Elem> {
        &self.p
    }
    pub fn psi(&self) -> &Matrix<R::Elem> {
        &self.psi
    }
    pub fn v(&self) -> &Matrix<R::Elem> {
        &self.v
    }

    /// The violated axioms; empty when the data is a v-sheaf.
    pub fn validate(&self) -> Vec<Axiom> {
        let r = &self.ring;
        let n = self.rank();
        let mut bad = Vec::new();
        let theta = linalg::scalar(r, &r.theta(), n);
        if linalg::add(r, &theta, &linalg::mul(r, &self.p, &self.v)) != self.psi {
            bad.push(Axiom::PsiIsThetaPlusPV);
        }
        let psi_q = linalg::frobenius(r, &self.psi);
        if linalg::mul(r, &psi_q, &self.v) != linalg::mul(r, &self.v, &self.psi) {
            bad.push(Axiom::VCommutesWithPsi);
        }
        if linalg::mul(r, &self.p, &psi_q) != linalg::mul(r, &self.psi, &self.p) {
            bad.push(Axiom::PCommutesWithPsi);
        }
        bad
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The Taguchi dual (V^T, Psi^T, P^T).
    pub fn dual(&self) -> Self {
        VSheaf {
            ring: self.ring.clone(),
            p: linalg::transpose(&self.v),
            psi: linalg::transpose(&self.psi),
            v: linalg::transpose(&self.p),
        }
    }
}

fn coords<R: Ring>(f: &TauPoly<R>, r: usize) -> Vec<R::Elem> {
    (0..r).map(|i| f.coeff(i)).collect()
}

fn columns_to_matrix<E: Clone>(cols: Vec<Vec<E>>) -> Matrix<E> {
    linalg::transpose(&cols)
}

/// The v-sheaf of Ker(u) for an isogeny u out of the module with
/// Φ_t = `phi_t`, on the basis τ^0..τ^(r-1) of B{τ}/B{τ}u.
///
/// Returns the sheaf and Φ_t of the target module.
pub fn kernel_sheaf<R: ThetaRing>(u: &TauPoly<R>, phi_t: &TauPoly<R>) -> Result<(VSheaf<R>, TauPoly<R>)> {
    let ring = u.ring();
    let r = u
        .degree()
        .finite()
        .filter(|&r| r >= 1)
        .ok_or_else(|| Error::InvalidInput("the isogeny must have τ-degree at least 1".into()))?;
    if ring.inv(u.leading().expect("nonzero")).is_none() {
        return Err(Error::NotUnit("leading coefficient of the isogeny".into()));
    }
    let (target, rem) = u.mul(phi_t).rdivmod(u)?;
    if !rem.is_zero() || target.coeff(0) != ring.theta() {
        return Err(Error::InvalidInput("u is not an isogeny out of this module".into()));
    }
    let u_q = u.twist(1);
    let theta = TauPoly::constant(ring, ring.theta());
    let red = |h: &TauPoly<R>, m: &TauPoly<R>| -> Result<Vec<R::Elem>> { Ok(coords(&h.rdivmod(m)?.1, r)) };
    let mut p_cols = Vec::with_capacity(r);
    let mut psi_cols = Vec::with_capacity(r);
    let mut v_cols = Vec::with_capacity(r);
    for j in 0..r {
        let tj = TauPoly::tau_pow(ring, j);
        p_cols.push(red(&TauPoly::tau_pow(ring, j + 1), u)?);
        let h = tj.mul(phi_t);
        psi_cols.push(red(&h, u)?);
        let w = h.sub(&theta.mul(&tj));
        if !ring.is_zero(&w.coeff(0)) {
            return Err(Error::Consistency("τ^0 coefficient of ψ - θ does not vanish".into()));
        }
        let shifted = TauPoly::new(ring, w.coeffs().iter().skip(1).cloned().collect());
        v_cols.push(red(&shifted, &u_q)?);
    }
    let s = VSheaf::new(ring, columns_to_matrix(p_cols), columns_to_matrix(psi_cols), columns_to_matrix(v_cols))?;
    let bad = s.validate();
    if !bad.is_empty() {
        let names: Vec<&str> = bad.iter().map(|a| a.name()).collect();
        return Err(Error::Consistency(format!("kernel sheaf violates {}", names.join(", "))));
    }
    Ok((s, target))
}

/// Solutions of a Frobenius-semilinear system over a finite field.
#[derive(Clone, Debug)]
pub struct PointSet {
    pub field: ResidueRing,
    pub embedding: Embedding,
    /// Sorted coordinate vectors.
    pub points: Vec<Vec<APoly>>,
    /// The t-action on points, over `field`.
    pub action: Matrix<APoly>,
}

/// Largest solution space that will be enumerated.
pub const MAX_POINTS: u64 = 1 << 20;

/// All x in F^r with M x = x^[q], F the degree-m extension of the base.
fn frobenius_fixed_points(base: &ResidueRing, m: &Matrix<APoly>, ext: usize) -> Result<(ResidueRing, Embedding, Vec<Vec<APoly>>)> {
    let (field, emb) = base.extension(ext)?;
    let big: Matrix<APoly> = m.iter().map(|row| row.iter().map(|x| emb.apply(x)).collect()).collect();
    let r = big.len();
    let n = field.degree();
    let fq: &FqField = field.fq();
    // the F_q-linear map x -> M x - x^[q] on F_q^(r n)
    let mut cols: Vec<Vec<Fq>> = Vec::with_capacity(r * n);
    for i in 0..r {
        for k in 0..n {
            let sk = APoly::monomial(Fq::ONE, k);
            let mut img: Vec<APoly> = (0..r).map(|row| field.mul(&big[row][i], &sk)).collect();
            img[i] = field.sub(&img[i], &field.frobenius(&sk));
            cols.push(img.iter().flat_map(|e| field.coords(e)).collect());
        }
    }
    let lin = linalg::transpose(&cols);
    let ker = linalg::kernel(fq, &lin, r * n);
    let count = (fq.q() as u64).checked_pow(ker.len() as u32).unwrap_or(u64::MAX);
    if count > MAX_POINTS {
        return Err(Error::Unsupported(format!("{count} points is too many to enumerate")));
    }
    let mut points = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut v = vec![Fq::ZERO; r * n];
        let mut rest = idx;
        for b in &ker {
            let c = fq.elem((rest % fq.q() as u64) as u32);
            rest /= fq.q() as u64;
            for (x, y) in v.iter_mut().zip(b) {
                *x = fq.add(*x, fq.mul(c, *y));
            }
        }
        points.push(v.chunks(n).map(|c| field.from_coords(c)).collect::<Vec<APoly>>());
    }
    points.sort();
    Ok((field, emb, points))
}

/// Points of Gr(S) over the degree-m extension: P^T χ = χ^[q].
pub fn points(s: &VSheaf<ResidueRing>, ext: usize) -> Result<PointSet> {
    let (field, embedding, points) = frobenius_fixed_points(s.ring(), &linalg::transpose(s.p()), ext)?;
    let action = embed_matrix(&embedding, &linalg::transpose(s.psi()));
    Ok(PointSet { field, embedding, points, action })
}

/// Points of the dual over the degree-m extension: V x = x^[q], with t
/// acting through Psi.
pub fn dual_points(s: &VSheaf<ResidueRing>, ext: usize) -> Result<PointSet> {
    let (field, embedding, points) = frobenius_fixed_points(s.ring(), s.v(), ext)?;
    let action = embed_matrix(&embedding, s.psi());
    Ok(PointSet { field, embedding, points, action })
}

fn embed_matrix(emb: &Embedding, m: &Matrix<APoly>) -> Matrix<APoly> {
    m.iter().map(|row| row.iter().map(|x| emb.apply(x)).collect()).collect()
}

impl PointSet {
    /// b(t) applied to a point.
    pub fn act(&self, b: &APoly, x: &[APoly]) -> Vec<APoly> {
        let f = &self.field;
        let mut acc: Vec<APoly> = vec![f.zero(); x.len()];
        for c in b.coeffs().iter().rev() {
            acc = linalg::mat_vec(f, &self.action, &acc);
            for (a, xi) in acc.iter_mut().zip(x) {
                *a = f.add(a, &f.mul(&APoly::constant(*c), xi));
            }
        }
        acc
    }

    /// Whether the points form a free A/(n)-module of rank one.
    pub fn is_free_rank_one(&self, n: &APoly) -> bool {
        let a = self.field.poly_ring();
        let size = (a.fq().q() as u64).pow(n.deg0() as u32);
        if self.points.len() as u64 != size {
            return false;
        }
        if !self.points.iter().all(|x| self.act(n, x).iter().all(|c| c.is_zero())) {
            return false;
        }
        self.points.iter().any(|g| {
            let mut orbit: Vec<Vec<APoly>> = a.below_degree(n.deg0()).map(|b| self.act(&b, g)).collect();
            orbit.sort();
            orbit.dedup();
            orbit == self.points
        })
    }
}

/// The class of a dual point in coker(P).
#[derive(Clone, Debug, PartialEq)]
pub struct CokerClass {
    pub normal_form: Vec<APoly>,
    pub coker_dim: usize,
}

impl CokerClass {
    pub fn is_zero(&self) -> bool {
        self.normal_form.iter().all(|x| x.is_zero())
    }
}

/// The Hodge-Tate-Taguchi image of a verified dual point x.
pub fn htt_evaluate(s: &VSheaf<ResidueRing>, set: &PointSet, x: &[APoly]) -> Result<CokerClass> {
    let f = &set.field;
    let v = embed_matrix(&set.embedding, s.v());
    let lhs = linalg::mat_vec(f, &v, x);
    let rhs: Vec<APoly> = x.iter().map(|c| f.frobenius(c)).collect();
    if x.len() != s.rank() || lhs != rhs {
        return Err(Error::InvalidInput("not a dual point".into()));
    }
    let p = embed_matrix(&set.embedding, s.p());
    let (normal_form, coker_dim) = linalg::reduce_mod_columns(f, &p, x);
    Ok(CokerClass { normal_form, coker_dim })
}

/// F-dimension of the span of the HTT classes of all dual points.
pub fn htt_image_dim(s: &VSheaf<ResidueRing>, set: &PointSet) -> Result<usize> {
    let classes: Vec<Vec<APoly>> = set
        .points
        .iter()
        .map(|x| htt_evaluate(s, set, x).map(|c| c.normal_form))
        .collect::<Result<_>>()?;
    Ok(linalg::rank(&set.field, &classes))
}
