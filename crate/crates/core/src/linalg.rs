//! Dense matrices over a ring; Gaussian elimination over fields.

use crate::ring::Ring;

/// Row-major matrix.
pub type Matrix<E> = Vec<Vec<E>>;

pub fn zeros<R: Ring>(r: &R, rows: usize, cols: usize) -> Matrix<R::Elem> {
    vec![vec![r.zero(); cols]; rows]
}

pub fn scalar<R: Ring>(r: &R, c: &R::Elem, n: usize) -> Matrix<R::Elem> {
    let mut m = zeros(r, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c.clone();
    }
    m
}

pub fn mul<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let inner = b.len();
    let cols = b.first().map_or(0, |row| row.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(r.zero(), |acc, k| r.add(&acc, &r.mul(&row[k], &b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn add<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| r.add(u, v)).collect())
        .collect()
}

pub fn transpose<E: Clone>(a: &Matrix<E>) -> Matrix<E> {
    let cols = a.first().map_or(0, |row| row.len());
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Entrywise q-power.
pub fn frobenius<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.iter().map(|row| row.iter().map(|x| r.frobenius(x)).collect()).collect()
}

pub fn mat_vec<R: Ring>(r: &R, a: &Matrix<R::Elem>, x: &[R::Elem]) -> Vec<R::Elem> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(r.zero(), |acc, (u, v)| r.add(&acc, &r.mul(u, v))))
        .collect()
}

pub fn is_zero<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> bool {
    a.iter().all(|row| row.iter().all(|x| r.is_zero(x)))
}

pub fn pow<R: Ring>(r: &R, a: &Matrix<R::Elem>, e: usize) -> Matrix<R::Elem> {
    let mut acc = scalar(r, &r.one(), a.len());
    for _ in 0..e {
        acc = mul(r, &acc, a);
    }
    acc
}

/// Reduced row echelon form over a field; returns the pivot columns.
pub fn rref<R: Ring>(r: &R, a: &mut Matrix<R::Elem>) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |row| row.len());
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&i| !r.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(pr, sel);
        let inv = r.inv(&a[pr][c]).expect("nonzero pivot in a field");
        for x in a[pr].iter_mut() {
            *x = r.mul(&inv, x);
        }
        for i in 0..rows {
            if i != pr && !r.is_zero(&a[i][c]) {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = r.mul(&f, &a[pr][j]);
                    a[i][j] = r.sub(&a[i][j], &t);
                }
            }
        }
        pivots.push(c);
        pr += 1;
    }
    pivots
}

pub fn rank<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> usize {
    rref(r, &mut a.clone()).len()
}

/// A basis of {x : a x = 0}.
pub fn kernel<R: Ring>(r: &R, a: &Matrix<R::Elem>, cols: usize) -> Vec<Vec<R::Elem>> {
    let mut m = a.clone();
    let pivots = rref(r, &mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![r.zero(); cols];
            v[f] = r.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = r.neg(&m[row][f]);
            }
            v
        })
        .collect()
}

/// Reduces `x` modulo the column space of `a`: returns the normal form
/// (zero exactly when x lies in the span) and the codimension.
pub fn reduce_mod_columns<R: Ring>(r: &R, a: &Matrix<R::Elem>, x: &[R::Elem]) -> (Vec<R::Elem>, usize) {
    // row-reduce the transpose: its rows span the column space
    let mut basis = transpose(a);
    let n = x.len();
    if basis.is_empty() {
        return (x.to_vec(), n);
    }
    let pivots = rref(r, &mut basis);
    let mut v = x.to_vec();
    for (row, &pc) in pivots.iter().enumerate() {
        if !r.is_zero(&v[pc]) {
            let f = v[pc].clone();
            for j in 0..n {
                let t = r.mul(&f, &basis[row][j]);
                v[j] = r.sub(&v[j], &t);
            }
        }
    }
    (v, n - pivots.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_arith::{Fq, FqField};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(entries in prop::collection::vec(0u32..5, 12)) {
            let f = FqField::new(5).unwrap();
            let a: Matrix<Fq> = entries.chunks(4).map(|c| c.iter().map(|&x| f.elem(x)).collect()).collect();
            let ker = kernel(&f, &a, 4);
            prop_assert_eq!(ker.len() + rank(&f, &a), 4);
            for v in ker {
                prop_assert!(mat_vec(&f, &a, &v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn columns_reduce_to_zero(entries in prop::collection::vec(0u32..3, 9), c in prop::collection::vec(0u32..3, 3)) {
            let f = FqField::new(3).unwrap();
            let a: Matrix<Fq> = entries.chunks(3).map(|r| r.iter().map(|&x| f.elem(x)).collect()).collect();
            let coeffs: Vec<Fq> = c.iter().map(|&x| f.elem(x)).collect();
            let x = mat_vec(&f, &a, &coeffs);
            let (red, codim) = reduce_mod_columns(&f, &a, &x);
            prop_assert!(red.iter().all(|v| v.is_zero()));
            prop_assert_eq!(codim, 3 - rank(&f, &a));
        }
    }
}
