//! Exact linear algebra over a [`Field`]: sparse vectors, small dense
//! blocks, fraction-free inversion and rank computations.

use crate::error::{Error, Result};
use crate::scalars::Field;

/// Sparse vector: `(index, coefficient)` pairs, indices strictly increasing,
/// no zero coefficients.
pub type SVec<E> = Vec<(usize, E)>;

/// Dense row-major matrix.
pub type Mat<E> = Vec<Vec<E>>;

pub fn svec_from_pairs<F: Field>(f: &F, mut pairs: Vec<(usize, F::Elem)>) -> SVec<F::Elem> {
    pairs.sort_by_key(|p| p.0);
    let mut out: SVec<F::Elem> = Vec::with_capacity(pairs.len());
    for (i, c) in pairs {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = f.add(acc, &c),
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !f.is_zero(c));
    out
}

/// `a + s·b`.
pub fn axpy<F: Field>(f: &F, a: &SVec<F::Elem>, s: &F::Elem, b: &SVec<F::Elem>) -> SVec<F::Elem> {
    if f.is_zero(s) || b.is_empty() {
        return a.clone();
    }
    let one = f.is_one(s);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else {
            let t = if one { b[j].1.clone() } else { f.mul(s, &b[j].1) };
            if i < a.len() && a[i].0 == b[j].0 {
                let v = f.add(&a[i].1, &t);
                if !f.is_zero(&v) {
                    out.push((a[i].0, v));
                }
                i += 1;
            } else {
                out.push((b[j].0, t));
            }
            j += 1;
        }
    }
    out
}

pub fn add<F: Field>(f: &F, a: &SVec<F::Elem>, b: &SVec<F::Elem>) -> SVec<F::Elem> {
    axpy(f, a, &f.one(), b)
}

pub fn sub<F: Field>(f: &F, a: &SVec<F::Elem>, b: &SVec<F::Elem>) -> SVec<F::Elem> {
    axpy(f, a, &f.int(-1), b)
}

pub fn scale<F: Field>(f: &F, s: &F::Elem, a: &SVec<F::Elem>) -> SVec<F::Elem> {
    if f.is_zero(s) {
        return Vec::new();
    }
    if f.is_one(s) {
        return a.clone();
    }
    a.iter().map(|(i, c)| (*i, f.mul(s, c))).collect()
}

/// Sum of `s_k · v_k`, accumulated without intermediate merges.
pub fn combine<F: Field>(f: &F, terms: &[(F::Elem, &SVec<F::Elem>)]) -> SVec<F::Elem> {
    let mut pairs = Vec::new();
    for (s, v) in terms {
        if f.is_zero(s) {
            continue;
        }
        for (i, c) in v.iter() {
            pairs.push((*i, f.mul(s, c)));
        }
    }
    svec_from_pairs(f, pairs)
}

pub fn coeff<E>(v: &SVec<E>, i: usize) -> Option<&E> {
    v.binary_search_by_key(&i, |p| p.0).ok().map(|k| &v[k].1)
}

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F::Elem> {
    (0..n).map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect()).collect()
}

pub fn mat_mul<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut acc = f.zero();
                    for (k, x) in row.iter().enumerate() {
                        if !f.is_zero(x) && !f.is_zero(&b[k][j]) {
                            acc = f.add(&acc, &f.mul(x, &b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<F: Field>(f: &F, a: &Mat<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| {
            let mut acc = f.zero();
            for (x, y) in row.iter().zip(v) {
                if !f.is_zero(x) && !f.is_zero(y) {
                    acc = f.add(&acc, &f.mul(x, y));
                }
            }
            acc
        })
        .collect()
}

pub fn is_identity<F: Field>(f: &F, a: &Mat<F::Elem>) -> bool {
    a.iter().enumerate().all(|(i, row)| {
        row.len() == a.len() && row.iter().enumerate().all(|(j, x)| if i == j { f.is_one(x) } else { f.is_zero(x) })
    })
}

/// Inverse by fraction-free Gauss–Jordan elimination (Bareiss). Rows are
/// first scaled to clear denominators so the elimination runs on
/// polynomials; every division in the loop is exact.
pub fn inverse<F: Field>(f: &F, a: &Mat<F::Elem>) -> Result<Mat<F::Elem>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m: Mat<F::Elem> = Vec::with_capacity(n);
    let mut row_scale = Vec::with_capacity(n);
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Unsupported("inverse of a non-square matrix".into()));
        }
        let s = f.clearing_factor(row);
        let mut r: Vec<F::Elem> = row.iter().map(|x| f.mul(&s, x)).collect();
        r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
        m.push(r);
        row_scale.push(s);
    }
    let mut prev = f.one();
    for k in 0..n {
        let p = (k..n).find(|&i| !f.is_zero(&m[i][k])).ok_or_else(|| Error::Singular(format!("pivot {k}")))?;
        m.swap(k, p);
        let pivot_row = m[k].clone();
        let pk = pivot_row[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let rk = row[k].clone();
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let t = f.mul(&pk, &row[j]);
                let t =
                    if f.is_zero(&rk) || f.is_zero(&pivot_row[j]) { t } else { f.sub(&t, &f.mul(&rk, &pivot_row[j])) };
                row[j] = f.div(&t, &prev)?;
            }
            row[k] = f.zero();
        }
        prev = pk;
    }
    // Now m[i][i] = det(scaled A) for every i.
    let det = m[n - 1][n - 1].clone();
    let dinv = f.inv(&det)?;
    let mut inv = vec![vec![f.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let x = &m[i][n + j];
            if !f.is_zero(x) {
                inv[i][j] = f.mul(&f.mul(x, &dinv), &row_scale[j]);
            }
        }
    }
    Ok(inv)
}

/// Determinant by Gaussian elimination with a sign-tracked pivot search.
pub fn det<F: Field>(f: &F, a: &Mat<F::Elem>) -> Result<F::Elem> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Unsupported("determinant of a non-square matrix".into()));
    }
    let mut m = a.clone();
    let mut acc = f.one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !f.is_zero(&m[i][k])) else { return Ok(f.zero()) };
        if p != k {
            m.swap(k, p);
            acc = f.neg(&acc);
        }
        let inv = f.inv(&m[k][k])?;
        acc = f.mul(&acc, &m[k][k]);
        let pivot_row = m[k].clone();
        for row in m.iter_mut().skip(k + 1) {
            if f.is_zero(&row[k]) {
                continue;
            }
            let s = f.mul(&row[k], &inv);
            for j in k..n {
                if !f.is_zero(&pivot_row[j]) {
                    row[j] = f.sub(&row[j], &f.mul(&s, &pivot_row[j]));
                }
            }
        }
    }
    Ok(acc)
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut Mat<F::Elem>) -> Result<Vec<usize>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !f.is_zero(&m[i][c])) else { continue };
        m.swap(r, p);
        let inv = f.inv(&m[r][c])?;
        for j in c..cols {
            m[r][j] = f.mul(&m[r][j], &inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || f.is_zero(&row[c]) {
                continue;
            }
            let s = row[c].clone();
            for j in c..cols {
                if !f.is_zero(&pivot_row[j]) {
                    row[j] = f.sub(&row[j], &f.mul(&s, &pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank<F: Field>(f: &F, m: &Mat<F::Elem>) -> Result<usize> {
    let mut c = m.clone();
    Ok(rref(f, &mut c)?.len())
}

/// Indices of a maximal linearly independent set of rows, chosen greedily in
/// order.
pub fn independent_rows<F: Field>(f: &F, m: &Mat<F::Elem>) -> Result<Vec<usize>> {
    let mut t: Mat<F::Elem> =
        (0..m.first().map_or(0, Vec::len)).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect();
    rref(f, &mut t)
}

/// Dense column of a sparse vector restricted to `range`.
pub fn dense_slice<F: Field>(f: &F, v: &SVec<F::Elem>, range: std::ops::Range<usize>) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); range.len()];
    for (i, c) in v {
        if range.contains(i) {
            out[i - range.start] = c.clone();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{AffineExponent, RatFunc, SymbolicField};

    #[test]
    fn symbolic_inverse() {
        let f = SymbolicField::new(1);
        let z = f.monomial(&AffineExponent::lambda_simple(0));
        let q = f.q();
        let a = vec![
            vec![z.clone(), f.one(), q.clone()],
            vec![f.q_int(&AffineExponent::new(1, &[1])), f.zero(), f.one()],
            vec![f.inv(&q).unwrap(), z.add(&q), f.int(3)],
        ];
        let inv = inverse(&f, &a).unwrap();
        assert!(is_identity(&f, &mat_mul(&f, &a, &inv)));
        assert!(is_identity(&f, &mat_mul(&f, &inv, &a)));
        let d = det(&f, &a).unwrap();
        assert_eq!(det(&f, &inv).unwrap(), f.inv(&d).unwrap());
    }

    #[test]
    fn singular_detected() {
        let f = SymbolicField::new(1);
        let z = RatFunc::var(1);
        let a = vec![vec![z.clone(), f.one()], vec![z.mul(&z), z.clone()]];
        assert!(matches!(inverse(&f, &a), Err(Error::Singular(_)) | Err(Error::DivisionByZero)));
        assert_eq!(rank(&f, &a).unwrap(), 1);
        assert!(f.is_zero(&det(&f, &a).unwrap()));
    }

    #[test]
    fn sparse_ops() {
        let f = SymbolicField::new(0);
        let a = vec![(0, f.int(1)), (3, f.int(2))];
        let b = vec![(3, f.int(-1)), (5, f.int(4))];
        let s = axpy(&f, &a, &f.int(2), &b);
        assert_eq!(s, vec![(0, f.int(1)), (5, f.int(8))]);
        assert_eq!(coeff(&s, 5), Some(&f.int(8)));
    }
}
