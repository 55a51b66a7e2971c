//! Words in the Chevalley generators modulo the quantum Serre relations.
//!
//! A weight component of the free algebra is spanned by all words with a
//! given letter content. The graded Serre ideal is row-reduced with columns
//! in decreasing lexicographic order, so each relation rewrites its
//! lexicographically largest word; the remaining words form the basis.

use std::collections::HashMap;

use crate::error::Result;
use crate::rootsys::RootSystem;
use crate::scalars::{AffineExponent, Field};

/// All words with the given letter multiplicities, lexicographically
/// increasing.
pub fn words_of_content(content: &[i64]) -> Vec<Vec<u8>> {
    fn go(rest: &mut Vec<i64>, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if rest.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        for a in 0..rest.len() {
            if rest[a] > 0 {
                rest[a] -= 1;
                cur.push(a as u8);
                go(rest, cur, out);
                cur.pop();
                rest[a] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut content.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn content_of(word: &[u8], rank: usize) -> Vec<i64> {
    let mut c = vec![0; rank];
    for &a in word {
        c[a as usize] += 1;
    }
    c
}

#[derive(Clone, Debug)]
pub struct SerreElement<E> {
    pub i: usize,
    pub j: usize,
    pub content: Vec<i64>,
    pub terms: Vec<(Vec<u8>, E)>,
}

/// `[m]_{q^d}` as an element of the field.
fn q_int_scaled<F: Field>(f: &F, m: i64, d: i64) -> F::Elem {
    f.div(&f.q_int(&AffineExponent::constant(m * d)), &f.q_int(&AffineExponent::constant(d)))
        .expect("nonzero q-integer")
}

fn q_binomial<F: Field>(f: &F, n: i64, k: i64, d: i64) -> F::Elem {
    let mut acc = f.one();
    for t in 0..k {
        acc = f.mul(&acc, &q_int_scaled(f, n - t, d));
        acc = f.div(&acc, &q_int_scaled(f, t + 1, d)).expect("nonzero q-integer");
    }
    acc
}

/// `Σ_k (-1)^k [n choose k]_{q_i} x_i^{n-k} x_j x_i^k` with `n = 1 - a_ij`,
/// for every ordered pair `i ≠ j`.
pub fn serre_elements<F: Field>(f: &F, rs: &RootSystem) -> Vec<SerreElement<F::Elem>> {
    let mut out = Vec::new();
    for i in 0..rs.rank {
        for j in 0..rs.rank {
            if i == j {
                continue;
            }
            let n = 1 - rs.cartan[i][j];
            let d = rs.sym[i];
            let mut terms = Vec::new();
            for k in 0..=n {
                let mut c = q_binomial(f, n, k, d);
                if k % 2 == 1 {
                    c = f.neg(&c);
                }
                let mut w = vec![i as u8; (n - k) as usize];
                w.push(j as u8);
                w.extend(std::iter::repeat_n(i as u8, k as usize));
                terms.push((w, c));
            }
            let mut content = vec![0; rs.rank];
            content[i] = n;
            content[j] = 1;
            out.push(SerreElement { i, j, content, terms });
        }
    }
    out
}

/// Basis words of one weight component and the normal form of every word
/// (coordinates in that basis, local indices).
#[derive(Clone, Debug)]
pub(crate) struct Component<E> {
    pub basis: Vec<Vec<u8>>,
    pub normal_form: HashMap<Vec<u8>, Vec<(usize, E)>>,
}

pub(crate) fn component<F: Field>(
    f: &F,
    rs: &RootSystem,
    serre: &[SerreElement<F::Elem>],
    content: &[i64],
) -> Result<Component<F::Elem>> {
    let mut words = words_of_content(content);
    words.reverse(); // column 0 is the largest word
    let ncols = words.len();
    let col_of: HashMap<&[u8], usize> = words.iter().enumerate().map(|(c, w)| (w.as_slice(), c)).collect();
    // Echelon rows sorted by pivot, pivots normalized to one.
    let mut rows: Vec<(usize, Vec<F::Elem>)> = Vec::new();
    for s in serre {
        let rest: Vec<i64> = content.iter().zip(&s.content).map(|(a, b)| a - b).collect();
        if rest.iter().any(|&x| x < 0) {
            continue;
        }
        for left_content in sub_contents(&rest) {
            let right_content: Vec<i64> = rest.iter().zip(&left_content).map(|(a, b)| a - b).collect();
            let lefts = words_of_content(&left_content);
            let rights = words_of_content(&right_content);
            for u in &lefts {
                for w in &rights {
                    let mut row = vec![f.zero(); ncols];
                    for (t, c) in &s.terms {
                        let mut word = u.clone();
                        word.extend_from_slice(t);
                        word.extend_from_slice(w);
                        let col = col_of[word.as_slice()];
                        row[col] = f.add(&row[col], c);
                    }
                    insert_row(f, &mut rows, row)?;
                }
            }
        }
    }
    // Back substitution to reduced form.
    for k in (0..rows.len()).rev() {
        let (p, pivot_row) = rows[k].clone();
        for (_, row) in rows[..k].iter_mut() {
            if !f.is_zero(&row[p]) {
                let s = row[p].clone();
                for c in p..ncols {
                    if !f.is_zero(&pivot_row[c]) {
                        row[c] = f.sub(&row[c], &f.mul(&s, &pivot_row[c]));
                    }
                }
            }
        }
    }
    let pivots: Vec<usize> = rows.iter().map(|r| r.0).collect();
    let mut basis_cols: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    basis_cols.reverse(); // lexicographically increasing
    let local: HashMap<usize, usize> = basis_cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut normal_form = HashMap::with_capacity(ncols);
    for &c in &basis_cols {
        normal_form.insert(words[c].clone(), vec![(local[&c], f.one())]);
    }
    for (p, row) in &rows {
        let mut nf: Vec<(usize, F::Elem)> = Vec::new();
        for &c in &basis_cols {
            if !f.is_zero(&row[c]) {
                nf.push((local[&c], f.neg(&row[c])));
            }
        }
        nf.sort_by_key(|x| x.0);
        normal_form.insert(words[*p].clone(), nf);
    }
    let basis = basis_cols.iter().map(|&c| words[c].clone()).collect();
    debug_assert!(content.len() == rs.rank);
    Ok(Component { basis, normal_form })
}

fn insert_row<F: Field>(f: &F, rows: &mut Vec<(usize, Vec<F::Elem>)>, mut row: Vec<F::Elem>) -> Result<()> {
    for (p, existing) in rows.iter() {
        if f.is_zero(&row[*p]) {
            continue;
        }
        let s = row[*p].clone();
        for c in *p..row.len() {
            if !f.is_zero(&existing[c]) {
                row[c] = f.sub(&row[c], &f.mul(&s, &existing[c]));
            }
        }
    }
    let Some(p) = row.iter().position(|x| !f.is_zero(x)) else { return Ok(()) };
    let inv = f.inv(&row[p])?;
    for x in row.iter_mut().skip(p) {
        if !f.is_zero(x) {
            *x = f.mul(x, &inv);
        }
    }
    let at = rows.partition_point(|r| r.0 < p);
    rows.insert(at, (p, row));
    Ok(())
}

fn sub_contents(rest: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &r in rest {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (0..=r).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

pub(crate) fn word_content(word: &[u8], rank: usize) -> Vec<i64> {
    content_of(word, rank)
}
