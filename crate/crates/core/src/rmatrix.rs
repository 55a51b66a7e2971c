//! The quasi-R-matrix `R̂ = q^{-h⊗h} R` and `F = (R̂ - 1)/(q - q^{-1})`
//! on `V ⊗ M_λ`, solved degree by degree from the intertwining relation.
//!
//! Second-leg entries are elements of `U_q(n_-)`. They are stored through
//! their action on the highest vector, i.e. as coordinates on the word
//! basis of a Verma module, and applied to other vectors word by word.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, SVec};
use crate::rootsys::RootSystem;
use crate::scalars::Field;
use crate::uqmodules::{Direction, WeightModule};

#[derive(Clone, Debug, Serialize)]
pub struct TensorEntry<E> {
    /// `ε_i - ε_j`.
    pub mu: Vec<i64>,
    /// The second-leg element applied to `1_λ`, on the Verma word basis.
    pub coords: SVec<E>,
}

/// `Σ e_{ij} ⊗ Y_{ij}` with `Y_{ij}` of weight `-(ε_i - ε_j)`.
#[derive(Clone, Debug)]
pub struct GradedTensorOperator<E> {
    pub words: Vec<Vec<u8>>,
    pub max_height: usize,
    pub entries: BTreeMap<(usize, usize), TensorEntry<E>>,
}

impl<E: Clone> GradedTensorOperator<E> {
    pub fn get(&self, i: usize, j: usize) -> Option<&SVec<E>> {
        self.entries.get(&(i, j)).map(|e| &e.coords)
    }

    /// Entries grouped by `μ`, in order of height.
    pub fn components(&self) -> BTreeMap<(i64, Vec<i64>), Vec<(usize, usize)>> {
        let mut out: BTreeMap<(i64, Vec<i64>), Vec<(usize, usize)>> = BTreeMap::new();
        for (k, e) in &self.entries {
            out.entry((RootSystem::height(&e.mu), e.mu.clone())).or_default().push(*k);
        }
        out
    }

    /// Entries `(r, Y)` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &SVec<E>)> {
        self.entries.range((i, 0)..(i + 1, 0)).map(|((_, r), e)| (*r, &e.coords))
    }

    /// Entries `(l, Y)` of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, &SVec<E>)> + '_ {
        self.entries.iter().filter(move |((_, c), _)| *c == j).map(|((l, _), e)| (*l, &e.coords))
    }
}

/// Applies an element given by word coordinates to a vector of `m`.
pub fn apply_element<F: Field>(
    m: &WeightModule<F>,
    words: &[Vec<u8>],
    coords: &SVec<F::Elem>,
    b: &SVec<F::Elem>,
) -> Result<SVec<F::Elem>> {
    let f = &m.field;
    let mut pairs = Vec::new();
    for (w, c) in coords {
        for (k, x) in m.apply_word(&words[*w], false, b)? {
            pairs.push((k, f.mul(c, &x)));
        }
    }
    Ok(linalg::svec_from_pairs(f, pairs))
}

fn is_positive(mu: &[i64]) -> bool {
    mu.iter().all(|&x| x >= 0) && mu.iter().any(|&x| x > 0)
}

/// `π(e_a)` of `v` as rows: `rows[a][i]` lists `(l, π_{il})`.
pub(crate) fn e_rows<F: Field>(v: &WeightModule<F>) -> Vec<Vec<Vec<(usize, F::Elem)>>> {
    let mut rows = vec![vec![Vec::new(); v.dim()]; v.rank()];
    for (a, cols) in v.e.iter().enumerate() {
        for (l, col) in cols.iter().enumerate() {
            for (i, x) in col {
                rows[a][*i].push((l, x.clone()));
            }
        }
    }
    rows
}

/// Pairs `(i, j)` of `v` with `ε_i - ε_j` positive of height at most `max_height`.
pub(crate) fn comparable_pairs<F: Field>(
    v: &WeightModule<F>,
    max_height: usize,
) -> BTreeMap<(i64, Vec<i64>), Vec<(usize, usize)>> {
    let mut groups: BTreeMap<(i64, Vec<i64>), Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..v.dim() {
        for j in 0..v.dim() {
            let mu: Vec<i64> = v.offsets[i].iter().zip(&v.offsets[j]).map(|(a, b)| a - b).collect();
            let h = RootSystem::height(&mu);
            if is_positive(&mu) && h as usize <= max_height {
                groups.entry((h, mu)).or_default().push((i, j));
            }
        }
    }
    groups
}

/// Stacked raising maps on the Verma weight space `-μ`, reduced to a square
/// invertible system.
struct RaisingSystem<E> {
    /// Target ranges per simple root (empty when `μ - α ∉ Γ^+`).
    targets: Vec<std::ops::Range<usize>>,
    /// Full stacked matrix, rows ordered by root then target index.
    full: Mat<E>,
    rows: Vec<usize>,
    inverse: Mat<E>,
    start: usize,
}

fn raising_system<F: Field>(m: &WeightModule<F>, mu: &[i64]) -> Result<RaisingSystem<F::Elem>> {
    let f = &m.field;
    let space = m.space(&m.offset_at_depth(mu));
    let n = space.len();
    let mut targets = Vec::new();
    let mut full: Mat<F::Elem> = Vec::new();
    for a in 0..m.rank() {
        if mu[a] == 0 {
            targets.push(0..0);
            continue;
        }
        let mut up = mu.to_vec();
        up[a] -= 1;
        let t = m.space(&m.offset_at_depth(&up));
        let base = full.len();
        full.extend((0..t.len()).map(|_| vec![f.zero(); n]));
        for (c, idx) in space.clone().enumerate() {
            for (k, x) in m.apply_e(a, &m.unit(idx))? {
                full[base + k - t.start][c] = x;
            }
        }
        targets.push(t);
    }
    let rows = linalg::independent_rows(f, &full)?;
    if rows.len() != n {
        return Err(Error::Singular(format!("raising maps not injective on weight {mu:?}")));
    }
    let square: Mat<F::Elem> = rows.iter().map(|&r| full[r].clone()).collect();
    let inverse = linalg::inverse(f, &square)?;
    Ok(RaisingSystem { targets, full, rows, inverse, start: space.start })
}

/// `R̂` on `V ⊗ M` up to `max_height`; `m` must be a Verma module deep enough.
pub fn quasi_r<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    max_height: usize,
) -> Result<GradedTensorOperator<F::Elem>> {
    if m.direction != Direction::Lowering || m.words.len() != m.dim() {
        return Err(Error::Unsupported("the second leg must be a Verma module with a word basis".into()));
    }
    if max_height > m.cutoff {
        return Err(Error::Truncation(format!("height {max_height} exceeds the Verma truncation {}", m.cutoff)));
    }
    let f = &m.field;
    let rs = &m.rs;
    let rows = e_rows(v);
    let highest = m.space(&vec![0; m.rank()]).start;
    let mut entries: BTreeMap<(usize, usize), TensorEntry<F::Elem>> = BTreeMap::new();
    for i in 0..v.dim() {
        entries.insert((i, i), TensorEntry { mu: vec![0; v.rank()], coords: vec![(highest, f.one())] });
    }
    for ((_, mu), pairs) in comparable_pairs(v, max_height) {
        let sys = raising_system(m, &mu)?;
        let solved: Result<Vec<_>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut rhs: Vec<F::Elem> = vec![f.zero(); sys.full.len()];
                let mut offset = 0;
                for (a, t) in sys.targets.iter().enumerate() {
                    if t.is_empty() {
                        continue;
                    }
                    let alpha = rs.simple(a);
                    let mut prev = mu.clone();
                    prev[a] -= 1;
                    // q^{(λ,α)} on 1_λ, q^{-(λ-μ+α, α)} on the image of Y'
                    let up = f.monomial(&m.pair(highest, &alpha));
                    let down =
                        f.monomial(&m.weight_of_offset(&m.offset_at_depth(&prev)).pair_root(rs, &alpha).scale(-1));
                    let mut terms = Vec::new();
                    for (r, x) in &v.e[a][j] {
                        if let Some(e) = entries.get(&(i, *r)) {
                            terms.push((f.mul(x, &up), &e.coords));
                        }
                    }
                    for (l, x) in &rows[a][i] {
                        if let Some(e) = entries.get(&(*l, j)) {
                            terms.push((f.neg(&f.mul(x, &down)), &e.coords));
                        }
                    }
                    for (k, c) in linalg::combine(f, &terms) {
                        rhs[offset + k - t.start] = c;
                    }
                    offset += t.len();
                }
                let reduced: Vec<F::Elem> = sys.rows.iter().map(|&r| rhs[r].clone()).collect();
                let y = linalg::mat_vec(f, &sys.inverse, &reduced);
                let check = linalg::mat_vec(f, &sys.full, &y);
                if check.iter().zip(&rhs).any(|(a, b)| !f.is_zero(&f.sub(a, b))) {
                    return Err(Error::Inconsistent(format!(
                        "no solution for the ({}, {}) entry at weight {mu:?}",
                        v.labels[i], v.labels[j]
                    )));
                }
                let coords: SVec<F::Elem> =
                    y.into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).map(|(k, c)| (sys.start + k, c)).collect();
                Ok(((i, j), coords))
            })
            .collect();
        for (key, coords) in solved? {
            entries.insert(key, TensorEntry { mu: mu.clone(), coords });
        }
    }
    Ok(GradedTensorOperator { words: m.words.clone(), max_height, entries })
}

/// `F = (R̂ - 1 ⊗ 1)/(q - q^{-1})`; the degree-zero part is dropped.
pub fn f_tensor<F: Field>(f: &F, rhat: &GradedTensorOperator<F::Elem>) -> Result<GradedTensorOperator<F::Elem>> {
    let s = f.inv(&f.q_diff())?;
    let entries = rhat
        .entries
        .iter()
        .filter(|((i, j), _)| i != j)
        .filter(|(_, e)| !e.coords.is_empty())
        .map(|(k, e)| (*k, TensorEntry { mu: e.mu.clone(), coords: linalg::scale(f, &s, &e.coords) }))
        .collect();
    Ok(GradedTensorOperator { words: rhat.words.clone(), max_height: rhat.max_height, entries })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `[1⊗e_α, F] + (e_α⊗q^{-h_α})F - F(e_α⊗q^{h_α}) = e_α⊗[h_α]_q`
/// on every `v_j ⊗ b` and every output row `i` whose entries stay inside
/// both truncations.
pub fn key_id_check<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    ftensor: &GradedTensorOperator<F::Elem>,
) -> Result<IdentityReport> {
    let f = &m.field;
    let rs = &m.rs;
    let rows = e_rows(v);
    let words = &ftensor.words;
    let mu_of =
        |i: usize, j: usize| -> Vec<i64> { v.offsets[i].iter().zip(&v.offsets[j]).map(|(a, b)| a - b).collect() };
    let mut jobs = Vec::new();
    for a in 0..v.rank() {
        for j in 0..v.dim() {
            for b in 0..m.dim() {
                jobs.push((a, j, b));
            }
        }
    }
    let results: Result<Vec<(usize, Vec<String>)>> = jobs
        .par_iter()
        .map(|&(a, j, b)| {
            let alpha = rs.simple(a);
            let room = m.cutoff.saturating_sub(m.levels[b]).min(ftensor.max_height);
            let fits = |i: usize| {
                let mu = mu_of(i, j);
                mu.iter().all(|&x| x >= 0) && RootSystem::height(&mu) as usize <= room
            };
            let bv = m.unit(b);
            let eb = m.apply_e(a, &bv)?;
            let wt_b = m.pair(b, &alpha);
            let mut out: BTreeMap<usize, Vec<(usize, F::Elem)>> = BTreeMap::new();
            let mut push = |i: usize, s: F::Elem, x: SVec<F::Elem>| {
                let dst = out.entry(i).or_default();
                for (k, c) in x {
                    dst.push((k, f.mul(&s, &c)));
                }
            };
            for (i, _) in v.offsets.iter().enumerate() {
                if !fits(i) {
                    continue;
                }
                if let Some(y) = ftensor.get(i, j) {
                    let fb = apply_element(m, words, y, &bv)?;
                    push(i, f.one(), m.apply_e(a, &fb)?);
                    push(i, f.int(-1), apply_element(m, words, y, &eb)?);
                }
                for (l, x) in &rows[a][i] {
                    if let Some(y) = ftensor.get(*l, j) {
                        let fb = apply_element(m, words, y, &bv)?;
                        let mu = mu_of(*l, j);
                        let shifted: Vec<i64> = m.offsets[b].iter().zip(&mu).map(|(o, d)| o - d).collect();
                        let k = f.monomial(&m.weight_of_offset(&shifted).pair_root(rs, &alpha).scale(-1));
                        push(i, f.mul(x, &k), fb);
                    }
                }
                let k = f.monomial(&wt_b);
                for (r, x) in &v.e[a][j] {
                    if let Some(y) = ftensor.get(i, *r) {
                        push(i, f.neg(&f.mul(x, &k)), apply_element(m, words, y, &bv)?);
                    }
                }
            }
            let hq = f.q_int(&wt_b);
            for (i, x) in &v.e[a][j] {
                if fits(*i) {
                    push(*i, f.neg(&f.mul(x, &hq)), bv.clone());
                }
            }
            let mut failures = Vec::new();
            for (i, pairs) in out {
                if !linalg::svec_from_pairs(f, pairs).is_empty() {
                    failures.push(format!(
                        "alpha {} on {} ⊗ {} at row {}",
                        a + 1,
                        v.labels[j],
                        m.labels[b],
                        v.labels[i]
                    ));
                }
            }
            Ok((1, failures))
        })
        .collect();
    let mut report = IdentityReport::default();
    for (n, fails) in results? {
        report.checked += n;
        report.failures.extend(fails);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::scalars::{AffineExponent, SymbolicField};
    use crate::uqmodules::{dual_verma_truncated, finite_dim_module, verma_truncated};

    fn setup(name: &str) -> (SymbolicField, Arc<RootSystem>) {
        let rs = RootSystem::parse(name).unwrap();
        (SymbolicField::new(rs.rank), Arc::new(rs))
    }

    #[test]
    fn a1_matches_q_exponential() {
        let (f, rs) = setup("A1");
        let n = 6;
        let v = dual_verma_truncated(&f, &rs, n).unwrap();
        let m = verma_truncated(&f, &rs, n).unwrap();
        let rhat = quasi_r(&v, &m, n).unwrap();
        let mut fact = f.one();
        for k in 1..=n {
            fact = f.mul(&fact, &f.q_int(&AffineExponent::constant(k as i64)));
            let c = f.mul(
                &f.monomial(&AffineExponent::constant((k * (k - 1) / 2) as i64)),
                &f.div(&(0..k).fold(f.one(), |acc, _| f.mul(&acc, &f.q_diff())), &fact).unwrap(),
            );
            for j in 0..=(n - k) {
                let i = j + k;
                let ek = v.apply_word(&vec![0; k], true, &v.unit(j)).unwrap();
                let pi = linalg::coeff(&ek, i).unwrap();
                assert_eq!(rhat.get(i, j).unwrap(), &vec![(k, f.mul(&c, pi))], "k = {k}");
            }
        }
    }

    #[test]
    fn degree_one_is_classical() {
        let (f, rs) = setup("A2");
        let v = finite_dim_module(&f, &rs, &[1, 0]).unwrap();
        let m = verma_truncated(&f, &rs, 2).unwrap();
        let ft = f_tensor(&f, &quasi_r(&v, &m, 2).unwrap()).unwrap();
        // f_{10} = π(e_1)_{01} f_1 on the natural module
        let idx = |l: &str| m.labels.iter().position(|x| x == l).unwrap();
        assert_eq!(ft.get(0, 1).unwrap(), &vec![(idx("f1"), f.one())]);
        assert_eq!(ft.get(1, 2).unwrap(), &vec![(idx("f2"), f.one())]);
        assert!(ft.get(2, 0).is_none());
    }

    #[test]
    fn intertwining_identity() {
        for (name, labels, cutoff) in
            [("A1", vec![1], 3), ("A1", vec![2], 3), ("A2", vec![1, 0], 3), ("B2", vec![1, 0], 3)]
        {
            let (f, rs) = setup(name);
            let v = finite_dim_module(&f, &rs, &labels).unwrap();
            let m = verma_truncated(&f, &rs, cutoff).unwrap();
            let ft = f_tensor(&f, &quasi_r(&v, &m, cutoff).unwrap()).unwrap();
            let report = key_id_check(&v, &m, &ft).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.failures);
        }
        let (f, rs) = setup("A2");
        let v = dual_verma_truncated(&f, &rs, 2).unwrap();
        let m = verma_truncated(&f, &rs, 3).unwrap();
        let ft = f_tensor(&f, &quasi_r(&v, &m, 2).unwrap()).unwrap();
        assert!(key_id_check(&v, &m, &ft).unwrap().passed());
    }

    #[test]
    fn perturbed_f_breaks_the_identity() {
        let (f, rs) = setup("A1");
        let v = finite_dim_module(&f, &rs, &[2]).unwrap();
        let m = verma_truncated(&f, &rs, 3).unwrap();
        let mut ft = f_tensor(&f, &quasi_r(&v, &m, 3).unwrap()).unwrap();
        let e = ft.entries.get_mut(&(0, 2)).unwrap();
        e.coords = linalg::scale(&f, &f.q(), &e.coords);
        assert!(!key_id_check(&v, &m, &ft).unwrap().passed());
    }
}
