//! Hasse diagram of a weight basis, routes, A-coefficients and the matrix
//! `F̂` assembled as a sum over routes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{self, SVec};
use crate::rmatrix::{apply_element, GradedTensorOperator};
use crate::rootsys::{RootSystem, Weight};
use crate::scalars::Field;
use crate::uqmodules::WeightModule;

#[derive(Clone, Debug, Serialize)]
pub struct Arrow<E> {
    /// Upper node `l` of the simple pair `(l, r)`.
    pub to: usize,
    pub from: usize,
    /// 0-based simple root index.
    pub root: usize,
    pub scalar: E,
}

#[derive(Clone, Debug)]
pub struct RouteDiagram<E> {
    pub labels: Vec<String>,
    pub offsets: Vec<Vec<i64>>,
    pub arrows: Vec<Arrow<E>>,
    /// `above[i][j]` iff `i ≻ j`.
    pub above: Vec<Vec<bool>>,
}

impl<E> RouteDiagram<E> {
    pub fn succ(&self, i: usize, j: usize) -> bool {
        self.above[i][j]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn height_between(&self, i: usize, j: usize) -> i64 {
        RootSystem::height(&self.offsets[i]) - RootSystem::height(&self.offsets[j])
    }

    /// Length (number of arrows) of the longest chain.
    pub fn longest_path(&self) -> usize {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| RootSystem::height(&self.offsets[i]));
        let mut best = vec![0usize; n];
        for &i in &order {
            for a in &self.arrows {
                if a.to == i {
                    best[i] = best[i].max(best[a.from] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }
}

/// Arrows from nonzero entries of `π(e_α)` between simple pairs, and `≻`
/// as their transitive closure.
pub fn hasse<F: Field>(v: &WeightModule<F>) -> RouteDiagram<F::Elem> {
    let n = v.dim();
    let mut arrows = Vec::new();
    for (a, cols) in v.e.iter().enumerate() {
        for (r, col) in cols.iter().enumerate() {
            for (l, x) in col {
                arrows.push(Arrow { to: *l, from: r, root: a, scalar: x.clone() });
            }
        }
    }
    arrows.sort_by_key(|a| (a.to, a.from, a.root));
    let mut above = vec![vec![false; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| RootSystem::height(&v.offsets[i]));
    // process upper nodes in increasing height so lower rows are complete
    for &i in &order {
        for a in arrows.iter().filter(|a| a.to == i) {
            above[i][a.from] = true;
            let below = above[a.from].clone();
            for (k, b) in below.into_iter().enumerate() {
                if b {
                    above[i][k] = true;
                }
            }
        }
    }
    RouteDiagram { labels: v.labels.clone(), offsets: v.offsets.clone(), arrows, above }
}

/// All chains `i = m_1 ≻ m_2 ≻ … ≻ m_k ≻ j`, listed as `[m_1, …, m_k, j]`;
/// `i = j` gives the trivial route `[j]`.
pub fn routes<E>(d: &RouteDiagram<E>, i: usize, j: usize) -> Vec<Vec<usize>> {
    if i == j {
        return vec![vec![j]];
    }
    if !d.succ(i, j) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut stack = vec![i];
    extend_routes(d, j, &mut stack, &mut out);
    out
}

fn extend_routes<E>(d: &RouteDiagram<E>, j: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let top = *stack.last().expect("nonempty");
    let mut route = stack.clone();
    route.push(j);
    out.push(route);
    for m in 0..d.len() {
        if m != j && d.succ(top, m) && d.succ(m, j) {
            stack.push(m);
            extend_routes(d, j, stack, out);
            stack.pop();
        }
    }
}

/// `A^j_i = φ(-η_μ)` with `μ = ε_i - ε_j`, evaluated at `base`.
pub fn a_coeff<F: Field>(f: &F, rs: &RootSystem, mu: &[i64], base: &Weight) -> Result<F::Elem> {
    f.phi(&rs.eta(mu, base).scale(-1))
}

/// Columns `j ↦ (i ↦ f̂_{ij} 1_λ)` of `F̂`, valid for `ht(ε_i - ε_j)` up to
/// `height_limit`.
#[derive(Clone, Debug)]
pub struct FHatMatrix<E> {
    pub height_limit: usize,
    pub columns: BTreeMap<usize, BTreeMap<usize, SVec<E>>>,
}

impl<E> FHatMatrix<E> {
    pub fn get(&self, i: usize, j: usize) -> Option<&SVec<E>> {
        self.columns.get(&j).and_then(|c| c.get(&i))
    }
}

pub(crate) fn mu_between<F: Field>(v: &WeightModule<F>, i: usize, j: usize) -> Vec<i64> {
    v.offsets[i].iter().zip(&v.offsets[j]).map(|(a, b)| a - b).collect()
}

pub(crate) fn height_limit<F: Field>(m: &WeightModule<F>, ft: &GradedTensorOperator<F::Elem>) -> usize {
    m.cutoff.min(ft.max_height)
}

/// One column, memoized over route suffixes:
/// `X(j) = 1_λ`, `X(i) = A^j_i Σ_{i ≻ m ⪰ j} f_{im} X(m)`.
pub fn fhat_column<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    ft: &GradedTensorOperator<F::Elem>,
    d: &RouteDiagram<F::Elem>,
    j: usize,
) -> Result<BTreeMap<usize, SVec<F::Elem>>> {
    let f = &m.field;
    let limit = height_limit(m, ft) as i64;
    let mut nodes: Vec<usize> = (0..v.dim()).filter(|&i| d.succ(i, j) && d.height_between(i, j) <= limit).collect();
    nodes.sort_by_key(|&i| (d.height_between(i, j), i));
    let highest = m.space(&vec![0; m.rank()]).start;
    let mut x: BTreeMap<usize, SVec<F::Elem>> = BTreeMap::new();
    x.insert(j, vec![(highest, f.one())]);
    for i in nodes {
        let mut terms = Vec::new();
        for (k, xk) in &x {
            if *k != j && !d.succ(i, *k) {
                continue;
            }
            if let Some(y) = ft.get(i, *k) {
                terms.push(apply_element(m, &ft.words, y, xk)?);
            }
        }
        let sum = terms.iter().fold(Vec::new(), |acc, t| linalg::add(f, &acc, t));
        let a = a_coeff(f, &m.rs, &mu_between(v, i, j), &m.base)?;
        x.insert(i, linalg::scale(f, &a, &sum));
    }
    x.retain(|_, val| !val.is_empty());
    Ok(x)
}

pub fn fhat_matrix<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    ft: &GradedTensorOperator<F::Elem>,
    columns: &[usize],
) -> Result<FHatMatrix<F::Elem>> {
    let d = hasse(v);
    let cols: Result<Vec<_>> = columns.par_iter().map(|&j| fhat_column(v, m, ft, &d, j).map(|c| (j, c))).collect();
    Ok(FHatMatrix { height_limit: height_limit(m, ft), columns: cols?.into_iter().collect() })
}

#[derive(Clone, Debug, Serialize)]
pub struct RouteTerm<E> {
    pub route: Vec<String>,
    /// `Π A^j_m` over the route nodes above `j`.
    pub weight: E,
    pub vector: SVec<E>,
}

/// `f̂_{ij} 1_λ` by explicit enumeration of routes, with the contribution of
/// each route.
pub fn fhat_entry_by_routes<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    ft: &GradedTensorOperator<F::Elem>,
    d: &RouteDiagram<F::Elem>,
    i: usize,
    j: usize,
) -> Result<(SVec<F::Elem>, Vec<RouteTerm<F::Elem>>)> {
    let f = &m.field;
    let highest = m.space(&vec![0; m.rank()]).start;
    let mut total = Vec::new();
    let mut terms = Vec::new();
    for route in routes(d, i, j) {
        let mut vec = vec![(highest, f.one())];
        let mut weight = f.one();
        for w in route.windows(2).rev() {
            let y = match ft.get(w[0], w[1]) {
                Some(y) => y,
                None => {
                    vec.clear();
                    break;
                }
            };
            vec = apply_element(m, &ft.words, y, &vec)?;
            weight = f.mul(&weight, &a_coeff(f, &m.rs, &mu_between(v, w[0], j), &m.base)?);
        }
        let vec = linalg::scale(f, &weight, &vec);
        total = linalg::add(f, &total, &vec);
        terms.push(RouteTerm { route: route.iter().map(|&k| v.labels[k].clone()).collect(), weight, vector: vec });
    }
    Ok((total, terms))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::rmatrix::{f_tensor, quasi_r};
    use crate::scalars::{AffineExponent, SymbolicField};
    use crate::uqmodules::{finite_dim_module, verma_truncated};

    fn natural(name: &str, labels: &[i64]) -> (SymbolicField, WeightModule<SymbolicField>) {
        let rs = Arc::new(RootSystem::parse(name).unwrap());
        let f = SymbolicField::new(rs.rank);
        let v = finite_dim_module(&f, &rs, labels).unwrap();
        (f, v)
    }

    #[test]
    fn diagrams() {
        let (_, v) = natural("A1", &[1]);
        let d = hasse(&v);
        assert_eq!(d.arrows.len(), 1);
        assert_eq!((d.arrows[0].to, d.arrows[0].from), (0, 1));
        assert_eq!(d.longest_path(), 1);

        let (_, v) = natural("A2", &[1, 0]);
        let d = hasse(&v);
        let roots: Vec<usize> = d.arrows.iter().map(|a| a.root).collect();
        assert_eq!(roots, vec![0, 1]);
        assert!(d.succ(0, 2) && !d.succ(2, 0));
        assert_eq!(routes(&d, 0, 2), vec![vec![0, 2], vec![0, 1, 2]]);
        assert_eq!(routes(&d, 1, 2), vec![vec![1, 2]]);
        assert_eq!(routes(&d, 2, 2), vec![vec![2]]);
        assert!(routes(&d, 2, 0).is_empty());

        let (_, v) = natural("A2", &[0, 0]);
        assert!(hasse(&v).arrows.is_empty());
    }

    #[test]
    fn route_counts_match_brute_force() {
        // every subset of intermediate nodes that is a chain gives one route
        let (_, v) = natural("A2", &[1, 1]);
        let d = hasse(&v);
        for i in 0..d.len() {
            for j in 0..d.len() {
                if !d.succ(i, j) {
                    continue;
                }
                let between: Vec<usize> = (0..d.len()).filter(|&m| d.succ(i, m) && d.succ(m, j)).collect();
                let chains = (0u32..1 << between.len())
                    .filter(|mask| {
                        let set: Vec<usize> =
                            (0..between.len()).filter(|b| mask >> b & 1 == 1).map(|b| between[b]).collect();
                        set.iter().all(|&x| set.iter().all(|&y| x == y || d.succ(x, y) || d.succ(y, x)))
                    })
                    .count();
                assert_eq!(routes(&d, i, j).len(), chains);
            }
        }
    }

    #[test]
    fn a1_natural_entry() {
        let (f, v) = natural("A1", &[1]);
        let m = verma_truncated(&f, &v.rs, 2).unwrap();
        let ft = f_tensor(&f, &quasi_r(&v, &m, 1).unwrap()).unwrap();
        let fh = fhat_matrix(&v, &m, &ft, &[1]).unwrap();
        // f̂_{10} 1_λ = -q^z/[z] f 1_λ
        let z = AffineExponent::lambda_simple(0);
        let expected = f.neg(&f.div(&f.monomial(&z), &f.q_int(&z)).unwrap());
        assert_eq!(fh.get(0, 1).unwrap(), &vec![(1, expected)]);
        assert_eq!(fh.get(1, 1).unwrap(), &vec![(0, f.one())]);
    }

    #[test]
    fn explicit_routes_agree_with_memoized() {
        let (f, v) = natural("A2", &[1, 1]);
        let m = verma_truncated(&f, &v.rs, 4).unwrap();
        let ft = f_tensor(&f, &quasi_r(&v, &m, 4).unwrap()).unwrap();
        let d = hasse(&v);
        let j = v.dim() - 1;
        let col = fhat_column(&v, &m, &ft, &d, j).unwrap();
        for i in 0..v.dim() {
            if !d.succ(i, j) || d.height_between(i, j) > 4 {
                continue;
            }
            let (total, _) = fhat_entry_by_routes(&v, &m, &ft, &d, i, j).unwrap();
            assert_eq!(col.get(&i).cloned().unwrap_or_default(), total);
        }
    }

    #[test]
    fn eta_shift() {
        let rs = RootSystem::parse("A2").unwrap();
        let f = SymbolicField::new(2);
        let w = Weight { lambda: 1, numeric: vec![0, 0], offset: vec![0, 0] };
        // η_{α1+α2}(λ) = (λ, α1+α2) + 1
        let a = a_coeff(&f, &rs, &[1, 1], &w).unwrap();
        let x = AffineExponent::new(1, &[1, 1]);
        assert_eq!(a, f.phi(&x.scale(-1)).unwrap());
    }
}
