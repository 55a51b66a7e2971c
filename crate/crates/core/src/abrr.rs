//! The series `F̂ = Σ F^(k)`, `F^(k+1) = φ(D)(F F^(k))`, and the linear
//! identity `R̂ F̂ = q^{2⊗d} F̂ q^{-2⊗d}` on `V ⊗ M_λ`.
//!
//! `d` is never built. On an entry of weight `-μ` in the second leg,
//! `[d, ·]` is right multiplication by `-η_μ`, so `φ(D)` multiplies entry
//! `(i, j)` by `A^j_i = φ(-η_{ε_i - ε_j})` and conjugation by `q^{2⊗d}`
//! multiplies it by `q^{-2η_{ε_i - ε_j}}`, both evaluated on `1_λ`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, SVec};
use crate::rmatrix::{apply_element, GradedTensorOperator, IdentityReport};
use crate::rootsys::RootSystem;
use crate::routesum::{a_coeff, height_limit, mu_between, FHatMatrix};
use crate::scalars::Field;
use crate::uqmodules::WeightModule;

#[derive(Clone, Debug)]
pub struct Series<E> {
    /// `F^(k)` restricted to the requested columns.
    pub terms: Vec<BTreeMap<(usize, usize), SVec<E>>>,
    pub fhat: FHatMatrix<E>,
}

impl<E> Series<E> {
    /// Number of nonzero `F^(k)`, `F^(0)` included.
    pub fn nonzero_terms(&self) -> usize {
        self.terms.iter().filter(|t| !t.is_empty()).count()
    }
}

pub fn fk_series<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    ft: &GradedTensorOperator<F::Elem>,
    columns: &[usize],
    k_max: usize,
) -> Result<Series<F::Elem>> {
    let f = &m.field;
    let limit = height_limit(m, ft) as i64;
    let highest = m.space(&vec![0; m.rank()]).start;
    let mut current: BTreeMap<(usize, usize), SVec<F::Elem>> =
        columns.iter().map(|&j| ((j, j), vec![(highest, f.one())])).collect();
    let mut terms = vec![current.clone()];
    // A^j_i for every target row, memoized per (i, j)
    let mut coeffs: BTreeMap<(usize, usize), F::Elem> = BTreeMap::new();
    loop {
        if terms.len() > k_max + 1 {
            return Err(Error::NoTermination(k_max));
        }
        let mut next_pairs: BTreeMap<(usize, usize), Vec<(usize, &SVec<F::Elem>)>> = BTreeMap::new();
        for ((mi, j), x) in &current {
            for (i, _) in ft.column(*mi) {
                let mu = mu_between(v, i, *j);
                if RootSystem::height(&mu) <= limit {
                    next_pairs.entry((i, *j)).or_default().push((*mi, x));
                }
            }
        }
        for &(i, j) in next_pairs.keys() {
            if let std::collections::btree_map::Entry::Vacant(e) = coeffs.entry((i, j)) {
                e.insert(a_coeff(f, &m.rs, &mu_between(v, i, j), &m.base)?);
            }
        }
        let items: Vec<_> = next_pairs.into_iter().collect();
        let computed: Result<Vec<_>> = items
            .par_iter()
            .map(|((i, j), sources)| {
                let mut sum = Vec::new();
                for (mi, x) in sources {
                    let y = ft.get(*i, *mi).expect("listed entry");
                    sum = linalg::add(f, &sum, &apply_element(m, &ft.words, y, x)?);
                }
                Ok(((*i, *j), linalg::scale(f, &coeffs[&(*i, *j)], &sum)))
            })
            .collect();
        let next: BTreeMap<_, _> = computed?.into_iter().filter(|(_, x)| !x.is_empty()).collect();
        if next.is_empty() {
            break;
        }
        terms.push(next.clone());
        current = next;
    }
    let mut columns_out: BTreeMap<usize, BTreeMap<usize, SVec<F::Elem>>> =
        columns.iter().map(|&j| (j, BTreeMap::new())).collect();
    for t in &terms {
        for ((i, j), x) in t {
            let col = columns_out.get_mut(j).expect("requested column");
            let acc = col.remove(i).unwrap_or_default();
            let s = linalg::add(f, &acc, x);
            if !s.is_empty() {
                col.insert(*i, s);
            }
        }
    }
    Ok(Series { terms, fhat: FHatMatrix { height_limit: limit as usize, columns: columns_out } })
}

/// Entrywise check of `Σ_m R̂_{im} F̂_{mj} 1_λ = q^{-2η_{ε_i-ε_j}(λ)} F̂_{ij} 1_λ`
/// for every column of `fhat` and every row within the common truncation.
pub fn abrr_identity_check<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    rhat: &GradedTensorOperator<F::Elem>,
    fhat: &FHatMatrix<F::Elem>,
) -> Result<IdentityReport> {
    let f = &m.field;
    let limit = fhat.height_limit.min(rhat.max_height).min(m.cutoff) as i64;
    let mut jobs = Vec::new();
    for &j in fhat.columns.keys() {
        for i in 0..v.dim() {
            let mu = mu_between(v, i, j);
            if mu.iter().all(|&x| x >= 0) && RootSystem::height(&mu) <= limit {
                jobs.push((i, j));
            }
        }
    }
    let results: Result<Vec<Option<String>>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let mut lhs = Vec::new();
            for (mi, r) in rhat.row(i) {
                if let Some(x) = fhat.get(mi, j) {
                    lhs = linalg::add(f, &lhs, &apply_element(m, &rhat.words, r, x)?);
                }
            }
            let eta = m.rs.eta(&mu_between(v, i, j), &m.base);
            let rhs = match fhat.get(i, j) {
                Some(x) => linalg::scale(f, &f.monomial(&eta.scale(-2)), x),
                None => Vec::new(),
            };
            let residual = linalg::sub(f, &lhs, &rhs);
            Ok((!residual.is_empty()).then(|| format!("entry ({}, {})", v.labels[i], v.labels[j])))
        })
        .collect();
    let results = results?;
    Ok(IdentityReport { checked: results.len(), failures: results.into_iter().flatten().collect() })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::rmatrix::{f_tensor, quasi_r};
    use crate::routesum::{fhat_matrix, hasse};
    use crate::scalars::SymbolicField;
    use crate::uqmodules::{dual_verma_truncated, finite_dim_module, verma_truncated};

    fn run(name: &str, labels: &[i64]) {
        let rs = Arc::new(RootSystem::parse(name).unwrap());
        let f = SymbolicField::new(rs.rank);
        let v = finite_dim_module(&f, &rs, labels).unwrap();
        let depth = v.levels.last().copied().unwrap();
        let m = verma_truncated(&f, &rs, depth).unwrap();
        let rhat = quasi_r(&v, &m, depth).unwrap();
        let ft = f_tensor(&f, &rhat).unwrap();
        let cols: Vec<usize> = (0..v.dim()).collect();
        let series = fk_series(&v, &m, &ft, &cols, 32).unwrap();
        let routes = fhat_matrix(&v, &m, &ft, &cols).unwrap();
        assert_eq!(series.fhat.columns, routes.columns, "{name} {labels:?}");
        assert_eq!(series.nonzero_terms(), 1 + hasse(&v).longest_path());
        assert!(abrr_identity_check(&v, &m, &rhat, &series.fhat).unwrap().passed());
    }

    #[test]
    fn series_matches_routes() {
        run("A1", &[1]);
        run("A1", &[3]);
        run("A2", &[1, 0]);
        run("A2", &[1, 1]);
        run("B2", &[0, 1]);
    }

    #[test]
    fn trivial_module() {
        let rs = Arc::new(RootSystem::parse("A2").unwrap());
        let f = SymbolicField::new(2);
        let v = finite_dim_module(&f, &rs, &[0, 0]).unwrap();
        let m = verma_truncated(&f, &rs, 1).unwrap();
        let ft = f_tensor(&f, &quasi_r(&v, &m, 1).unwrap()).unwrap();
        let s = fk_series(&v, &m, &ft, &[0], 4).unwrap();
        assert_eq!(s.nonzero_terms(), 1);
        assert_eq!(s.fhat.get(0, 0).unwrap(), &vec![(0, f.one())]);
    }

    #[test]
    fn perturbation_is_detected() {
        let rs = Arc::new(RootSystem::parse("A1").unwrap());
        let f = SymbolicField::new(1);
        let v = dual_verma_truncated(&f, &rs, 3).unwrap();
        let m = verma_truncated(&f, &rs, 3).unwrap();
        let rhat = quasi_r(&v, &m, 3).unwrap();
        let ft = f_tensor(&f, &rhat).unwrap();
        let mut s = fk_series(&v, &m, &ft, &[0], 8).unwrap();
        assert!(abrr_identity_check(&v, &m, &rhat, &s.fhat).unwrap().passed());
        let col = s.fhat.columns.get_mut(&0).unwrap();
        let x = col.get_mut(&2).unwrap();
        *x = linalg::scale(&f, &f.int(2), x);
        assert!(!abrr_identity_check(&v, &m, &rhat, &s.fhat).unwrap().passed());
    }
}
