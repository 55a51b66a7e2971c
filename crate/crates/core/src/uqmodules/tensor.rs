use super::WeightModule;
use crate::error::{Error, Result};
use crate::linalg::{self, SVec};
use crate::scalars::Field;

/// `V ⊗ W` with `Δe = e ⊗ q^{h} + 1 ⊗ e` and `Δf = f ⊗ 1 + q^{-h} ⊗ f`.
/// Basis vector `(i, b)` has index `i * dim W + b`.
pub struct TensorModule<'a, F: Field> {
    pub v: &'a WeightModule<F>,
    pub w: &'a WeightModule<F>,
}

impl<'a, F: Field> TensorModule<'a, F> {
    pub fn new(v: &'a WeightModule<F>, w: &'a WeightModule<F>) -> Result<TensorModule<'a, F>> {
        if v.base.lambda != 0 && w.base.lambda != 0 {
            return Err(Error::Unsupported("both tensor factors depend on the generic weight".into()));
        }
        Ok(TensorModule { v, w })
    }

    pub fn dim(&self) -> usize {
        self.v.dim() * self.w.dim()
    }

    pub fn index(&self, i: usize, b: usize) -> usize {
        i * self.w.dim() + b
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.w.dim(), k % self.w.dim())
    }

    pub fn pure(&self, i: usize, wvec: &SVec<F::Elem>) -> SVec<F::Elem> {
        wvec.iter().map(|(b, c)| (self.index(i, *b), c.clone())).collect()
    }

    fn by_first(&self, x: &SVec<F::Elem>) -> Vec<(usize, SVec<F::Elem>)> {
        let mut out: Vec<(usize, SVec<F::Elem>)> = Vec::new();
        for (k, c) in x {
            let (i, b) = self.split(*k);
            match out.last_mut() {
                Some((j, v)) if *j == i => v.push((b, c.clone())),
                _ => out.push((i, vec![(b, c.clone())])),
            }
        }
        out
    }

    pub fn apply_e(&self, a: usize, x: &SVec<F::Elem>) -> Result<SVec<F::Elem>> {
        let f = &self.v.field;
        let alpha = self.v.rs.simple(a);
        let mut pairs = Vec::new();
        for (i, wv) in self.by_first(x) {
            let kw = self.w.apply_cartan(&alpha, 1, &wv);
            for (r, p) in &self.v.apply_e(a, &self.v.unit(i))? {
                for (b, c) in &kw {
                    pairs.push((self.index(*r, *b), f.mul(p, c)));
                }
            }
            let ew = self.w.apply_e(a, &wv)?;
            pairs.extend(self.pure(i, &ew));
        }
        Ok(linalg::svec_from_pairs(f, pairs))
    }

    pub fn apply_f(&self, a: usize, x: &SVec<F::Elem>) -> Result<SVec<F::Elem>> {
        let f = &self.v.field;
        let alpha = self.v.rs.simple(a);
        let mut pairs = Vec::new();
        for (i, wv) in self.by_first(x) {
            for (r, p) in &self.v.apply_f(a, &self.v.unit(i))? {
                for (b, c) in &wv {
                    pairs.push((self.index(*r, *b), f.mul(p, c)));
                }
            }
            let k = f.monomial(&self.v.pair(i, &alpha).scale(-1));
            let fw = self.w.apply_f(a, &wv)?;
            for (b, c) in fw {
                pairs.push((self.index(i, b), f.mul(&k, &c)));
            }
        }
        Ok(linalg::svec_from_pairs(f, pairs))
    }
}
