//! Weight modules with explicit Chevalley actions.
//!
//! Every module has a base weight (generic `λ`, a numeric weight, or `-λ`
//! for the dual Verma module) and a basis graded by root-lattice offsets.
//! Actions are stored column-wise: `e[a][j]` is the image of basis vector
//! `j` under `e_{α_a}`. The Cartan part acts diagonally and is never stored.

mod finite;
mod tensor;
mod verma;
mod words;

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use serde::Serialize;

pub use finite::{finite_dim_module, quotient_blocks, ModuleSpec, QuotientBlock};
pub use tensor::TensorModule;
pub use verma::{dual_verma_truncated, numeric_dual_verma, numeric_verma, verma_truncated};
pub use words::{serre_elements, words_of_content, SerreElement};

use crate::error::{Error, Result};
use crate::linalg::{self, SVec};
use crate::rootsys::{RootSystem, Weight};
use crate::scalars::{AffineExponent, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    Verma,
    DualVerma,
    Quotient,
    Custom,
}

/// Which generators act freely (by concatenation of words).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Basis vectors are `f`-words applied to a highest vector.
    Lowering,
    /// Basis vectors are `e`-words applied to a lowest vector.
    Raising,
}

#[derive(Clone, Debug)]
pub struct WeightModule<F: Field> {
    pub field: F,
    pub rs: Arc<RootSystem>,
    pub kind: ModuleKind,
    /// Highest level present. Actions leaving `0..=cutoff` are truncated.
    pub cutoff: usize,
    /// True when no action is truncated (finite-dimensional modules).
    pub complete: bool,
    pub direction: Direction,
    /// Weight of the level-0 vector (its offset is zero).
    pub base: Weight,
    pub labels: Vec<String>,
    /// Generator words of the basis vectors (empty for custom bases).
    pub words: Vec<Vec<u8>>,
    pub offsets: Vec<Vec<i64>>,
    pub levels: Vec<usize>,
    pub spaces: BTreeMap<Vec<i64>, Range<usize>>,
    pub e: Vec<Vec<SVec<F::Elem>>>,
    pub f: Vec<Vec<SVec<F::Elem>>>,
}

impl<F: Field> WeightModule<F> {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank
    }

    pub fn weight(&self, i: usize) -> Weight {
        self.base.shifted(&self.offsets[i])
    }

    /// `(wt v_i, μ)`.
    pub fn pair(&self, i: usize, mu: &[i64]) -> AffineExponent {
        self.weight(i).pair_root(&self.rs, mu)
    }

    /// Weight of the basis vectors in a space given by its offset.
    pub fn weight_of_offset(&self, offset: &[i64]) -> Weight {
        self.base.shifted(offset)
    }

    pub fn space(&self, offset: &[i64]) -> Range<usize> {
        self.spaces.get(offset).cloned().unwrap_or(0..0)
    }

    pub fn level_range(&self, level: usize) -> Range<usize> {
        let start = self.levels.partition_point(|&l| l < level);
        let end = self.levels.partition_point(|&l| l <= level);
        start..end
    }

    /// Offset of the vector reached from level 0 by `mu`, in the direction
    /// the module grows.
    pub fn offset_at_depth(&self, mu: &[i64]) -> Vec<i64> {
        match self.direction {
            Direction::Lowering => mu.iter().map(|x| -x).collect(),
            Direction::Raising => mu.to_vec(),
        }
    }

    fn apply(&self, action: &[Vec<SVec<F::Elem>>], a: usize, v: &SVec<F::Elem>, raises: bool) -> Result<SVec<F::Elem>> {
        let f = &self.field;
        let grows = match self.direction {
            Direction::Lowering => !raises,
            Direction::Raising => raises,
        };
        let mut pairs = Vec::new();
        for (j, c) in v {
            if grows && !self.complete && self.levels[*j] >= self.cutoff {
                return Err(Error::Truncation(format!(
                    "generator applied to level {} of a module truncated at {}",
                    self.levels[*j], self.cutoff
                )));
            }
            for (i, x) in &action[a][*j] {
                pairs.push((*i, f.mul(c, x)));
            }
        }
        Ok(linalg::svec_from_pairs(f, pairs))
    }

    pub fn apply_e(&self, a: usize, v: &SVec<F::Elem>) -> Result<SVec<F::Elem>> {
        self.apply(&self.e, a, v, true)
    }

    pub fn apply_f(&self, a: usize, v: &SVec<F::Elem>) -> Result<SVec<F::Elem>> {
        self.apply(&self.f, a, v, false)
    }

    /// `q^{h_μ}` on a vector: each component scaled by `q^{(wt, μ)}`.
    pub fn apply_cartan(&self, mu: &[i64], sign: i64, v: &SVec<F::Elem>) -> SVec<F::Elem> {
        v.iter().map(|(i, c)| (*i, self.field.mul(c, &self.field.monomial(&self.pair(*i, mu).scale(sign))))).collect()
    }

    /// Applies the product of lowering (`raising = false`) or raising
    /// generators `word[0] word[1] ...`, rightmost letter first.
    pub fn apply_word(&self, word: &[u8], raising: bool, v: &SVec<F::Elem>) -> Result<SVec<F::Elem>> {
        let mut out = v.clone();
        for &a in word.iter().rev() {
            if out.is_empty() {
                break;
            }
            out = if raising { self.apply_e(a as usize, &out)? } else { self.apply_f(a as usize, &out)? };
        }
        Ok(out)
    }

    pub fn unit(&self, i: usize) -> SVec<F::Elem> {
        vec![(i, self.field.one())]
    }

    /// `π(e_a)_{ij}`.
    pub fn e_entry(&self, a: usize, i: usize, j: usize) -> F::Elem {
        linalg::coeff(&self.e[a][j], i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn f_entry(&self, a: usize, i: usize, j: usize) -> F::Elem {
        linalg::coeff(&self.f[a][j], i).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Weight-space dimensions keyed by offset.
    pub fn dims(&self) -> BTreeMap<Vec<i64>, usize> {
        self.spaces.iter().map(|(k, r)| (k.clone(), r.len())).collect()
    }

    /// Rebuilds the module in a new basis: `t` maps new basis vectors to
    /// old coordinates (columns), `t_inv` is its inverse. Both must
    /// preserve weight spaces.
    pub fn change_basis(
        &self,
        t: &[SVec<F::Elem>],
        t_inv: &[SVec<F::Elem>],
        labels: Vec<String>,
    ) -> Result<WeightModule<F>> {
        let n = self.dim();
        if t.len() != n || t_inv.len() != n || labels.len() != n {
            return Err(Error::Unsupported("basis change of the wrong size".into()));
        }
        for (j, col) in t.iter().enumerate() {
            if col.iter().any(|(i, _)| self.offsets[*i] != self.offsets[j]) {
                return Err(Error::Unsupported("basis change mixes weight spaces".into()));
            }
        }
        let f = &self.field;
        let transform = |action: &[Vec<SVec<F::Elem>>]| -> Vec<Vec<SVec<F::Elem>>> {
            action
                .iter()
                .map(|cols| {
                    (0..n)
                        .map(|j| {
                            // T^{-1} A T e_j
                            let mut pairs = Vec::new();
                            for (k, c) in &t[j] {
                                for (i, x) in &cols[*k] {
                                    pairs.push((*i, f.mul(c, x)));
                                }
                            }
                            let v = linalg::svec_from_pairs(f, pairs);
                            let mut out = Vec::new();
                            for (i, c) in &v {
                                for (r, y) in &t_inv[*i] {
                                    out.push((*r, f.mul(c, y)));
                                }
                            }
                            linalg::svec_from_pairs(f, out)
                        })
                        .collect()
                })
                .collect()
        };
        Ok(WeightModule {
            field: self.field.clone(),
            rs: self.rs.clone(),
            kind: ModuleKind::Custom,
            cutoff: self.cutoff,
            complete: self.complete,
            direction: self.direction,
            base: self.base.clone(),
            labels,
            words: Vec::new(),
            offsets: self.offsets.clone(),
            levels: self.levels.clone(),
            spaces: self.spaces.clone(),
            e: transform(&self.e),
            f: transform(&self.f),
        })
    }
}

pub(crate) fn word_label(word: &[u8], letter: char) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    word.iter().map(|a| format!("{letter}{}", a + 1)).collect::<Vec<_>>().join("")
}
