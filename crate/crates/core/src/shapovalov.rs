//! The invariant pairing `M_λ ⊗ M*_λ → C` defined through the antipode,
//! its weight blocks, and their exact inverses (the oracle for the
//! inverse Shapovalov form).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, SVec};
use crate::rootsys::RootSystem;
use crate::scalars::{AffineExponent, Field};
use crate::uqmodules::{Direction, WeightModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Letter {
    E(u8),
    F(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Generator {
    E(u8),
    F(u8),
    /// `q^{± h_μ}`.
    K(Vec<i64>, i8),
}

/// `sign · q^{q_exp} · letters · q^{h_cartan}`, Cartan part on the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalOrdered {
    pub sign: i64,
    pub q_exp: i64,
    pub letters: Vec<Letter>,
    pub cartan: Vec<i64>,
}

impl NormalOrdered {
    pub fn one(rank: usize) -> NormalOrdered {
        NormalOrdered { sign: 1, q_exp: 0, letters: Vec::new(), cartan: vec![0; rank] }
    }

    /// Product `self · other`, moving `other`'s letters left past the
    /// Cartan part of `self`: `q^{h_μ} x = q^{(μ, wt x)} x q^{h_μ}`.
    pub fn mul(&self, rs: &RootSystem, other: &NormalOrdered) -> NormalOrdered {
        let mut wt = vec![0i64; rs.rank];
        for l in &other.letters {
            match l {
                Letter::E(a) => wt[*a as usize] += 1,
                Letter::F(a) => wt[*a as usize] -= 1,
            }
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        NormalOrdered {
            sign: self.sign * other.sign,
            q_exp: self.q_exp + other.q_exp + rs.form(&self.cartan, &wt),
            letters,
            cartan: self.cartan.iter().zip(&other.cartan).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Antipode: `γ(e_α) = -e_α q^{-h_α}`, `γ(f_α) = -q^{h_α} f_α`,
/// `γ(q^{±h}) = q^{∓h}`, extended as an antihomomorphism.
pub fn antipode_on_word(rs: &RootSystem, word: &[Generator]) -> NormalOrdered {
    let mut acc = NormalOrdered::one(rs.rank);
    for g in word.iter().rev() {
        let image = match g {
            Generator::E(a) => {
                let alpha = rs.simple(*a as usize);
                NormalOrdered {
                    sign: -1,
                    q_exp: 0,
                    letters: vec![Letter::E(*a)],
                    cartan: alpha.iter().map(|x| -x).collect(),
                }
            }
            Generator::F(a) => {
                // q^{h_α} f_α = q^{-(α,α)} f_α q^{h_α}
                let alpha = rs.simple(*a as usize);
                NormalOrdered { sign: -1, q_exp: -rs.norm2(&alpha), letters: vec![Letter::F(*a)], cartan: alpha }
            }
            Generator::K(mu, s) => NormalOrdered {
                sign: 1,
                q_exp: 0,
                letters: Vec::new(),
                cartan: mu.iter().map(|x| -x * *s as i64).collect(),
            },
        };
        acc = acc.mul(rs, &image);
    }
    acc
}

/// Applies a normal-ordered element to a vector of `module`.
pub fn apply_normal_ordered<F: Field>(
    module: &WeightModule<F>,
    x: &NormalOrdered,
    v: &SVec<F::Elem>,
) -> Result<SVec<F::Elem>> {
    let f = &module.field;
    let mut out = module.apply_cartan(&x.cartan, 1, v);
    for l in x.letters.iter().rev() {
        out = match l {
            Letter::E(a) => module.apply_e(*a as usize, &out)?,
            Letter::F(a) => module.apply_f(*a as usize, &out)?,
        };
    }
    let s = f.mul(&f.int(x.sign), &f.monomial(&AffineExponent::constant(x.q_exp)));
    Ok(linalg::scale(f, &s, &out))
}

fn lowest_index<F: Field>(dual: &WeightModule<F>) -> usize {
    dual.space(&vec![0; dual.rank()]).start
}

/// `⟨w 1_λ, y⟩` for a basis word `w` of the Verma module.
fn pair_word<F: Field>(
    verma: &WeightModule<F>,
    dual: &WeightModule<F>,
    word: &[u8],
    y: &SVec<F::Elem>,
) -> Result<F::Elem> {
    let gens: Vec<Generator> = word.iter().map(|a| Generator::F(*a)).collect();
    let g = antipode_on_word(&verma.rs, &gens);
    let r = apply_normal_ordered(dual, &g, y)?;
    Ok(linalg::coeff(&r, lowest_index(dual)).cloned().unwrap_or_else(|| dual.field.zero()))
}

/// `⟨x, y⟩`: the coefficient of `1*` in `γ(x̃) y` where `x = x̃ 1_λ`.
pub fn pairing<F: Field>(
    verma: &WeightModule<F>,
    dual: &WeightModule<F>,
    x: &SVec<F::Elem>,
    y: &SVec<F::Elem>,
) -> Result<F::Elem> {
    check_pair(verma, dual)?;
    let f = &verma.field;
    let mut acc = f.zero();
    for (c, xc) in x {
        let p = pair_word(verma, dual, &verma.words[*c], y)?;
        if !f.is_zero(&p) {
            acc = f.add(&acc, &f.mul(xc, &p));
        }
    }
    Ok(acc)
}

fn check_pair<F: Field>(verma: &WeightModule<F>, dual: &WeightModule<F>) -> Result<()> {
    if verma.direction != Direction::Lowering
        || dual.direction != Direction::Raising
        || verma.words.len() != verma.dim()
    {
        return Err(Error::Unsupported("pairing needs a Verma module and a dual Verma module with word bases".into()));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct PairingBlock<E> {
    pub nu: Vec<i64>,
    /// Dual-module basis labels (rows) and indices.
    pub rows: Vec<String>,
    pub row_indices: Vec<usize>,
    /// Verma basis labels (columns) and indices.
    pub cols: Vec<String>,
    pub col_indices: Vec<usize>,
    pub entries: Mat<E>,
}

pub fn pairing_block<F: Field>(
    verma: &WeightModule<F>,
    dual: &WeightModule<F>,
    nu: &[i64],
) -> Result<PairingBlock<F::Elem>> {
    check_pair(verma, dual)?;
    let h = RootSystem::height(nu) as usize;
    if h > verma.cutoff || h > dual.cutoff {
        return Err(Error::Truncation(format!("weight {nu:?} beyond the truncation")));
    }
    let cols = verma.space(&verma.offset_at_depth(nu));
    let rows = dual.space(&dual.offset_at_depth(nu));
    let mut entries = vec![vec![verma.field.zero(); cols.len()]; rows.len()];
    for (ci, c) in cols.clone().enumerate() {
        let gens: Vec<Generator> = verma.words[c].iter().map(|a| Generator::F(*a)).collect();
        let g = antipode_on_word(&verma.rs, &gens);
        for (ri, r) in rows.clone().enumerate() {
            let img = apply_normal_ordered(dual, &g, &dual.unit(r))?;
            if let Some(x) = linalg::coeff(&img, lowest_index(dual)) {
                entries[ri][ci] = x.clone();
            }
        }
    }
    Ok(PairingBlock {
        nu: nu.to_vec(),
        rows: rows.clone().map(|i| dual.labels[i].clone()).collect(),
        row_indices: rows.collect(),
        cols: cols.clone().map(|i| verma.labels[i].clone()).collect(),
        col_indices: cols.collect(),
        entries,
    })
}

/// All blocks up to `cutoff`, computed in parallel.
pub fn pairing_blocks<F: Field>(
    verma: &WeightModule<F>,
    dual: &WeightModule<F>,
    cutoff: usize,
) -> Result<BTreeMap<Vec<i64>, PairingBlock<F::Elem>>> {
    let nus = crate::rootsys::weights_up_to(verma.rank(), cutoff);
    let blocks: Result<Vec<_>> = nus.par_iter().map(|nu| pairing_block(verma, dual, nu)).collect();
    Ok(blocks?.into_iter().map(|b| (b.nu.clone(), b)).collect())
}

/// `C_ν = P_ν^{-1}` for every block; columns of `C_ν` are the coordinates
/// of the vectors dual to the row basis of `P_ν`.
pub fn inverse_blocks<F: Field>(
    blocks: &BTreeMap<Vec<i64>, PairingBlock<F::Elem>>,
    f: &F,
) -> Result<BTreeMap<Vec<i64>, Mat<F::Elem>>> {
    let items: Vec<_> = blocks.iter().collect();
    let inv: Result<Vec<_>> = items
        .par_iter()
        .map(|(nu, b)| {
            linalg::inverse(f, &b.entries).map(|m| ((*nu).clone(), m)).map_err(|_| Error::Singular(format!("{nu:?}")))
        })
        .collect();
    Ok(inv?.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::RootSystem;
    use crate::scalars::SymbolicField;
    use crate::uqmodules::{dual_verma_truncated, verma_truncated};

    #[test]
    fn antipode_examples() {
        let rs = RootSystem::parse("A2").unwrap();
        let e = antipode_on_word(&rs, &[Generator::E(0)]);
        assert_eq!(e, NormalOrdered { sign: -1, q_exp: 0, letters: vec![Letter::E(0)], cartan: vec![-1, 0] });
        assert_eq!(antipode_on_word(&rs, &[]), NormalOrdered::one(2));
        // antihomomorphism: γ(e_1 e_2) = γ(e_2) γ(e_1)
        let both = antipode_on_word(&rs, &[Generator::E(0), Generator::E(1)]);
        let g2 = antipode_on_word(&rs, &[Generator::E(1)]);
        let g1 = antipode_on_word(&rs, &[Generator::E(0)]);
        assert_eq!(both, g2.mul(&rs, &g1));
        // e_2 q^{-h_2} e_1 q^{-h_1} = q^{-(α_2, α_1)} e_2 e_1 q^{-h_1-h_2}
        assert_eq!(both.q_exp, 1);
        let k = antipode_on_word(&rs, &[Generator::K(vec![1, 0], 1)]);
        assert_eq!(k.cartan, vec![-1, 0]);
    }

    fn setup(name: &str, cutoff: usize) -> (SymbolicField, WeightModule<SymbolicField>, WeightModule<SymbolicField>) {
        let rs = std::sync::Arc::new(RootSystem::parse(name).unwrap());
        let f = SymbolicField::new(rs.rank);
        let m = verma_truncated(&f, &rs, cutoff).unwrap();
        let d = dual_verma_truncated(&f, &rs, cutoff).unwrap();
        (f, m, d)
    }

    #[test]
    fn a1_pairing() {
        let (f, m, d) = setup("A1", 3);
        let z = AffineExponent::lambda_simple(0);
        let p = pairing(&m, &d, &m.unit(1), &d.unit(1)).unwrap();
        let expected = f.neg(&f.mul(&f.monomial(&z.scale(-1)), &f.q_int(&z)));
        assert_eq!(p, expected);
        assert!(f.is_one(&pairing(&m, &d, &m.unit(0), &d.unit(0)).unwrap()));
        assert!(f.is_zero(&pairing(&m, &d, &m.unit(1), &d.unit(2)).unwrap()));
    }

    #[test]
    fn inverse_blocks_invert() {
        for (name, cutoff) in [("A1", 4), ("A2", 3), ("B2", 2)] {
            let (f, m, d) = setup(name, cutoff);
            let blocks = pairing_blocks(&m, &d, cutoff).unwrap();
            let inv = inverse_blocks(&blocks, &f).unwrap();
            for (nu, b) in &blocks {
                assert!(linalg::is_identity(&f, &linalg::mat_mul(&f, &b.entries, &inv[nu])), "{name} {nu:?}");
            }
        }
    }

    #[test]
    fn pairing_is_invariant() {
        // ⟨e_a x, y⟩ = ⟨x, γ(e_a) y⟩ and ⟨f_a x, y⟩ = ⟨x, γ(f_a) y⟩
        let (_, m, d) = setup("A2", 3);
        let rs = m.rs.clone();
        for x in 0..m.level_range(2).end {
            for y in 0..d.dim() {
                for a in 0..2u8 {
                    let xv = m.unit(x);
                    let yv = d.unit(y);
                    let lhs = pairing(&m, &d, &m.apply_e(a as usize, &xv).unwrap(), &yv).unwrap();
                    let ge = antipode_on_word(&rs, &[Generator::E(a)]);
                    let rhs = match apply_normal_ordered(&d, &ge, &yv) {
                        Ok(v) => pairing(&m, &d, &xv, &v).unwrap(),
                        Err(_) => continue,
                    };
                    assert_eq!(lhs, rhs);
                    let lhs = pairing(&m, &d, &m.apply_f(a as usize, &xv).unwrap(), &yv).unwrap();
                    let gf = antipode_on_word(&rs, &[Generator::F(a)]);
                    let rhs = pairing(&m, &d, &xv, &apply_normal_ordered(&d, &gf, &yv).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
