use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::verma::{numeric_dual_verma, numeric_verma};
use super::{Direction, ModuleKind, WeightModule};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, SVec};
use crate::rootsys::{weights_up_to, RootSystem};
use crate::scalars::Field;
use crate::shapovalov::pairing_block;

const MAX_DIM: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSpec {
    DualVerma,
    Trivial,
    /// 1-based index of the fundamental weight.
    Fundamental(usize),
    Adjoint,
    /// Dynkin labels of the highest weight.
    HighestWeight(Vec<i64>),
}

impl FromStr for ModuleSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<ModuleSpec> {
        let bad = || Error::Parse(format!("unknown module spec `{s}`"));
        let s = s.trim();
        Ok(match s {
            "verma-dual" | "dual-verma" | "dual" => ModuleSpec::DualVerma,
            "trivial" => ModuleSpec::Trivial,
            "natural" => ModuleSpec::Fundamental(1),
            "adjoint" => ModuleSpec::Adjoint,
            _ => {
                if let Some(k) = s.strip_prefix("fund:") {
                    let k: usize = k.parse().map_err(|_| bad())?;
                    if k == 0 {
                        return Err(bad());
                    }
                    ModuleSpec::Fundamental(k)
                } else if let Some(l) = s.strip_prefix("hw:") {
                    let labels: std::result::Result<Vec<i64>, _> = l.split(',').map(|x| x.trim().parse()).collect();
                    ModuleSpec::HighestWeight(labels.map_err(|_| bad())?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleSpec::DualVerma => write!(f, "verma-dual"),
            ModuleSpec::Trivial => write!(f, "trivial"),
            ModuleSpec::Fundamental(k) => write!(f, "fund:{k}"),
            ModuleSpec::Adjoint => write!(f, "adjoint"),
            ModuleSpec::HighestWeight(l) => {
                write!(f, "hw:{}", l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
        }
    }
}

impl ModuleSpec {
    /// Dynkin labels for the finite-dimensional specs.
    pub fn labels(&self, rs: &RootSystem) -> Result<Vec<i64>> {
        match self {
            ModuleSpec::DualVerma => Err(Error::Unsupported("the dual Verma module has no Dynkin labels".into())),
            ModuleSpec::Trivial => Ok(vec![0; rs.rank]),
            ModuleSpec::Fundamental(k) => {
                if *k > rs.rank {
                    return Err(Error::InvalidWeight(format!("no fundamental weight {k} in rank {}", rs.rank)));
                }
                let mut l = vec![0; rs.rank];
                l[k - 1] = 1;
                Ok(l)
            }
            ModuleSpec::Adjoint => {
                let theta = rs.positive_roots.last().expect("nonempty");
                Ok((0..rs.rank).map(|i| rs.coroot_pairing(theta, i)).collect())
            }
            ModuleSpec::HighestWeight(l) => {
                if l.len() != rs.rank {
                    return Err(Error::InvalidWeight(format!("expected {} labels", rs.rank)));
                }
                Ok(l.clone())
            }
        }
    }
}

/// Quotient data of one weight space of a numeric Verma module by the
/// radical of the pairing.
#[derive(Clone, Debug)]
pub struct QuotientBlock<E> {
    pub nu: Vec<i64>,
    /// Verma indices of the surviving basis words.
    pub basis: Vec<usize>,
    /// `P[R,S]^{-1} P[R,:]`: coordinates of the image in the quotient basis,
    /// columns indexed by the whole Verma weight space.
    pub projection: Mat<E>,
    /// A basis of the radical, as vectors of the Verma module.
    pub kernel: Vec<SVec<E>>,
}

pub fn quotient_blocks<F: Field>(
    verma: &WeightModule<F>,
    dual: &WeightModule<F>,
    levels: usize,
) -> Result<BTreeMap<Vec<i64>, QuotientBlock<F::Elem>>> {
    let f = &verma.field;
    let mut out = BTreeMap::new();
    for nu in weights_up_to(verma.rank(), levels) {
        let block = pairing_block(verma, dual, &nu)?;
        let p = &block.entries;
        let rows = linalg::independent_rows(f, p)?;
        let sub: Mat<F::Elem> = rows.iter().map(|&r| p[r].clone()).collect();
        let mut reduced = sub.clone();
        let cols = linalg::rref(f, &mut reduced)?;
        let square: Mat<F::Elem> = sub.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
        let inv = linalg::inverse(f, &square)?;
        let projection = linalg::mat_mul(f, &inv, &sub);
        let start = block.col_indices.first().copied().unwrap_or(0);
        let basis: Vec<usize> = cols.iter().map(|&c| block.col_indices[c]).collect();
        let mut kernel = Vec::new();
        for c in 0..block.col_indices.len() {
            if cols.contains(&c) {
                continue;
            }
            let mut pairs = vec![(start + c, f.one())];
            for (k, &s) in cols.iter().enumerate() {
                pairs.push((start + s, f.neg(&projection[k][c])));
            }
            kernel.push(linalg::svec_from_pairs(f, pairs));
        }
        out.insert(nu.clone(), QuotientBlock { nu, basis, projection, kernel });
    }
    Ok(out)
}

/// Finite-dimensional irreducible module with the given Dynkin labels,
/// realized as a quotient of the Verma module by the pairing radical.
pub fn finite_dim_module<F: Field>(f: &F, rs: &Arc<RootSystem>, labels: &[i64]) -> Result<WeightModule<F>> {
    if labels.len() != rs.rank || labels.iter().any(|&l| l < 0) {
        return Err(Error::InvalidWeight(format!("{labels:?} is not dominant integral")));
    }
    let pairings = rs.weight_from_labels(labels)?;
    let mut depth = 2;
    loop {
        let verma = numeric_verma(f, rs, &pairings, depth)?;
        let dual = numeric_dual_verma(f, rs, &pairings, depth)?;
        let blocks = quotient_blocks(&verma, &dual, depth)?;
        let total: usize = blocks.values().map(|b| b.basis.len()).sum();
        if total > MAX_DIM {
            return Err(Error::Unsupported(format!("module dimension exceeds {MAX_DIM}")));
        }
        let top_empty =
            blocks.iter().filter(|(nu, _)| RootSystem::height(nu) as usize == depth).all(|(_, b)| b.basis.is_empty());
        if top_empty {
            return assemble(&verma, &blocks, depth);
        }
        depth *= 2;
        if depth > 64 {
            return Err(Error::Unsupported("module too deep".into()));
        }
    }
}

fn assemble<F: Field>(
    verma: &WeightModule<F>,
    blocks: &BTreeMap<Vec<i64>, QuotientBlock<F::Elem>>,
    depth: usize,
) -> Result<WeightModule<F>> {
    let f = &verma.field;
    let mut labels = Vec::new();
    let mut words = Vec::new();
    let mut offsets = Vec::new();
    let mut levels = Vec::new();
    let mut spaces = BTreeMap::new();
    let mut start_of: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut order: Vec<&QuotientBlock<F::Elem>> = blocks.values().collect();
    order.sort_by_key(|b| (RootSystem::height(&b.nu), b.nu.clone()));
    for b in &order {
        if b.basis.is_empty() {
            continue;
        }
        let offset = verma.offset_at_depth(&b.nu);
        start_of.insert(b.nu.clone(), labels.len());
        let start = labels.len();
        for &i in &b.basis {
            labels.push(verma.labels[i].clone());
            words.push(verma.words[i].clone());
            offsets.push(offset.clone());
            levels.push(verma.levels[i]);
        }
        spaces.insert(offset, start..labels.len());
    }
    let n = labels.len();
    let r = verma.rank();
    let project = |v: &SVec<F::Elem>, nu: &[i64]| -> SVec<F::Elem> {
        let Some(b) = blocks.get(nu) else { return Vec::new() };
        if b.basis.is_empty() || v.is_empty() {
            return Vec::new();
        }
        let space = verma.space(&verma.offset_at_depth(nu));
        let dense = linalg::dense_slice(f, v, space);
        let coords = linalg::mat_vec(f, &b.projection, &dense);
        let s = start_of[nu];
        coords.into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).map(|(k, c)| (s + k, c)).collect()
    };
    let mut e = vec![vec![Vec::new(); n]; r];
    let mut fa = vec![vec![Vec::new(); n]; r];
    let mut k = 0;
    for b in &order {
        for &i in &b.basis {
            for a in 0..r {
                let mut up = b.nu.clone();
                up[a] -= 1;
                if up[a] >= 0 {
                    e[a][k] = project(&verma.apply_e(a, &verma.unit(i))?, &up);
                }
                let mut down = b.nu.clone();
                down[a] += 1;
                if (RootSystem::height(&down) as usize) <= depth {
                    fa[a][k] = project(&verma.apply_f(a, &verma.unit(i))?, &down);
                }
            }
            k += 1;
        }
    }
    Ok(WeightModule {
        field: f.clone(),
        rs: verma.rs.clone(),
        kind: ModuleKind::Quotient,
        cutoff: levels.last().copied().unwrap_or(0),
        complete: true,
        direction: Direction::Lowering,
        base: verma.base.clone(),
        labels,
        words,
        offsets,
        levels,
        spaces,
        e,
        f: fa,
    })
}
