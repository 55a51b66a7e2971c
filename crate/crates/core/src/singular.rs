//! Singular vectors in `V ⊗ M_λ`, the check that `F̂(1*_λ ⊗ 1_λ)` inverts
//! the pairing, and the audit of denominators.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::abrr::fk_series;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, SVec};
use crate::rmatrix::{f_tensor, quasi_r, GradedTensorOperator};
use crate::rootsys::RootSystem;
use crate::routesum::{fhat_matrix, FHatMatrix};
use crate::scalars::{Field, Int, Mono, NumericField, Poly, RatFunc};
use crate::shapovalov::{inverse_blocks, pairing_blocks, PairingBlock};
use crate::uqmodules::{dual_verma_truncated, verma_truncated, TensorModule, WeightModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FhatMethod {
    Routes,
    Abrr,
}

impl FromStr for FhatMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<FhatMethod> {
        match s {
            "routes" => Ok(FhatMethod::Routes),
            "abrr" => Ok(FhatMethod::Abrr),
            _ => Err(Error::Parse(format!("unknown method `{s}`"))),
        }
    }
}

/// `V`, a Verma module `M_λ` deep enough for `V`, and `R̂`, `F` on `V ⊗ M_λ`.
pub struct Pipeline<F: Field> {
    pub v: WeightModule<F>,
    pub m: WeightModule<F>,
    pub rhat: GradedTensorOperator<F::Elem>,
    pub ft: GradedTensorOperator<F::Elem>,
}

impl<F: Field> Pipeline<F> {
    /// `depth` bounds the height of the entries; `None` uses the height of `v`.
    pub fn new(v: WeightModule<F>, depth: Option<usize>) -> Result<Pipeline<F>> {
        let depth = depth.unwrap_or_else(|| v.levels.last().copied().unwrap_or(0));
        let m = verma_truncated(&v.field, &v.rs, depth)?;
        let rhat = quasi_r(&v, &m, depth)?;
        let ft = f_tensor(&v.field, &rhat)?;
        Ok(Pipeline { v, m, rhat, ft })
    }

    pub fn fhat(&self, columns: &[usize], method: FhatMethod) -> Result<FHatMatrix<F::Elem>> {
        match method {
            FhatMethod::Routes => fhat_matrix(&self.v, &self.m, &self.ft, columns),
            FhatMethod::Abrr => Ok(fk_series(&self.v, &self.m, &self.ft, columns, self.m.cutoff + 1)?.fhat),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularVectorReport<E> {
    pub j: usize,
    pub label: String,
    /// Offset of `λ + ε_j` from `λ`.
    pub weight: Vec<i64>,
    /// Coordinates on the basis `v_i ⊗ b` of `V ⊗ M_λ`, index `i·dim M + b`.
    pub vector: SVec<E>,
    /// `e_α u_j` for each simple root.
    pub residuals: Vec<SVec<E>>,
}

impl<E> SingularVectorReport<E> {
    pub fn annihilated(&self) -> bool {
        self.residuals.iter().all(|r| r.is_empty())
    }
}

/// `u_j = Σ_i v_i ⊗ f̂_{ij} 1_λ` and its images under the raising generators.
pub fn singular_vector<F: Field>(
    v: &WeightModule<F>,
    m: &WeightModule<F>,
    fhat: &FHatMatrix<F::Elem>,
    j: usize,
) -> Result<SingularVectorReport<F::Elem>> {
    let col = fhat.columns.get(&j).ok_or_else(|| Error::Unsupported(format!("column {j} not computed")))?;
    let t = TensorModule::new(v, m)?;
    let mut pairs = Vec::new();
    for (i, x) in col {
        pairs.extend(t.pure(*i, x));
    }
    let vector = linalg::svec_from_pairs(&m.field, pairs);
    let residuals: Result<Vec<_>> = (0..v.rank()).map(|a| t.apply_e(a, &vector)).collect();
    Ok(SingularVectorReport {
        j,
        label: v.labels[j].clone(),
        weight: v.offsets[j].clone(),
        vector,
        residuals: residuals?,
    })
}

/// Exact rank test on the coordinates of the given vectors.
pub fn linearly_independent<F: Field>(f: &F, vectors: &[&SVec<F::Elem>]) -> Result<bool> {
    let mut support: Vec<usize> = vectors.iter().flat_map(|v| v.iter().map(|(k, _)| *k)).collect();
    support.sort_unstable();
    support.dedup();
    let rows: Mat<F::Elem> = vectors
        .iter()
        .map(|v| support.iter().map(|k| linalg::coeff(v, *k).cloned().unwrap_or_else(|| f.zero())).collect())
        .collect();
    Ok(linalg::rank(f, &rows)? == vectors.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMethod {
    Routes,
    Abrr,
    Oracle,
    Both,
    All,
}

impl FromStr for VerifyMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<VerifyMethod> {
        Ok(match s {
            "routes" => VerifyMethod::Routes,
            "abrr" => VerifyMethod::Abrr,
            "oracle" => VerifyMethod::Oracle,
            "both" => VerifyMethod::Both,
            "all" => VerifyMethod::All,
            _ => return Err(Error::Parse(format!("unknown method `{s}`"))),
        })
    }
}

impl VerifyMethod {
    fn routes(self) -> bool {
        matches!(self, VerifyMethod::Routes | VerifyMethod::Both | VerifyMethod::All)
    }
    fn abrr(self) -> bool {
        matches!(self, VerifyMethod::Abrr | VerifyMethod::Both | VerifyMethod::All)
    }
    fn oracle(self) -> bool {
        matches!(self, VerifyMethod::Oracle | VerifyMethod::All)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockCheck {
    pub nu: Vec<i64>,
    pub dim: usize,
    /// `P_ν C_ν = 1` for every computed `C_ν`.
    pub identity: bool,
    /// All computed `C_ν` coincide.
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseReport<E> {
    pub cartan_type: String,
    pub cutoff: usize,
    pub method: VerifyMethod,
    pub blocks: Vec<BlockCheck>,
    pub mismatch: Option<String>,
    /// Seconds per stage.
    pub timings: BTreeMap<String, f64>,
    #[serde(skip)]
    pub inverses: BTreeMap<Vec<i64>, Mat<E>>,
}

impl<E> InverseReport<E> {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none() && self.blocks.iter().all(|b| b.identity && b.agree)
    }
}

/// `C_ν` read off the column `j = 0` of `F̂` on the dual Verma module:
/// column `i` holds the coordinates of `f̂_{i0} 1_λ`.
pub fn inverse_from_fhat<F: Field>(f: &F, block: &PairingBlock<F::Elem>, fhat: &FHatMatrix<F::Elem>) -> Mat<F::Elem> {
    let n = block.col_indices.len();
    let mut c = vec![vec![f.zero(); block.row_indices.len()]; n];
    for (ci, &i) in block.row_indices.iter().enumerate() {
        if let Some(x) = fhat.get(i, 0) {
            for (k, &b) in block.col_indices.iter().enumerate() {
                if let Some(val) = linalg::coeff(x, b) {
                    c[k][ci] = val.clone();
                }
            }
        }
    }
    c
}

/// Builds `F̂(1*_λ ⊗ 1_λ)` on the truncated dual Verma module by the chosen
/// methods and checks `P_ν C_ν = 1` block by block against the pairing.
pub fn verify_inverse<F: Field>(
    f: &F,
    rs: &Arc<RootSystem>,
    cutoff: usize,
    method: VerifyMethod,
) -> Result<InverseReport<F::Elem>> {
    let mut timings = BTreeMap::new();
    let clock = Instant::now();
    let dual = dual_verma_truncated(f, rs, cutoff)?;
    let m = verma_truncated(f, rs, cutoff)?;
    timings.insert("modules".to_string(), clock.elapsed().as_secs_f64());

    let clock = Instant::now();
    let blocks = pairing_blocks(&m, &dual, cutoff)?;
    timings.insert("pairing".to_string(), clock.elapsed().as_secs_f64());

    let mut candidates: Vec<(&str, BTreeMap<Vec<i64>, Mat<F::Elem>>)> = Vec::new();
    if method.routes() || method.abrr() {
        let clock = Instant::now();
        let rhat = quasi_r(&dual, &m, cutoff)?;
        let ft = f_tensor(f, &rhat)?;
        timings.insert("quasi_r".to_string(), clock.elapsed().as_secs_f64());
        let collect = |fhat: &FHatMatrix<F::Elem>| -> BTreeMap<Vec<i64>, Mat<F::Elem>> {
            blocks.iter().map(|(nu, b)| (nu.clone(), inverse_from_fhat(f, b, fhat))).collect()
        };
        if method.routes() {
            let clock = Instant::now();
            let fhat = fhat_matrix(&dual, &m, &ft, &[0])?;
            timings.insert("routes".to_string(), clock.elapsed().as_secs_f64());
            candidates.push(("routes", collect(&fhat)));
        }
        if method.abrr() {
            let clock = Instant::now();
            let fhat = fk_series(&dual, &m, &ft, &[0], cutoff + 1)?.fhat;
            timings.insert("abrr".to_string(), clock.elapsed().as_secs_f64());
            candidates.push(("abrr", collect(&fhat)));
        }
    }
    if method.oracle() {
        let clock = Instant::now();
        let inv = inverse_blocks(&blocks, f)?;
        timings.insert("oracle".to_string(), clock.elapsed().as_secs_f64());
        candidates.push(("oracle", inv));
    }

    let mut checks = Vec::new();
    let mut mismatch = None;
    for (nu, b) in &blocks {
        let mut identity = true;
        let mut agree = true;
        for (name, cs) in &candidates {
            let c = &cs[nu];
            if !linalg::is_identity(f, &linalg::mat_mul(f, &b.entries, c)) {
                identity = false;
                mismatch.get_or_insert_with(|| format!("{name}: P·C is not the identity at ν = {nu:?}"));
            }
            if let Some((first, c0)) = candidates.first() {
                if let Some(pos) = first_difference(f, &c0[nu], c) {
                    agree = false;
                    mismatch.get_or_insert_with(|| format!("{first} and {name} differ at ν = {nu:?}, entry {pos:?}"));
                }
            }
        }
        checks.push(BlockCheck { nu: nu.clone(), dim: b.col_indices.len(), identity, agree });
    }
    let inverses = candidates.into_iter().next().map(|(_, c)| c).unwrap_or_default();
    Ok(InverseReport { cartan_type: rs.name.clone(), cutoff, method, blocks: checks, mismatch, timings, inverses })
}

fn first_difference<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Option<(usize, usize)> {
    for (r, (x, y)) in a.iter().zip(b).enumerate() {
        for (c, (u, w)) in x.iter().zip(y).enumerate() {
            if !f.is_zero(&f.sub(u, w)) {
                return Some((r, c));
            }
        }
    }
    None
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AuditReport {
    /// `(α, m) ↦` number of factors removed by `q^{2(λ+ρ,α) - m||α||²} - 1`.
    pub inventory: BTreeMap<String, usize>,
    /// Leftover denominator factors involving the weight variables.
    pub unexplained: Vec<String>,
    /// Leftover factors in `q` alone (unit factors like `q - q^{-1}`).
    pub q_only: usize,
    pub audited: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.unexplained.is_empty()
    }
}

/// `q^{2(λ+ρ,α) - m||α||²} - 1` cleared of negative powers.
pub fn genericity_factor(rs: &RootSystem, alpha: &[i64], m: i64) -> Poly {
    let e = 2 * rs.rho_pairing(alpha) - m * rs.norm2(alpha);
    let mut exps = [0u32; 5];
    for (i, &c) in alpha.iter().enumerate() {
        exps[i + 1] = 2 * c as u32;
    }
    exps[0] = e.max(0) as u32;
    let lead = Poly::term(Mono::from_exps(&exps), Int::from(1));
    let tail = Poly::term(Mono::var(0, (-e).max(0) as u32), Int::from(1));
    lead.sub(&tail)
}

/// Whether no `q^{2(λ+ρ,α) - m||α||²} - 1` with `α > 0`, `1 ≤ m ≤ max_m`
/// vanishes at the point of `f`.
pub fn avoids_poles(f: &NumericField, rs: &RootSystem, max_m: i64) -> bool {
    rs.positive_roots.iter().all(|alpha| {
        (1..=max_m).all(|m| {
            let t = RatFunc::from_poly(&genericity_factor(rs, alpha, m));
            f.specialize(&t).map(|x| !num_traits::Zero::is_zero(&x)).unwrap_or(false)
        })
    })
}

/// Checks that every denominator factor of `entries` divides some
/// `q^{2(λ+ρ,α) - m||α||²} - 1` with `α > 0`, `1 ≤ m ≤ max_m`.
pub fn denominator_audit<'a>(
    rs: &RootSystem,
    entries: impl IntoIterator<Item = &'a RatFunc>,
    max_m: i64,
) -> AuditReport {
    let mut factors = Vec::new();
    for alpha in &rs.positive_roots {
        for m in 1..=max_m {
            factors.push((format!("{alpha:?}, m={m}"), genericity_factor(rs, alpha, m)));
        }
    }
    let mut report = AuditReport::default();
    let mut seen: HashSet<Poly> = HashSet::new();
    for x in entries {
        report.audited += 1;
        let den = x.denominator().clone();
        if den.is_constant() || !seen.insert(den.clone()) {
            continue;
        }
        let mut rest = den;
        for (name, t) in &factors {
            loop {
                let g = crate::scalars::gcd::gcd(&rest, t);
                if g.is_constant() {
                    break;
                }
                rest = rest.divide(&g).expect("gcd divides");
                *report.inventory.entry(name.clone()).or_default() += 1;
            }
        }
        if rest.is_constant() {
            continue;
        }
        if rest.var_mask() == 1 {
            report.q_only += 1;
        } else {
            report.unexplained.push(format!("{}", RatFunc::from_poly(&rest)));
        }
    }
    report
}
