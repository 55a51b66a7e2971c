use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::words::{component, serre_elements, word_content};
use super::{word_label, Direction, ModuleKind, WeightModule};
use crate::error::Result;
use crate::linalg::{self, SVec};
use crate::rootsys::{weights_up_to, RootSystem, Weight};
use crate::scalars::Field;

/// Truncated Verma module `M_λ` at the generic weight.
pub fn verma_truncated<F: Field>(f: &F, rs: &Arc<RootSystem>, cutoff: usize) -> Result<WeightModule<F>> {
    let base = Weight { lambda: 1, numeric: vec![0; rs.rank], offset: vec![0; rs.rank] };
    build(f, rs, cutoff, base, Direction::Lowering, ModuleKind::Verma)
}

/// Truncated lowest-weight module `M*_λ`, lowest weight `-λ`.
pub fn dual_verma_truncated<F: Field>(f: &F, rs: &Arc<RootSystem>, cutoff: usize) -> Result<WeightModule<F>> {
    let base = Weight { lambda: -1, numeric: vec![0; rs.rank], offset: vec![0; rs.rank] };
    build(f, rs, cutoff, base, Direction::Raising, ModuleKind::DualVerma)
}

/// Verma module at a numeric weight given by its pairings `(Λ, α_i)`.
pub fn numeric_verma<F: Field>(
    f: &F,
    rs: &Arc<RootSystem>,
    pairings: &[i64],
    cutoff: usize,
) -> Result<WeightModule<F>> {
    let base = Weight { lambda: 0, numeric: pairings.to_vec(), offset: vec![0; rs.rank] };
    build(f, rs, cutoff, base, Direction::Lowering, ModuleKind::Verma)
}

/// Lowest-weight module with lowest weight `-Λ`.
pub fn numeric_dual_verma<F: Field>(
    f: &F,
    rs: &Arc<RootSystem>,
    pairings: &[i64],
    cutoff: usize,
) -> Result<WeightModule<F>> {
    let base = Weight { lambda: 0, numeric: pairings.iter().map(|x| -x).collect(), offset: vec![0; rs.rank] };
    build(f, rs, cutoff, base, Direction::Raising, ModuleKind::DualVerma)
}

fn build<F: Field>(
    f: &F,
    rs: &Arc<RootSystem>,
    cutoff: usize,
    base: Weight,
    direction: Direction,
    kind: ModuleKind,
) -> Result<WeightModule<F>> {
    let r = rs.rank;
    let serre = serre_elements(f, rs);
    let sign: i64 = match direction {
        Direction::Lowering => -1,
        Direction::Raising => 1,
    };
    let letter = match direction {
        Direction::Lowering => 'f',
        Direction::Raising => 'e',
    };
    let mut labels = Vec::new();
    let mut words: Vec<Vec<u8>> = Vec::new();
    let mut offsets = Vec::new();
    let mut levels = Vec::new();
    let mut spaces = BTreeMap::new();
    // content -> (global start, normal forms)
    let mut comps: HashMap<Vec<i64>, (usize, HashMap<Vec<u8>, Vec<(usize, F::Elem)>>)> = HashMap::new();
    let mut index_of: HashMap<Vec<u8>, usize> = HashMap::new();
    for nu in weights_up_to(r, cutoff) {
        let comp = component(f, rs, &serre, &nu)?;
        let start = labels.len();
        let offset: Vec<i64> = nu.iter().map(|x| sign * x).collect();
        let level = RootSystem::height(&nu) as usize;
        for w in &comp.basis {
            index_of.insert(w.clone(), labels.len());
            let mut label = word_label(w, letter);
            if direction == Direction::Raising && w.is_empty() {
                label.push('*');
            }
            labels.push(label);
            words.push(w.clone());
            offsets.push(offset.clone());
            levels.push(level);
        }
        spaces.insert(offset, start..labels.len());
        comps.insert(nu, (start, comp.normal_form));
    }
    let n = labels.len();
    // Free action: left concatenation followed by normal form.
    let mut free: Vec<Vec<SVec<F::Elem>>> = vec![vec![Vec::new(); n]; r];
    for j in 0..n {
        if levels[j] >= cutoff {
            continue;
        }
        for (a, column) in free.iter_mut().enumerate() {
            let mut w = vec![a as u8];
            w.extend_from_slice(&words[j]);
            let content = word_content(&w, r);
            let (start, nf) = &comps[&content];
            column[j] = nf[&w].iter().map(|(k, c)| (start + k, c.clone())).collect();
        }
    }
    // Opposite action by the commutation rule, level by level.
    let mut rec: Vec<Vec<SVec<F::Elem>>> = vec![vec![Vec::new(); n]; r];
    for j in 0..n {
        let w = &words[j];
        if w.is_empty() {
            continue;
        }
        let a = w[0] as usize;
        let rest = &w[1..];
        let k = *index_of.get(rest).expect("suffixes of basis words are basis words");
        for (b, column) in rec.iter_mut().enumerate() {
            // x_a (y_b w') + commutator term
            let inner = column[k].clone();
            let mut pairs = Vec::new();
            for (i, c) in &inner {
                for (t, x) in &free[a][*i] {
                    pairs.push((*t, f.mul(c, x)));
                }
            }
            if a == b {
                let wt = base.shifted(&offsets[k]);
                let s = f.q_int(&wt.pair_root(rs, &rs.simple(b)));
                let s = match direction {
                    Direction::Lowering => s,
                    Direction::Raising => f.neg(&s),
                };
                pairs.push((k, s));
            }
            column[j] = linalg::svec_from_pairs(f, pairs);
        }
    }
    let (e, fa) = match direction {
        Direction::Lowering => (rec, free),
        Direction::Raising => (free, rec),
    };
    Ok(WeightModule {
        field: f.clone(),
        rs: rs.clone(),
        kind,
        cutoff,
        complete: false,
        direction,
        base,
        labels,
        words,
        offsets,
        levels,
        spaces,
        e,
        f: fa,
    })
}
