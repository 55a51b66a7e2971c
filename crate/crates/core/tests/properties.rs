use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use shapoform_core::abrr::{abrr_identity_check, fk_series};
use shapoform_core::linalg::{self, SVec};
use shapoform_core::rmatrix::{f_tensor, quasi_r};
use shapoform_core::rootsys::{RootSystem, Weight};
use shapoform_core::scalars::{AffineExponent, Field, Int, Mono, Poly, RatFunc, SymbolicField};
use shapoform_core::shapovalov::{antipode_on_word, apply_normal_ordered, pairing, Generator};
use shapoform_core::singular::{FhatMethod, Pipeline};
use shapoform_core::uqmodules::{dual_verma_truncated, finite_dim_module, verma_truncated};

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-3i64..=3, 0u32..3, 0u32..2, 0u32..2), 1..4).prop_map(|terms| {
        Poly::from_terms(terms.into_iter().map(|(c, a, b, d)| (Mono::from_exps(&[a, b, d]), Int::from(c))).collect())
    })
}

/// Small Laurent rational functions in q, z1, z2.
fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(), poly(), -2i64..=2, -1i64..=1).prop_map(|(n, d, s, t)| {
        let d = if d.is_zero() { Poly::one() } else { d };
        RatFunc::from_poly(&n).div(&RatFunc::from_poly(&d)).unwrap().mul(&RatFunc::monomial(&[s, t]))
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=6)
        .prop_filter("nonzero, not ±1", |(n, d)| *n != 0 && n.abs() != *d)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn exponent() -> impl Strategy<Value = AffineExponent> {
    (-5i64..=5, -2i64..=2, -2i64..=2)
        .prop_map(|(c, a, b)| AffineExponent::new(c, &[a, b]))
        .prop_filter("nonzero", |x| !x.is_zero())
}

const TYPES: [&str; 5] = ["A1", "A2", "A3", "B2", "G2"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.add(&RatFunc::zero()), a.clone());
        prop_assert_eq!(a.mul(&RatFunc::one()), a.clone());
        if !b.is_zero() {
            prop_assert!(b.mul(&b.inv().unwrap()).is_one());
            prop_assert_eq!(a.div(&b).unwrap().mul(&b), a.clone());
        }
    }

    #[test]
    fn specialization_is_a_homomorphism(a in ratfunc(), b in ratfunc(), q in rational(), z1 in rational(), z2 in rational()) {
        let z = [z1, z2];
        let sa = a.specialize(&q, &z);
        let sb = b.specialize(&q, &z);
        if let (Ok(x), Ok(y)) = (sa, sb) {
            if let Ok(p) = a.mul(&b).specialize(&q, &z) {
                prop_assert_eq!(p, &x * &y);
            }
            if let Ok(s) = a.add(&b).specialize(&q, &z) {
                prop_assert_eq!(s, &x + &y);
            }
        }
    }

    #[test]
    fn json_round_trip(a in ratfunc()) {
        prop_assert_eq!(RatFunc::from_json(&a.to_json(3)).unwrap(), a);
    }

    #[test]
    fn q_integers_and_phi(x in exponent()) {
        let f = SymbolicField::new(2);
        prop_assert_eq!(f.q_int(&-x), f.neg(&f.q_int(&x)));
        prop_assert_eq!(f.mul(&f.phi(&x).unwrap(), &f.q_int(&x)), f.monomial(&-x));
    }

    /// `η_{ν+α}(w) - η_ν(w) = (w, α) - (ν, α)` for simple `α`.
    #[test]
    fn eta_step(t in 0usize..5, i in 0usize..4, nu in prop::collection::vec(0i64..4, 4),
                lambda in -1i64..=1, numeric in prop::collection::vec(-3i64..=3, 4),
                offset in prop::collection::vec(-3i64..=3, 4)) {
        let rs = RootSystem::parse(TYPES[t]).unwrap();
        let r = rs.rank;
        let i = i % r;
        let nu = &nu[..r];
        let w = Weight { lambda, numeric: numeric[..r].to_vec(), offset: offset[..r].to_vec() };
        let alpha = rs.simple(i);
        let up: Vec<i64> = nu.iter().zip(&alpha).map(|(a, b)| a + b).collect();
        let lhs = rs.eta(&up, &w) - rs.eta(nu, &w);
        let rhs = w.pair_root(&rs, &alpha) - AffineExponent::constant(rs.form(nu, &alpha));
        prop_assert_eq!(lhs, rhs);
    }
}

fn combination(f: &SymbolicField, coeffs: &[i64], range: std::ops::Range<usize>) -> SVec<RatFunc> {
    let pairs = range.zip(coeffs).filter(|(_, &c)| c != 0).map(|(k, &c)| (k, f.int(c))).collect();
    linalg::svec_from_pairs(f, pairs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `⟨u x, y⟩ = ⟨x, γ(u) y⟩` for `u ∈ {e_a, f_a, q^{±h_a}}` on random vectors.
    #[test]
    fn pairing_invariance(a in 0u8..2, gen in 0usize..4,
                          xs in prop::collection::vec(-2i64..=2, 12), ys in prop::collection::vec(-2i64..=2, 12)) {
        let rs = Arc::new(RootSystem::parse("A2").unwrap());
        let f = SymbolicField::new(2);
        let m = verma_truncated(&f, &rs, 3).unwrap();
        let d = dual_verma_truncated(&f, &rs, 3).unwrap();
        // stay one level inside the truncation on the side the generator raises
        let inner = m.level_range(2).end;
        let x = combination(&f, &xs, 0..inner.min(xs.len()));
        let y = combination(&f, &ys, 0..d.level_range(2).end.min(ys.len()));
        let alpha = rs.simple(a as usize);
        let (g, ux) = match gen {
            0 => (Generator::E(a), m.apply_e(a as usize, &x).unwrap()),
            1 => (Generator::F(a), m.apply_f(a as usize, &x).unwrap()),
            2 => (Generator::K(alpha.clone(), 1), m.apply_cartan(&alpha, 1, &x)),
            _ => (Generator::K(alpha.clone(), -1), m.apply_cartan(&alpha, -1, &x)),
        };
        let gy = apply_normal_ordered(&d, &antipode_on_word(&rs, &[g]), &y).unwrap();
        prop_assert_eq!(pairing(&m, &d, &ux, &y).unwrap(), pairing(&m, &d, &x, &gy).unwrap());
    }

    /// Changing any single entry of `F̂` of positive degree breaks the ABRR
    /// identity; the degree-zero part is the normalization `1 ⊗ 1`.
    #[test]
    fn abrr_solution_is_unique(t in 0usize..2, pick in 0usize..1000, shift in 1i64..4) {
        let (name, cutoff) = [("A1", 4), ("A2", 2)][t];
        let rs = Arc::new(RootSystem::parse(name).unwrap());
        let f = SymbolicField::new(rs.rank);
        let v = dual_verma_truncated(&f, &rs, cutoff).unwrap();
        let m = verma_truncated(&f, &rs, cutoff).unwrap();
        let rhat = quasi_r(&v, &m, cutoff).unwrap();
        let ft = f_tensor(&f, &rhat).unwrap();
        let cols: Vec<usize> = (0..v.dim()).collect();
        let mut fh = fk_series(&v, &m, &ft, &cols, cutoff + 1).unwrap().fhat;
        prop_assert!(abrr_identity_check(&v, &m, &rhat, &fh).unwrap().passed());
        let keys: Vec<(usize, usize)> = fh.columns.iter().flat_map(|(j, c)| c.keys().filter(move |i| **i != *j).map(move |i| (*i, *j))).collect();
        let (i, j) = keys[pick % keys.len()];
        let x = fh.columns.get_mut(&j).unwrap().get_mut(&i).unwrap();
        let k = pick % x.len();
        x[k].1 = f.add(&x[k].1, &f.int(shift));
        prop_assert!(!abrr_identity_check(&v, &m, &rhat, &fh).unwrap().passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// After `v'_j = Σ_b T_bj v_b`, `f̂'_ij = Σ (T⁻¹)_ia f̂_ab T_bj`.
    #[test]
    fn fhat_is_basis_independent(entries in prop::collection::vec(-3i64..=3, 64)) {
        let rs = Arc::new(RootSystem::parse("A2").unwrap());
        let f = SymbolicField::new(2);
        let v = finite_dim_module(&f, &rs, &[1, 1]).unwrap();
        let n = v.dim();
        let mut t: Vec<SVec<RatFunc>> = vec![Vec::new(); n];
        let mut t_inv: Vec<SVec<RatFunc>> = vec![Vec::new(); n];
        let mut pool = entries.iter().cycle();
        for range in v.spaces.values() {
            let k = range.len();
            // unit lower triangular plus a random upper part: always invertible
            let block: Vec<Vec<RatFunc>> = (0..k)
                .map(|r| (0..k).map(|c| match r.cmp(&c) {
                    std::cmp::Ordering::Equal => f.one(),
                    std::cmp::Ordering::Less => f.int(*pool.next().unwrap()),
                    std::cmp::Ordering::Greater => f.zero(),
                }).collect())
                .collect();
            let inv = linalg::inverse(&f, &block).unwrap();
            for (c, col) in range.clone().enumerate() {
                t[col] = linalg::svec_from_pairs(&f, range.clone().enumerate().map(|(r, row)| (row, block[r][c].clone())).collect());
                t_inv[col] = linalg::svec_from_pairs(&f, range.clone().enumerate().map(|(r, row)| (row, inv[r][c].clone())).collect());
            }
        }
        let w = v.change_basis(&t, &t_inv, v.labels.iter().map(|l| format!("{l}'")).collect()).unwrap();
        let cols: Vec<usize> = (0..n).collect();
        let fh = Pipeline::new(v, None).unwrap().fhat(&cols, FhatMethod::Routes).unwrap();
        let gh = Pipeline::new(w, None).unwrap().fhat(&cols, FhatMethod::Abrr).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut expected = Vec::new();
                for (b, tbj) in &t[j] {
                    for (a, col) in t_inv.iter().enumerate() {
                        if let (Some(tia), Some(x)) = (linalg::coeff(col, i), fh.get(a, *b)) {
                            expected = linalg::axpy(&f, &expected, &f.mul(tia, tbj), x);
                        }
                    }
                }
                prop_assert_eq!(gh.get(i, j).cloned().unwrap_or_default(), expected, "entry ({}, {})", i, j);
            }
        }
    }
}
