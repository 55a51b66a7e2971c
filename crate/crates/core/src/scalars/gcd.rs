//! Greatest common divisors in `Z[x_0, ..., x_4]`.
//!
//! Strategy, cheapest first:
//! 1. monomial and integer content are split off;
//! 2. a variable occurring in only one argument reduces the problem to the
//!    gcd with that argument's coefficients in the variable;
//! 3. a modular univariate image per variable proves coprimality in the
//!    common case (lucky evaluation points are certified via leading
//!    coefficients);
//! 4. heuristic gcd by integer evaluation and balanced interpolation;
//! 5. primitive polynomial remainder sequences as the last resort.

use super::int::Int;
use super::poly::{mul_mod, pow_mod, Mono, Poly, MAX_VARS};

const PRIME: u64 = 2_305_843_009_213_693_951; // 2^61 - 1
const HEU_ATTEMPTS: usize = 6;

/// Gcd with nonnegative content and positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize_sign(b);
    }
    if b.is_zero() {
        return normalize_sign(a);
    }
    if a == b {
        return normalize_sign(a);
    }
    let (ma, mb) = (a.min_exps(), b.min_exps());
    let mut mono = [0u32; MAX_VARS];
    for k in 0..MAX_VARS {
        mono[k] = ma[k].min(mb[k]);
    }
    let a1 = a.shift_down(&ma);
    let b1 = b.shift_down(&mb);
    let (ca, cb) = (a1.content(), b1.content());
    let c = ca.gcd(&cb);
    let pa = a1.primitive();
    let pb = b1.primitive();
    let g = gcd_primitive(&pa, &pb);
    g.scale(&c).shift_up(&mono)
}

fn normalize_sign(a: &Poly) -> Poly {
    if a.lc().is_negative() {
        a.neg()
    } else {
        a.clone()
    }
}

/// Both arguments primitive with positive leading coefficient.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.clone();
    }
    // Monomial-free parts only; a monomial factor shared by both was removed
    // by the caller, a monomial factor of one side is coprime to the other.
    let (ma, mb) = (a.min_exps(), b.min_exps());
    if ma.iter().any(|&e| e > 0) || mb.iter().any(|&e| e > 0) {
        return gcd(&a.shift_down(&ma), &b.shift_down(&mb));
    }
    let (va, vb) = (a.var_mask(), b.var_mask());
    if va != vb {
        let only_a = va & !vb;
        if only_a != 0 {
            let k = only_a.trailing_zeros() as usize;
            return gcd_with_coefficients(b, a, k);
        }
        let k = (vb & !va).trailing_zeros() as usize;
        return gcd_with_coefficients(a, b, k);
    }
    if modular_coprime(a, b) {
        return Poly::one();
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if large.divide(small).is_some() {
        return small.clone();
    }
    if let Some(h) = heu_gcd(a, b) {
        return normalize_sign(&h.primitive());
    }
    prs_gcd(a, b)
}

/// gcd(p, f) where `f` involves variable `k` and `p` does not.
fn gcd_with_coefficients(p: &Poly, f: &Poly, k: usize) -> Poly {
    let mut coeffs: Vec<Poly> = f.coefficients_in(k).into_iter().filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(|c| c.len());
    let mut g = p.clone();
    for c in coeffs {
        g = gcd(&g, &c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g.primitive()
}

fn point(seed: u64, k: usize) -> u64 {
    // splitmix64, deterministic
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) % (PRIME - 2) + 2
}

/// True only when the gcd is certainly constant.
fn modular_coprime(a: &Poly, b: &Poly) -> bool {
    let mask = a.var_mask();
    'vars: for k in 0..MAX_VARS {
        if mask & (1 << k) == 0 {
            continue;
        }
        let lca = leading_coeff_in(a, k);
        let lcb = leading_coeff_in(b, k);
        for attempt in 0..4u64 {
            let mut values = [0u64; MAX_VARS];
            for (j, v) in values.iter_mut().enumerate() {
                *v = point(attempt * 31 + 7, j);
            }
            if lca.eval_mod(&values, PRIME) == 0 || lcb.eval_mod(&values, PRIME) == 0 {
                continue;
            }
            let ua = a.univariate_mod(k, &values, PRIME);
            let ub = b.univariate_mod(k, &values, PRIME);
            let g = univariate_gcd_mod(ua, ub, PRIME);
            if g.len() == 1 {
                // degree of the true gcd in x_k is zero
                continue 'vars;
            }
            return false;
        }
        return false;
    }
    // The gcd has degree zero in every variable shared by both.
    true
}

fn leading_coeff_in(a: &Poly, k: usize) -> Poly {
    let d = a.degree(k);
    Poly::from_terms(a.terms().iter().filter(|(m, _)| m.exp(k) == d).map(|(m, c)| (*m, c.clone())).collect())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn univariate_gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    fn trim(v: &mut Vec<u64>) {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
    }
    fn is_zero(v: &[u64]) -> bool {
        v.iter().all(|&c| c == 0)
    }
    trim(&mut a);
    trim(&mut b);
    while !is_zero(&b) {
        // a mod b
        let db = b.len() - 1;
        let inv = inv_mod(b[db], p);
        while a.len() > db && !is_zero(&a) {
            let da = a.len() - 1;
            let f = mul_mod(a[da], inv, p);
            if f != 0 {
                for i in 0..=db {
                    let s = mul_mod(f, b[i], p);
                    let idx = da - db + i;
                    a[idx] = (a[idx] + p - s) % p;
                }
            }
            a.pop();
            if a.is_empty() {
                a.push(0);
            }
        }
        trim(&mut a);
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn heu_gcd(f: &Poly, g: &Poly) -> Option<Poly> {
    heu_gcd_inner(f, g).map(|(h, _, _)| h)
}

/// Returns `(h, f/h, g/h)`.
fn heu_gcd_inner(f: &Poly, g: &Poly) -> Option<(Poly, Poly, Poly)> {
    if f.is_constant() || g.is_constant() {
        let h = f.content().gcd(&g.content());
        let hp = Poly::constant(h.clone());
        return Some((hp, f.div_int_exact(&h), g.div_int_exact(&h)));
    }
    let gc = f.content().gcd(&g.content());
    let f = f.div_int_exact(&gc);
    let g = g.div_int_exact(&gc);
    let mask = f.var_mask() | g.var_mask();
    let v = mask.trailing_zeros() as usize;
    let (fnorm, gnorm) = (f.max_norm(), g.max_norm());
    let min_norm = if fnorm < gnorm { fnorm.clone() } else { gnorm.clone() };
    let b = &(&min_norm + &min_norm) + &Int::from(29);
    let mut x = {
        let c99 = &Int::from(99) * &b.isqrt();
        let first = if b < c99 { b.clone() } else { c99 };
        let rf = fnorm.div_exact(&f.lc().abs());
        let rg = gnorm.div_exact(&g.lc().abs());
        let rmin = if rf < rg { rf } else { rg };
        let second = &(&rmin + &rmin) + &Int::from(2);
        if first > second {
            first
        } else {
            second
        }
    };
    for _ in 0..HEU_ATTEMPTS {
        let ff = f.eval_var(v, &x);
        let gg = g.eval_var(v, &x);
        if !ff.is_zero() && !gg.is_zero() {
            let (h, cff, cfg) = heu_gcd_inner(&ff, &gg)?;
            let h = interpolate(&h, &x, v).primitive();
            if !h.is_zero() {
                if let (Some(a), Some(b)) = (f.divide(&h), g.divide(&h)) {
                    return Some((h.scale(&gc), a, b));
                }
            }
            let cff = interpolate(&cff, &x, v);
            if !cff.is_zero() {
                if let Some(h) = f.divide(&cff) {
                    if let Some(b) = g.divide(&h) {
                        return Some((h.scale(&gc), cff, b));
                    }
                }
            }
            let cfg = interpolate(&cfg, &x, v);
            if !cfg.is_zero() {
                if let Some(h) = g.divide(&cfg) {
                    if let Some(a) = f.divide(&h) {
                        return Some((h.scale(&gc), a, cfg));
                    }
                }
            }
        }
        // x = 73794*x*isqrt(isqrt(x)) // 27011
        let r = x.isqrt().isqrt();
        x = (&(&Int::from(73794) * &x) * &r).div_exact(&Int::from(27011)).max(&x + &Int::ONE);
    }
    None
}

/// Balanced base-`x` expansion of every coefficient into powers of `x_v`.
fn interpolate(h: &Poly, x: &Int, v: usize) -> Poly {
    let mut terms = Vec::new();
    for (m, c) in h.terms() {
        let mut c = c.clone();
        let mut k = 0u32;
        while !c.is_zero() {
            let d = c.symmetric_mod(x);
            c = (&c - &d).div_exact(x);
            if !d.is_zero() {
                terms.push((m.mul(Mono::var(v, k)), d));
            }
            k += 1;
        }
    }
    let p = Poly::from_terms(terms);
    normalize_sign(&p)
}

/// Primitive remainder sequence over `Z[others][x_v]`.
fn prs_gcd(a: &Poly, b: &Poly) -> Poly {
    let mask = a.var_mask() | b.var_mask();
    if mask == 0 {
        return Poly::one();
    }
    let v = mask.trailing_zeros() as usize;
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let mut pa = dense_in(&a.divide(&ca).expect("content divides"), v);
    let mut pb = dense_in(&b.divide(&cb).expect("content divides"), v);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    while !(pb.len() == 1 && pb[0].is_zero()) {
        let r = pseudo_rem(&pa, &pb);
        pa = pb;
        pb = primitive_dense(r);
    }
    let g = primitive_dense(pa);
    let g = sparse_from(&g, v);
    normalize_sign(&g.mul(&c).primitive())
}

fn content_in(a: &Poly, v: usize) -> Poly {
    let mut g = Poly::zero();
    for c in a.coefficients_in(v) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_constant() {
            break;
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

fn dense_in(a: &Poly, v: usize) -> Vec<Poly> {
    let mut c = a.coefficients_in(v);
    if c.is_empty() {
        c.push(Poly::zero());
    }
    c
}

fn sparse_from(d: &[Poly], v: usize) -> Poly {
    let mut acc = Poly::zero();
    for (k, c) in d.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&c.mul_term(Mono::var(v, k as u32), &Int::ONE));
        }
    }
    acc
}

fn trim_dense(mut d: Vec<Poly>) -> Vec<Poly> {
    while d.len() > 1 && d.last().unwrap().is_zero() {
        d.pop();
    }
    if d.is_empty() {
        d.push(Poly::zero());
    }
    d
}

fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r: Vec<Poly> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = r[idx].sub(&b[i].mul(&lr));
        }
        r.pop();
        r = trim_dense(r);
        if r.len() <= db {
            break;
        }
    }
    trim_dense(r)
}

fn primitive_dense(d: Vec<Poly>) -> Vec<Poly> {
    let d = trim_dense(d);
    let mut g = Poly::zero();
    for c in &d {
        if !c.is_zero() {
            g = gcd(&g, c);
        }
    }
    if g.is_zero() || g.is_one() {
        return d;
    }
    d.into_iter().map(|c| c.divide(&g).expect("content divides")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_terms(terms.iter().map(|(e, c)| (Mono::from_exps(e), Int::from(*c))).collect())
    }

    #[test]
    fn shared_factor_recovered() {
        let g = p(&[(&[1, 1, 0], 2), (&[0, 0, 1], 3), (&[0, 0, 0], -1)]);
        let a = p(&[(&[2, 0, 0], 1), (&[0, 1, 0], -1)]);
        let b = p(&[(&[0, 2, 1], 5), (&[1, 0, 0], 1), (&[0, 0, 0], 7)]);
        let ga = g.mul(&a);
        let gb = g.mul(&b);
        assert_eq!(gcd(&ga, &gb), g);
        assert_eq!(prs_gcd(&ga, &gb), g);
    }

    #[test]
    fn coprime_detected() {
        let a = p(&[(&[2, 0], 1), (&[0, 0], -1)]);
        let b = p(&[(&[1, 1], 1), (&[0, 0], 1)]);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn content_and_monomials() {
        let a = p(&[(&[3, 1], 6), (&[1, 1], 4)]);
        let b = p(&[(&[2, 0], 9), (&[1, 0], 3)]);
        // 2 x y (3x^2 + 2) and 3 x (3x + 1)
        assert_eq!(gcd(&a, &b), p(&[(&[1, 0], 1)]));
    }

    #[test]
    fn heuristic_matches_prs() {
        let f1 = p(&[(&[2, 1, 0], 1), (&[0, 0, 2], -3), (&[1, 0, 0], 1), (&[0, 0, 0], 2)]);
        let f2 = p(&[(&[1, 2, 1], 4), (&[0, 0, 0], -1)]);
        let f3 = p(&[(&[0, 1, 1], 1), (&[1, 0, 0], 1), (&[0, 0, 0], 1)]);
        let a = f1.mul(&f2).mul(&f2);
        let b = f2.mul(&f3);
        let h = heu_gcd(&a, &b).unwrap().primitive();
        assert_eq!(normalize_sign(&h), f2);
        assert_eq!(prs_gcd(&a, &b), f2);
    }

    #[test]
    fn variable_only_in_one_side() {
        // (x0 + 1) * (x1 + 2) and (x0 + 1)^2
        let a = p(&[(&[1, 1], 1), (&[1, 0], 2), (&[0, 1], 1), (&[0, 0], 2)]);
        let b = p(&[(&[2, 0], 1), (&[1, 0], 2), (&[0, 0], 1)]);
        assert_eq!(gcd(&a, &b), p(&[(&[1, 0], 1), (&[0, 0], 1)]));
    }
}
