//! Sparse multivariate polynomials over the integers.
//!
//! Monomials pack up to [`MAX_VARS`] exponents into a `u64`, twelve bits per
//! variable, variable 0 in the most significant field. Comparing packed words
//! is therefore the lexicographic order with variable 0 dominant, and
//! multiplying monomials is integer addition.

use std::collections::BTreeMap;
use std::fmt;

use super::int::Int;

pub const MAX_VARS: usize = 5;
const BITS: u32 = 12;
const FIELD_MASK: u64 = (1 << BITS) - 1;
pub const MAX_EXP: u32 = FIELD_MASK as u32;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(pub u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    fn shift(k: usize) -> u32 {
        BITS * (MAX_VARS - 1 - k) as u32
    }

    pub fn from_exps(exps: &[u32]) -> Mono {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut m = 0u64;
        for (k, &e) in exps.iter().enumerate() {
            assert!(e <= MAX_EXP, "exponent {e} exceeds packed range");
            m |= (e as u64) << Mono::shift(k);
        }
        Mono(m)
    }

    pub fn var(k: usize, e: u32) -> Mono {
        let mut exps = [0u32; MAX_VARS];
        exps[k] = e;
        Mono::from_exps(&exps)
    }

    #[inline]
    pub fn exp(self, k: usize) -> u32 {
        ((self.0 >> Mono::shift(k)) & FIELD_MASK) as u32
    }

    pub fn exps(self) -> [u32; MAX_VARS] {
        let mut out = [0u32; MAX_VARS];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.exp(k);
        }
        out
    }

    #[inline]
    pub fn mul(self, o: Mono) -> Mono {
        Mono(self.0 + o.0)
    }

    pub fn divides(self, o: Mono) -> bool {
        (0..MAX_VARS).all(|k| self.exp(k) <= o.exp(k))
    }

    pub fn checked_div(self, d: Mono) -> Option<Mono> {
        if d.divides(self) {
            Some(Mono(self.0 - d.0))
        } else {
            None
        }
    }

    pub fn total_degree(self) -> u32 {
        (0..MAX_VARS).map(|k| self.exp(k)).sum()
    }

    pub fn without_var(self, k: usize) -> Mono {
        Mono(self.0 & !(FIELD_MASK << Mono::shift(k)))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}

/// Terms are kept sorted by strictly decreasing monomial with nonzero
/// coefficients, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Mono, Int)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Int::ONE)
    }

    pub fn constant(c: Int) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::ONE, c)] }
        }
    }

    pub fn term(m: Mono, c: Int) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(k: usize) -> Poly {
        Poly::term(Mono::var(k, 1), Int::ONE)
    }

    /// Builds from arbitrary (unsorted, possibly repeated) terms.
    pub fn from_terms(mut terms: Vec<(Mono, Int)>) -> Poly {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Mono, Int)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = &*lc + &c,
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Mono, Int)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == Mono::ONE)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Mono::ONE && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<Int> {
        if self.terms.is_empty() {
            Some(Int::ZERO)
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Mono, Int)> {
        self.terms.first()
    }

    pub fn lc(&self) -> Int {
        self.terms.first().map(|t| t.1.clone()).unwrap_or(Int::ZERO)
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.merge(o, true)
    }

    fn merge(&self, o: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].0 > b[j].0 {
                out.push(a[i].clone());
                i += 1;
            } else if a[i].0 < b[j].0 {
                let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { terms: out }
    }

    pub fn max_exps(&self) -> [u32; MAX_VARS] {
        let mut out = [0u32; MAX_VARS];
        for (m, _) in &self.terms {
            for (k, o) in out.iter_mut().enumerate() {
                *o = (*o).max(m.exp(k));
            }
        }
        out
    }

    pub fn min_exps(&self) -> [u32; MAX_VARS] {
        if self.terms.is_empty() {
            return [0; MAX_VARS];
        }
        let mut out = [u32::MAX; MAX_VARS];
        for (m, _) in &self.terms {
            for (k, o) in out.iter_mut().enumerate() {
                *o = (*o).min(m.exp(k));
            }
        }
        out
    }

    fn check_product_range(&self, o: &Poly) {
        let (a, b) = (self.max_exps(), o.max_exps());
        for k in 0..MAX_VARS {
            assert!(a[k] + b[k] <= MAX_EXP, "polynomial degree overflow in variable {k}");
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if o.terms.len() == 1 {
            return self.mul_term(o.terms[0].0, &o.terms[0].1);
        }
        if self.terms.len() == 1 {
            return o.mul_term(self.terms[0].0, &self.terms[0].1);
        }
        self.check_product_range(o);
        let (small, large) = if self.terms.len() <= o.terms.len() { (self, o) } else { (o, self) };
        // Accumulate row by row; each row is already sorted.
        let mut acc: Vec<(Mono, Int)> = Vec::with_capacity(small.len() * large.len());
        for (m, c) in &small.terms {
            for (m2, c2) in &large.terms {
                acc.push((m.mul(*m2), c * c2));
            }
        }
        Poly::from_terms(acc)
    }

    pub fn mul_term(&self, m: Mono, c: &Int) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if !self.terms.is_empty() {
            let mx = self.max_exps();
            for (k, e) in mx.iter().enumerate() {
                assert!(e + m.exp(k) <= MAX_EXP, "polynomial degree overflow in variable {k}");
            }
        }
        Poly { terms: self.terms.iter().map(|(m2, c2)| (m2.mul(m), c2 * c)).collect() }
    }

    pub fn scale(&self, c: &Int) -> Poly {
        self.mul_term(Mono::ONE, c)
    }

    pub fn div_int_exact(&self, c: &Int) -> Poly {
        if c.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, c2)| (*m, c2.div_exact(c))).collect() }
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> Int {
        let mut g = Int::ZERO;
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.lc().is_negative() {
            c = -c;
        }
        self.div_int_exact(&c)
    }

    pub fn max_norm(&self) -> Int {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or(Int::ZERO)
    }

    pub fn shift_down(&self, e: &[u32; MAX_VARS]) -> Poly {
        let d = Mono::from_exps(e);
        Poly { terms: self.terms.iter().map(|(m, c)| (Mono(m.0 - d.0), c.clone())).collect() }
    }

    pub fn shift_up(&self, e: &[u32; MAX_VARS]) -> Poly {
        self.mul_term(Mono::from_exps(e), &Int::ONE)
    }

    pub fn degree(&self, k: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(k)).max().unwrap_or(0)
    }

    /// Bitmask of variables with a positive exponent somewhere.
    pub fn var_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (m, _) in &self.terms {
            for k in 0..MAX_VARS {
                if m.exp(k) > 0 {
                    mask |= 1 << k;
                }
            }
        }
        mask
    }

    /// Coefficients with respect to variable `k`, indexed by degree.
    pub fn coefficients_in(&self, k: usize) -> Vec<Poly> {
        let deg = self.degree(k) as usize;
        let mut buckets: Vec<Vec<(Mono, Int)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(k) as usize].push((m.without_var(k), c.clone()));
        }
        // Removing one variable preserves the relative order.
        buckets.into_iter().map(|t| Poly { terms: t }).collect()
    }

    /// Substitutes an integer for variable `k`.
    pub fn eval_var(&self, k: usize, x: &Int) -> Poly {
        let deg = self.degree(k);
        let mut powers = Vec::with_capacity(deg as usize + 1);
        let mut p = Int::ONE;
        for _ in 0..=deg {
            powers.push(p.clone());
            p = &p * x;
        }
        let terms = self.terms.iter().map(|(m, c)| (m.without_var(k), c * &powers[m.exp(k) as usize])).collect();
        Poly::from_terms(terms)
    }

    /// Exact division in `Z[x]`; `None` when `d` does not divide `self`.
    pub fn divide(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                out.push((m.checked_div(*dm)?, c.checked_div_exact(dc)?));
            }
            return Some(Poly { terms: out });
        }
        let (dm, dc) = d.terms[0].clone();
        // Quick degree rejection.
        let (smax, dmax) = (self.max_exps(), d.max_exps());
        if (0..MAX_VARS).any(|k| dmax[k] > smax[k]) {
            return None;
        }
        let mut rem: BTreeMap<Mono, Int> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(Mono, Int)> = Vec::new();
        while let Some((&lm, _)) = rem.iter().next_back() {
            let lc = rem.remove(&lm).unwrap();
            let qm = lm.checked_div(dm)?;
            let qc = lc.checked_div_exact(&dc)?;
            for (m, c) in &d.terms[1..] {
                let key = m.mul(qm);
                let prod = c * &qc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let v = e.get() - &prod;
                        if v.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = v;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-prod);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Evaluates modulo a prime with the given variable values.
    pub fn eval_mod(&self, values: &[u64; MAX_VARS], p: u64) -> u64 {
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = c.mod_u64(p);
            for (k, v) in values.iter().enumerate() {
                let e = m.exp(k);
                if e > 0 {
                    t = mul_mod(t, pow_mod(*v, e as u64, p), p);
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    /// Univariate image modulo `p` in variable `k` with the other variables
    /// fixed; dense coefficients, low degree first.
    pub fn univariate_mod(&self, k: usize, values: &[u64; MAX_VARS], p: u64) -> Vec<u64> {
        let deg = self.degree(k) as usize;
        let mut out = vec![0u64; deg + 1];
        for (m, c) in &self.terms {
            let mut t = c.mod_u64(p);
            for (j, v) in values.iter().enumerate() {
                if j == k {
                    continue;
                }
                let e = m.exp(j);
                if e > 0 {
                    t = mul_mod(t, pow_mod(*v, e as u64, p), p);
                }
            }
            let d = m.exp(k) as usize;
            out[d] = (out[d] + t) % p;
        }
        while out.len() > 1 && *out.last().unwrap() == 0 {
            out.pop();
        }
        out
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Formats with the given variable names, highest term first.
pub fn format_poly(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mono = format_mono(*m, names);
        if mono.is_empty() {
            s.push_str(&a.to_string());
        } else if a.is_one() {
            s.push_str(&mono);
        } else {
            s.push_str(&format!("{a}*{mono}"));
        }
    }
    s
}

pub(crate) fn format_mono(m: Mono, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (k, name) in names.iter().enumerate().take(MAX_VARS) {
        let e = m.exp(k);
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..MAX_VARS).map(|k| format!("x{k}")).collect();
        write!(f, "{}", format_poly(self, &names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_terms(terms.iter().map(|(e, c)| (Mono::from_exps(e), Int::from(*c))).collect())
    }

    #[test]
    fn packed_order_is_lex() {
        assert!(Mono::from_exps(&[1, 0]) > Mono::from_exps(&[0, 9]));
        assert!(Mono::from_exps(&[1, 2]) > Mono::from_exps(&[1, 1]));
    }

    #[test]
    fn mul_and_divide_roundtrip() {
        let a = p(&[(&[2, 0], 1), (&[0, 1], -3), (&[0, 0], 5)]);
        let b = p(&[(&[1, 1], 2), (&[0, 0], -1)]);
        let ab = a.mul(&b);
        assert_eq!(ab.divide(&b), Some(a.clone()));
        assert_eq!(ab.divide(&a), Some(b.clone()));
        let c = p(&[(&[1, 0], 1), (&[0, 0], 1)]);
        assert_eq!(ab.divide(&c), None);
    }

    #[test]
    fn cancellation_leaves_zero() {
        let a = p(&[(&[1], 1)]);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn eval_and_coefficients() {
        // (x0 + 2) * x1^2 + 3
        let a = p(&[(&[1, 2], 1), (&[0, 2], 2), (&[0, 0], 3)]);
        let e = a.eval_var(0, &Int::from(5));
        assert_eq!(e, p(&[(&[0, 2], 7), (&[0, 0], 3)]));
        let cs = a.coefficients_in(1);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], Poly::constant(Int::from(3)));
        assert!(cs[1].is_zero());
        assert_eq!(cs[2], p(&[(&[1], 1), (&[0], 2)]));
    }
}
