//! Rational functions in `q, z_1, ..., z_4` with Laurent monomials.
//!
//! Canonical form: `x^shift * num / den` where `num` and `den` are integer
//! polynomials without monomial factors, `gcd(num, den) = 1` (integer content
//! included) and the leading coefficient of `den` is positive. Two values are
//! equal iff their representations are identical.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::gcd::gcd;
use super::int::Int;
use super::poly::{format_mono, format_poly, Mono, Poly, MAX_VARS};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    shift: [i32; MAX_VARS],
    num: Poly,
    den: Poly,
}

pub fn var_names() -> Vec<String> {
    let mut v = vec!["q".to_string()];
    v.extend((1..MAX_VARS).map(|i| format!("z{i}")));
    v
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc { shift: [0; MAX_VARS], num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc::from_int(1)
    }

    pub fn from_int(v: i64) -> RatFunc {
        RatFunc::from_integer(Int::from(v))
    }

    pub fn from_integer(v: Int) -> RatFunc {
        RatFunc { shift: [0; MAX_VARS], num: Poly::constant(v), den: Poly::one() }
    }

    pub fn from_rational(r: &BigRational) -> RatFunc {
        let n = RatFunc::from_integer(Int::from(r.numer().clone()));
        let d = RatFunc::from_integer(Int::from(r.denom().clone()));
        n.div(&d).expect("nonzero denominator")
    }

    /// `x_0^{e_0} ... x_4^{e_4}` with possibly negative exponents.
    pub fn monomial(exps: &[i64]) -> RatFunc {
        let mut shift = [0i32; MAX_VARS];
        for (s, &e) in shift.iter_mut().zip(exps) {
            *s = i32::try_from(e).expect("exponent out of range");
        }
        RatFunc { shift, num: Poly::one(), den: Poly::one() }
    }

    pub fn var(k: usize) -> RatFunc {
        let mut e = [0i64; MAX_VARS];
        e[k] = 1;
        RatFunc::monomial(&e)
    }

    pub fn from_poly(p: &Poly) -> RatFunc {
        RatFunc::from_parts([0; MAX_VARS], p.clone(), Poly::one())
    }

    /// Builds the canonical form of `x^shift * num / den` (den nonzero).
    pub fn from_parts(shift: [i32; MAX_VARS], num: Poly, den: Poly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.divide(&g).expect("gcd divides"), den.divide(&g).expect("gcd divides"))
        };
        RatFunc::normalize(shift, num, den)
    }

    /// Moves monomial factors into the shift and fixes the sign; assumes
    /// `num` and `den` are already coprime.
    fn normalize(mut shift: [i32; MAX_VARS], mut num: Poly, mut den: Poly) -> RatFunc {
        let mn = num.min_exps();
        if mn.iter().any(|&e| e > 0) {
            num = num.shift_down(&mn);
            for k in 0..MAX_VARS {
                shift[k] += mn[k] as i32;
            }
        }
        let md = den.min_exps();
        if md.iter().any(|&e| e > 0) {
            den = den.shift_down(&md);
            for k in 0..MAX_VARS {
                shift[k] -= md[k] as i32;
            }
        }
        if den.lc().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { shift, num, den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn shift(&self) -> &[i32; MAX_VARS] {
        &self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == [0; MAX_VARS] && self.num.is_one() && self.den.is_one()
    }

    /// True when no `z` variable occurs.
    pub fn is_q_only(&self) -> bool {
        let mask = self.num.var_mask() | self.den.var_mask();
        mask & !1 == 0 && self.shift[1..].iter().all(|&s| s == 0)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { shift: self.shift, num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        let mut shift = self.shift;
        for k in 0..MAX_VARS {
            shift[k] += o.shift[k];
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc { shift, num: self.num.mul(&o.num), den: Poly::one() };
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.divide(&g1).expect("gcd divides");
        let d2 = o.den.divide(&g1).expect("gcd divides");
        let n2 = o.num.divide(&g2).expect("gcd divides");
        let d1 = self.den.divide(&g2).expect("gcd divides");
        let mut den = d1.mul(&d2);
        let mut num = n1.mul(&n2);
        if den.lc().is_negative() {
            den = den.neg();
            num = num.neg();
        }
        RatFunc { shift, num, den }
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let mut base = [0i32; MAX_VARS];
        let mut ea = [0u32; MAX_VARS];
        let mut eb = [0u32; MAX_VARS];
        for k in 0..MAX_VARS {
            base[k] = self.shift[k].min(o.shift[k]);
            ea[k] = (self.shift[k] - base[k]) as u32;
            eb[k] = (o.shift[k] - base[k]) as u32;
        }
        let an = self.num.shift_up(&ea);
        let bn = o.num.shift_up(&eb);
        if self.den == o.den {
            let t = an.add(&bn);
            if t.is_zero() {
                return RatFunc::zero();
            }
            if self.den.is_one() {
                return RatFunc::normalize(base, t, Poly::one());
            }
            return RatFunc::from_parts(base, t, self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        let (ad, bd) = if g.is_one() {
            (self.den.clone(), o.den.clone())
        } else {
            (self.den.divide(&g).expect("gcd divides"), o.den.divide(&g).expect("gcd divides"))
        };
        let t = an.mul(&bd).add(&bn.mul(&ad));
        if t.is_zero() {
            return RatFunc::zero();
        }
        let h = if g.is_one() { Poly::one() } else { gcd(&t, &g) };
        let (t, obd) = if h.is_one() {
            (t, o.den.clone())
        } else {
            (t.divide(&h).expect("gcd divides"), o.den.divide(&h).expect("gcd divides"))
        };
        RatFunc::normalize(base, t, ad.mul(&obd))
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut shift = self.shift;
        shift.iter_mut().for_each(|s| *s = -*s);
        Ok(RatFunc::normalize(shift, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&o.inv()?))
    }

    /// Smallest `x^s * L` (L the lcm of the denominators) turning every
    /// entry into a polynomial.
    pub fn clearing_factor(items: &[RatFunc]) -> RatFunc {
        let mut shift = [0i32; MAX_VARS];
        let mut l = Poly::one();
        for x in items.iter().filter(|x| !x.is_zero()) {
            for k in 0..MAX_VARS {
                shift[k] = shift[k].max(-x.shift[k]);
            }
            if !x.den.is_one() && l != x.den {
                let g = gcd(&l, &x.den);
                l = l.mul(&x.den.divide(&g).expect("gcd divides"));
            }
        }
        RatFunc { shift, num: l, den: Poly::one() }
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = RatFunc::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Exact evaluation at `q = q0`, `z_i = z0[i-1]`; missing `z` values are
    /// only allowed for variables that do not occur.
    pub fn specialize(&self, q0: &BigRational, z0: &[BigRational]) -> Result<BigRational> {
        let mut point = vec![q0.clone()];
        point.extend(z0.iter().cloned());
        let d = eval_poly(&self.den, &point)?;
        if d.is_zero() {
            return Err(Error::Pole(format_poly(&self.den, &var_names())));
        }
        let n = eval_poly(&self.num, &point)?;
        let mut r = n / d;
        for (k, &s) in self.shift.iter().enumerate() {
            if s != 0 {
                let x = point.get(k).ok_or_else(|| Error::Unsupported(format!("no value for variable {k}")))?;
                if x.is_zero() {
                    return Err(Error::Pole(var_names()[k].clone()));
                }
                r *= pow_rational(x, s);
            }
        }
        Ok(r)
    }

    /// JSON object `{num: [[coeff, e_q, e_z1, ...], ...], den: [...]}`; the
    /// Laurent shift is folded into the numerator exponents.
    pub fn to_json(&self, nvars: usize) -> Value {
        let enc = |p: &Poly, shift: &[i32; MAX_VARS]| -> Value {
            let terms: Vec<Value> = p
                .terms()
                .iter()
                .map(|(m, c)| {
                    let mut row = vec![Value::String(c.to_string())];
                    for k in 0..nvars {
                        row.push(json!(m.exp(k) as i64 + shift[k] as i64));
                    }
                    Value::Array(row)
                })
                .collect();
            Value::Array(terms)
        };
        json!({ "num": enc(&self.num, &self.shift), "den": enc(&self.den, &[0; MAX_VARS]) })
    }

    pub fn from_json(v: &Value) -> Result<RatFunc> {
        let parse_side = |key: &str| -> Result<RatFunc> {
            let arr =
                v.get(key).and_then(Value::as_array).ok_or_else(|| Error::Parse(format!("missing array `{key}`")))?;
            let mut acc = RatFunc::zero();
            for row in arr {
                let row = row.as_array().ok_or_else(|| Error::Parse("term is not an array".into()))?;
                let c = row
                    .first()
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("coefficient must be a string".into()))?;
                let c = parse_rational(c)?;
                let exps: Vec<i64> = row[1..]
                    .iter()
                    .map(|e| e.as_i64().ok_or_else(|| Error::Parse("exponent must be an integer".into())))
                    .collect::<Result<_>>()?;
                if exps.len() > MAX_VARS {
                    return Err(Error::Parse("too many variables".into()));
                }
                acc = acc.add(&RatFunc::from_rational(&c).mul(&RatFunc::monomial(&exps)));
            }
            Ok(acc)
        };
        let num = parse_side("num")?;
        let den = parse_side("den")?;
        num.div(&den).map_err(|_| Error::Parse("zero denominator".into()))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub(crate) fn pow_rational(x: &BigRational, e: i32) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

fn eval_poly(p: &Poly, point: &[BigRational]) -> Result<BigRational> {
    let max = p.max_exps();
    let mut powers: Vec<Vec<BigRational>> = Vec::with_capacity(MAX_VARS);
    for (k, &m) in max.iter().enumerate() {
        if m == 0 {
            powers.push(vec![BigRational::one()]);
            continue;
        }
        let x = point.get(k).ok_or_else(|| Error::Unsupported(format!("no value for variable {k}")))?;
        let mut row = Vec::with_capacity(m as usize + 1);
        let mut acc = BigRational::one();
        for _ in 0..=m {
            row.push(acc.clone());
            acc *= x;
        }
        powers.push(row);
    }
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let mut t = BigRational::from_integer(c.to_big());
        for (k, row) in powers.iter().enumerate() {
            let e = m.exp(k) as usize;
            if e > 0 {
                t *= &row[e];
            }
        }
        acc += t;
    }
    Ok(acc)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = var_names();
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut pos = Vec::new();
        let mut negs = [0u32; MAX_VARS];
        let mut posx = [0u32; MAX_VARS];
        for (k, &s) in self.shift.iter().enumerate() {
            if s > 0 {
                posx[k] = s as u32;
            } else {
                negs[k] = (-s) as u32;
            }
        }
        let pm = format_mono(Mono::from_exps(&posx), &names);
        let nm = format_mono(Mono::from_exps(&negs), &names);
        let num = format_poly(&self.num, &names);
        if !pm.is_empty() {
            pos.push(pm);
        }
        if !(self.num.is_one() && !pos.is_empty()) {
            if self.num.len() > 1 {
                pos.push(format!("({num})"));
            } else {
                pos.push(num);
            }
        }
        let mut den = Vec::new();
        if !nm.is_empty() {
            den.push(nm);
        }
        if !self.den.is_one() {
            let d = format_poly(&self.den, &names);
            den.push(if self.den.len() > 1 { format!("({d})") } else { d });
        }
        write!(f, "{}", pos.join("*"))?;
        if !den.is_empty() {
            if den.len() == 1 {
                write!(f, "/{}", den[0])?;
            } else {
                write!(f, "/({})", den.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
