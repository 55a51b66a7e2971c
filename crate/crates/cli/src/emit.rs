//! Scalar emission. JSON is canonical; text output is for reading diffs and
//! rewrites recognizable q-integer factors as `[n]_q`.

use num_rational::BigRational;
use serde_json::{json, Value};
use shapoform_core::linalg::SVec;
use shapoform_core::scalars::{Int, Mono, Poly, RatFunc};

/// Largest `n` tried when recognizing `[n]_q`.
const MAX_QINT: u32 = 16;

pub trait Scalar {
    fn to_value(&self, nvars: usize) -> Value;
    fn to_text(&self) -> String;
}

impl Scalar for BigRational {
    fn to_value(&self, _nvars: usize) -> Value {
        Value::String(self.to_string())
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Scalar for RatFunc {
    fn to_value(&self, nvars: usize) -> Value {
        self.to_json(nvars)
    }
    fn to_text(&self) -> String {
        pretty(self)
    }
}

/// `q^{n-1}[n]_q = 1 + q^2 + ... + q^{2(n-1)}`.
fn qint_poly(n: u32) -> Poly {
    Poly::from_terms((0..n).map(|k| (Mono::var(0, 2 * k), Int::from(1))).collect())
}

fn strip(p: &Poly, counts: &mut [u32]) -> Poly {
    let mut rest = p.clone();
    for n in (2..=MAX_QINT).rev() {
        let d = qint_poly(n);
        while let Some(r) = rest.divide(&d) {
            rest = r;
            counts[n as usize] += 1;
        }
    }
    rest
}

fn qint_ratfunc(n: u32) -> RatFunc {
    RatFunc::from_poly(&qint_poly(n)).mul(&RatFunc::monomial(&[-(n as i64 - 1)]))
}

fn factors(counts: &[u32]) -> Vec<String> {
    let mut out = Vec::new();
    for (n, &k) in counts.iter().enumerate() {
        match k {
            0 => {}
            1 => out.push(format!("[{n}]_q")),
            _ => out.push(format!("[{n}]_q^{k}")),
        }
    }
    out
}

pub fn pretty(x: &RatFunc) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut up = vec![0u32; MAX_QINT as usize + 1];
    let mut down = vec![0u32; MAX_QINT as usize + 1];
    strip(x.numerator(), &mut up);
    strip(x.denominator(), &mut down);
    if up.iter().chain(&down).all(|&k| k == 0) {
        return x.to_string();
    }
    let mut rest = x.clone();
    for (n, (&u, &d)) in up.iter().zip(&down).enumerate() {
        let qn = qint_ratfunc(n as u32);
        for _ in 0..u {
            rest = rest.div(&qn).expect("nonzero q-integer");
        }
        for _ in 0..d {
            rest = rest.mul(&qn);
        }
    }
    let mut num = factors(&up);
    if !rest.is_one() || num.is_empty() {
        let r = rest.to_string();
        num.insert(0, if r.contains(['+', '/']) || r[1..].contains('-') { format!("({r})") } else { r });
    }
    let den = factors(&down);
    match den.len() {
        0 => num.join("*"),
        1 => format!("{}/{}", num.join("*"), den[0]),
        _ => format!("{}/({})", num.join("*"), den.join("*")),
    }
}

pub fn svec_value<E: Scalar>(v: &SVec<E>, labels: &[String], nvars: usize) -> Value {
    Value::Array(v.iter().map(|(k, c)| json!({ "basis": labels[*k], "value": c.to_value(nvars) })).collect())
}

pub fn svec_text<E: Scalar>(v: &SVec<E>, labels: &[String]) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter().map(|(k, c)| format!("({})·{}", c.to_text(), labels[*k])).collect::<Vec<_>>().join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_q_integers() {
        let three = qint_ratfunc(3);
        let two = qint_ratfunc(2);
        assert_eq!(pretty(&three), "[3]_q");
        assert_eq!(pretty(&RatFunc::one().div(&two).unwrap()), "1/[2]_q");
        let z = RatFunc::var(1);
        let s = pretty(&z.mul(&three).div(&two.mul(&two)).unwrap());
        assert_eq!(s, "z1*[3]_q/[2]_q^2");
        assert_eq!(pretty(&z), "z1");
    }
}
