//! Arbitrary precision integers with an inline fast path for values that fit
//! in an `i64`. Polynomial coefficients are almost always small, so avoiding
//! a heap allocation per coefficient matters for the rational-function layer.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i64),
    Big(BigInt),
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Int::Small(1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(v) => *v < 0,
            Int::Big(b) => b.sign() == Sign::Minus,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Int::Small(v) => v.signum() as i32,
            Int::Big(b) => match b.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn abs(&self) -> Int {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn bits(&self) -> u64 {
        match self {
            Int::Small(v) => 64 - v.unsigned_abs().leading_zeros() as u64,
            Int::Big(b) => b.bits(),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Int::Small(v) => Some(*v),
            Int::Big(_) => None,
        }
    }

    pub fn gcd(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => {
                let g = a.unsigned_abs().gcd(&b.unsigned_abs());
                if g <= i64::MAX as u64 {
                    Int::Small(g as i64)
                } else {
                    Int::from_big(BigInt::from(g))
                }
            }
            _ => Int::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    /// Exact quotient; the caller guarantees divisibility.
    pub fn div_exact(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => match a.checked_div(*b) {
                Some(q) => Int::Small(q),
                None => Int::from_big(BigInt::from(*a) / BigInt::from(*b)),
            },
            _ => Int::from_big(self.to_big() / other.to_big()),
        }
    }

    /// Quotient and remainder if `other` divides `self`.
    pub fn checked_div_exact(&self, other: &Int) -> Option<Int> {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => {
                if *b == 0 {
                    return None;
                }
                if a.checked_rem(*b)? != 0 {
                    return None;
                }
                Some(Int::Small(a.checked_div(*b)?))
            }
            _ => {
                let (q, r) = self.to_big().div_rem(&other.to_big());
                if r.is_zero() {
                    Some(Int::from_big(q))
                } else {
                    None
                }
            }
        }
    }

    /// Balanced residue in `(-m/2, m/2]`.
    pub fn symmetric_mod(&self, m: &Int) -> Int {
        let mb = m.to_big();
        let mut r = self.to_big().mod_floor(&mb);
        if &r + &r > mb {
            r -= &mb;
        }
        Int::from_big(r)
    }

    pub fn mod_u64(&self, p: u64) -> u64 {
        match self {
            Int::Small(v) => v.rem_euclid(p as i64) as u64,
            Int::Big(b) => b.mod_floor(&BigInt::from(p)).to_u64().unwrap(),
        }
    }

    pub fn pow(&self, e: u32) -> Int {
        Int::from_big(num_traits::pow(self.to_big(), e as usize))
    }

    pub fn isqrt(&self) -> Int {
        Int::from_big(self.to_big().sqrt())
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Int {
        Int::Small(v)
    }
}

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Int {
        Int::from_big(b)
    }
}

impl Default for Int {
    fn default() -> Int {
        Int::ZERO
    }
}

impl<'a> Add<&'a Int> for &'a Int {
    type Output = Int;
    fn add(self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(s) = a.checked_add(*b) {
                return Int::Small(s);
            }
        }
        Int::from_big(self.to_big() + o.to_big())
    }
}

impl<'a> Sub<&'a Int> for &'a Int {
    type Output = Int;
    fn sub(self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(s) = a.checked_sub(*b) {
                return Int::Small(s);
            }
        }
        Int::from_big(self.to_big() - o.to_big())
    }
}

impl<'a> Mul<&'a Int> for &'a Int {
    type Output = Int;
    fn mul(self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(s) = a.checked_mul(*b) {
                return Int::Small(s);
            }
        }
        Int::from_big(self.to_big() * o.to_big())
    }
}

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-b),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Int) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Int {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Int, Self::Err> {
        Ok(Int::from_big(BigInt::from_str(s)?))
    }
}

impl Zero for Int {
    fn zero() -> Int {
        Int::ZERO
    }
    fn is_zero(&self) -> bool {
        Int::is_zero(self)
    }
}

impl Add for Int {
    type Output = Int;
    fn add(self, o: Int) -> Int {
        &self + &o
    }
}

impl Mul for Int {
    type Output = Int;
    fn mul(self, o: Int) -> Int {
        &self * &o
    }
}

impl One for Int {
    fn one() -> Int {
        Int::ONE
    }
}

impl Signed for Int {
    fn abs(&self) -> Int {
        Int::abs(self)
    }
    fn abs_sub(&self, other: &Int) -> Int {
        if self <= other {
            Int::ZERO
        } else {
            self - other
        }
    }
    fn signum(&self) -> Int {
        Int::Small(Int::signum(self) as i64)
    }
    fn is_positive(&self) -> bool {
        Int::signum(self) > 0
    }
    fn is_negative(&self) -> bool {
        Int::is_negative(self)
    }
}

impl Sub for Int {
    type Output = Int;
    fn sub(self, o: Int) -> Int {
        &self - &o
    }
}

impl std::ops::Div for Int {
    type Output = Int;
    fn div(self, o: Int) -> Int {
        Int::from_big(self.to_big() / o.to_big())
    }
}

impl std::ops::Rem for Int {
    type Output = Int;
    fn rem(self, o: Int) -> Int {
        Int::from_big(self.to_big() % o.to_big())
    }
}

impl num_traits::Num for Int {
    type FromStrRadixErr = num_bigint::ParseBigIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Int, Self::FromStrRadixErr> {
        Ok(Int::from_big(BigInt::from_str_radix(s, radix)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes() {
        let a = Int::from(i64::MAX);
        let b = &a + &Int::ONE;
        assert!(matches!(b, Int::Big(_)));
        let c = &b - &Int::ONE;
        assert_eq!(c, a);
        assert!(matches!(c, Int::Small(_)));
        let m = &a * &a;
        assert_eq!(m.to_big(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        assert_eq!(-&Int::from(i64::MIN), Int::from(BigInt::from(i64::MIN).neg()));
    }

    #[test]
    fn symmetric_residue() {
        let m = Int::from(10);
        assert_eq!(Int::from(7).symmetric_mod(&m), Int::from(-3));
        assert_eq!(Int::from(5).symmetric_mod(&m), Int::from(5));
        assert_eq!(Int::from(-6).symmetric_mod(&m), Int::from(4));
    }

    #[test]
    fn exact_division() {
        assert_eq!(Int::from(12).checked_div_exact(&Int::from(4)), Some(Int::from(3)));
        assert_eq!(Int::from(13).checked_div_exact(&Int::from(4)), None);
        assert_eq!(Int::from(13).checked_div_exact(&Int::ZERO), None);
    }
}
