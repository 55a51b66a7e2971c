//! The coefficient fields the algorithms are generic over.
//!
//! [`SymbolicField`] is `Q(q)(z_1, ..., z_r)` with `z_i = q^{(λ,α_i)}` formal;
//! [`NumericField`] is `Q` with `q` and every `z_i` substituted by fixed
//! rationals. Running the same code over both is how specializations are
//! checked without trusting a separate evaluator.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::exponent::{AffineExponent, MAX_RANK};
use super::ratfunc::{pow_rational, RatFunc};
use crate::error::{Error, Result};

pub trait Field: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + Send + Sync + fmt::Debug + fmt::Display;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn int(&self, v: i64) -> Self::Elem;
    fn rational(&self, r: &BigRational) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    /// `q^x`.
    fn monomial(&self, x: &AffineExponent) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// A nonzero factor that makes every entry of `row` "integral" (for
    /// rational functions: a polynomial); fraction-free elimination relies
    /// on it only for efficiency.
    fn clearing_factor(&self, _row: &[Self::Elem]) -> Self::Elem {
        self.one()
    }

    fn q(&self) -> Self::Elem {
        self.monomial(&AffineExponent::constant(1))
    }

    /// `[x]_q = (q^x - q^{-x}) / (q - q^{-1})`.
    fn q_int(&self, x: &AffineExponent) -> Self::Elem {
        if x.is_zero() {
            return self.zero();
        }
        let m = self.monomial(x);
        let mi = self.monomial(&-*x);
        let q = self.q();
        let qi = self.monomial(&AffineExponent::constant(-1));
        self.div(&self.sub(&m, &mi), &self.sub(&q, &qi)).expect("q is not a root of unity")
    }

    /// `φ(x) = q^{-x} / [x]_q`.
    fn phi(&self, x: &AffineExponent) -> Result<Self::Elem> {
        let d = self.q_int(x);
        if self.is_zero(&d) {
            return Err(Error::PhiPole(x.to_string()));
        }
        self.div(&self.monomial(&-*x), &d)
    }

    /// `q - q^{-1}`.
    fn q_diff(&self) -> Self::Elem {
        self.sub(&self.q(), &self.monomial(&AffineExponent::constant(-1)))
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicField {
    pub rank: usize,
}

impl SymbolicField {
    pub fn new(rank: usize) -> SymbolicField {
        assert!(rank <= MAX_RANK, "rank above {MAX_RANK} is not supported");
        SymbolicField { rank }
    }
}

impl Field for SymbolicField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::zero()
    }
    fn one(&self) -> RatFunc {
        RatFunc::one()
    }
    fn int(&self, v: i64) -> RatFunc {
        RatFunc::from_int(v)
    }
    fn rational(&self, r: &BigRational) -> RatFunc {
        RatFunc::from_rational(r)
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &RatFunc) -> bool {
        a.is_one()
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.add(b)
    }
    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.sub(b)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.mul(b)
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        a.neg()
    }
    fn inv(&self, a: &RatFunc) -> Result<RatFunc> {
        a.inv()
    }
    fn clearing_factor(&self, row: &[RatFunc]) -> RatFunc {
        RatFunc::clearing_factor(row)
    }
    fn monomial(&self, x: &AffineExponent) -> RatFunc {
        let mut e = vec![x.constant];
        e.extend_from_slice(&x.lambda);
        RatFunc::monomial(&e)
    }
}

/// `Q` with `q = q0` and `z_i = z0[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericField {
    pub q0: BigRational,
    pub z0: Vec<BigRational>,
}

impl NumericField {
    pub fn new(q0: BigRational, z0: Vec<BigRational>) -> Result<NumericField> {
        let one = BigRational::one();
        if q0.is_zero() || q0 == one || q0 == -one {
            return Err(Error::Unsupported(format!("q0 = {q0} is excluded")));
        }
        if z0.len() > MAX_RANK || z0.iter().any(Zero::is_zero) {
            return Err(Error::Unsupported("z values must be nonzero, at most four".into()));
        }
        Ok(NumericField { q0, z0 })
    }

    pub fn specialize(&self, f: &RatFunc) -> Result<BigRational> {
        f.specialize(&self.q0, &self.z0)
    }
}

impl Field for NumericField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn int(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn rational(&self, r: &BigRational) -> BigRational {
        r.clone()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn monomial(&self, x: &AffineExponent) -> BigRational {
        let mut r = pow_rational(&self.q0, x.constant as i32);
        for (i, &a) in x.lambda.iter().enumerate() {
            if a != 0 {
                let z = self.z0.get(i).expect("no value for z_i");
                r *= pow_rational(z, a as i32);
            }
        }
        r
    }
}
