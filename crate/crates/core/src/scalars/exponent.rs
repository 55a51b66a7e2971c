use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

pub const MAX_RANK: usize = 4;

/// Exponent `c + sum_i a_i (lambda, alpha_i)`, so that `q^x` is the monomial
/// `q^c z_1^{a_1} ... z_r^{a_r}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AffineExponent {
    pub constant: i64,
    pub lambda: [i64; MAX_RANK],
}

impl AffineExponent {
    pub const ZERO: AffineExponent = AffineExponent { constant: 0, lambda: [0; MAX_RANK] };

    pub fn constant(c: i64) -> AffineExponent {
        AffineExponent { constant: c, lambda: [0; MAX_RANK] }
    }

    /// `(lambda, alpha_i)`.
    pub fn lambda_simple(i: usize) -> AffineExponent {
        let mut lambda = [0; MAX_RANK];
        lambda[i] = 1;
        AffineExponent { constant: 0, lambda }
    }

    pub fn new(constant: i64, lambda: &[i64]) -> AffineExponent {
        assert!(lambda.len() <= MAX_RANK);
        let mut l = [0; MAX_RANK];
        l[..lambda.len()].copy_from_slice(lambda);
        AffineExponent { constant, lambda: l }
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.is_constant()
    }

    pub fn is_constant(&self) -> bool {
        self.lambda.iter().all(|&a| a == 0)
    }

    pub fn scale(&self, k: i64) -> AffineExponent {
        let mut l = self.lambda;
        l.iter_mut().for_each(|a| *a *= k);
        AffineExponent { constant: self.constant * k, lambda: l }
    }
}

impl Add for AffineExponent {
    type Output = AffineExponent;
    fn add(self, o: AffineExponent) -> AffineExponent {
        let mut l = self.lambda;
        for (a, b) in l.iter_mut().zip(o.lambda) {
            *a += b;
        }
        AffineExponent { constant: self.constant + o.constant, lambda: l }
    }
}

impl Sub for AffineExponent {
    type Output = AffineExponent;
    fn sub(self, o: AffineExponent) -> AffineExponent {
        self + (-o)
    }
}

impl Neg for AffineExponent {
    type Output = AffineExponent;
    fn neg(self) -> AffineExponent {
        self.scale(-1)
    }
}

impl fmt::Display for AffineExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &a) in self.lambda.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("(λ,α{})", i + 1)),
                -1 => parts.push(format!("-(λ,α{})", i + 1)),
                _ => parts.push(format!("{a}(λ,α{})", i + 1)),
            }
        }
        if self.constant != 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

impl fmt::Debug for AffineExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
