//! Exact scalars: integers, sparse polynomials, canonical rational functions
//! and the field abstraction used by every algorithm.

pub mod exponent;
pub mod field;
pub mod gcd;
pub mod int;
pub mod poly;
pub mod ratfunc;

pub use exponent::{AffineExponent, MAX_RANK};
pub use field::{Field, NumericField, SymbolicField};
pub use int::Int;
pub use poly::{Mono, Poly};
pub use ratfunc::RatFunc;
