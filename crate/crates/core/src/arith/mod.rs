//! Exact arithmetic: rationals, prime fields, dense matrices and the small
//! univariate toolkit (characteristic polynomials, rational roots).

mod field;
mod matrix;
mod univariate;

pub use field::{format_rational, is_rational_square, parse_rational, Field, FieldElem, MAX_PRIME};
pub use matrix::{FieldMatrix, RatMatrix, MAX_CHARPOLY_DIM};
pub use univariate::{rational_roots, Root, UniPoly, MAX_ROOT_DEGREE};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
