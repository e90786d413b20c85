//! Exact algebra: coefficient fields, sparse polynomials, polynomial maps and
//! matrices, dense linear algebra over the coefficient field, and the
//! polynomial GCD and root finding used by the classification code.

pub mod field;
pub mod gcd;
pub mod linear;
pub mod map;
pub mod monomial;
pub mod poly;
pub mod polymatrix;
pub mod univariate;

pub use field::{Field, Scalar};
pub use linear::{LinearMap, ScalarMatrix};
pub use map::{compose_linear, compose_maps, PolyMap, Side};
pub use monomial::{Degree, Monomial};
pub use poly::{poly_arith, ArithOp, Polynomial};
pub use polymatrix::PolyMatrix;
