//! Exact arithmetic: Gaussian rationals, multivariate polynomials, rational
//! functions, and the linear algebra built on them.

pub mod gcd;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod scalar;

pub use gcd::{poly_gcd, squarefree_decompose, SquareFree};
pub use linalg::{
    poly_det, ratmat_det, ratmat_inverse, ratmat_mul, ratmat_rank, solve_linear, LinearSolution, PolyMatrix, RatMatrix,
    ScalarMatrix,
};
pub use parse::{parse_poly, parse_poly_in, parse_scalar};
pub use poly::{vars_from, Monomial, NumPoly, Poly, Vars};
pub use ratfunc::RatFunc;
pub use scalar::ExactScalar;
