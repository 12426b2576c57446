//! Exact coefficients, sparse polynomials and rational expressions.

mod coeff;
mod poly;
mod ratexpr;

pub use coeff::{BaseField, Coeff};
pub use poly::{MPoly, Monomial};
pub use ratexpr::RatExpr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a supported prime modulus")]
    NotPrime(u64),
}
