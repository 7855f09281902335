use thiserror::Error;

use crate::poly::FamilyViolation;
use crate::witness::WitnessViolation;
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} exceeds the configured limit {limit}")]
    PrimeTooLarge { p: u64, limit: u64 },
    #[error("modulus degree {degree} exceeds the cap {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },
    #[error("modulus is not monic of degree >= 1")]
    ModulusNotMonic,
    #[error("modulus is reducible over F_{0}")]
    ModulusReducible(u64),
    #[error("invalid field spec: {0}")]
    InvalidSpec(String),
    #[error("operands live in different fields")]
    SpecMismatch,
    #[error("value cannot be embedded into the requested field")]
    SpecIncompatible,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable x{index} (nvars = {nvars}) at line {line}")]
    UnknownVariable {
        index: usize,
        nvars: usize,
        line: usize,
    },
    #[error("family violates the hypotheses: {0}")]
    FamilyInvalid(FamilyViolation),
    #[error("witness invalid: {0}")]
    WitnessInvalid(WitnessViolation),
    #[error("witness search exhausted after {attempts} attempts and {escalations} escalations")]
    SearchExhausted { attempts: u64, escalations: u32 },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("certificate matrix does not match recomputation at ({row}, {col})")]
    MatrixMismatch { row: usize, col: usize },
    #[error("certified determinant does not match recomputation")]
    DeterminantMismatch,
    #[error("certificate was issued for a different family")]
    FamilyMismatch,
    #[error("exponent {e} exceeds the bound {bound}")]
    BoundViolated { e: u64, bound: u64 },
    #[error("family of {r} polynomials exceeds the cap {cap}")]
    TooManyPolynomials { r: usize, cap: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("term budget exceeded: {needed} > {budget}")]
    TermBudgetExceeded { needed: u128, budget: usize },
    #[error("could not generate a valid family after {attempts} attempts")]
    GenerationExhausted { attempts: usize },
}
