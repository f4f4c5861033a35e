//! Finite-truncation models of q-deformed Araki-Woods constructions.
//!
//! The crate builds, at a configurable truncation level, the deformed
//! one-particle space attached to an almost periodic orthogonal group, the
//! q-Fock space over it, Wick generators and the quasi-free state, dual and
//! conjugate variables (each by two independent routes), the norm estimates
//! controlling the conjugate-variable series, numerical modular data, and the
//! factor-type classifier driven by the spectrum of the generator.
//!
//! Everything is generic over a scalar ring so that the same code runs in
//! exact Gaussian-rational arithmetic or in complex `f64`. Operations that
//! need square roots (operator norms, modular data) are `f64`-only.
//!
//! The crate is `no_std` (with `alloc`); IO, configuration and reporting live
//! in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod classify;
pub mod deformation;
pub mod dualvars;
pub mod fock;
pub mod linalg;
pub mod matrix;
pub mod modular;
pub mod partitions;
pub mod rng;
pub mod scalar;
pub mod wick;

pub use deformation::{Block, Deformation, LambdaVal};
pub use fock::{FockSpace, FockVector};
pub use matrix::Matrix;
pub use scalar::{C64, CRat, Rational, Scalar};
pub use wick::OperatorMatrix;

use alloc::string::String;

/// Errors surfaced by builders and operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A numeric input fell outside its admissible range.
    InvalidInput(String),
    /// Exact arithmetic was requested but an input is not rational.
    NotRational(String),
    /// Vector or matrix dimensions do not match.
    DimensionMismatch(String),
    /// The requested truncation exceeds the configured memory budget.
    BudgetExceeded(String),
    /// A Gram matrix failed its positive-definiteness certification.
    GramNotPositive(String),
    /// A linear system was singular where the construction forbids it.
    Singular(String),
    /// Modular data could not be matched to either sign convention.
    ConventionFailure(String),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::NotRational(m) => write!(f, "exact mode requires rational input: {m}"),
            Error::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            Error::BudgetExceeded(m) => write!(f, "memory budget exceeded: {m}"),
            Error::GramNotPositive(m) => write!(f, "Gram matrix not positive definite: {m}"),
            Error::Singular(m) => write!(f, "singular system: {m}"),
            Error::ConventionFailure(m) => write!(f, "modular convention failure: {m}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
