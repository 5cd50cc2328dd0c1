//! Exact Gaussian cubature for symmetric polynomials and symmetric rational
//! functions in several variables.

pub mod bernstein_szego;
pub mod error;
pub mod integrand;
pub mod json;
pub mod orthopoly;
pub mod partitions;
pub mod schur_cubature;
pub mod verify;

pub use bernstein_szego::BsParams;
pub use error::{Error, Result};
pub use integrand::IntegrandSpec;
pub use orthopoly::{OrthoFamily, QuadratureRule1D, Variable};
pub use partitions::{enumerate_alcove, Partition};
pub use schur_cubature::{build_rule, CubatureRule, SchurEvaluator, WeightConvention};
pub use verify::{OracleConfig, VerificationReport};
