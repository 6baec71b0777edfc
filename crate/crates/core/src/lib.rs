//! Numerical laboratory for moduli of smoothness on `[-1, 1]`.
pub mod bestapprox;
pub mod chebyshev;
pub mod cli;
pub mod corpus;
pub mod differences;
pub mod error;
pub mod kfunc;
pub mod function;
pub mod harness;
pub mod moduli;
pub mod numerics;

pub use error::{Error, Result};
pub use function::{phi, RealFunction};
