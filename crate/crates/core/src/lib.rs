//! Finite-dimensional laboratory for spectral conditions on matrix families,
//! Lie and Jordan matrix algebras, trace identities and simultaneous
//! triangularization.

pub mod cli;
pub mod closure;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod numat;
pub mod reduce;
pub mod speccond;
pub mod tracecond;

pub use error::{Error, Result};
pub use numat::{Matrix, Tolerance, C64};
