//! Exact finite-level computations for congruence subgroups `CS(u, d, p)` of
//! `GL_d(Z_p)`, their modular group algebras, and kernel-dimension scans of
//! group-ring operators over the tower of finite quotients.

pub mod algebra;
pub mod arith;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod group;
pub mod kernel;
pub mod luck;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
