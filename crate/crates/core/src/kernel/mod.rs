//! Exact rank and kernel computations for left-multiplication operators.

mod engine;
pub mod fp;
mod operator;
mod prekey;
pub mod rational;
pub mod zpn;

pub use engine::{Confidence, KernelEngine, Method, RankResult};
pub use operator::{left_mult_matrix, ModuleKind, OperatorMatrix, Provenance};
pub use prekey::{modular_reduction_bound, prekey_check, PrekeyContext, PrekeyDetails, PREKEY_MAX_ORDER};
