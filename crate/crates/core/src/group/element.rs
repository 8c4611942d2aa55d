use std::fmt;

use serde::{Deserialize, Serialize};

/// An integer extended with `+∞`, ordered so that `Infinite` is the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Extended {
    Finite(u64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<u64> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

/// A `d × d` matrix of canonical residues modulo `p^(u+t-1)` at level `t`.
///
/// Arithmetic goes through [`GroupParams`](super::GroupParams), which knows
/// the modulus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuotientElement {
    level: u32,
    entries: Vec<u64>,
}

impl QuotientElement {
    pub(crate) fn from_raw(level: u32, entries: Vec<u64>) -> Self {
        Self { level, entries }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Row-major residues.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u64] {
        &mut self.entries
    }
}
