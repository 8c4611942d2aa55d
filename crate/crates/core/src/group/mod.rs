//! Finite quotients `Γ/Γ_t` of the congruence subgroup `Γ = CS(u, d, p)`.
//!
//! The tower is `Γ_i = CS(u + i - 1, d, p)`, so an element of `Γ/Γ_t` is a
//! `d × d` matrix modulo `p^(u+t-1)` that is congruent to the identity modulo
//! `p^u`.

mod cache;
mod element;
mod padic;
mod params;
mod table;

pub use cache::{cache_dir, cache_file_name, CacheHeader, CACHE_MAGIC, CACHE_VERSION};
pub use element::{Extended, QuotientElement};
pub use params::{star_index, GroupParams};
pub use table::{GeneratorSet, GroupTable, DEFAULT_ELEMENT_CAP};
