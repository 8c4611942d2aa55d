//! Group algebras `R[Γ/Γ_t]` over `F_p`, `Q` and `Z/p^n`, and the
//! augmentation-ideal filtration over `F_p`.

mod domain;
mod element;
pub mod filtration;

pub use domain::{parse_rational, CoefficientDomain, Scalar};
pub use element::{AlgebraElement, AlgebraElementJson, GroupAlgebra};
pub use filtration::{
    augmentation_powers, graded_dims, left_multiply, passman_basis, BottomDegree, BottomSymbol,
    Filtration, FiltrationBasis, MonomialVector, PassmanSequence, PassmanWord,
};
