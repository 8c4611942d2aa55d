//! Rank and kernel dimension of operator matrices.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::fp::Echelon;
use super::operator::OperatorMatrix;
use super::{rational, zpn};
use crate::algebra::{CoefficientDomain, Scalar};
use crate::error::Result;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "elimination-F_p")]
    EliminationFp,
    #[serde(rename = "fraction-free")]
    FractionFree,
    #[serde(rename = "multi-modular")]
    MultiModular,
    #[serde(rename = "howell-Z/p^N")]
    HowellZpn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Exact,
    HighProbability,
}

impl std::fmt::Display for Confidence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Confidence::Exact => "exact",
            Confidence::HighProbability => "high-probability",
        })
    }
}

/// `rank + kernel_dim` is the column count. Over `Z/p^N`, `kernel_dim` is
/// the free rank of the kernel module and `rank` its complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    pub kernel_dim: usize,
    pub method: Method,
    pub confidence: Confidence,
    pub primes: Vec<u64>,
}

#[derive(Clone, Copy, Debug)]
pub struct KernelEngine {
    seed: u64,
    cutover: usize,
}

impl KernelEngine {
    pub const DEFAULT_CUTOVER: usize = 512;

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            cutover: Self::DEFAULT_CUTOVER,
        }
    }

    /// Largest dimension handled by fraction-free elimination over `Q`.
    pub fn with_cutover(mut self, cutover: usize) -> Self {
        self.cutover = cutover;
        self
    }

    pub fn kernel_dim(&self, m: &OperatorMatrix) -> Result<RankResult> {
        let cols = m.cols();
        let result = |rank: usize, method, confidence, primes| RankResult {
            rank,
            kernel_dim: cols - rank,
            method,
            confidence,
            primes,
        };
        match m.domain() {
            CoefficientDomain::PrimeField { p } => {
                let columns = m.fp_columns().expect("F_p operators store packed columns");
                let mut ech = Echelon::new(p, m.rows());
                for c in columns {
                    ech.insert(c.clone());
                }
                Ok(result(ech.rank(), Method::EliminationFp, Confidence::Exact, Vec::new()))
            }
            CoefficientDomain::Rationals => {
                let sparse: Vec<Vec<(usize, num_rational::BigRational)>> = (0..cols)
                    .map(|c| {
                        m.column(c)
                            .into_iter()
                            .map(|(r, x)| match x {
                                Scalar::Rational(q) => (r, q),
                                Scalar::Residue(_) => unreachable!("rational operator"),
                            })
                            .collect()
                    })
                    .collect();
                // Columns of the operator become rows of the eliminated matrix.
                let ints: Vec<Vec<BigInt>> = rational::integer_columns(m.rows(), &sparse);
                if m.rows().max(cols) <= self.cutover {
                    let rank = rational::rank_fraction_free(ints);
                    Ok(result(rank, Method::FractionFree, Confidence::Exact, Vec::new()))
                } else {
                    let mut rng = rng::stream(self.seed, rng::tags::MODULAR_PRIMES);
                    let (rank, primes) = rational::rank_multimodular(&ints, &mut rng)?;
                    Ok(result(rank, Method::MultiModular, Confidence::HighProbability, primes))
                }
            }
            CoefficientDomain::PrimePower { p, n } => {
                let dense: Vec<Vec<u64>> = (0..cols)
                    .map(|c| {
                        let mut v = vec![0u64; m.rows()];
                        for (r, x) in m.column(c) {
                            if let Scalar::Residue(x) = x {
                                v[r] = x;
                            }
                        }
                        v
                    })
                    .collect();
                let free = zpn::kernel_free_rank(&dense, m.rows(), p, n);
                Ok(result(cols - free, Method::HowellZpn, Confidence::Exact, Vec::new()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupAlgebra;
    use crate::group::{GroupParams, GroupTable};
    use crate::kernel::left_mult_matrix;

    fn circulant(dom: CoefficientDomain) -> OperatorMatrix {
        let table = GroupTable::new(GroupParams::new(3, 1, 1).unwrap(), 2).unwrap();
        let alg = GroupAlgebra::new(table.clone(), dom).unwrap();
        let g = alg.params().generator(0, 0, 2).unwrap();
        left_mult_matrix(&[vec![alg.augmentation_generator(&g)]], &table).unwrap()
    }

    #[test]
    fn circulant_kernels() {
        let eng = KernelEngine::new(0);
        let q = eng.kernel_dim(&circulant(CoefficientDomain::Rationals)).unwrap();
        assert_eq!((q.kernel_dim, q.method, q.confidence), (1, Method::FractionFree, Confidence::Exact));
        // the nilpotent shift J_3 over F_3 also has a one-dimensional kernel
        let f = eng.kernel_dim(&circulant(CoefficientDomain::PrimeField { p: 3 })).unwrap();
        assert_eq!(f.kernel_dim, 1);
        let z = eng.kernel_dim(&circulant(CoefficientDomain::PrimePower { p: 3, n: 2 })).unwrap();
        assert_eq!(z.kernel_dim, 1);
        let mm = eng.with_cutover(0).kernel_dim(&circulant(CoefficientDomain::Rationals)).unwrap();
        assert_eq!((mm.kernel_dim, mm.confidence), (1, Confidence::HighProbability));
        assert!(mm.primes.len() >= 2);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        for dom in [
            CoefficientDomain::Rationals,
            CoefficientDomain::PrimeField { p: 2 },
            CoefficientDomain::PrimePower { p: 2, n: 3 },
        ] {
            let rows = vec![vec![dom.zero(); 5]; 5];
            let m = OperatorMatrix::from_rows(dom, &rows).unwrap();
            assert_eq!(KernelEngine::new(1).kernel_dim(&m).unwrap().kernel_dim, 5);
        }
    }
}
