//! Kernel of left multiplication on `k[Γ]/ω^m`, and the comparison of
//! kernels over `Z/p^N` with their reductions mod `p`.

use std::time::Instant;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::engine::KernelEngine;
use super::fp::{kernel_basis, FpVec};
use super::operator::left_mult_matrix;
use crate::algebra::filtration::left_multiply;
use crate::algebra::{AlgebraElement, BottomDegree, CoefficientDomain, Filtration, GroupAlgebra, PassmanSequence};
use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::group::{GroupParams, GroupTable};
use crate::verify::{VerificationReport, Witness};

/// Largest order at which the tracked filtration is built.
pub const PREKEY_MAX_ORDER: u64 = 1 << 13;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrekeyDetails {
    pub s: u64,
    pub m: u64,
    pub level: u32,
    pub module_dim: usize,
    pub expected_module_dim: u64,
    pub kernel_dim: usize,
    pub expected_kernel_dim: u64,
    pub image_in_kernel: bool,
    pub kernel_in_image: bool,
    pub seed: u64,
}

/// The quotient `k[Γ/Γ_T]/ω^m` with `T` minimal such that `p^(T-1) >= m`,
/// reusable across subjects.
pub struct PrekeyContext {
    params: GroupParams,
    m: u64,
    algebra: GroupAlgebra,
    filtration: Filtration,
    /// (filtration index, evaluated word) for words of weight `< m`.
    module: Vec<(usize, FpVec)>,
}

impl PrekeyContext {
    pub fn new(params: GroupParams, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Validation("m must be positive".into()));
        }
        let p = params.p();
        let mut level = 1;
        while p.pow(level - 1) < m {
            level += 1;
        }
        let order = params
            .order(level)
            .filter(|&o| o <= PREKEY_MAX_ORDER)
            .ok_or_else(|| {
                Error::Size(format!(
                    "k[Γ]/ω^{m} needs level {level}, beyond order {PREKEY_MAX_ORDER}"
                ))
            })?;
        let table = GroupTable::new(params, level)?;
        let filtration = Filtration::build(&table)?;
        let seq = PassmanSequence::new(&table)?;
        let module = filtration
            .words()
            .iter()
            .enumerate()
            .filter(|(k, _)| filtration.weights()[*k] < m)
            .map(|(k, w)| (k, seq.evaluate(w)))
            .collect();
        debug_assert_eq!(table.order(), order);
        let algebra = GroupAlgebra::new(table, CoefficientDomain::PrimeField { p })?;
        Ok(Self {
            params,
            m,
            algebra,
            filtration,
            module,
        })
    }

    pub fn level(&self) -> u32 {
        self.algebra.level()
    }

    pub fn algebra(&self) -> &GroupAlgebra {
        &self.algebra
    }

    pub fn module_dim(&self) -> usize {
        self.module.len()
    }

    /// Brings `a` to the context level by projection or canonical lifting.
    pub fn transport(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.domain() != self.algebra.domain() {
            return Err(Error::DomainMismatch(a.domain().to_string(), self.algebra.domain().to_string()));
        }
        if a.level() >= self.level() {
            self.algebra.project_from(a)
        } else {
            self.algebra.lift_from(a)
        }
    }

    pub fn check(&self, a: &AlgebraElement, seed: u64) -> Result<VerificationReport> {
        let started = Instant::now();
        let a = self.transport(a)?;
        let (p, e, m) = (self.params.p(), self.params.e() as i64, self.m);
        let order = self.algebra.table().order();
        let va = a.to_fpvec(order)?;
        let s = match self.filtration.bottom_degree(&va) {
            BottomDegree::Zero => {
                return Err(Error::Domain("the zero element has no bottom degree".into()))
            }
            BottomDegree::AtCap(s) => {
                return Err(Error::Domain(format!(
                    "bottom degree {s} is not certified at level {}; raise the level",
                    self.level()
                )))
            }
            BottomDegree::Certified(s) if s >= m => {
                return Err(Error::Domain(format!("m = {m} must exceed the bottom degree {s}")))
            }
            BottomDegree::Certified(s) => s,
        };
        let weights = self.filtration.weights();
        let columns: Vec<FpVec> = self
            .module
            .iter()
            .map(|(_, v)| -> Result<FpVec> {
                let image = left_multiply(self.algebra.table(), &a, v)?;
                let coords = self.filtration.coordinates(&image);
                let vals: Vec<u64> = self.module.iter().map(|(k, _)| coords[*k]).collect();
                Ok(FpVec::from_values(p, &vals))
            })
            .collect::<Result<_>>()?;
        let dim = self.module.len();
        let kernel = kernel_basis(p, dim, &columns);
        let count = |r: i64| binomial(e + r - 1, e as u64).to_u64().expect("fits");
        let expected_module = count(m as i64);
        let expected_kernel = expected_module - count((m - s) as i64);
        let low: Vec<bool> = self.module.iter().map(|(k, _)| weights[*k] < m - s).collect();
        let image_in_kernel = columns
            .iter()
            .zip(&low)
            .all(|(col, &is_low)| is_low || col.is_zero());
        let kernel_in_image = kernel
            .iter()
            .all(|v| v.nonzeros().all(|(i, _)| !low[i]));

        let mut witness = None;
        if dim as u64 != expected_module {
            witness = Some(Witness::new("module dimension").mismatch(expected_module, dim));
        } else if kernel.len() as u64 != expected_kernel {
            witness = Some(Witness::new("kernel dimension").element(&a).mismatch(expected_kernel, kernel.len()));
        } else if !image_in_kernel {
            witness = Some(Witness::new(format!("a·omega^{} inside omega^{m}", m - s)).element(&a));
        } else if !kernel_in_image {
            witness = Some(Witness::new(format!("kernel inside omega^{}", m - s)).element(&a));
        }
        let details = PrekeyDetails {
            s,
            m,
            level: self.level(),
            module_dim: dim,
            expected_module_dim: expected_module,
            kernel_dim: kernel.len(),
            expected_kernel_dim: expected_kernel,
            image_in_kernel,
            kernel_in_image,
            seed,
        };
        Ok(VerificationReport::finish(
            "prekey",
            self.params,
            self.level(),
            started,
            witness,
            serde_json::to_value(details)?,
        ))
    }
}

/// Left multiplication by `a` on `k[Γ]/ω^m`: its kernel is the image of
/// `ω^(m-s)` where `s` is the bottom degree of `a`.
pub fn prekey_check(params: GroupParams, a: &AlgebraElement, m: u64, seed: u64) -> Result<VerificationReport> {
    PrekeyContext::new(params, m)?.check(a, seed)
}

/// For `c` over `Z/p^N` not divisible by `p`: the free rank of
/// `ker(c·)` is at most `dim ker(c̄·)` over `F_p`.
pub fn modular_reduction_bound(params: GroupParams, c: &AlgebraElement, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let CoefficientDomain::PrimePower { p, .. } = c.domain() else {
        return Err(Error::Domain(format!("expected Z/p^N coefficients, got {}", c.domain())));
    };
    if p != params.p() {
        return Err(Error::Domain(format!("coefficients mod {p} for a pro-{} group", params.p())));
    }
    if c.divisible_by_p() {
        return Err(Error::Domain("c is divisible by p; factor out the power of p first".into()));
    }
    let table = GroupTable::new(params, c.level())?;
    let engine = KernelEngine::new(seed);
    let big = engine.kernel_dim(&left_mult_matrix(&[vec![c.clone()]], &table)?)?;
    let small = engine.kernel_dim(&left_mult_matrix(&[vec![c.reduce_mod_p()?]], &table)?)?;
    let witness = (big.kernel_dim > small.kernel_dim).then(|| {
        Witness::new("free rank over Z/p^N <= kernel dimension mod p")
            .element(c)
            .mismatch(format!("<= {}", small.kernel_dim), big.kernel_dim)
    });
    let details = serde_json::json!({
        "domain": c.domain().to_string(),
        "free_rank": big.kernel_dim,
        "mod_p_kernel": small.kernel_dim,
        "seed": seed,
    });
    Ok(VerificationReport::finish("modular-reduction", params, c.level(), started, witness, details))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;

    #[test]
    fn prekey_small_field() {
        let params = GroupParams::new(3, 1, 1).unwrap();
        for m in 2..=9 {
            let ctx = PrekeyContext::new(params, m).unwrap();
            let alg = ctx.algebra();
            let g = params.generator(0, 0, ctx.level()).unwrap();
            let a = alg.augmentation_generator(&g);
            let r = ctx.check(&a, 0).unwrap();
            assert!(r.pass, "m = {m}: {r:?}");
            assert_eq!(r.details["kernel_dim"], 1);
        }
    }

    #[test]
    fn prekey_rejects_zero_and_small_m() {
        let params = GroupParams::new(3, 1, 1).unwrap();
        let ctx = PrekeyContext::new(params, 3).unwrap();
        let zero = ctx.algebra().zero();
        assert!(matches!(ctx.check(&zero, 0), Err(Error::Domain(_))));
        let ctx = PrekeyContext::new(params, 1).unwrap();
        let g = params.generator(0, 0, ctx.level()).unwrap();
        let a = ctx.algebra().augmentation_generator(&g);
        assert!(matches!(ctx.check(&a, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn modular_reduction_examples() {
        let params = GroupParams::new(3, 1, 1).unwrap();
        let table = GroupTable::new(params, 2).unwrap();
        let dom = CoefficientDomain::PrimePower { p: 3, n: 2 };
        let alg = GroupAlgebra::new(table.clone(), dom).unwrap();
        let g = table.element(1);
        let r = modular_reduction_bound(params, &alg.embed(&g), 0).unwrap();
        assert!(r.pass);
        assert_eq!((r.details["free_rank"].as_u64(), r.details["mod_p_kernel"].as_u64()), (Some(0), Some(0)));
        let three = alg.scalar(Scalar::Residue(3));
        assert!(matches!(modular_reduction_bound(params, &three, 0), Err(Error::Domain(_))));
    }
}
