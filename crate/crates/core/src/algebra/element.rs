use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::domain::{CoefficientDomain, Scalar};
use crate::error::{Error, Result};
use crate::group::{GroupParams, GroupTable, QuotientElement};
use crate::kernel::fp::FpVec;

/// An element of `R[Γ/Γ_t]`: a sparse map from group-element index to a
/// nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    level: u32,
    domain: CoefficientDomain,
    terms: BTreeMap<u64, Scalar>,
}

impl AlgebraElement {
    pub fn zero(level: u32, domain: CoefficientDomain) -> Self {
        Self {
            level,
            domain,
            terms: BTreeMap::new(),
        }
    }

    /// Builds an element from `(index, coefficient)` pairs, summing repeats
    /// and dropping zeros.
    pub fn from_terms(
        level: u32,
        domain: CoefficientDomain,
        terms: impl IntoIterator<Item = (u64, Scalar)>,
    ) -> Self {
        let mut out = Self::zero(level, domain);
        for (i, c) in terms {
            out.add_term(i, &c);
        }
        out
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    pub fn terms(&self) -> &BTreeMap<u64, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, index: u64) -> Scalar {
        self.terms.get(&index).cloned().unwrap_or_else(|| self.domain.zero())
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, index: u64, c: &Scalar) {
        let dom = self.domain;
        let updated = match self.terms.get(&index) {
            Some(old) => dom.add(old, c),
            None => c.clone(),
        };
        if dom.is_zero(&updated) {
            self.terms.remove(&index);
        } else {
            self.terms.insert(index, updated);
        }
    }

    /// Dense `F_p` vector of length `order`; only for prime-field elements.
    pub fn to_fpvec(&self, order: u64) -> Result<FpVec> {
        let CoefficientDomain::PrimeField { p } = self.domain else {
            return Err(Error::Domain(format!("dense F_p form needs F_p coefficients, got {}", self.domain)));
        };
        let mut v = FpVec::zeros(p, order as usize);
        for (&i, c) in &self.terms {
            let Scalar::Residue(r) = c else { unreachable!("F_p coefficients are residues") };
            v.set(i as usize, *r);
        }
        Ok(v)
    }

    pub fn from_fpvec(level: u32, v: &FpVec) -> Self {
        let domain = CoefficientDomain::PrimeField { p: v.p() };
        Self::from_terms(
            level,
            domain,
            v.nonzeros().map(|(i, c)| (i as u64, Scalar::Residue(c))),
        )
    }

    /// `true` when every coefficient is divisible by `p` (residue domains).
    pub fn divisible_by_p(&self) -> bool {
        self.terms.values().all(|c| self.domain.divisible_by_p(c))
    }

    /// Image in `F_p[Γ/Γ_t]` of an element of `Z/p^n[Γ/Γ_t]`.
    pub fn reduce_mod_p(&self) -> Result<Self> {
        let CoefficientDomain::PrimePower { p, .. } = self.domain else {
            return Err(Error::Domain("reduction mod p needs Z/p^n coefficients".into()));
        };
        let dom = CoefficientDomain::PrimeField { p };
        Ok(Self::from_terms(
            self.level,
            dom,
            self.terms.iter().map(|(&i, c)| {
                let Scalar::Residue(r) = c else { unreachable!() };
                (i, Scalar::Residue(r % p))
            }),
        ))
    }

    pub fn to_json(&self) -> AlgebraElementJson {
        AlgebraElementJson {
            level: self.level,
            domain: self.domain.to_string(),
            terms: self
                .terms
                .iter()
                .map(|(&i, c)| (i, self.domain.format_scalar(c)))
                .collect(),
        }
    }

    pub fn from_json(json: &AlgebraElementJson) -> Result<Self> {
        let domain: CoefficientDomain = json.domain.parse()?;
        let terms = json
            .terms
            .iter()
            .map(|(i, c)| Ok((*i, domain.parse_scalar(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(json.level, domain, terms))
    }
}

/// Wire form: `{level, domain, terms: [[index, "coeff"], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraElementJson {
    pub level: u32,
    pub domain: String,
    pub terms: Vec<(u64, String)>,
}

/// `R[Γ/Γ_t]` for a fixed table and coefficient domain.
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    table: GroupTable,
    domain: CoefficientDomain,
}

impl GroupAlgebra {
    pub fn new(table: GroupTable, domain: CoefficientDomain) -> Result<Self> {
        domain.validate()?;
        Ok(Self { table, domain })
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }

    pub fn params(&self) -> &GroupParams {
        self.table.params()
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    pub fn level(&self) -> u32 {
        self.table.level()
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero(self.level(), self.domain)
    }

    pub fn one(&self) -> AlgebraElement {
        self.scalar(self.domain.one())
    }

    pub fn scalar(&self, c: Scalar) -> AlgebraElement {
        AlgebraElement::from_terms(self.level(), self.domain, [(self.table.identity_index(), c)])
    }

    pub fn embed(&self, g: &QuotientElement) -> AlgebraElement {
        debug_assert_eq!(g.level(), self.level());
        AlgebraElement::from_terms(
            self.level(),
            self.domain,
            [(self.table.index(g), self.domain.one())],
        )
    }

    /// `g - 1`.
    pub fn augmentation_generator(&self, g: &QuotientElement) -> AlgebraElement {
        self.sub(&self.embed(g), &self.one()).expect("same algebra")
    }

    /// Coefficient sum.
    pub fn augmentation(&self, a: &AlgebraElement) -> Scalar {
        a.terms
            .values()
            .fold(self.domain.zero(), |acc, c| self.domain.add(&acc, c))
    }

    pub fn in_augmentation_ideal(&self, a: &AlgebraElement) -> bool {
        self.domain.is_zero(&self.augmentation(a))
    }

    fn check(&self, a: &AlgebraElement) -> Result<()> {
        if a.level != self.level() {
            return Err(Error::LevelMismatch(a.level, self.level()));
        }
        if a.domain != self.domain {
            return Err(Error::DomainMismatch(a.domain.to_string(), self.domain.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(a)?;
        self.check(b)?;
        let mut out = a.clone();
        for (&i, c) in &b.terms {
            out.add_term(i, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_terms(
            a.level,
            a.domain,
            a.terms.iter().map(|(&i, x)| (i, self.domain.mul(c, x))),
        )
    }

    pub fn neg(&self, a: &AlgebraElement) -> AlgebraElement {
        self.scale(&self.domain.from_int(-1), a)
    }

    pub fn sub(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(a, &self.neg(b))
    }

    /// Convolution product `(Σ a_g g)(Σ b_h h) = Σ a_g b_h (gh)`.
    ///
    /// Accumulates into a dense buffer once the product support could exceed
    /// a quarter of the group order.
    pub fn convolve(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(a)?;
        self.check(b)?;
        let params = self.params();
        let b_elems: Vec<(QuotientElement, &Scalar)> = b
            .terms
            .iter()
            .map(|(&h, c)| (self.table.element(h), c))
            .collect();
        let bound = (a.terms.len() as u64).saturating_mul(b.terms.len() as u64);
        let dense = bound.saturating_mul(4) > self.table.order();
        let dom = self.domain;
        if dense {
            let mut acc: Vec<Option<Scalar>> = vec![None; self.table.order() as usize];
            for (&g, ca) in &a.terms {
                let ge = self.table.element(g);
                for (he, cb) in &b_elems {
                    let k = self.table.index(&params.mul(&ge, he)?) as usize;
                    let prod = dom.mul(ca, cb);
                    acc[k] = Some(match acc[k].take() {
                        Some(old) => dom.add(&old, &prod),
                        None => prod,
                    });
                }
            }
            Ok(AlgebraElement::from_terms(
                self.level(),
                dom,
                acc.into_iter()
                    .enumerate()
                    .filter_map(|(k, c)| c.map(|c| (k as u64, c))),
            ))
        } else {
            let mut out = self.zero();
            for (&g, ca) in &a.terms {
                let ge = self.table.element(g);
                for (he, cb) in &b_elems {
                    let k = self.table.index(&params.mul(&ge, he)?);
                    out.add_term(k, &dom.mul(ca, cb));
                }
            }
            Ok(out)
        }
    }

    pub fn pow(&self, a: &AlgebraElement, k: u64) -> Result<AlgebraElement> {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.convolve(&acc, a)?;
        }
        Ok(acc)
    }

    /// Push-forward of coefficients along `Γ/Γ_s → Γ/Γ_t`, for an element of
    /// a higher level `s`.
    pub fn project_from(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.domain != self.domain {
            return Err(Error::DomainMismatch(a.domain.to_string(), self.domain.to_string()));
        }
        if a.level < self.level() {
            return Err(Error::Validation(format!(
                "cannot project level {} down to level {}",
                a.level,
                self.level()
            )));
        }
        let upper = GroupTable::new(*self.params(), a.level)?;
        let params = self.params();
        let mut out = self.zero();
        for (&i, c) in &a.terms {
            let g = params.project(&upper.element(i), self.level())?;
            out.add_term(self.table.index(&g), c);
        }
        Ok(out)
    }

    /// Lift through canonical residue representatives of group elements.
    pub fn lift_from(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.level > self.level() {
            return Err(Error::Validation(format!(
                "cannot lift level {} up to level {}",
                a.level,
                self.level()
            )));
        }
        let lower = GroupTable::new(*self.params(), a.level)?;
        let params = self.params();
        let mut out = AlgebraElement::zero(self.level(), a.domain);
        for (&i, c) in &a.terms {
            let g = params.lift(&lower.element(i), self.level())?;
            out.add_term(self.table.index(&g), c);
        }
        Ok(out)
    }
}
