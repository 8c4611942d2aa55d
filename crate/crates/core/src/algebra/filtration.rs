//! The augmentation-ideal filtration of `F_p[Γ/Γ_t]`.
//!
//! The sequence `x_1, …, x_e, x_1^p, …, x_e^p, …, x_e^(p^(t-2))` (with `x_i`
//! the generators `y_i`) yields the Passman words
//! `∏ (x_i^(p^j) - 1)^(b(i,j))`, `0 <= b(i,j) < p`, of weight
//! `Σ p^j b(i,j)`. The words of weight `>= s` form a basis of `ω^s`, so the
//! full word list is a basis of the algebra adapted to the filtration: an
//! element lies in `ω^s` exactly when its word coordinates of weight `< s`
//! vanish.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::element::AlgebraElement;
use crate::arith::capped_monomial_count;
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupParams, GroupTable, QuotientElement};
use crate::kernel::fp::{Echelon, FpVec, Insert};

/// Exponent table `b(i, j)`, stored at position `j·e + i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PassmanWord {
    exponents: Vec<u8>,
}

impl PassmanWord {
    pub fn new(exponents: Vec<u8>) -> Self {
        Self { exponents }
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn exponent(&self, i: usize, j: usize, e: usize) -> u8 {
        self.exponents[j * e + i]
    }

    pub fn weight(&self, p: u64, e: usize) -> u64 {
        self.exponents
            .iter()
            .enumerate()
            .map(|(k, &b)| p.pow((k / e) as u32) * b as u64)
            .sum()
    }

    /// The monomial `X^a` with `a(i) = Σ_j p^j b(i,j)`, the base-`p` digits
    /// being the `b(i, ·)`.
    pub fn monomial(&self, p: u64, e: usize) -> MonomialVector {
        let mut a = vec![0u64; e];
        for (k, &b) in self.exponents.iter().enumerate() {
            a[k % e] += p.pow((k / e) as u32) * b as u64;
        }
        MonomialVector(a)
    }
}

/// Exponent vector of a monomial in `e` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialVector(pub Vec<u64>);

impl MonomialVector {
    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn within_cap(&self, cap: u64) -> bool {
        self.0.iter().all(|&a| a < cap)
    }
}

/// Degree of an element in the filtration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BottomDegree {
    /// The zero element.
    Zero,
    /// Below the truncation cap `p^(t-1)`: the same degree holds in every
    /// deeper quotient.
    Certified(u64),
    /// At or above the cap: recompute at a higher level.
    AtCap(u64),
}

impl BottomDegree {
    pub fn certified(self) -> Option<u64> {
        match self {
            BottomDegree::Certified(s) => Some(s),
            _ => None,
        }
    }

    /// The finite-level degree, certified or not.
    pub fn value(self) -> Option<u64> {
        match self {
            BottomDegree::Certified(s) | BottomDegree::AtCap(s) => Some(s),
            BottomDegree::Zero => None,
        }
    }
}

/// Image of an element in `ω^s/ω^(s+1)`, written in the monomial basis of
/// the truncated polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottomSymbol {
    pub degree: u64,
    pub terms: BTreeMap<MonomialVector, u64>,
}

impl BottomSymbol {
    /// Polynomial product over `F_p`, dropping monomials with an exponent at
    /// or above `cap`.
    pub fn product(&self, other: &BottomSymbol, p: u64, cap: u64) -> BottomSymbol {
        let mut terms: BTreeMap<MonomialVector, u64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = MonomialVector(ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect());
                if !m.within_cap(cap) {
                    continue;
                }
                let c = terms.entry(m).or_insert(0);
                *c = (*c + ca * cb) % p;
            }
        }
        terms.retain(|_, c| *c != 0);
        BottomSymbol {
            degree: self.degree + other.degree,
            terms,
        }
    }
}

/// The ordered sequence of group elements behind the Passman words, with
/// their right-translation permutations.
#[derive(Clone, Debug)]
pub struct PassmanSequence {
    p: u64,
    order: usize,
    elements: Vec<QuotientElement>,
    weights: Vec<u64>,
    perms: Vec<Vec<u32>>,
}

impl PassmanSequence {
    pub fn new(table: &GroupTable) -> Result<Self> {
        let params = *table.params();
        let t = table.level();
        let p = params.p();
        let gens = GeneratorSet::new(params, t)?;
        let mut elements = Vec::new();
        let mut weights = Vec::new();
        for j in 0..t.saturating_sub(1) {
            for y in gens.elements() {
                elements.push(params.pow(y, p.pow(j)));
                weights.push(p.pow(j));
            }
        }
        let perms = elements.iter().map(|x| table.right_translation(x)).collect();
        Ok(Self {
            p,
            order: table.order() as usize,
            elements,
            weights,
            perms,
        })
    }

    pub fn elements(&self) -> &[QuotientElement] {
        &self.elements
    }

    pub fn positions(&self) -> usize {
        self.elements.len()
    }

    /// `v · (x_k - 1)`.
    fn times_factor(&self, v: &FpVec, k: usize) -> FpVec {
        let mut out = v.permuted(&self.perms[k]);
        out.axpy(self.p - 1, v);
        out
    }

    pub fn evaluate(&self, word: &PassmanWord) -> FpVec {
        let mut v = FpVec::unit(self.p, self.order, 0);
        // index 0 is the identity in every table
        for (k, &b) in word.exponents.iter().enumerate() {
            for _ in 0..b {
                v = self.times_factor(&v, k);
            }
        }
        v
    }

    /// All words with `min_weight <= weight < max_weight`, evaluated, in
    /// lexicographic order of exponent tables.
    pub fn enumerate(&self, min_weight: u64, max_weight: u64) -> Vec<(PassmanWord, FpVec)> {
        let n = self.positions();
        let mut remaining = vec![0u64; n + 1];
        for k in (0..n).rev() {
            remaining[k] = remaining[k + 1] + (self.p - 1) * self.weights[k];
        }
        let mut out = Vec::new();
        let mut exps = vec![0u8; n];
        let start = FpVec::unit(self.p, self.order, 0);
        self.dfs(0, start, 0, &mut exps, &remaining, min_weight, max_weight, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        pos: usize,
        v: FpVec,
        weight: u64,
        exps: &mut Vec<u8>,
        remaining: &[u64],
        min_w: u64,
        max_w: u64,
        out: &mut Vec<(PassmanWord, FpVec)>,
    ) {
        if pos == exps.len() {
            if weight >= min_w && weight < max_w {
                out.push((PassmanWord::new(exps.clone()), v));
            }
            return;
        }
        let mut cur = v;
        for b in 0..self.p {
            let w = weight + b * self.weights[pos];
            if w >= max_w {
                break;
            }
            if b > 0 {
                cur = self.times_factor(&cur, pos);
            }
            if w + remaining[pos + 1] >= min_w {
                exps[pos] = b as u8;
                self.dfs(pos + 1, cur.clone(), w, exps, remaining, min_w, max_w, out);
            }
        }
        exps[pos] = 0;
    }
}

/// Echelon basis of `ω^s`, built from the Passman words of weight `>= s`.
#[derive(Clone, Debug)]
pub struct FiltrationBasis {
    grade: u64,
    level: u32,
    words: Vec<PassmanWord>,
    echelon: Echelon,
}

impl FiltrationBasis {
    pub fn grade(&self) -> u64 {
        self.grade
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dimension(&self) -> usize {
        self.echelon.rank()
    }

    pub fn words(&self) -> &[PassmanWord] {
        &self.words
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    pub fn contains(&self, v: &FpVec) -> bool {
        self.echelon.contains(v)
    }
}

/// Number of capped monomials (`a(j) < p^(t-1)`) in `e` variables with
/// degree `>= s`.
pub fn capped_count_at_least(params: &GroupParams, t: u32, s: u64) -> u64 {
    let cap = params.p().pow(t - 1);
    let e = params.e();
    let top = (cap - 1) * e as u64;
    (s..=top).map(|k| capped_monomial_count(e, cap, k)).sum()
}

/// Basis of `ω^s ⊆ F_p[Γ/Γ_t]`, checking that the evaluated words are
/// linearly independent.
pub fn passman_basis(table: &GroupTable, s: u64) -> Result<FiltrationBasis> {
    let params = table.params();
    let p = params.p();
    let seq = PassmanSequence::new(table)?;
    let words = seq.enumerate(s, u64::MAX);
    let mut echelon = Echelon::new(p, table.order() as usize);
    let mut kept = Vec::with_capacity(words.len());
    for (w, v) in words {
        if let Insert::Dependent(_) = echelon.insert(v) {
            return Err(Error::Validation(format!(
                "Passman word {:?} is dependent on earlier words",
                w.exponents()
            )));
        }
        kept.push(w);
    }
    let expected = capped_count_at_least(params, table.level(), s);
    if kept.len() as u64 != expected {
        return Err(Error::Validation(format!(
            "ω^{s} has {} words but {expected} capped monomials",
            kept.len()
        )));
    }
    Ok(FiltrationBasis {
        grade: s,
        level: table.level(),
        words: kept,
        echelon,
    })
}

/// The whole algebra in the filtered word basis, with coordinate tracking.
#[derive(Clone, Debug)]
pub struct Filtration {
    table: GroupTable,
    words: Vec<PassmanWord>,
    weights: Vec<u64>,
    echelon: Echelon,
}

impl Filtration {
    pub fn build(table: &GroupTable) -> Result<Self> {
        let params = table.params();
        let (p, e) = (params.p(), params.e());
        let order = table.order() as usize;
        let seq = PassmanSequence::new(table)?;
        let mut words = seq.enumerate(0, u64::MAX);
        if words.len() != order {
            return Err(Error::Validation(format!(
                "{} Passman words for a group of order {order}",
                words.len()
            )));
        }
        // Descending weight, so the leading rows always span an ω-power.
        words.sort_by_key(|(w, _)| std::cmp::Reverse(w.weight(p, e)));
        let mut echelon = Echelon::augmented(p, 2 * order, order);
        let mut kept = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for (k, (w, v)) in words.into_iter().enumerate() {
            let aug = v.concat(&FpVec::unit(p, order, k));
            if let Insert::Dependent(_) = echelon.insert(aug) {
                return Err(Error::Validation(format!(
                    "Passman word {:?} is dependent on earlier words",
                    w.exponents()
                )));
            }
            weights.push(w.weight(p, e));
            kept.push(w);
        }
        Ok(Self {
            table: table.clone(),
            words: kept,
            weights,
            echelon,
        })
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }

    pub fn p(&self) -> u64 {
        self.table.params().p()
    }

    /// `p^(t-1)`, the exponent cap of the truncated polynomial ring.
    pub fn cap(&self) -> u64 {
        self.p().pow(self.table.level() - 1)
    }

    pub fn words(&self) -> &[PassmanWord] {
        &self.words
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Largest word weight, `(p^(t-1) - 1)·e`; `ω^(max+1) = 0`.
    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    /// Coordinates of `v` in the word basis (indexed like [`Self::words`]).
    pub fn coordinates(&self, v: &FpVec) -> Vec<u64> {
        let order = self.table.order() as usize;
        let p = self.p();
        let mut aug = v.concat(&FpVec::zeros(p, order));
        self.echelon.reduce(&mut aug);
        debug_assert!(aug.first_nonzero_below(order).is_none());
        (0..order).map(|k| (p - aug.get(order + k)) % p).collect()
    }

    pub fn bottom_degree(&self, v: &FpVec) -> BottomDegree {
        let coords = self.coordinates(v);
        match coords
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| **c != 0)
            .map(|(_, &w)| w)
            .min()
        {
            None => BottomDegree::Zero,
            Some(s) if s < self.cap() => BottomDegree::Certified(s),
            Some(s) => BottomDegree::AtCap(s),
        }
    }

    pub fn bottom_symbol(&self, v: &FpVec) -> Option<BottomSymbol> {
        let coords = self.coordinates(v);
        let degree = coords
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| **c != 0)
            .map(|(_, &w)| w)
            .min()?;
        let (p, e) = (self.p(), self.table.params().e());
        let terms = coords
            .iter()
            .zip(&self.words)
            .zip(&self.weights)
            .filter(|((c, _), &w)| **c != 0 && w == degree)
            .map(|((c, word), _)| (word.monomial(p, e), *c))
            .collect();
        Some(BottomSymbol { degree, terms })
    }

    pub fn in_power(&self, v: &FpVec, s: u64) -> bool {
        self.coordinates(v)
            .iter()
            .zip(&self.weights)
            .all(|(&c, &w)| c == 0 || w >= s)
    }

    /// `dim ω^i/ω^(i+1)` for `0 <= i <= max_weight`.
    pub fn graded_dims(&self) -> Vec<u64> {
        let mut dims = vec![0u64; self.max_weight() as usize + 1];
        for &w in &self.weights {
            dims[w as usize] += 1;
        }
        dims
    }

    /// `dim ω^s`.
    pub fn power_dim(&self, s: u64) -> usize {
        self.weights.iter().filter(|&&w| w >= s).count()
    }

    pub fn element_bottom_degree(&self, a: &AlgebraElement) -> Result<BottomDegree> {
        Ok(self.bottom_degree(&a.to_fpvec(self.table.order())?))
    }
}

/// `dim ω^i/ω^(i+1)` of `F_p[Γ/Γ_t]`.
pub fn graded_dims(params: GroupParams, t: u32) -> Result<Vec<u64>> {
    let table = GroupTable::new(params, t)?;
    Ok(Filtration::build(&table)?.graded_dims())
}

/// `ω^0, ω^1, …` computed without Passman words, by
/// `ω^(k+1) = span{ b·(x_i - 1) : b ∈ basis(ω^k) }`; stops after the first
/// zero power.
pub fn augmentation_powers(table: &GroupTable) -> Result<Vec<Echelon>> {
    let params = *table.params();
    let p = params.p();
    let order = table.order() as usize;
    let gens = GeneratorSet::new(params, table.level())?;
    let perms: Vec<Vec<u32>> = gens.elements().iter().map(|y| table.right_translation(y)).collect();
    let mut full = Echelon::new(p, order);
    for i in 0..order {
        full.insert(FpVec::unit(p, order, i));
    }
    let mut powers = vec![full];
    loop {
        let prev = powers.last().expect("nonempty");
        if prev.rank() == 0 {
            break;
        }
        let mut next = Echelon::new(p, order);
        for row in prev.rows() {
            for perm in &perms {
                let mut v = row.permuted(perm);
                v.axpy(p - 1, row);
                next.insert(v);
            }
        }
        powers.push(next);
    }
    Ok(powers)
}

/// `a · v` for `v` a dense vector of `F_p[Γ/Γ_t]`.
pub fn left_multiply(table: &GroupTable, a: &AlgebraElement, v: &FpVec) -> Result<FpVec> {
    let p = v.p();
    let mut out = FpVec::zeros(p, v.len());
    for (&x, c) in a.terms() {
        let perm = table.left_translation(&table.element(x));
        let super::Scalar::Residue(c) = c else {
            return Err(Error::Domain("left_multiply needs F_p coefficients".into()));
        };
        let mut shifted = v.permuted(&perm);
        shifted.scale(*c);
        out.axpy(1, &shifted);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CoefficientDomain, GroupAlgebra};

    fn table(p: u64, d: usize, u: u32, t: u32) -> GroupTable {
        GroupTable::new(GroupParams::new(p, d, u).unwrap(), t).unwrap()
    }

    #[test]
    fn passman_basis_dimensions() {
        let t2 = table(2, 2, 2, 2);
        assert_eq!(passman_basis(&t2, 2).unwrap().dimension(), 11);
        assert_eq!(passman_basis(&t2, 0).unwrap().dimension(), 16);
        assert_eq!(passman_basis(&t2, 5).unwrap().dimension(), 0);
    }

    #[test]
    fn graded_dims_examples() {
        let p311 = GroupParams::new(3, 1, 1).unwrap();
        assert_eq!(graded_dims(p311, 2).unwrap(), vec![1, 1, 1]);
        let p222 = GroupParams::new(2, 2, 2).unwrap();
        assert_eq!(graded_dims(p222, 2).unwrap(), vec![1, 4, 6, 4, 1]);
        for t in 1..=4 {
            assert_eq!(graded_dims(p311, t).unwrap()[0], 1);
        }
    }

    #[test]
    fn bottom_degrees_of_generators() {
        for (p, d, u) in [(2u64, 2usize, 2u32), (3, 1, 1)] {
            let tab = table(p, d, u, 3);
            let f = Filtration::build(&tab).unwrap();
            let alg = GroupAlgebra::new(tab.clone(), CoefficientDomain::PrimeField { p }).unwrap();
            let y = alg.params().generator(0, 0, 3).unwrap();
            let ym = alg.augmentation_generator(&y).to_fpvec(tab.order()).unwrap();
            assert_eq!(f.bottom_degree(&ym), BottomDegree::Certified(1));
            let sym = f.bottom_symbol(&ym).unwrap();
            let mut x1 = vec![0u64; d * d];
            x1[0] = 1;
            assert_eq!(sym.terms, BTreeMap::from([(MonomialVector(x1.clone()), 1)]));

            let yp = alg.params().pow_p(&y);
            let ypm = alg.augmentation_generator(&yp).to_fpvec(tab.order()).unwrap();
            let expected = if p < f.cap() { BottomDegree::Certified(p) } else { BottomDegree::AtCap(p) };
            assert_eq!(f.bottom_degree(&ypm), expected);
            x1[0] = p;
            assert_eq!(
                f.bottom_symbol(&ypm).unwrap().terms,
                BTreeMap::from([(MonomialVector(x1), 1)])
            );
            assert_eq!(f.bottom_degree(&FpVec::zeros(p, tab.order() as usize)), BottomDegree::Zero);
        }
    }

    #[test]
    fn word_span_equals_augmentation_powers() {
        for (p, d, u, t) in [(2u64, 2usize, 2u32, 2u32), (2, 2, 2, 3), (3, 1, 1, 3), (3, 1, 1, 4), (5, 1, 1, 2)] {
            let tab = table(p, d, u, t);
            let powers = augmentation_powers(&tab).unwrap();
            let f = Filtration::build(&tab).unwrap();
            assert_eq!(powers.len() as u64, f.max_weight() + 2);
            for (s, power) in powers.iter().enumerate() {
                let basis = passman_basis(&tab, s as u64).unwrap();
                assert_eq!(power.rank(), basis.dimension(), "dim ω^{s}");
                assert!(power.rows().iter().all(|r| basis.contains(r)));
                assert!(basis.echelon().rows().iter().all(|r| power.contains(r)));
            }
        }
    }

    #[test]
    fn symbol_product_truncates() {
        let x = |a: Vec<u64>| MonomialVector(a);
        let a = BottomSymbol { degree: 1, terms: BTreeMap::from([(x(vec![1, 0]), 1)]) };
        let sq = a.product(&a, 2, 2);
        assert!(sq.terms.is_empty());
        let sq = a.product(&a, 2, 4);
        assert_eq!(sq.terms, BTreeMap::from([(x(vec![2, 0]), 1)]));
    }
}
