use std::collections::HashSet;

use super::element::{Extended, QuotientElement};
use super::params::GroupParams;
use crate::error::{Error, Result};

/// Default upper bound on the number of enumerated elements in a table.
pub const DEFAULT_ELEMENT_CAP: u64 = 1 << 24;

/// Orders up to this bound are verified exhaustively.
const EXHAUSTIVE_BOUND: u64 = 1 << 16;

/// Enumeration of `Γ/Γ_t`.
///
/// Element `A = I + p^u M` with `M ∈ Mat_d(Z/p^(t-1))` has index equal to the
/// mixed-radix rank of the entries of `M` in row-major order, first entry
/// most significant, radix `p^(t-1)`.
#[derive(Clone, Debug)]
pub struct GroupTable {
    params: GroupParams,
    level: u32,
    order: u64,
    radix: u64,
    modulus: u64,
}

impl GroupTable {
    /// Cheap constructor: validates sizes but enumerates nothing.
    pub fn new(params: GroupParams, t: u32) -> Result<Self> {
        Self::with_cap(params, t, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_cap(params: GroupParams, t: u32, cap: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::Validation("level t must be at least 1".into()));
        }
        let order = params
            .order(t)
            .filter(|&o| o <= cap)
            .ok_or_else(|| {
                Error::Size(format!(
                    "|Γ/Γ_{t}| = {}^{} exceeds the element cap {cap}",
                    params.p(),
                    (t - 1) as usize * params.e()
                ))
            })?;
        let modulus = params.modulus(t)?;
        Ok(Self {
            params,
            level: t,
            order,
            radix: params.p().pow(t - 1),
            modulus,
        })
    }

    /// Constructs the table and verifies its order, the index bijection and
    /// closure under multiplication by the generators.
    pub fn build(params: GroupParams, t: u32) -> Result<Self> {
        Self::build_with_cap(params, t, DEFAULT_ELEMENT_CAP)
    }

    pub fn build_with_cap(params: GroupParams, t: u32, cap: u64) -> Result<Self> {
        let table = Self::with_cap(params, t, cap)?;
        table.verify()?;
        Ok(table)
    }

    fn verify(&self) -> Result<()> {
        let gens = GeneratorSet::new(self.params, self.level)?;
        let check = |i: u64| -> Result<()> {
            let g = self.element(i);
            if self.index(&g) != i {
                return Err(Error::Validation(format!("index bijection fails at {i}")));
            }
            for y in gens.elements() {
                let prod = self.params.mul(&g, y)?;
                if self.index(&prod) >= self.order {
                    return Err(Error::Validation("table not closed under products".into()));
                }
            }
            Ok(())
        };
        if self.order <= EXHAUSTIVE_BOUND {
            (0..self.order).try_for_each(check)
        } else {
            // Stride through the index range; the stride is coprime to the order.
            let stride = 2 * (self.order / EXHAUSTIVE_BOUND) + 1;
            (0..EXHAUSTIVE_BOUND).try_for_each(|k| check((k * stride) % self.order))
        }
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Element with the given index.
    pub fn element(&self, mut index: u64) -> QuotientElement {
        debug_assert!(index < self.order);
        let e = self.params.e();
        let d = self.params.d();
        let pu = self.params.base_modulus();
        let mut entries = vec![0u64; e];
        for k in (0..e).rev() {
            let digit = index % self.radix;
            index /= self.radix;
            let diag = (k / d == k % d) as u64;
            entries[k] = (diag + pu * digit) % self.modulus;
        }
        QuotientElement::from_raw(self.level, entries)
    }

    /// Index of an element of this level.
    pub fn index(&self, g: &QuotientElement) -> u64 {
        debug_assert_eq!(g.level(), self.level);
        let d = self.params.d();
        let pu = self.params.base_modulus();
        let mut index = 0u64;
        for (k, &x) in g.entries().iter().enumerate() {
            let diag = (k / d == k % d) as u64;
            let shifted = (x + self.modulus - diag) % self.modulus;
            index = index * self.radix + shifted / pu;
        }
        index
    }

    pub fn mul_index(&self, a: u64, b: u64) -> u64 {
        let prod = self
            .params
            .mul(&self.element(a), &self.element(b))
            .expect("same level");
        self.index(&prod)
    }

    pub fn identity_index(&self) -> u64 {
        self.index(&self.params.identity(self.level).expect("valid level"))
    }

    pub fn iter(&self) -> impl Iterator<Item = QuotientElement> + '_ {
        (0..self.order).map(|i| self.element(i))
    }

    /// `perm[i] = index(element(i) · g)`.
    pub fn right_translation(&self, g: &QuotientElement) -> Vec<u32> {
        (0..self.order)
            .map(|i| {
                let h = self.params.mul(&self.element(i), g).expect("same level");
                self.index(&h) as u32
            })
            .collect()
    }

    /// `perm[i] = index(g · element(i))`.
    pub fn left_translation(&self, g: &QuotientElement) -> Vec<u32> {
        (0..self.order)
            .map(|i| {
                let h = self.params.mul(g, &self.element(i)).expect("same level");
                self.index(&h) as u32
            })
            .collect()
    }

    /// Number of elements of each finite depth `1..t` (index `j - 1`), plus the identity.
    pub fn depth_profile(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.level as usize];
        for g in self.iter() {
            match self.params.depth(&g) {
                Extended::Infinite => counts[self.level as usize - 1] += 1,
                Extended::Finite(j) => counts[j as usize - 1] += 1,
            }
        }
        counts
    }
}

/// The `e` generators `y_(r,s) = I + p^u E_(r,s)`, in row-major order of `(r, s)`.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    level: u32,
    elements: Vec<QuotientElement>,
}

impl GeneratorSet {
    pub fn new(params: GroupParams, t: u32) -> Result<Self> {
        let d = params.d();
        let elements = (0..d * d)
            .map(|k| params.generator(k / d, k % d, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { level: t, elements })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn elements(&self) -> &[QuotientElement] {
        &self.elements
    }

    /// Checks that the images in `Γ/Γ_2` are a basis of `(Z/p)^e`: the `M`
    /// coordinates mod `p` are the standard unit vectors.
    pub fn is_layer_basis(&self, table: &GroupTable) -> bool {
        let params = table.params();
        if table.level() < 2 {
            return self.elements.iter().all(|g| params.is_identity(g));
        }
        let Ok(t2) = GroupTable::new(*params, 2) else {
            return false;
        };
        let images: HashSet<u64> = self
            .elements
            .iter()
            .map(|g| t2.index(&params.project(g, 2).expect("level >= 2")))
            .collect();
        let p = params.p();
        let e = params.e() as u32;
        // Index of E_k in Γ/Γ_2 with radix p is p^(e-1-k).
        let expected: HashSet<u64> = (0..e).map(|k| p.pow(e - 1 - k)).collect();
        images == expected
    }

    /// Breadth-first closure of the generators inside the table; returns the
    /// size of the generated subgroup.
    pub fn closure_size(&self, table: &GroupTable) -> u64 {
        let order = table.order() as usize;
        let mut seen = vec![false; order];
        let start = table.identity_index() as usize;
        seen[start] = true;
        let mut frontier = vec![start as u64];
        let mut count = 1u64;
        let perms: Vec<Vec<u32>> = self
            .elements
            .iter()
            .map(|g| table.right_translation(g))
            .collect();
        while let Some(i) = frontier.pop() {
            for perm in &perms {
                let j = perm[i as usize] as usize;
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    frontier.push(j as u64);
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        let p222 = GroupParams::new(2, 2, 2).unwrap();
        assert_eq!(GroupTable::build(p222, 2).unwrap().order(), 16);
        let p311 = GroupParams::new(3, 1, 1).unwrap();
        let trivial = GroupTable::build(p311, 1).unwrap();
        assert_eq!(trivial.order(), 1);
        assert_eq!(trivial.element(0), p311.identity(1).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let p = GroupParams::new(3, 2, 1).unwrap();
        assert!(matches!(GroupTable::new(p, 8), Err(Error::Size(_))));
        assert!(matches!(GroupTable::with_cap(p, 3, 100), Err(Error::Size(_))));
    }

    #[test]
    fn generators_generate() {
        for (p, d, u, t) in [(2u64, 2usize, 2u32, 3u32), (3, 2, 1, 2), (3, 1, 1, 4), (5, 1, 1, 3)] {
            let params = GroupParams::new(p, d, u).unwrap();
            let table = GroupTable::build(params, t).unwrap();
            let gens = GeneratorSet::new(params, t).unwrap();
            assert!(gens.is_layer_basis(&table));
            assert_eq!(gens.closure_size(&table), table.order());
        }
    }

    #[test]
    fn depth_profile_counts_layers() {
        let params = GroupParams::new(3, 1, 1).unwrap();
        let table = GroupTable::build(params, 4).unwrap();
        // 27 elements: 18 of depth 1, 6 of depth 2, 2 of depth 3, identity.
        assert_eq!(table.depth_profile(), vec![18, 6, 2, 1]);
    }
}
