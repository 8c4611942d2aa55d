use serde::{Deserialize, Serialize};

use super::element::{Extended, QuotientElement};
use crate::arith::{self, add_mod, checked_pow, mul_mod, sub_mod};
use crate::error::{Error, Result};

/// Largest prime accepted for `p`.
pub const MAX_PRIME: u64 = 97;

/// Parameters of `Γ = CS(u, d, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    p: u64,
    d: usize,
    u: u32,
}

/// `⌈log_p i⌉ + 1`: the index `j` with `Γ*_i = Γ_j`.
pub fn star_index(i: u64, p: u64) -> u32 {
    assert!(i >= 1, "star_index is defined for i >= 1");
    arith::ceil_log(i, p) + 1
}

impl GroupParams {
    pub fn new(p: u64, d: usize, u: u32) -> Result<Self> {
        if !(2..=MAX_PRIME).contains(&p) || !arith::is_prime(p) {
            return Err(Error::Validation(format!(
                "p = {p} must be a prime no larger than {MAX_PRIME}"
            )));
        }
        if d == 0 {
            return Err(Error::Validation("d must be at least 1".into()));
        }
        if u == 0 {
            return Err(Error::Validation("u must be at least 1".into()));
        }
        if p == 2 && u < 2 {
            return Err(Error::Validation("u must be at least 2 when p = 2".into()));
        }
        Ok(Self { p, d, u })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    /// Rank of every layer `Γ_i/Γ_(i+1)`, always `d²`.
    pub fn e(&self) -> usize {
        self.d * self.d
    }

    /// Parameters of the overgroup `CS(u - j, d, p)`.
    pub fn overgroup(&self, j: u32) -> Result<Self> {
        if j >= self.u {
            return Err(Error::Validation(format!(
                "overgroup offset j = {j} requires u - j >= 1 (u = {})",
                self.u
            )));
        }
        Self::new(self.p, self.d, self.u - j)
    }

    /// Exponent of the entry modulus at level `t`.
    pub fn precision(&self, t: u32) -> u32 {
        self.u + t - 1
    }

    /// `p^(u+t-1)`.
    pub fn modulus(&self, t: u32) -> Result<u64> {
        let m = checked_pow(self.p, self.precision(t) as u64)
            .filter(|&m| m < (1u64 << 62))
            .ok_or_else(|| Error::Size(format!("modulus p^{} overflows", self.precision(t))))?;
        Ok(m)
    }

    /// `p^u`.
    pub fn base_modulus(&self) -> u64 {
        self.p.pow(self.u)
    }

    /// `|Γ/Γ_t| = p^((t-1)e)`, or `None` on overflow.
    pub fn order(&self, t: u32) -> Option<u64> {
        checked_pow(self.p, (t as u64 - 1) * self.e() as u64)
    }

    fn check_level(&self, t: u32) -> Result<u64> {
        if t == 0 {
            return Err(Error::Validation("level t must be at least 1".into()));
        }
        self.modulus(t)
    }

    pub fn identity(&self, t: u32) -> Result<QuotientElement> {
        self.check_level(t)?;
        let d = self.d;
        let mut entries = vec![0u64; d * d];
        let m = self.modulus(t)?;
        for i in 0..d {
            entries[i * d + i] = 1 % m;
        }
        Ok(QuotientElement::from_raw(t, entries))
    }

    /// `y_(r,s) = I + p^u E_(r,s)` reduced to level `t` (0-based `r`, `s`).
    pub fn generator(&self, r: usize, s: usize, t: u32) -> Result<QuotientElement> {
        if r >= self.d || s >= self.d {
            return Err(Error::Validation(format!("matrix unit ({r},{s}) out of range")));
        }
        let mut g = self.identity(t)?;
        let m = self.modulus(t)?;
        let k = r * self.d + s;
        g.entries_mut()[k] = add_mod(g.entries()[k], self.base_modulus() % m, m);
        Ok(g)
    }

    /// Reduces an integer matrix (row-major) to level `t`, checking that it is
    /// congruent to the identity modulo `p^u`.
    pub fn element_from_matrix(&self, t: u32, entries: &[i64]) -> Result<QuotientElement> {
        let m = self.check_level(t)?;
        if entries.len() != self.d * self.d {
            return Err(Error::Validation(format!(
                "expected {} matrix entries, got {}",
                self.d * self.d,
                entries.len()
            )));
        }
        let pu = self.base_modulus() as i128;
        let mut out = Vec::with_capacity(entries.len());
        for (k, &x) in entries.iter().enumerate() {
            let diag = (k / self.d == k % self.d) as i128;
            if (x as i128 - diag).rem_euclid(pu) != 0 {
                return Err(Error::Validation(format!(
                    "matrix is not congruent to the identity modulo p^{}",
                    self.u
                )));
            }
            out.push((x as i128).rem_euclid(m as i128) as u64);
        }
        Ok(QuotientElement::from_raw(t, out))
    }

    fn same_level(&self, a: &QuotientElement, b: &QuotientElement) -> Result<u32> {
        if a.level() != b.level() {
            return Err(Error::LevelMismatch(a.level(), b.level()));
        }
        Ok(a.level())
    }

    /// Matrix product modulo `p^(u+t-1)`.
    pub fn mul(&self, a: &QuotientElement, b: &QuotientElement) -> Result<QuotientElement> {
        let t = self.same_level(a, b)?;
        let m = self.modulus(t)?;
        Ok(QuotientElement::from_raw(
            t,
            mat_mul(a.entries(), b.entries(), self.d, m),
        ))
    }

    /// Inverse through the terminating Neumann series `Σ (-N)^k`, `N = a - I`.
    pub fn inv(&self, a: &QuotientElement) -> QuotientElement {
        let t = a.level();
        let m = self.modulus(t).expect("element level validated at construction");
        let d = self.d;
        let mut neg_n = a.entries().to_vec();
        for i in 0..d {
            neg_n[i * d + i] = sub_mod(neg_n[i * d + i], 1, m);
        }
        for x in neg_n.iter_mut() {
            *x = sub_mod(0, *x, m);
        }
        let mut acc = self.identity(t).expect("valid level").entries().to_vec();
        let mut term = acc.clone();
        // (p^u M)^k vanishes once k·u >= u + t - 1.
        loop {
            term = mat_mul(&term, &neg_n, d, m);
            if term.iter().all(|&x| x == 0) {
                break;
            }
            for (x, y) in acc.iter_mut().zip(&term) {
                *x = add_mod(*x, *y, m);
            }
        }
        QuotientElement::from_raw(t, acc)
    }

    pub fn pow(&self, a: &QuotientElement, mut k: u64) -> QuotientElement {
        let t = a.level();
        let m = self.modulus(t).expect("valid level");
        let mut acc = self.identity(t).expect("valid level").entries().to_vec();
        let mut base = a.entries().to_vec();
        while k > 0 {
            if k & 1 == 1 {
                acc = mat_mul(&acc, &base, self.d, m);
            }
            base = mat_mul(&base, &base, self.d, m);
            k >>= 1;
        }
        QuotientElement::from_raw(t, acc)
    }

    pub fn pow_p(&self, a: &QuotientElement) -> QuotientElement {
        self.pow(a, self.p)
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: &QuotientElement, b: &QuotientElement) -> Result<QuotientElement> {
        self.same_level(a, b)?;
        let ab = self.mul(a, b)?;
        let ab_ai = self.mul(&ab, &self.inv(a))?;
        self.mul(&ab_ai, &self.inv(b))
    }

    pub fn is_identity(&self, a: &QuotientElement) -> bool {
        let d = self.d;
        a.entries()
            .iter()
            .enumerate()
            .all(|(k, &x)| x == (k / d == k % d) as u64)
    }

    /// Largest `j <= t` with `g ≡ I mod p^(u+j-1)`; infinite for the identity.
    pub fn depth(&self, g: &QuotientElement) -> Extended {
        if self.is_identity(g) {
            return Extended::Infinite;
        }
        let d = self.d;
        let min_val = g
            .entries()
            .iter()
            .enumerate()
            .filter_map(|(k, &x)| {
                let diff = if k / d == k % d { x.wrapping_sub(1) } else { x };
                // x - 1 for a diagonal zero residue wraps; such an entry has valuation 0.
                if k / d == k % d && x == 0 {
                    return Some(0);
                }
                (diff != 0).then(|| arith::valuation(diff, self.p))
            })
            .min()
            .expect("non-identity has a nonzero entry of g - I");
        Extended::Finite((min_val + 1 - self.u) as u64)
    }

    /// Height `p^(depth - 1)`: the largest `i` with `g ∈ Γ*_i`.
    pub fn height(&self, g: &QuotientElement) -> Extended {
        match self.depth(g) {
            Extended::Infinite => Extended::Infinite,
            Extended::Finite(j) => Extended::Finite(self.p.pow(j as u32 - 1)),
        }
    }

    /// Image of `g` in `Γ/Γ_t` for `t <= g.level()`.
    pub fn project(&self, g: &QuotientElement, t: u32) -> Result<QuotientElement> {
        if t > g.level() || t == 0 {
            return Err(Error::Validation(format!(
                "cannot project level {} to level {t}",
                g.level()
            )));
        }
        let m = self.modulus(t)?;
        Ok(QuotientElement::from_raw(
            t,
            g.entries().iter().map(|&x| x % m).collect(),
        ))
    }

    /// Lift to a higher level through the canonical residue representative.
    pub fn lift(&self, g: &QuotientElement, t: u32) -> Result<QuotientElement> {
        if t < g.level() {
            return Err(Error::Validation(format!(
                "cannot lift level {} to level {t}",
                g.level()
            )));
        }
        self.modulus(t)?;
        Ok(QuotientElement::from_raw(t, g.entries().to_vec()))
    }

    /// A `y` with `y^p = x`, for `x` of depth at least 2.
    pub fn p_th_root(&self, x: &QuotientElement) -> Result<QuotientElement> {
        super::padic::p_th_root(self, x)
    }
}

pub(crate) fn mat_mul(a: &[u64], b: &[u64], d: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] = add_mod(out[i * d + j], mul_mod(aik, b[k * d + j], m), m);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, d: usize, u: u32) -> GroupParams {
        GroupParams::new(p, d, u).unwrap()
    }

    #[test]
    fn validation() {
        assert!(GroupParams::new(2, 2, 1).is_err());
        assert!(GroupParams::new(4, 2, 2).is_err());
        assert!(GroupParams::new(101, 1, 1).is_err());
        assert!(GroupParams::new(3, 0, 1).is_err());
        assert!(GroupParams::new(3, 1, 0).is_err());
        assert_eq!(params(3, 2, 1).e(), 4);
        assert!(params(3, 1, 2).overgroup(1).is_ok());
        assert!(params(2, 1, 2).overgroup(1).is_err());
    }

    #[test]
    fn star_index_examples() {
        for p in [2u64, 3, 5] {
            assert_eq!(star_index(1, p), 1);
            assert_eq!(star_index(p, p), 2);
            assert_eq!(star_index(p + 1, p), 3);
            assert_eq!(star_index(p * p, p), 3);
            assert_eq!(star_index(p * p + 1, p), 4);
        }
        assert_eq!(star_index(3, 2), 3);
    }

    #[test]
    fn generator_product_mod_nine() {
        let g = params(3, 2, 1);
        let y12 = g.generator(0, 1, 2).unwrap();
        let y21 = g.generator(1, 0, 2).unwrap();
        let prod = g.mul(&y12, &y21).unwrap();
        // (I + 3E12)(I + 3E21) = I + 3E12 + 3E21 + 9E11, and 9 ≡ 0.
        assert_eq!(prod.entries(), &[1, 3, 3, 1]);
    }

    #[test]
    fn inverse_two_term_series() {
        let g = params(3, 2, 1);
        let y11 = g.generator(0, 0, 2).unwrap();
        assert_eq!(g.inv(&y11).entries(), &[1 + 9 - 3, 0, 0, 1]);
        let id = g.identity(3).unwrap();
        assert_eq!(g.inv(&id), id);
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let g = params(3, 2, 1);
        let a = g.generator(0, 0, 2).unwrap();
        let b = g.generator(0, 0, 3).unwrap();
        assert!(matches!(g.mul(&a, &b), Err(Error::LevelMismatch(2, 3))));
        assert!(g.commutator(&a, &b).is_err());
    }

    #[test]
    fn depth_and_height() {
        let g = params(3, 2, 1);
        let id = g.identity(4).unwrap();
        assert_eq!(g.depth(&id), Extended::Infinite);
        assert_eq!(g.height(&id), Extended::Infinite);
        let y11 = g.generator(0, 0, 4).unwrap();
        assert_eq!(g.depth(&y11), Extended::Finite(1));
        assert_eq!(g.depth(&g.pow_p(&y11)), Extended::Finite(2));
        let y12 = g.generator(0, 1, 4).unwrap();
        assert_eq!(g.height(&y12), Extended::Finite(1));
        assert_eq!(g.height(&g.pow(&y12, 9)), Extended::Finite(9));
        // I - p^u E11 has a diagonal residue that is not 1 but has valuation u.
        let inv = g.inv(&y11);
        assert_eq!(g.depth(&inv), Extended::Finite(1));
    }

    #[test]
    fn matrix_validation() {
        let g = params(3, 1, 1);
        assert!(g.element_from_matrix(2, &[4]).is_ok());
        assert!(g.element_from_matrix(2, &[-2]).is_ok());
        assert!(g.element_from_matrix(2, &[2]).is_err());
        assert!(g.element_from_matrix(2, &[1, 0]).is_err());
        assert_eq!(g.element_from_matrix(2, &[-2]).unwrap().entries(), &[7]);
    }
}
