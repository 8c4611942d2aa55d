//! Dense vectors and incremental echelon spaces over small prime fields.
//!
//! `p = 2` vectors are bit-packed into machine words and reduced with word-wide
//! XOR; odd primes (`p < 256`) use one byte per entry.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FpVec {
    Bits { len: usize, words: Vec<u64> },
    Bytes { p: u8, data: Vec<u8> },
}

impl fmt::Debug for FpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpVec(p={}, ", self.p())?;
        f.debug_list().entries((0..self.len()).map(|i| self.get(i))).finish()?;
        write!(f, ")")
    }
}

impl FpVec {
    pub fn zeros(p: u64, len: usize) -> Self {
        assert!((2..256).contains(&p), "FpVec supports primes below 256");
        if p == 2 {
            FpVec::Bits {
                len,
                words: vec![0; len.div_ceil(64)],
            }
        } else {
            FpVec::Bytes {
                p: p as u8,
                data: vec![0; len],
            }
        }
    }

    pub fn unit(p: u64, len: usize, i: usize) -> Self {
        let mut v = Self::zeros(p, len);
        v.set(i, 1);
        v
    }

    pub fn from_values(p: u64, values: &[u64]) -> Self {
        let mut v = Self::zeros(p, values.len());
        for (i, &x) in values.iter().enumerate() {
            v.set(i, x % p);
        }
        v
    }

    pub fn p(&self) -> u64 {
        match self {
            FpVec::Bits { .. } => 2,
            FpVec::Bytes { p, .. } => *p as u64,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FpVec::Bits { len, .. } => *len,
            FpVec::Bytes { data, .. } => data.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        match self {
            FpVec::Bits { words, .. } => (words[i / 64] >> (i % 64)) & 1,
            FpVec::Bytes { data, .. } => data[i] as u64,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u64) {
        match self {
            FpVec::Bits { words, .. } => {
                let mask = 1u64 << (i % 64);
                if value & 1 == 1 {
                    words[i / 64] |= mask;
                } else {
                    words[i / 64] &= !mask;
                }
            }
            FpVec::Bytes { p, data } => data[i] = (value % *p as u64) as u8,
        }
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, value: u64) {
        match self {
            FpVec::Bits { words, .. } => words[i / 64] ^= (value & 1) << (i % 64),
            FpVec::Bytes { p, data } => {
                let p = *p as u64;
                data[i] = ((data[i] as u64 + value % p) % p) as u8;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FpVec::Bits { words, .. } => words.iter().all(|&w| w == 0),
            FpVec::Bytes { data, .. } => data.iter().all(|&x| x == 0),
        }
    }

    /// First nonzero position strictly below `limit`.
    pub fn first_nonzero_below(&self, limit: usize) -> Option<usize> {
        match self {
            FpVec::Bits { words, .. } => {
                for (k, &w) in words.iter().enumerate() {
                    if k * 64 >= limit {
                        return None;
                    }
                    if w != 0 {
                        let i = k * 64 + w.trailing_zeros() as usize;
                        return (i < limit).then_some(i);
                    }
                }
                None
            }
            FpVec::Bytes { data, .. } => data[..limit.min(data.len())].iter().position(|&x| x != 0),
        }
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        (0..self.len()).filter_map(move |i| {
            let v = self.get(i);
            (v != 0).then_some((i, v))
        })
    }

    pub fn count_nonzero(&self) -> usize {
        match self {
            FpVec::Bits { words, .. } => words.iter().map(|w| w.count_ones() as usize).sum(),
            FpVec::Bytes { data, .. } => data.iter().filter(|&&x| x != 0).count(),
        }
    }

    /// `self += c · other` on positions `>= from`; positions below `from` of
    /// `other` must be zero (bit vectors may touch the whole word containing `from`).
    pub fn axpy_from(&mut self, c: u64, other: &FpVec, from: usize) {
        match (self, other) {
            (FpVec::Bits { words, .. }, FpVec::Bits { words: o, .. }) => {
                if c & 1 == 0 {
                    return;
                }
                for (w, x) in words[from / 64..].iter_mut().zip(&o[from / 64..]) {
                    *w ^= x;
                }
            }
            (FpVec::Bytes { p, data }, FpVec::Bytes { data: o, .. }) => {
                let p = *p as u32;
                let c = (c % p as u64) as u32;
                if c == 0 {
                    return;
                }
                for (x, &y) in data[from..].iter_mut().zip(&o[from..]) {
                    *x = ((*x as u32 + c * y as u32) % p) as u8;
                }
            }
            _ => panic!("mixed FpVec representations"),
        }
    }

    pub fn axpy(&mut self, c: u64, other: &FpVec) {
        self.axpy_from(c, other, 0);
    }

    pub fn scale(&mut self, c: u64) {
        match self {
            FpVec::Bits { words, .. } => {
                if c & 1 == 0 {
                    words.iter_mut().for_each(|w| *w = 0);
                }
            }
            FpVec::Bytes { p, data } => {
                let p = *p as u32;
                let c = (c % p as u64) as u32;
                data.iter_mut().for_each(|x| *x = ((*x as u32 * c) % p) as u8);
            }
        }
    }

    pub fn negated(&self) -> Self {
        let mut v = self.clone();
        let p = self.p();
        v.scale(p - 1);
        v
    }

    /// Entries `[start, end)` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        let p = self.p();
        let mut out = Self::zeros(p, end - start);
        for (k, i) in (start..end).enumerate() {
            let v = self.get(i);
            if v != 0 {
                out.set(k, v);
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn concat(&self, other: &FpVec) -> Self {
        let p = self.p();
        let mut out = Self::zeros(p, self.len() + other.len());
        for (i, v) in self.nonzeros() {
            out.set(i, v);
        }
        let off = self.len();
        for (i, v) in other.nonzeros() {
            out.set(off + i, v);
        }
        out
    }

    /// `out[perm[i]] = self[i]`.
    pub fn permuted(&self, perm: &[u32]) -> Self {
        let mut out = Self::zeros(self.p(), self.len());
        for (i, v) in self.nonzeros() {
            out.set(perm[i] as usize, v);
        }
        out
    }
}

/// Modular inverse in a small prime field.
pub fn inv_small(a: u64, p: u64) -> u64 {
    crate::arith::inv_mod(a % p, p).expect("nonzero element of a prime field")
}

/// Result of inserting a vector into an [`Echelon`].
#[derive(Debug)]
pub enum Insert {
    /// The vector was independent and became row `usize`.
    Independent(usize),
    /// The vector reduced into the span; the fully reduced residual is returned.
    Dependent(FpVec),
}

/// Semi-echelon basis built incrementally.
///
/// Rows are normalised to a leading 1 at their pivot, pivots are restricted to
/// columns `< pivot_limit` (columns past the limit act as an augmented block),
/// and every row is reduced against all earlier rows, so a single pass over
/// rows in insertion order fully reduces any vector.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    width: usize,
    pivot_limit: usize,
    rows: Vec<FpVec>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u64, width: usize) -> Self {
        Self::augmented(p, width, width)
    }

    pub fn augmented(p: u64, width: usize, pivot_limit: usize) -> Self {
        Self {
            p,
            width,
            pivot_limit,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[FpVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` in place; returns the coefficients subtracted per row.
    pub fn reduce_tracked(&self, v: &mut FpVec) -> Vec<u64> {
        let mut coeffs = vec![0u64; self.rows.len()];
        for (k, (row, &piv)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let c = v.get(piv);
            if c != 0 {
                coeffs[k] = c;
                v.axpy_from(self.p - c, row, piv);
            }
        }
        coeffs
    }

    pub fn reduce(&self, v: &mut FpVec) {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v.get(piv);
            if c != 0 {
                v.axpy_from(self.p - c, row, piv);
            }
        }
    }

    pub fn contains(&self, v: &FpVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.first_nonzero_below(self.pivot_limit).is_none()
    }

    pub fn insert(&mut self, mut v: FpVec) -> Insert {
        debug_assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        match v.first_nonzero_below(self.pivot_limit) {
            None => Insert::Dependent(v),
            Some(piv) => {
                let lead = v.get(piv);
                if lead != 1 {
                    v.scale(inv_small(lead, self.p));
                }
                self.rows.push(v);
                self.pivots.push(piv);
                Insert::Independent(self.rows.len() - 1)
            }
        }
    }
}

/// Rank of a list of vectors.
pub fn rank_of(p: u64, width: usize, vectors: impl IntoIterator<Item = FpVec>) -> usize {
    let mut ech = Echelon::new(p, width);
    for v in vectors {
        ech.insert(v);
    }
    ech.rank()
}

/// Basis of `{c : Σ c_j columns[j] = 0}` for columns of length `height`.
pub fn kernel_basis(p: u64, height: usize, columns: &[FpVec]) -> Vec<FpVec> {
    let n = columns.len();
    let mut ech = Echelon::augmented(p, height + n, height);
    let mut kernel = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let aug = col.concat(&FpVec::unit(p, n, j));
        if let Insert::Dependent(residual) = ech.insert(aug) {
            kernel.push(residual.slice(height, height + n));
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_and_byte_basics() {
        for p in [2u64, 3, 5] {
            let mut v = FpVec::zeros(p, 130);
            assert!(v.is_zero());
            v.set(129, 1);
            v.add_at(3, p - 1);
            assert_eq!(v.first_nonzero_below(130), Some(3));
            assert_eq!(v.first_nonzero_below(3), None);
            assert_eq!(v.count_nonzero(), 2);
            let w = v.slice(100, 130);
            assert_eq!(w.nonzeros().collect::<Vec<_>>(), vec![(29, 1)]);
        }
    }

    #[test]
    fn kernel_of_shift() {
        // Columns of g - 1 on F_3[C_3]: e_{i+1} - e_i.
        let p = 3;
        let cols: Vec<FpVec> = (0..3)
            .map(|i| {
                let mut v = FpVec::zeros(p, 3);
                v.add_at((i + 1) % 3, 1);
                v.add_at(i, p - 1);
                v
            })
            .collect();
        let ker = kernel_basis(p, 3, &cols);
        assert_eq!(ker.len(), 1);
        assert_eq!(rank_of(p, 3, cols), 2);
    }

    fn naive_rank(p: u64, mut m: Vec<Vec<u64>>) -> usize {
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(r) = (rank..m.len()).find(|&r| !m[r][c].is_multiple_of(p)) else { continue };
            m.swap(rank, r);
            let inv = inv_small(m[rank][c], p);
            for r2 in 0..m.len() {
                if r2 != rank && !m[r2][c].is_multiple_of(p) {
                    let f = m[r2][c] * inv % p;
                    for k in 0..cols {
                        m[r2][k] = (m[r2][k] + p * p - f * m[rank][k] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn rank_matches_naive(p in prop::sample::select(vec![2u64, 3, 5, 7]),
                              rows in 1usize..12, cols in 1usize..80, seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = crate::rng::stream(seed, 0);
            let m: Vec<Vec<u64>> = (0..rows)
                .map(|_| (0..cols).map(|_| if rng.gen_bool(0.3) { rng.gen_range(0..p) } else { 0 }).collect())
                .collect();
            let vecs = m.iter().map(|r| FpVec::from_values(p, r));
            prop_assert_eq!(rank_of(p, cols, vecs), naive_rank(p, m.clone()));
            // rank + nullity of the column map equals the column count
            let columns: Vec<FpVec> = (0..cols)
                .map(|c| FpVec::from_values(p, &m.iter().map(|r| r[c]).collect::<Vec<_>>()))
                .collect();
            let ker = kernel_basis(p, rows, &columns);
            prop_assert_eq!(ker.len() + naive_rank(p, m.clone()), cols);
            for k in &ker {
                for r in &m {
                    let s: u64 = r.iter().enumerate().map(|(j, &x)| x * k.get(j)).sum();
                    prop_assert_eq!(s % p, 0);
                }
            }
        }
    }
}
