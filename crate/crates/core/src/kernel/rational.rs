//! Exact rank over `Q`: fraction-free elimination and multi-modular ranks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{inv_mod, is_prime};
use crate::error::{Error, Result};

/// Scales each column of a sparse rational matrix to integers (column scaling
/// keeps the rank) and returns dense integer columns.
pub fn integer_columns(
    rows: usize,
    cols: &[Vec<(usize, num_rational::BigRational)>],
) -> Vec<Vec<BigInt>> {
    cols.iter()
        .map(|col| {
            let lcm = col
                .iter()
                .fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
            let mut dense = vec![BigInt::zero(); rows];
            for (r, q) in col {
                dense[*r] = q.numer() * (&lcm / q.denom());
            }
            dense
        })
        .collect()
}

/// Bareiss fraction-free elimination; every intermediate division is exact.
/// `m` is a list of rows.
pub fn rank_fraction_free(mut m: Vec<Vec<BigInt>>) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pv = &pivot_row[c];
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let mut x = &row[j] * pv;
                if !f.is_zero() && !pivot_row[j].is_zero() {
                    x -= &f * &pivot_row[j];
                }
                if !x.is_zero() {
                    x /= &prev;
                }
                row[j] = x;
            }
        }
        prev = top[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Rank of an integer matrix modulo a prime `q < 2^32`.
pub fn rank_mod_prime(m: &[Vec<BigInt>], q: u64) -> usize {
    let qb = BigInt::from(q);
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let r = x.mod_floor(&qb);
                    r.to_u64().expect("residue fits")
                })
                .collect()
        })
        .collect();
    rank_mod_prime_u64(&mut a, q)
}

pub(crate) fn rank_mod_prime_u64(a: &mut [Vec<u64>], q: u64) -> usize {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], q).expect("nonzero mod prime");
        for j in c..ncols {
            a[rank][j] = a[rank][j] * inv % q;
        }
        let (top, rest) = a.split_at_mut(rank + 1);
        let pr = &top[rank];
        for row in rest.iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for j in c..ncols {
                row[j] = (row[j] + (q - f) * pr[j]) % q;
            }
        }
        rank += 1;
    }
    rank
}

/// A uniformly drawn prime in `[2^30, 2^31)`.
pub fn random_prime_31<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Ranks modulo random primes until the maximum rank has been seen twice.
/// Returns the rank and the primes used.
pub fn rank_multimodular<R: Rng>(m: &[Vec<BigInt>], rng: &mut R) -> Result<(usize, Vec<u64>)> {
    let mut primes = Vec::new();
    let mut ranks = Vec::new();
    while primes.len() < 5 {
        let q = random_prime_31(rng);
        if primes.contains(&q) {
            continue;
        }
        primes.push(q);
        ranks.push(rank_mod_prime(m, q));
        let max = *ranks.iter().max().expect("nonempty");
        if ranks.iter().filter(|&&r| r == max).count() >= 2 {
            return Ok((max, primes));
        }
    }
    Err(Error::Inconsistency(format!(
        "modular ranks {ranks:?} never agreed over primes {primes:?}"
    )))
}

/// Largest absolute entry, for diagnostics.
pub fn max_abs(m: &[Vec<BigInt>]) -> BigInt {
    m.iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank_fraction_free(mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_fraction_free(mat(&[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6]])), 2);
        assert_eq!(rank_fraction_free(mat(&[&[0, 0], &[0, 0]])), 0);
        // circulant of g - 1 on a 3-cycle
        let c = mat(&[&[-1, 0, 1], &[1, -1, 0], &[0, 1, -1]]);
        assert_eq!(rank_fraction_free(c.clone()), 2);
        assert_eq!(rank_mod_prime(&c, 1_000_000_007), 2);
    }

    #[test]
    fn multimodular_matches_on_hilbert_like() {
        let n = 8;
        let m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i * j + 1) as i64 * (i as i64 - j as i64))).collect())
            .collect();
        let exact = rank_fraction_free(m.clone());
        let mut rng = crate::rng::stream(3, crate::rng::tags::MODULAR_PRIMES);
        let (r, primes) = rank_multimodular(&m, &mut rng).unwrap();
        assert_eq!(r, exact);
        assert!(primes.len() >= 2);
    }
}
