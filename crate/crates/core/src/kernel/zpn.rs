//! Linear algebra over the chain ring `Z/p^N`.

use crate::arith::{inv_mod, mul_mod, sub_mod, valuation};

/// Howell form of the row span of `rows` over `Z/p^N`.
///
/// Rows come back in echelon order with leading entries powers of `p`.
/// Every vector of the span whose first `k` entries vanish is a combination
/// of the returned rows whose leading column is `>= k`.
pub fn howell_form(rows: &[Vec<u64>], p: u64, n: u32) -> Vec<Vec<u64>> {
    let modulus = p.pow(n);
    let width = rows.first().map_or(0, Vec::len);
    let mut pending: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x % modulus).collect())
        .filter(|r: &Vec<u64>| r.iter().any(|&x| x != 0))
        .collect();
    let mut out = Vec::new();
    for c in 0..width {
        let best = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r[c] != 0)
            .min_by_key(|(_, r)| valuation(r[c], p))
            .map(|(k, _)| k);
        let Some(k) = best else { continue };
        let mut piv = pending.swap_remove(k);
        let v = valuation(piv[c], p);
        let pv = p.pow(v);
        let unit = inv_mod(piv[c] / pv, modulus).expect("unit part is invertible");
        for x in piv.iter_mut() {
            *x = mul_mod(*x, unit, modulus);
        }
        for row in pending.iter_mut() {
            if row[c] != 0 {
                let f = row[c] / pv;
                for j in c..width {
                    row[j] = sub_mod(row[j], mul_mod(f, piv[j], modulus), modulus);
                }
            }
        }
        if v > 0 {
            // p^(N-v)·piv vanishes at c and carries span information forward.
            let ann = p.pow(n - v);
            let extra: Vec<u64> = piv.iter().map(|&x| mul_mod(x, ann, modulus)).collect();
            pending.push(extra);
        }
        pending.retain(|r| r.iter().any(|&x| x != 0));
        // reduce earlier rows at this column
        for row in out.iter_mut() {
            let row: &mut Vec<u64> = row;
            let f = row[c] / pv;
            if f != 0 {
                for j in c..width {
                    row[j] = sub_mod(row[j], mul_mod(f, piv[j], modulus), modulus);
                }
            }
        }
        out.push(piv);
    }
    out
}

/// Generators of `{x : M x = 0}` where `columns[c]` is column `c` of `M`
/// (dense, length `height`).
pub fn kernel_generators(columns: &[Vec<u64>], height: usize, p: u64, n: u32) -> Vec<Vec<u64>> {
    let k = columns.len();
    let aug: Vec<Vec<u64>> = columns
        .iter()
        .enumerate()
        .map(|(c, col)| {
            let mut row = col.clone();
            row.resize(height, 0);
            row.extend((0..k).map(|j| u64::from(j == c)));
            row
        })
        .collect();
    howell_form(&aug, p, n)
        .into_iter()
        .filter(|r| r[..height].iter().all(|&x| x == 0))
        .map(|r| r[height..].to_vec())
        .collect()
}

/// Number of `Z/p^N` summands in a module generated by `gens`, i.e.
/// `dim_{F_p} p^(N-1)·K`.
pub fn free_rank(gens: &[Vec<u64>], p: u64) -> usize {
    let mut reduced: Vec<Vec<u64>> = gens
        .iter()
        .map(|g| g.iter().map(|x| x % p).collect())
        .collect();
    super::rational::rank_mod_prime_u64(&mut reduced, p)
}

/// Free rank of the kernel of `M` over `Z/p^N`.
pub fn kernel_free_rank(columns: &[Vec<u64>], height: usize, p: u64, n: u32) -> usize {
    free_rank(&kernel_generators(columns, height, p, n), p)
}

/// Diagonal of a Smith form over `Z/p^N` as valuations (`N` for a zero
/// entry), padded to `min(rows, cols)`. Used as an independent oracle.
pub fn smith_valuations(rows: &[Vec<u64>], p: u64, n: u32) -> Vec<u32> {
    let modulus = p.pow(n);
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % modulus).collect()).collect();
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for k in 0..nr.min(nc) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, &x) in row.iter().enumerate().skip(k) {
                if x != 0 {
                    let v = valuation(x, p);
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, i, j)) = best else {
            diag.extend(std::iter::repeat_n(n, nr.min(nc) - k));
            break;
        };
        a.swap(k, i);
        for row in a.iter_mut() {
            row.swap(k, j);
        }
        let pv = p.pow(v);
        let unit = inv_mod(a[k][k] / pv, modulus).expect("unit");
        for x in a[k].iter_mut() {
            *x = mul_mod(*x, unit, modulus);
        }
        for i in k + 1..nr {
            let f = a[i][k] / pv;
            if f != 0 {
                for j in k..nc {
                    let s = mul_mod(f, a[k][j], modulus);
                    a[i][j] = sub_mod(a[i][j], s, modulus);
                }
            }
        }
        for j in k + 1..nc {
            let f = a[k][j] / pv;
            if f != 0 {
                for row in a.iter_mut() {
                    let s = mul_mod(f, row[k], modulus);
                    row[j] = sub_mod(row[j], s, modulus);
                }
            }
        }
        diag.push(v);
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn columns_of(rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let nc = rows.first().map_or(0, Vec::len);
        (0..nc).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
    }

    fn smith_free_rank(rows: &[Vec<u64>], p: u64, n: u32) -> usize {
        let nc = rows.first().map_or(0, Vec::len);
        let diag = smith_valuations(rows, p, n);
        diag.iter().filter(|&&v| v == n).count() + nc - diag.len()
    }

    #[test]
    fn zero_diagonal_rule_counterexample() {
        // [[3,1],[0,0]] over Z/9: kernel {x : 3x0 + x1 = 0} = <(1,-3)>, free.
        let rows = vec![vec![3, 1], vec![0, 0]];
        assert_eq!(kernel_free_rank(&columns_of(&rows), 2, 3, 2), 1);
        assert_eq!(smith_free_rank(&rows, 3, 2), 1);
    }

    #[test]
    fn scalar_multiples() {
        // 3·I over Z/9 kills 3·(Z/9)^2, which has no free part.
        let rows = vec![vec![3, 0], vec![0, 3]];
        assert_eq!(kernel_free_rank(&columns_of(&rows), 2, 3, 2), 0);
        let zero = vec![vec![0u64; 3]; 2];
        assert_eq!(kernel_free_rank(&columns_of(&zero), 2, 3, 2), 3);
    }

    proptest! {
        #[test]
        fn howell_kernel_matches_smith(
            (p, n) in prop::sample::select(vec![(2u64, 3u32), (3, 2), (5, 2), (2, 1)]),
            nr in 1usize..6, nc in 1usize..6, seed in any::<u64>()
        ) {
            use rand::Rng;
            let mut rng = crate::rng::stream(seed, 0);
            let m = p.pow(n);
            let rows: Vec<Vec<u64>> = (0..nr)
                .map(|_| (0..nc).map(|_| {
                    // bias toward multiples of p
                    let x = rng.gen_range(0..m);
                    if rng.gen_bool(0.5) { x * p % m } else { x }
                }).collect())
                .collect();
            let howell = kernel_free_rank(&columns_of(&rows), nr, p, n);
            prop_assert_eq!(howell, smith_free_rank(&rows, p, n));
            // every generator really is in the kernel
            for g in kernel_generators(&columns_of(&rows), nr, p, n) {
                for r in &rows {
                    let s = r.iter().zip(&g).fold(0u64, |acc, (a, b)| (acc + a * b) % m);
                    prop_assert_eq!(s, 0);
                }
            }
        }
    }
}
