//! Small integer helpers shared across modules.

use num_bigint::BigUint;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Smallest `k >= 0` with `p^k >= i`, in exact integer arithmetic.
pub fn ceil_log(i: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut pk: u128 = 1;
    while pk < i as u128 {
        pk *= p as u128;
        k += 1;
    }
    k
}

/// Largest `k` with `p^k <= i` (for `i >= 1`).
pub fn floor_log(i: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut pk: u128 = p as u128;
    while pk <= i as u128 {
        pk *= p as u128;
        k += 1;
    }
    k
}

/// Binomial coefficient with the convention `C(n, k) = 0` when `n < k` or `n < 0`.
pub fn binomial(n: i64, k: u64) -> BigUint {
    if n < 0 || (n as u64) < k {
        return BigUint::from(0u32);
    }
    let n = n as u64;
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of exponent vectors `a` in `e` variables with `0 <= a_j < cap`
/// and `sum a_j == degree`.
pub fn capped_monomial_count(e: usize, cap: u64, degree: u64) -> u64 {
    // dp over variables; sizes stay tiny for the parameter ranges we use.
    let mut counts = vec![0u64; degree as usize + 1];
    counts[0] = 1;
    for _ in 0..e {
        let mut next = vec![0u64; degree as usize + 1];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for a in 0..cap {
                let t = s + a as usize;
                if t > degree as usize {
                    break;
                }
                next[t] += c;
            }
        }
        counts = next;
    }
    counts[degree as usize]
}

/// 64-bit FNV-1a. Used for on-disk digests, where the hash must be stable
/// across toolchains.
pub fn fnv1a64(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_logs() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
        assert_eq!(ceil_log(1, 3), 0);
        assert_eq!(ceil_log(3, 3), 1);
        assert_eq!(ceil_log(4, 3), 2);
        assert_eq!(ceil_log(9, 3), 2);
        assert_eq!(floor_log(8, 2), 3);
        assert_eq!(floor_log(7, 2), 2);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 4), BigUint::from(70u32));
        assert_eq!(binomial(7, 4), BigUint::from(35u32));
        assert_eq!(binomial(3, 4), BigUint::from(0u32));
        assert_eq!(binomial(-1, 0), BigUint::from(0u32));
        assert_eq!(capped_monomial_count(4, 2, 2), 6);
        assert_eq!(capped_monomial_count(1, 9, 5), 1);
        assert_eq!(capped_monomial_count(2, 3, 3), 2);
    }

    #[test]
    fn modular_inverse() {
        for m in [9u64, 27, 97, 1 << 20] {
            for a in 1..m.min(200) {
                match inv_mod(a, m) {
                    Some(b) => assert_eq!(mul_mod(a, b, m), 1),
                    None => assert!(num_integer::gcd(a, m) > 1),
                }
            }
        }
    }
}
