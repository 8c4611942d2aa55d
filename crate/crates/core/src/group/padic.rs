//! p-th roots through the truncated p-adic matrix logarithm and exponential.
//!
//! For `x = I + X` with `X ≡ 0 mod p^(u+1)`, the root is `exp(log(x) / p)`.
//! Both series have integral terms here: `v(X^k / k) >= k(u+1) - v(k)` and
//! `v(Y^k / k!) >= k·u - (k-1)/(p-1)` with `v(Y) >= u`. Every term is computed
//! exactly as an integer matrix modulo a working precision that exceeds the
//! target by the largest valuation divided out, so the divisions are exact.

use super::element::{Extended, QuotientElement};
use super::params::{mat_mul, GroupParams};
use crate::arith::{self, add_mod, checked_pow, inv_mod, mul_mod, sub_mod};
use crate::error::{Error, Result};

pub(super) fn p_th_root(params: &GroupParams, x: &QuotientElement) -> Result<QuotientElement> {
    let t = x.level();
    match params.depth(x) {
        Extended::Infinite => return params.identity(t),
        Extended::Finite(j) if j < 2 => {
            return Err(Error::Domain(format!(
                "p-th root needs depth >= 2, element has depth {j}"
            )))
        }
        Extended::Finite(_) => {}
    }
    let p = params.p();
    let u = params.u() as u64;
    let d = params.d();
    let target = params.precision(t) as u64;

    // log(x) is needed modulo p^(target+1) so that log(x)/p is known mod p^target.
    let log_prec = target + 1;
    let log_terms = first_k(|k| k * (u + 1) - arith::floor_log(k, p) as u64 >= log_prec);
    let log_work = log_prec + arith::floor_log(log_terms, p) as u64;
    let log_mod = working_modulus(p, log_work)?;
    let log_target = p.pow(log_prec as u32);

    let mut big_x: Vec<u64> = x.entries().to_vec();
    for i in 0..d {
        big_x[i * d + i] = sub_mod(big_x[i * d + i], 1, log_mod);
    }
    let mut log = vec![0u64; d * d];
    let mut power = big_x.clone();
    for k in 1..log_terms {
        let term = divide_exact(&power, k, p, log_mod, log_target)?;
        for (acc, v) in log.iter_mut().zip(term) {
            *acc = if k % 2 == 1 {
                add_mod(*acc, v, log_target)
            } else {
                sub_mod(*acc, v, log_target)
            };
        }
        power = mat_mul(&power, &big_x, d, log_mod);
    }

    // Y = log(x) / p, known modulo p^target.
    let target_mod = params.modulus(t)?;
    let y: Vec<u64> = log
        .iter()
        .map(|&v| {
            if v % p != 0 {
                Err(Error::Domain("log(x) is not divisible by p".into()))
            } else {
                Ok(v / p)
            }
        })
        .collect::<Result<_>>()?;

    let exp_terms = first_k(|k| k * u - (k - 1) / (p - 1) >= target);
    let exp_work = target + factorial_valuation(exp_terms, p);
    let exp_mod = working_modulus(p, exp_work)?;

    let mut root = params.identity(t)?.entries().to_vec();
    let mut power = y.clone();
    let mut factorial_unit = 1u64;
    let mut factorial_val = 0u64;
    for k in 1..exp_terms {
        let (kv, ku) = split(k, p);
        factorial_val += kv as u64;
        factorial_unit = mul_mod(factorial_unit, ku % exp_mod, exp_mod);
        let pv = p.pow(factorial_val as u32);
        let unit_inv = inv_mod(factorial_unit, exp_mod).expect("unit part is invertible");
        for (acc, &v) in root.iter_mut().zip(&power) {
            if v % pv != 0 {
                return Err(Error::Domain("exponential term is not integral".into()));
            }
            let term = mul_mod(v / pv, unit_inv, exp_mod) % target_mod;
            *acc = add_mod(*acc, term, target_mod);
        }
        power = mat_mul(&power, &y, d, exp_mod);
    }
    Ok(QuotientElement::from_raw(t, root))
}

/// Smallest `k >= 1` from which the predicate holds; callers pass monotone bounds.
fn first_k(pred: impl Fn(u64) -> bool) -> u64 {
    (1u64..).find(|&k| pred(k)).expect("bound is eventually satisfied")
}

fn working_modulus(p: u64, exp: u64) -> Result<u64> {
    checked_pow(p, exp)
        .filter(|&m| m < (1u64 << 62))
        .ok_or_else(|| Error::Size(format!("working precision p^{exp} overflows 62 bits")))
}

/// `k = p^v · unit`.
fn split(k: u64, p: u64) -> (u32, u64) {
    let v = arith::valuation(k, p);
    (v, k / p.pow(v))
}

/// `v_p((k-1)!)`, the largest factorial valuation used by the exp loop.
fn factorial_valuation(k: u64, p: u64) -> u64 {
    (1..k).map(|i| arith::valuation(i, p) as u64).sum()
}

/// `power / k` reduced modulo `out_mod`; `power` must be divisible by `p^v(k)`.
fn divide_exact(power: &[u64], k: u64, p: u64, modulus: u64, out_mod: u64) -> Result<Vec<u64>> {
    let (v, unit) = split(k, p);
    let pv = p.pow(v);
    let unit_inv = inv_mod(unit % modulus, modulus).expect("unit part is invertible");
    power
        .iter()
        .map(|&x| {
            if x % pv != 0 {
                return Err(Error::Domain("logarithm term is not integral".into()));
            }
            Ok(mul_mod(x / pv, unit_inv, modulus) % out_mod)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;
    use rand::Rng;

    #[test]
    fn identity_root() {
        let params = GroupParams::new(3, 2, 1).unwrap();
        let id = params.identity(3).unwrap();
        assert_eq!(params.p_th_root(&id).unwrap(), id);
    }

    #[test]
    fn rejects_depth_one() {
        let params = GroupParams::new(3, 2, 1).unwrap();
        let y = params.generator(0, 0, 3).unwrap();
        assert!(matches!(params.p_th_root(&y), Err(Error::Domain(_))));
    }

    #[test]
    fn root_of_generator_power() {
        for (p, d, u) in [(3u64, 2usize, 1u32), (2, 2, 2), (5, 1, 1), (2, 1, 3)] {
            let params = GroupParams::new(p, d, u).unwrap();
            let y = params.generator(0, 0, 4).unwrap();
            let x = params.pow_p(&y);
            let root = params.p_th_root(&x).unwrap();
            assert_eq!(params.pow_p(&root), x, "params {p},{d},{u}");
        }
    }

    #[test]
    fn random_round_trips() {
        let params = GroupParams::new(3, 2, 1).unwrap();
        let table = GroupTable::new(params, 3).unwrap();
        let mut rng = crate::rng::stream(7, 0);
        let mut done = 0;
        while done < 50 {
            let g = table.element(rng.gen_range(0..table.order()));
            if params.depth(&g) < Extended::Finite(2) {
                continue;
            }
            let root = params.p_th_root(&g).unwrap();
            assert_eq!(params.pow_p(&root), g);
            let dx = params.depth(&g).finite().unwrap_or(u64::MAX);
            assert!(params.depth(&root) >= Extended::Finite(dx.saturating_sub(1)));
            done += 1;
        }
    }
}
