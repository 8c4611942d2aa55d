use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{add_mod, inv_mod, mul_mod, sub_mod};
use crate::error::{Error, Result};

/// Coefficient ring of a group algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientDomain {
    /// `F_p`.
    PrimeField { p: u64 },
    /// `Q`.
    Rationals,
    /// `Z/p^n`.
    PrimePower { p: u64, n: u32 },
}

/// A coefficient: a canonical residue for `F_p` and `Z/p^n`, an exact
/// rational for `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Residue(u64),
    Rational(BigRational),
}

impl fmt::Display for CoefficientDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientDomain::PrimeField { p } => write!(f, "fp:{p}"),
            CoefficientDomain::Rationals => write!(f, "q"),
            CoefficientDomain::PrimePower { p, n } => write!(f, "zpn:{p}:{n}"),
        }
    }
}

impl FromStr for CoefficientDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| -> Result<u64> {
            x.parse().map_err(|_| Error::Parse(format!("bad number {x:?} in domain {s:?}")))
        };
        let dom = match parts.as_slice() {
            ["q"] => CoefficientDomain::Rationals,
            ["fp", p] => CoefficientDomain::PrimeField { p: num(p)? },
            ["zpn", p, n] => CoefficientDomain::PrimePower {
                p: num(p)?,
                n: num(n)? as u32,
            },
            _ => return Err(Error::Parse(format!("unknown coefficient domain {s:?}"))),
        };
        dom.validate()?;
        Ok(dom)
    }
}

impl CoefficientDomain {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CoefficientDomain::PrimeField { p } if !crate::arith::is_prime(p) || p > 251 => {
                Err(Error::Validation(format!("F_{p}: p must be a prime below 256")))
            }
            CoefficientDomain::PrimePower { p, n } => {
                if !crate::arith::is_prime(p) || n == 0 {
                    return Err(Error::Validation(format!("Z/{p}^{n}: need prime p and n >= 1")));
                }
                crate::arith::checked_pow(p, n as u64)
                    .filter(|&m| m < (1 << 62))
                    .map(|_| ())
                    .ok_or_else(|| Error::Size(format!("Z/{p}^{n} modulus too large")))
            }
            _ => Ok(()),
        }
    }

    /// Modulus of a residue domain.
    pub fn modulus(&self) -> Option<u64> {
        match *self {
            CoefficientDomain::PrimeField { p } => Some(p),
            CoefficientDomain::PrimePower { p, n } => Some(p.pow(n)),
            CoefficientDomain::Rationals => None,
        }
    }

    /// The prime of `F_p` or `Z/p^n`.
    pub fn prime(&self) -> Option<u64> {
        match *self {
            CoefficientDomain::PrimeField { p } | CoefficientDomain::PrimePower { p, .. } => Some(p),
            CoefficientDomain::Rationals => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            CoefficientDomain::Rationals => Scalar::Rational(BigRational::zero()),
            _ => Scalar::Residue(0),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, x: i64) -> Scalar {
        match self.modulus() {
            Some(m) => Scalar::Residue((x as i128).rem_euclid(m as i128) as u64),
            None => Scalar::Rational(BigRational::from_integer(BigInt::from(x))),
        }
    }

    pub fn is_zero(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Residue(r) => *r == 0,
            Scalar::Rational(q) => q.is_zero(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b, self.modulus()) {
            (Scalar::Residue(x), Scalar::Residue(y), Some(m)) => Scalar::Residue(add_mod(*x, *y, m)),
            (Scalar::Rational(x), Scalar::Rational(y), None) => Scalar::Rational(x + y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (a, self.modulus()) {
            (Scalar::Residue(x), Some(m)) => Scalar::Residue(sub_mod(0, *x, m)),
            (Scalar::Rational(x), None) => Scalar::Rational(-x),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b, self.modulus()) {
            (Scalar::Residue(x), Scalar::Residue(y), Some(m)) => Scalar::Residue(mul_mod(*x, *y, m)),
            (Scalar::Rational(x), Scalar::Rational(y), None) => Scalar::Rational(x * y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    /// Parses `"7"`, `"-3"` or `"num/den"`; residue domains reduce and need an
    /// invertible denominator.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let q = parse_rational(s)?;
        self.from_rational(&q)
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match self.modulus() {
            None => Ok(Scalar::Rational(q.clone())),
            Some(m) => {
                let reduce = |x: &BigInt| -> u64 {
                    let mb = BigInt::from(m);
                    let r = ((x % &mb) + &mb) % &mb;
                    u64::try_from(r).expect("residue fits")
                };
                let num = reduce(q.numer());
                let den = reduce(q.denom());
                let inv = inv_mod(den, m).ok_or_else(|| {
                    Error::Domain(format!("denominator of {q} is not invertible in {self}"))
                })?;
                Ok(Scalar::Residue(mul_mod(num, inv, m)))
            }
        }
    }

    pub fn format_scalar(&self, x: &Scalar) -> String {
        match x {
            Scalar::Residue(r) => r.to_string(),
            Scalar::Rational(q) if q.is_integer() => q.numer().to_string(),
            Scalar::Rational(q) => format!("{}/{}", q.numer(), q.denom()),
        }
    }

    /// True when every coefficient of `Z/p^n` data is divisible by `p`.
    pub fn divisible_by_p(&self, x: &Scalar) -> bool {
        match (x, self.prime()) {
            (Scalar::Residue(r), Some(p)) => r % p == 0,
            _ => self.is_zero(x),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad coefficient {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let q = CoefficientDomain::Rationals;
        let x = q.parse_scalar("-6/4").unwrap();
        assert_eq!(q.format_scalar(&x), "-3/2");
        let f3 = CoefficientDomain::PrimeField { p: 3 };
        assert_eq!(f3.parse_scalar("-1").unwrap(), Scalar::Residue(2));
        assert_eq!(f3.parse_scalar("1/2").unwrap(), Scalar::Residue(2));
        assert!(f3.parse_scalar("1/3").is_err());
        assert!(q.parse_scalar("1/0").is_err());
        assert!(q.parse_scalar("abc").is_err());
        let z9 = CoefficientDomain::PrimePower { p: 3, n: 2 };
        assert_eq!(z9.parse_scalar("-1").unwrap(), Scalar::Residue(8));
        assert!(z9.divisible_by_p(&Scalar::Residue(3)));
    }

    #[test]
    fn domain_tags() {
        for s in ["fp:3", "q", "zpn:3:2"] {
            assert_eq!(s.parse::<CoefficientDomain>().unwrap().to_string(), s);
        }
        assert!("fp:4".parse::<CoefficientDomain>().is_err());
        assert!("zpn:3:0".parse::<CoefficientDomain>().is_err());
        assert!("r".parse::<CoefficientDomain>().is_err());
    }
}
