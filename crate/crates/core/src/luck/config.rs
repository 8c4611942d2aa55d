//! Scan configuration files.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, CoefficientDomain, GroupAlgebra};
use crate::error::{Error, Result};
use crate::group::{GroupParams, GroupTable};

/// One term `coeff · g` of a subject entry. The group element is an integer
/// matrix (row-major rows), a power of a generator `y_(r,s)` (1-based), or
/// the identity when neither is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectTerm {
    #[serde(default = "one")]
    pub coeff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u64>,
}

fn one() -> String {
    "1".into()
}

/// An `h×h` matrix over the group ring of the overgroup. `blocks[j][i]` is
/// the entry in row `j`, column `i`. When `modulus` is given, matrices are
/// representatives modulo it and levels needing more precision are refused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    pub blocks: Vec<Vec<Vec<SubjectTerm>>>,
}

impl SubjectSpec {
    pub fn scalar(terms: Vec<SubjectTerm>) -> Self {
        Self {
            modulus: None,
            blocks: vec![vec![terms]],
        }
    }
}

impl SubjectTerm {
    pub fn identity(coeff: &str) -> Self {
        Self {
            coeff: coeff.into(),
            matrix: None,
            generator: None,
            power: None,
        }
    }

    pub fn matrix(coeff: &str, rows: Vec<Vec<i64>>) -> Self {
        Self {
            matrix: Some(rows),
            ..Self::identity(coeff)
        }
    }

    pub fn generator(coeff: &str, r: usize, s: usize, power: u64) -> Self {
        Self {
            generator: Some([r, s]),
            power: Some(power),
            ..Self::identity(coeff)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub p: u64,
    pub d: usize,
    pub u: u32,
    /// Overgroup offset: the subject lives in `CS(u - j, d, p)`.
    #[serde(default)]
    pub j: u32,
    #[serde(default = "one_usize")]
    pub h: usize,
    /// `fp`, `q` or `zpn:N`.
    #[serde(default = "fp")]
    pub domain: String,
    pub subject: SubjectSpec,
    /// Inclusive `[n_min, n_max]`; `n_max < n_min` is an empty scan.
    pub levels: [u32; 2],
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

fn one_usize() -> usize {
    1
}

fn fp() -> String {
    "fp".into()
}

/// Parses a field flag relative to the group prime: `fp`, `q`, `zpn:N`, or
/// the explicit forms `fp:P` and `zpn:P:N`.
pub fn parse_field(s: &str, p: u64) -> Result<CoefficientDomain> {
    let dom = match s {
        "fp" => CoefficientDomain::PrimeField { p },
        "q" => CoefficientDomain::Rationals,
        _ => match s.strip_prefix("zpn:") {
            Some(n) if !n.contains(':') => CoefficientDomain::PrimePower {
                p,
                n: n.parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?,
            },
            _ => s.parse()?,
        },
    };
    dom.validate()?;
    if dom.prime().is_some_and(|q| q != p) {
        return Err(Error::Validation(format!("field {s} does not match p = {p}")));
    }
    Ok(dom)
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> Result<GroupParams> {
        GroupParams::new(self.p, self.d, self.u)
    }

    /// Parameters of the overgroup `G = CS(u - j, d, p)`.
    pub fn overgroup(&self) -> Result<GroupParams> {
        self.params()?.overgroup(self.j)
    }

    pub fn coefficient_domain(&self) -> Result<CoefficientDomain> {
        parse_field(&self.domain, self.p)
    }

    pub fn level_range(&self) -> std::ops::RangeInclusive<u32> {
        self.levels[0]..=self.levels[1]
    }

    pub fn validate(&self) -> Result<()> {
        self.overgroup()?;
        self.coefficient_domain()?;
        if self.levels[0] == 0 {
            return Err(Error::Validation("levels start at n = 1".into()));
        }
        let h = self.subject.blocks.len();
        if h != self.h || self.subject.blocks.iter().any(|row| row.len() != h) {
            return Err(Error::Validation(format!(
                "subject must be a {0}x{0} block matrix",
                self.h
            )));
        }
        if let Some(m) = self.subject.modulus {
            if crate::arith::valuation(m, self.p) == 0 || m != self.p.pow(crate::arith::valuation(m, self.p)) {
                return Err(Error::Validation(format!("subject modulus {m} is not a power of {}", self.p)));
            }
        }
        Ok(())
    }

    /// The group ring `R[G/Γ_n]` and the subject blocks in it.
    pub fn subject_at(&self, n: u32) -> Result<(GroupAlgebra, Vec<Vec<AlgebraElement>>)> {
        let g = self.overgroup()?;
        let level = n + self.j;
        if let Some(m) = self.subject.modulus {
            let have = crate::arith::valuation(m, self.p);
            let need = g.precision(level);
            if have < need {
                return Err(Error::Validation(format!(
                    "subject is given modulo {}^{have} but level {n} needs {}^{need}",
                    self.p, self.p
                )));
            }
        }
        let algebra = GroupAlgebra::new(GroupTable::new(g, level)?, self.coefficient_domain()?)?;
        let blocks = self
            .subject
            .blocks
            .iter()
            .map(|row| row.iter().map(|terms| build_entry(&algebra, terms)).collect())
            .collect::<Result<_>>()?;
        Ok((algebra, blocks))
    }
}

fn build_entry(alg: &GroupAlgebra, terms: &[SubjectTerm]) -> Result<AlgebraElement> {
    let params = *alg.params();
    let t = alg.level();
    let dom = alg.domain();
    let mut acc = alg.zero();
    for term in terms {
        let g = match (&term.matrix, term.generator) {
            (Some(_), Some(_)) => {
                return Err(Error::Validation("a term has both a matrix and a generator".into()))
            }
            (Some(rows), None) => {
                let flat: Vec<i64> = rows.iter().flatten().copied().collect();
                if rows.len() != params.d() || rows.iter().any(|r| r.len() != params.d()) {
                    return Err(Error::Validation(format!("subject matrices must be {0}x{0}", params.d())));
                }
                params.element_from_matrix(t, &flat)?
            }
            (None, Some([r, s])) => {
                if r == 0 || s == 0 {
                    return Err(Error::Validation("generator indices are 1-based".into()));
                }
                let y = params.generator(r - 1, s - 1, t)?;
                params.pow(&y, term.power.unwrap_or(1))
            }
            (None, None) => params.identity(t)?,
        };
        let c = dom.parse_scalar(&term.coeff)?;
        acc = alg.add(&acc, &alg.scale(&c, &alg.embed(&g)))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_config() {
        let text = r#"{"p":3,"d":1,"u":1,"subject":{"blocks":[[[{"coeff":"1","matrix":[[4]]},{"coeff":"-1"}]]]},"levels":[1,3]}"#;
        let cfg = ScanConfig::from_json(text).unwrap();
        assert_eq!((cfg.j, cfg.h, cfg.domain.as_str(), cfg.seed), (0, 1, "fp", 0));
        let (alg, blocks) = cfg.subject_at(2).unwrap();
        assert_eq!(alg.table().order(), 3);
        assert_eq!(blocks[0][0].support_len(), 2);
        // generator form gives the same element
        let mut cfg2 = cfg.clone();
        cfg2.subject = SubjectSpec::scalar(vec![SubjectTerm::generator("1", 1, 1, 1), SubjectTerm::identity("-1")]);
        assert_eq!(cfg2.subject_at(2).unwrap().1, blocks);
    }

    #[test]
    fn field_flags() {
        assert_eq!(parse_field("fp", 3).unwrap(), CoefficientDomain::PrimeField { p: 3 });
        assert_eq!(parse_field("zpn:2", 3).unwrap(), CoefficientDomain::PrimePower { p: 3, n: 2 });
        assert_eq!(parse_field("q", 3).unwrap(), CoefficientDomain::Rationals);
        assert!(parse_field("fp:5", 3).is_err());
        assert!(parse_field("zz", 3).is_err());
    }

    #[test]
    fn rejects_bad_shapes_and_precision() {
        let mut cfg = ScanConfig::from_json(
            r#"{"p":3,"d":1,"u":1,"h":1,"subject":{"modulus":9,"blocks":[[[{"matrix":[[4]]}]]]},"levels":[1,4]}"#,
        )
        .unwrap();
        assert!(cfg.subject_at(2).is_ok());
        assert!(cfg.subject_at(3).is_err());
        cfg.h = 2;
        assert!(cfg.validate().is_err());
        cfg.h = 1;
        cfg.j = 1;
        assert!(cfg.validate().is_err());
    }
}
