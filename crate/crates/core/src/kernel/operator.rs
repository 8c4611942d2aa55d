//! Matrices of left-multiplication operators on `R[G/Γ_t]^h`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::fp::FpVec;
use crate::algebra::{AlgebraElement, AlgebraElementJson, CoefficientDomain, Scalar};
use crate::error::{Error, Result};
use crate::group::GroupTable;

/// Which module the operator acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleKind {
    FullAlgebra,
    OmegaQuotient { m: u64 },
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Row-major `h×h` blocks; empty for explicit matrices.
    pub blocks: Vec<Vec<AlgebraElementJson>>,
    pub module: ModuleKind,
}

#[derive(Clone, Debug, PartialEq)]
enum Columns {
    Fp(Vec<FpVec>),
    Sparse(Vec<Vec<(usize, Scalar)>>),
}

/// An operator stored by columns: column `c` is the image of basis vector
/// `c`. For operators induced by blocks, column `(g, i)` sits at
/// `index(g)·h + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    domain: CoefficientDomain,
    rows: usize,
    columns: Columns,
    provenance: Provenance,
}

impl OperatorMatrix {
    /// Builds an operator from dense rows of scalars.
    pub fn from_rows(domain: CoefficientDomain, rows: &[Vec<Scalar>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Validation("ragged matrix".into()));
        }
        let cols = (0..m)
            .map(|c| {
                (0..n)
                    .filter(|&r| !domain.is_zero(&rows[r][c]))
                    .map(|r| (r, rows[r][c].clone()))
                    .collect()
            })
            .collect();
        Ok(Self::from_sparse_columns(domain, n, cols, Provenance {
            blocks: Vec::new(),
            module: ModuleKind::Explicit,
        }))
    }

    pub fn from_fp_columns(p: u64, rows: usize, cols: Vec<FpVec>, provenance: Provenance) -> Self {
        Self {
            domain: CoefficientDomain::PrimeField { p },
            rows,
            columns: Columns::Fp(cols),
            provenance,
        }
    }

    fn from_sparse_columns(
        domain: CoefficientDomain,
        rows: usize,
        cols: Vec<Vec<(usize, Scalar)>>,
        provenance: Provenance,
    ) -> Self {
        if let CoefficientDomain::PrimeField { p } = domain {
            let cols = cols
                .into_iter()
                .map(|col| {
                    let mut v = FpVec::zeros(p, rows);
                    for (r, s) in col {
                        if let Scalar::Residue(x) = s {
                            v.add_at(r, x);
                        }
                    }
                    v
                })
                .collect();
            return Self::from_fp_columns(p, rows, cols, provenance);
        }
        Self {
            domain,
            rows,
            columns: Columns::Sparse(cols),
            provenance,
        }
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        match &self.columns {
            Columns::Fp(c) => c.len(),
            Columns::Sparse(c) => c.len(),
        }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Nonzero entries of column `c`, by increasing row.
    pub fn column(&self, c: usize) -> Vec<(usize, Scalar)> {
        match &self.columns {
            Columns::Fp(cols) => cols[c].nonzeros().map(|(r, x)| (r, Scalar::Residue(x))).collect(),
            Columns::Sparse(cols) => cols[c].clone(),
        }
    }

    pub(crate) fn fp_columns(&self) -> Option<&[FpVec]> {
        match &self.columns {
            Columns::Fp(c) => Some(c),
            Columns::Sparse(_) => None,
        }
    }

    pub fn nonzero_count(&self) -> usize {
        (0..self.cols()).map(|c| self.column(c).len()).sum()
    }

    /// `self · other`.
    pub fn compose(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(self.domain.to_string(), other.domain.to_string()));
        }
        if self.cols() != other.rows {
            return Err(Error::Validation(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let dom = self.domain;
        let cols = (0..other.cols())
            .map(|c| {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (k, b) in other.column(c) {
                    for (r, a) in self.column(k) {
                        let prod = dom.mul(&a, &b);
                        let entry = acc.entry(r).or_insert_with(|| dom.zero());
                        *entry = dom.add(entry, &prod);
                    }
                }
                acc.into_iter().filter(|(_, x)| !dom.is_zero(x)).collect()
            })
            .collect();
        Ok(Self::from_sparse_columns(dom, self.rows, cols, Provenance {
            blocks: Vec::new(),
            module: ModuleKind::Explicit,
        }))
    }

    /// Dense rows, for small matrices.
    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.domain.zero(); self.cols()]; self.rows];
        for c in 0..self.cols() {
            for (r, x) in self.column(c) {
                out[r][c] = x;
            }
        }
        out
    }

    /// Text export: a header line, then 1-based `row col value` triples in
    /// column-major order.
    pub fn export(&self) -> String {
        let mut out = format!(
            "%%MatrixMarket-like: {} {} {}\n",
            self.rows,
            self.cols(),
            self.domain
        );
        for c in 0..self.cols() {
            for (r, x) in self.column(c) {
                out.push_str(&format!("{} {} {}\n", r + 1, c + 1, self.domain.format_scalar(&x)));
            }
        }
        out
    }

    pub fn import(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let rest = header
            .strip_prefix("%%MatrixMarket-like:")
            .ok_or_else(|| Error::Parse("missing matrix header".into()))?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let [rows, cols, dom] = fields.as_slice() else {
            return Err(Error::Parse(format!("bad matrix header {header:?}")));
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad size {s:?}")));
        let (rows, cols) = (num(rows)?, num(cols)?);
        let domain: CoefficientDomain = dom.parse()?;
        let mut sparse = vec![Vec::new(); cols];
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let [r, c, x] = f.as_slice() else {
                return Err(Error::Parse(format!("bad entry line {line:?}")));
            };
            let (r, c) = (num(r)?, num(c)?);
            if r == 0 || c == 0 || r > rows || c > cols {
                return Err(Error::Parse(format!("entry out of range: {line:?}")));
            }
            sparse[c - 1].push((r - 1, domain.parse_scalar(x)?));
        }
        for col in &mut sparse {
            col.sort_by_key(|(r, _)| *r);
        }
        Ok(Self::from_sparse_columns(domain, rows, sparse, Provenance {
            blocks: Vec::new(),
            module: ModuleKind::Explicit,
        }))
    }
}

/// Matrix of `v ↦ A·v` on `R[G/Γ_t]^h`, where `blocks[j][i]` is `A[j][i]`.
pub fn left_mult_matrix(blocks: &[Vec<AlgebraElement>], table: &GroupTable) -> Result<OperatorMatrix> {
    let h = blocks.len();
    if h == 0 || blocks.iter().any(|row| row.len() != h) {
        return Err(Error::Validation("block matrix must be square and nonempty".into()));
    }
    let domain = blocks[0][0].domain();
    for b in blocks.iter().flatten() {
        if b.level() != table.level() {
            return Err(Error::LevelMismatch(b.level(), table.level()));
        }
        if b.domain() != domain {
            return Err(Error::DomainMismatch(b.domain().to_string(), domain.to_string()));
        }
    }
    let order = table.order() as usize;
    let mut perms: HashMap<u64, Vec<u32>> = HashMap::new();
    for b in blocks.iter().flatten() {
        for &x in b.terms().keys() {
            perms
                .entry(x)
                .or_insert_with(|| table.left_translation(&table.element(x)));
        }
    }
    let n = order * h;
    let mut cols = Vec::with_capacity(n);
    for g in 0..order {
        for i in 0..h {
            let mut col: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (j, row) in blocks.iter().enumerate() {
                for (x, c) in row[i].terms() {
                    let r = perms[x][g] as usize * h + j;
                    let entry = col.entry(r).or_insert_with(|| domain.zero());
                    *entry = domain.add(entry, c);
                }
            }
            cols.push(col.into_iter().filter(|(_, x)| !domain.is_zero(x)).collect());
        }
    }
    let provenance = Provenance {
        blocks: blocks
            .iter()
            .map(|row| row.iter().map(AlgebraElement::to_json).collect())
            .collect(),
        module: ModuleKind::FullAlgebra,
    };
    Ok(OperatorMatrix::from_sparse_columns(domain, n, cols, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupAlgebra;
    use crate::group::GroupParams;

    #[test]
    fn embed_gives_permutation_matrix() {
        let table = GroupTable::new(GroupParams::new(3, 1, 1).unwrap(), 3).unwrap();
        let alg = GroupAlgebra::new(table.clone(), CoefficientDomain::Rationals).unwrap();
        let g = table.element(4);
        let m = left_mult_matrix(&[vec![alg.embed(&g)]], &table).unwrap();
        let perm = table.left_translation(&g);
        for c in 0..9 {
            let col = m.column(c);
            assert_eq!(col.len(), 1);
            assert_eq!(col[0].0, perm[c] as usize);
        }
    }

    #[test]
    fn export_round_trip() {
        let table = GroupTable::new(GroupParams::new(3, 1, 1).unwrap(), 2).unwrap();
        for dom in [
            CoefficientDomain::Rationals,
            CoefficientDomain::PrimeField { p: 3 },
            CoefficientDomain::PrimePower { p: 3, n: 2 },
        ] {
            let alg = GroupAlgebra::new(table.clone(), dom).unwrap();
            let a = alg.augmentation_generator(&table.element(1));
            let m = left_mult_matrix(&[vec![a]], &table).unwrap();
            let text = m.export();
            assert!(text.starts_with("%%MatrixMarket-like: 3 3 "));
            let back = OperatorMatrix::import(&text).unwrap();
            assert_eq!(back.to_dense(), m.to_dense());
        }
    }
}
