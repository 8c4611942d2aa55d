//! Scan reports and their CSV/JSON forms.

use std::io::Write;
use std::path::Path;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupParams;
use crate::kernel::Confidence;
use crate::verify::SCHEMA;

pub const CSV_HEADER: &str = "n,index,kernel_dim,ratio_num,ratio_den,bound,confidence";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    Scalar,
    Extension,
    Matrix,
}

impl std::fmt::Display for ScanKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScanKind::Scalar => "scalar",
            ScanKind::Extension => "extension",
            ScanKind::Matrix => "matrix",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuckRow {
    pub n: u32,
    /// `[G : Γ_n]`.
    pub index: u64,
    pub kernel_dim: u64,
    pub ratio_num: u64,
    pub ratio_den: u64,
    /// Binomial kernel bound over the index, as `num/den`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    pub confidence: Confidence,
}

impl LuckRow {
    pub fn new(n: u32, index: u64, kernel_dim: u64, confidence: Confidence) -> Self {
        let (num, den) = reduce(kernel_dim, index);
        Self {
            n,
            index,
            kernel_dim,
            ratio_num: num,
            ratio_den: den,
            bound: None,
            confidence,
        }
    }

    /// Exact comparison of ratios.
    pub fn ratio_cmp(&self, other: &LuckRow) -> std::cmp::Ordering {
        (self.ratio_num as u128 * other.ratio_den as u128)
            .cmp(&(other.ratio_num as u128 * self.ratio_den as u128))
    }
}

pub(crate) fn reduce(num: u64, den: u64) -> (u64, u64) {
    if num == 0 {
        return (0, 1);
    }
    let g = num.gcd(&den);
    (num / g, den / g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Assertion {
    pub fn new(name: &str, pass: bool, detail: Option<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub n: u32,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuckSummary {
    /// `non-increasing`, `non-decreasing`, `constant`, `mixed`, or `n/a`.
    pub trend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom_degree: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_at: Option<u32>,
    /// Nearest integer to the last ratio; absent when the scan is empty or
    /// the ratio is a half-integer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_hat: Option<u64>,
    #[serde(default)]
    pub delta_inconclusive: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<Residual>,
    pub assertions: Vec<Assertion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuckReport {
    pub schema: String,
    pub scan: ScanKind,
    pub params: GroupParams,
    pub j: u32,
    pub h: usize,
    pub domain: String,
    pub seed: u64,
    pub rows: Vec<LuckRow>,
    pub summary: LuckSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?} (csv or json)"))),
        }
    }
}

impl LuckReport {
    pub fn new(scan: ScanKind, params: GroupParams, j: u32, h: usize, domain: String, seed: u64) -> Self {
        Self {
            schema: SCHEMA.into(),
            scan,
            params,
            j,
            h,
            domain,
            seed,
            rows: Vec::new(),
            summary: LuckSummary::default(),
        }
    }

    pub fn pass(&self) -> bool {
        self.summary.assertions.iter().all(|a| a.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                r.index,
                r.kernel_dim,
                r.ratio_num,
                r.ratio_den,
                r.bound.as_deref().unwrap_or(""),
                r.confidence
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    pub fn emit(&self, path: &Path, format: Format) -> Result<()> {
        write_atomic(path, self.render(format)?.as_bytes())
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LuckReport {
        let mut r = LuckReport::new(
            ScanKind::Matrix,
            GroupParams::new(3, 1, 1).unwrap(),
            0,
            2,
            "q".into(),
            7,
        );
        r.rows.push(LuckRow::new(1, 1, 2, Confidence::Exact));
        r.rows.push(LuckRow::new(2, 3, 4, Confidence::Exact));
        r.summary.assertions.push(Assertion::new("x", true, None));
        r
    }

    #[test]
    fn csv_layout() {
        let mut r = sample();
        assert_eq!(r.to_csv(), format!("{CSV_HEADER}\n1,1,2,2,1,,exact\n2,3,4,4,3,,exact\n"));
        r.rows.clear();
        assert_eq!(r.to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn json_round_trip_and_atomic_write() {
        let r = sample();
        let back = LuckReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.json");
        r.emit(&path, Format::Json).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), r.to_json().unwrap());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
