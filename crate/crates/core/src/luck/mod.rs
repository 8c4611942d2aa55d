//! Kernel-dimension scans along the tower of finite quotients.

mod config;
mod report;
mod scan;

pub use config::{parse_field, ScanConfig, SubjectSpec, SubjectTerm};
pub use report::{
    write_atomic, Assertion, Format, LuckReport, LuckRow, LuckSummary, Residual, ScanKind, CSV_HEADER,
};
pub use scan::{extension_scan, matrix_scan, run_scan, scalar_bound, scalar_scan};
