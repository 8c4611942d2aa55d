//! The `ck` command line.
//!
//! Exit status: 0 when every check passes, 2 when a mathematical assertion
//! fails (the report is still written), 1 for usage, input and resource
//! errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::{passman_basis, Filtration};
use crate::error::{Error, Result};
use crate::group::{cache_dir, cache_file_name, CacheHeader, GeneratorSet, GroupParams, GroupTable};
use crate::luck::{parse_field, run_scan, write_atomic, Format, ScanConfig, ScanKind, SubjectSpec};
use crate::verify::{self, VerificationReport, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MATH: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ck", version, about = "Exact computations in finite quotients of congruence subgroups")]
struct Cli {
    /// Worker threads (default: logical cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    u: u32,
}

impl GroupArgs {
    fn params(&self) -> Result<GroupParams> {
        GroupParams::new(self.p, self.d, self.u)
    }
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file (written atomically); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report zero milliseconds so output bytes depend only on inputs.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Lemma {
    Equiv,
    Np,
    Dimsub,
    Domain,
    Commutativity,
    Passman,
    Tower,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CacheAction {
    Rebuild,
    Clear,
    Verify,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Scan configuration or bare subject (JSON).
    #[arg(long)]
    subject: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    u: Option<u32>,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long)]
    h: Option<usize>,
    /// `n_min:n_max` (or a single level).
    #[arg(long)]
    levels: Option<String>,
    /// fp, q or zpn:N.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order, generators and depth profile of Γ/Γ_t.
    GroupInfo {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        level: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Passman-word basis of ω^s over F_p.
    Basis {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        grade: u64,
        #[arg(long, default_value = "fp")]
        field: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification report.
    Verify {
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        level: u32,
        /// n for dimension subgroups (all n when absent).
        #[arg(long)]
        grade: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dimension subgroups D_n against the height filtration.
    Dimsub {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        grade: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scalar kernel scan over F_p.
    ScanScalar(ScanArgs),
    /// Block-matrix kernel scan over Q or F_p.
    ScanMatrix(ScanArgs),
    /// Scan over an overgroup CS(u - j, d, p).
    ScanExtension(ScanArgs),
    /// Manage table digests in $CK_CACHE_DIR.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        u: Option<u32>,
        #[arg(long)]
        level: Option<u32>,
    },
}

/// Parses `argv` (including the program name), runs the command, and
/// returns the exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        configure_threads(n);
    }
    match execute(cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_MATH,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(n: usize) {
    // A second call in one process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_n: usize) {}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &OutArgs, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out.out.as_ref(), &text)
}

fn emit_reports(out: &OutArgs, reports: Vec<VerificationReport>) -> Result<bool> {
    let reports: Vec<VerificationReport> = if out.no_timing {
        reports.into_iter().map(VerificationReport::without_timing).collect()
    } else {
        reports
    };
    let pass = reports.iter().all(|r| r.pass);
    let value = if reports.len() == 1 {
        serde_json::to_value(&reports[0])?
    } else {
        json!({ "schema": SCHEMA, "pass": pass, "reports": reports })
    };
    emit_json(out, &value)?;
    Ok(pass)
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::GroupInfo { group, level, out } => group_info(&group, level, &out),
        Command::Basis {
            group,
            level,
            grade,
            field,
            out,
        } => basis(&group, level, grade, &field, &out),
        Command::Verify {
            lemma,
            group,
            level,
            grade,
            trials,
            seed,
            out,
        } => {
            let params = group.params()?;
            let reports = match lemma {
                Lemma::Equiv => vec![verify::verify_equiv(params, level)?],
                Lemma::Np => vec![verify::np_check(params, level)?],
                Lemma::Dimsub => dimsub_reports(params, level, grade)?,
                Lemma::Domain => vec![verify::domain_probe(params, level, trials, seed)?],
                Lemma::Commutativity => vec![verify::graded_commutativity(params, level)?],
                Lemma::Passman => vec![verify::passman_span(params, level)?],
                Lemma::Tower => vec![verify::tower_check(params, level, trials, seed)?],
            };
            emit_reports(&out, reports)
        }
        Command::Dimsub { group, level, grade, out } => {
            emit_reports(&out, dimsub_reports(group.params()?, level, grade)?)
        }
        Command::ScanScalar(args) => scan(ScanKind::Scalar, args),
        Command::ScanMatrix(args) => scan(ScanKind::Matrix, args),
        Command::ScanExtension(args) => scan(ScanKind::Extension, args),
        Command::Cache { action, p, d, u, level } => cache(action, p, d, u, level),
    }
}

fn dimsub_reports(params: GroupParams, level: u32, grade: Option<u64>) -> Result<Vec<VerificationReport>> {
    match grade {
        Some(n) => Ok(vec![verify::dimension_subgroup(params, level, n)?]),
        None => verify::dimension_subgroups(params, level),
    }
}

fn group_info(group: &GroupArgs, level: u32, out: &OutArgs) -> Result<bool> {
    let params = group.params()?;
    let table = GroupTable::new(params, level)?;
    let gens = GeneratorSet::new(params, level)?;
    let path = cache_dir().join(cache_file_name(&params, level));
    let cache = match CacheHeader::read_from(&path) {
        Ok(h) if h == CacheHeader::for_table(&table)? => "match",
        Ok(_) => "mismatch",
        Err(_) => "absent",
    };
    let generators: Vec<serde_json::Value> = gens
        .elements()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            json!({
                "name": format!("y_({},{})", k / params.d() + 1, k % params.d() + 1),
                "index": table.index(g),
                "matrix": g.entries().chunks(params.d()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let value = json!({
        "schema": SCHEMA,
        "params": params,
        "level": level,
        "e": params.e(),
        "order": table.order(),
        "modulus": table.modulus(),
        "generators": generators,
        "depth_profile": table.depth_profile(),
        "cache": cache,
    });
    emit_json(out, &value)?;
    Ok(true)
}

fn basis(group: &GroupArgs, level: u32, grade: u64, field: &str, out: &OutArgs) -> Result<bool> {
    let params = group.params()?;
    let dom = parse_field(field, params.p())?;
    if dom.modulus() != Some(params.p()) {
        return Err(Error::Domain("filtration bases are computed over F_p".into()));
    }
    let table = GroupTable::new(params, level)?;
    let b = passman_basis(&table, grade)?;
    let graded = Filtration::build(&table)?.graded_dims();
    let (p, e) = (params.p(), params.e());
    let words: Vec<serde_json::Value> = b
        .words()
        .iter()
        .map(|w| json!({ "exponents": w.exponents(), "weight": w.weight(p, e), "monomial": w.monomial(p, e).0 }))
        .collect();
    let value = json!({
        "schema": SCHEMA,
        "params": params,
        "level": level,
        "grade": grade,
        "dimension": b.dimension(),
        "graded_dims": graded,
        "words": words,
    });
    emit_json(out, &value)?;
    Ok(true)
}

fn parse_levels(s: &str) -> Result<[u32; 2]> {
    let num = |x: &str| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad level range {s:?}")));
    if let Some((a, b)) = s.split_once("..") {
        return Ok([num(a)?, num(b)?]);
    }
    match s.split([':', ',']).collect::<Vec<_>>().as_slice() {
        [a] => Ok([num(a)?, num(a)?]),
        [a, b] => Ok([num(a)?, num(b)?]),
        _ => Err(Error::Parse(format!("bad level range {s:?}"))),
    }
}

fn scan_config(args: &ScanArgs) -> Result<ScanConfig> {
    let mut value = match &args.subject {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let v: serde_json::Value = serde_json::from_str(&text)?;
            if v.get("blocks").is_some() {
                json!({ "subject": v })
            } else {
                v
            }
        }
        None => json!({}),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Parse("scan configuration must be a JSON object".into()))?;
    let mut set = |k: &str, v: serde_json::Value| {
        obj.insert(k.to_string(), v);
    };
    if let Some(x) = args.p {
        set("p", json!(x));
    }
    if let Some(x) = args.d {
        set("d", json!(x));
    }
    if let Some(x) = args.u {
        set("u", json!(x));
    }
    if let Some(x) = args.j {
        set("j", json!(x));
    }
    if let Some(x) = args.h {
        set("h", json!(x));
    }
    if let Some(x) = &args.levels {
        set("levels", json!(parse_levels(x)?));
    }
    if let Some(x) = &args.field {
        set("domain", json!(x));
    }
    if let Some(x) = args.seed {
        set("seed", json!(x));
    }
    if let Some(x) = &args.out {
        set("out", json!(x));
    }
    if !obj.contains_key("subject") {
        return Err(Error::Validation("a scan needs --subject".into()));
    }
    if !obj.contains_key("h") {
        let h = serde_json::from_value::<SubjectSpec>(obj["subject"].clone())?.blocks.len();
        obj.insert("h".into(), json!(h));
    }
    ScanConfig::from_json(&value.to_string())
}

fn scan(kind: ScanKind, args: ScanArgs) -> Result<bool> {
    let format: Format = args.format.parse()?;
    let cfg = scan_config(&args)?;
    let report = run_scan(kind, &cfg)?;
    let text = report.render(format)?;
    emit(cfg.out.as_ref().map(PathBuf::from).as_ref(), &text)?;
    Ok(report.pass())
}

fn cache(action: CacheAction, p: Option<u64>, d: Option<usize>, u: Option<u32>, level: Option<u32>) -> Result<bool> {
    let dir = cache_dir();
    let target = || -> Result<(GroupParams, u32)> {
        match (p, d, u, level) {
            (Some(p), Some(d), Some(u), Some(t)) => Ok((GroupParams::new(p, d, u)?, t)),
            _ => Err(Error::Validation("cache rebuild/verify need --p --d --u --level".into())),
        }
    };
    match action {
        CacheAction::Clear => {
            let mut removed = 0;
            if dir.is_dir() {
                for entry in std::fs::read_dir(&dir)? {
                    let path = entry?.path();
                    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
                    if name.starts_with("cgk1-") && name.ends_with(".bin") {
                        std::fs::remove_file(&path)?;
                        removed += 1;
                    }
                }
            }
            println!("{}", json!({ "schema": SCHEMA, "removed": removed, "dir": dir }));
            Ok(true)
        }
        CacheAction::Rebuild => {
            let (params, t) = target()?;
            let table = GroupTable::build(params, t)?;
            let header = CacheHeader::for_table(&table)?;
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(cache_file_name(&params, t));
            header.write_to(&path)?;
            println!(
                "{}",
                json!({ "schema": SCHEMA, "written": path, "order": header.order, "checksum": format!("{:016x}", header.checksum) })
            );
            Ok(true)
        }
        CacheAction::Verify => {
            let (params, t) = target()?;
            let path = dir.join(cache_file_name(&params, t));
            let stored = CacheHeader::read_from(&path)?;
            let fresh = CacheHeader::for_table(&GroupTable::build(params, t)?)?;
            let ok = stored == fresh;
            println!("{}", json!({ "schema": SCHEMA, "file": path, "match": ok }));
            Ok(ok)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("1:4").unwrap(), [1, 4]);
        assert_eq!(parse_levels("2,5").unwrap(), [2, 5]);
        assert_eq!(parse_levels("3").unwrap(), [3, 3]);
        assert_eq!(parse_levels("1..6").unwrap(), [1, 6]);
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["ck", "group-info", "--p", "3"]), EXIT_USAGE);
        assert_eq!(run(["ck", "group-info", "--p", "4", "--d", "1", "--u", "1", "--level", "2"]), EXIT_USAGE);
        assert_eq!(run(["ck", "--help"]), EXIT_OK);
    }
}
