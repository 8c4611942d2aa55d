//! Kernel-dimension scans over the tower `Γ_n`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::config::ScanConfig;
use super::report::{reduce, Assertion, LuckReport, LuckRow, Residual, ScanKind};
use crate::algebra::{AlgebraElement, BottomDegree, CoefficientDomain, Filtration, GroupAlgebra};
use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::group::{Extended, GroupTable};
use crate::kernel::{left_mult_matrix, Confidence, KernelEngine, PREKEY_MAX_ORDER};

fn map_levels<T, F>(levels: Vec<u32>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u32) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        levels.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        levels.into_iter().map(f).collect()
    }
}

fn levels(cfg: &ScanConfig) -> Vec<u32> {
    cfg.level_range().collect()
}

fn kernel_row(cfg: &ScanConfig, engine: &KernelEngine, n: u32) -> Result<LuckRow> {
    let (alg, blocks) = cfg.subject_at(n)?;
    let op = left_mult_matrix(&blocks, alg.table())?;
    let rr = engine.kernel_dim(&op)?;
    Ok(LuckRow::new(n, alg.table().order(), rr.kernel_dim as u64, rr.confidence))
}

fn trend(rows: &[LuckRow]) -> String {
    use std::cmp::Ordering::*;
    if rows.len() < 2 {
        return "n/a".into();
    }
    let cmps: Vec<_> = rows.windows(2).map(|w| w[1].ratio_cmp(&w[0])).collect();
    let name = if cmps.iter().all(|&c| c == Equal) {
        "constant"
    } else if cmps.iter().all(|&c| c != Greater) {
        "non-increasing"
    } else if cmps.iter().all(|&c| c != Less) {
        "non-decreasing"
    } else {
        "mixed"
    };
    name.into()
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg.into()))
    }
}

fn new_report(cfg: &ScanConfig, kind: ScanKind) -> Result<LuckReport> {
    Ok(LuckReport::new(kind, cfg.params()?, cfg.j, cfg.h, cfg.domain.clone(), cfg.seed))
}

fn require_nonzero(cfg: &ScanConfig) -> Result<()> {
    if let Some(&top) = levels(cfg).last() {
        let (_, blocks) = cfg.subject_at(top)?;
        require(!blocks[0][0].is_zero(), "the subject must be nonzero")?;
    }
    Ok(())
}

/// Smallest level in `1..=n_max` at which the subject's bottom degree is
/// certified.
fn certified_degree(cfg: &ScanConfig, n_max: u32) -> Result<Option<(u64, u32)>> {
    let params = cfg.params()?;
    for level in 1..=n_max {
        if params.order(level).is_none_or(|o| o > PREKEY_MAX_ORDER) {
            break;
        }
        let (alg, blocks) = cfg.subject_at(level)?;
        let filt = Filtration::build(alg.table())?;
        if let BottomDegree::Certified(s) = filt.element_bottom_degree(&blocks[0][0])? {
            return Ok(Some((s, level)));
        }
    }
    Ok(None)
}

/// `C(e+m-1, e) - C(e+m-s-1, e)` with `m = p^(n-1)e - e + 1`.
pub fn scalar_bound(p: u64, e: u64, n: u32, s: u64) -> BigUint {
    let m = p.pow(n - 1) * e - e + 1;
    let (e, m, s) = (e as i64, m as i64, s as i64);
    binomial(e + m - 1, e as u64) - binomial(e + m - s - 1, e as u64)
}

fn fraction(num: &BigUint, den: u64) -> String {
    if num.is_zero() {
        return "0/1".into();
    }
    let den = BigUint::from(den);
    let g = num.gcd(&den);
    format!("{}/{}", num / &g, den / &g)
}

/// `F_p` scan of left multiplication by a scalar subject on `k[Γ/Γ_n]`,
/// with the binomial kernel bound.
pub fn scalar_scan(cfg: &ScanConfig) -> Result<LuckReport> {
    cfg.validate()?;
    require(cfg.h == 1, "scalar scans take a 1x1 subject")?;
    require(cfg.j == 0, "scalar scans use j = 0; see extension scans")?;
    let dom = cfg.coefficient_domain()?;
    require(
        matches!(dom, CoefficientDomain::PrimeField { .. }),
        "scalar scans run over F_p",
    )?;
    require_nonzero(cfg)?;
    let params = cfg.params()?;
    let (p, e) = (params.p(), params.e() as u64);
    let engine = KernelEngine::new(cfg.seed);
    let mut report = new_report(cfg, ScanKind::Scalar)?;
    report.rows = map_levels(levels(cfg), |n| kernel_row(cfg, &engine, n))?;
    report.summary.trend = trend(&report.rows);
    let n_max = cfg.levels[1];
    let degree = if report.rows.is_empty() { None } else { certified_degree(cfg, n_max)? };
    let Some((s, at)) = degree else {
        if !report.rows.is_empty() {
            report
                .summary
                .warnings
                .push(format!("bottom degree not certified up to level {n_max}; bounds omitted"));
        }
        return Ok(report);
    };
    report.summary.bottom_degree = Some(s);
    report.summary.certified_at = Some(at);
    let mut within = true;
    let mut detail = None;
    let mut first_small = None;
    for (k, row) in report.rows.iter_mut().enumerate() {
        let bound = scalar_bound(p, e, row.n, s);
        row.bound = Some(fraction(&bound, row.index));
        if BigUint::from(row.kernel_dim) > bound {
            within = false;
            detail.get_or_insert_with(|| format!("n = {}: kernel {} > bound {}", row.n, row.kernel_dim, bound));
        }
        if first_small.is_none() && bound < BigUint::from(row.index) {
            first_small = Some(k);
        }
    }
    report.summary.assertions.push(Assertion::new("kernel within binomial bound", within, detail));
    if let Some(k) = first_small {
        let tail = &report.rows[k..];
        let bad = tail.windows(2).find(|w| w[1].ratio_cmp(&w[0]).is_gt());
        report.summary.assertions.push(Assertion::new(
            "ratios non-increasing once the bound is below 1",
            bad.is_none(),
            bad.map(|w| format!("ratio rises from n = {} to n = {}", w[0].n, w[1].n)),
        ));
    }
    Ok(report)
}

/// Restriction of `a ∈ k[Γ/Γ_n]` seen inside `k[G/Γ_n]`, or `None` when
/// the support leaves `Γ`.
fn restrict_to_base(cfg: &ScanConfig, n: u32, alg: &GroupAlgebra, a: &AlgebraElement) -> Result<Option<AlgebraElement>> {
    let g_params = *alg.params();
    let base = cfg.params()?;
    let table = GroupTable::new(base, n)?;
    let mut out = AlgebraElement::zero(n, a.domain());
    for (&idx, c) in a.terms() {
        let g = alg.table().element(idx);
        if g_params.depth(&g) < Extended::Finite(cfg.j as u64 + 1) {
            return Ok(None);
        }
        let entries: Vec<i64> = g.entries().iter().map(|&x| x as i64).collect();
        let h = base.element_from_matrix(n, &entries)?;
        out.add_term(table.index(&h), c);
    }
    Ok(Some(out))
}

/// Scan over `k[G/Γ_n]` for the overgroup `G = CS(u - j, d, p)`. Subjects
/// supported in `Γ` also get the block identity
/// `dim ker on k[G/Γ_n] = [G:Γ] · dim ker on k[Γ/Γ_n]`.
pub fn extension_scan(cfg: &ScanConfig) -> Result<LuckReport> {
    cfg.validate()?;
    require(cfg.j >= 1, "extension scans need j >= 1")?;
    require(cfg.h == 1, "extension scans take a 1x1 subject")?;
    require(
        matches!(cfg.coefficient_domain()?, CoefficientDomain::PrimeField { .. }),
        "extension scans run over F_p",
    )?;
    require_nonzero(cfg)?;
    let params = cfg.params()?;
    let factor = params.p().pow(params.e() as u32 * cfg.j);
    let engine = KernelEngine::new(cfg.seed);
    let results = map_levels(levels(cfg), |n| -> Result<(LuckRow, Option<(u64, u64)>)> {
        let (alg, blocks) = cfg.subject_at(n)?;
        let op = left_mult_matrix(&blocks, alg.table())?;
        let rr = engine.kernel_dim(&op)?;
        let row = LuckRow::new(n, alg.table().order(), rr.kernel_dim as u64, rr.confidence);
        let block = match restrict_to_base(cfg, n, &alg, &blocks[0][0])? {
            Some(a) => {
                let table = GroupTable::new(params, n)?;
                let inner = engine.kernel_dim(&left_mult_matrix(&[vec![a]], &table)?)?;
                Some((rr.kernel_dim as u64, inner.kernel_dim as u64))
            }
            None => None,
        };
        Ok((row, block))
    })?;
    let mut report = new_report(cfg, ScanKind::Extension)?;
    let mut block_ok = true;
    let mut detail = Vec::new();
    let mut in_sub = false;
    for (row, block) in results {
        if let Some((outer, inner)) = block {
            in_sub = true;
            detail.push(format!("n={}: {outer} = {factor}*{inner}", row.n));
            block_ok &= outer == factor * inner;
        }
        report.rows.push(row);
    }
    report.summary.trend = trend(&report.rows);
    if in_sub {
        report.summary.assertions.push(Assertion::new(
            "block identity for subjects in k[Γ]",
            block_ok,
            Some(detail.join("; ")),
        ));
    }
    Ok(report)
}

/// Nearest integer to `num/den`, `None` on a tie.
fn nearest_integer(num: u64, den: u64) -> Option<u64> {
    let (q, r) = num.div_rem(&den);
    match (2 * r as u128).cmp(&(den as u128)) {
        std::cmp::Ordering::Less => Some(q),
        std::cmp::Ordering::Greater => Some(q + 1),
        std::cmp::Ordering::Equal => None,
    }
}

/// `|num/den - k|` reduced.
fn residual(num: u64, den: u64, k: u64) -> (u64, u64) {
    let kd = k as u128 * den as u128;
    let diff = (num as u128).abs_diff(kd);
    reduce(diff.to_u64().expect("residual fits"), den)
}

/// Kernel dimensions of an `h×h` block operator, with the nearest-integer
/// estimate of the limit and its residuals.
pub fn matrix_scan(cfg: &ScanConfig) -> Result<LuckReport> {
    cfg.validate()?;
    let dom = cfg.coefficient_domain()?;
    require(
        !matches!(dom, CoefficientDomain::PrimePower { .. }),
        "matrix scans run over Q or F_p",
    )?;
    let engine = KernelEngine::new(cfg.seed);
    let mut report = new_report(cfg, ScanKind::Matrix)?;
    report.rows = map_levels(levels(cfg), |n| kernel_row(cfg, &engine, n))?;
    report.summary.trend = trend(&report.rows);
    let h = cfg.h as u64;
    let over = report.rows.iter().find(|r| r.kernel_dim > h * r.index);
    report.summary.assertions.push(Assertion::new(
        "0 <= ratio <= h",
        over.is_none(),
        over.map(|r| format!("n = {}", r.n)),
    ));
    let high: Vec<u32> = report
        .rows
        .iter()
        .filter(|r| r.confidence == Confidence::HighProbability)
        .map(|r| r.n)
        .collect();
    if !high.is_empty() {
        report
            .summary
            .warnings
            .push(format!("levels {high:?} are high-probability ranks"));
    }
    let Some(last) = report.rows.last() else {
        return Ok(report);
    };
    let Some(delta) = nearest_integer(last.ratio_num, last.ratio_den) else {
        report.summary.delta_inconclusive = true;
        report
            .summary
            .warnings
            .push("last ratio is a half-integer; no nearest integer".into());
        return Ok(report);
    };
    report.summary.delta_hat = Some(delta);
    let res: Vec<(u32, (u64, u64), Confidence)> = report
        .rows
        .iter()
        .map(|r| (r.n, residual(r.ratio_num, r.ratio_den, delta), r.confidence))
        .collect();
    report.summary.residuals = res
        .iter()
        .map(|(n, (a, b), _)| Residual {
            n: *n,
            value: format!("{a}/{b}"),
        })
        .collect();
    if res.len() >= 3 {
        let tail = &res[res.len() - 3..];
        if tail.iter().all(|(_, _, c)| *c == Confidence::Exact) {
            let rises = tail.windows(2).find(|w| {
                let ((a0, b0), (a1, b1)) = (w[0].1, w[1].1);
                (a1 as u128) * (b0 as u128) > (a0 as u128) * (b1 as u128)
            });
            report.summary.assertions.push(Assertion::new(
                "residuals non-increasing over the last three levels",
                rises.is_none(),
                rises.map(|w| format!("residual rises from n = {} to n = {}", w[0].0, w[1].0)),
            ));
        } else {
            report
                .summary
                .warnings
                .push("residual monotonicity not asserted on high-probability rows".into());
        }
    }
    Ok(report)
}

pub fn run_scan(kind: ScanKind, cfg: &ScanConfig) -> Result<LuckReport> {
    match kind {
        ScanKind::Scalar => scalar_scan(cfg),
        ScanKind::Extension => extension_scan(cfg),
        ScanKind::Matrix => matrix_scan(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::luck::{SubjectSpec, SubjectTerm};

    fn cfg(p: u64, d: usize, u: u32, j: u32, domain: &str, subject: SubjectSpec, levels: [u32; 2]) -> ScanConfig {
        ScanConfig {
            p,
            d,
            u,
            j,
            h: subject.blocks.len(),
            domain: domain.into(),
            subject,
            levels,
            seed: 0,
            out: None,
        }
    }

    fn g_minus_1() -> SubjectSpec {
        SubjectSpec::scalar(vec![SubjectTerm::matrix("1", vec![vec![4]]), SubjectTerm::identity("-1")])
    }

    #[test]
    fn scalar_shift_ratios() {
        let r = scalar_scan(&cfg(3, 1, 1, 0, "fp", g_minus_1(), [1, 4])).unwrap();
        assert!(r.pass(), "{r:?}");
        let ks: Vec<u64> = r.rows.iter().map(|r| r.kernel_dim).collect();
        // at n = 1 the subject is zero in F_3[trivial group]
        assert_eq!(ks, vec![1, 1, 1, 1]);
        assert_eq!((r.rows[3].ratio_num, r.rows[3].ratio_den), (1, 27));
        assert_eq!(r.summary.bottom_degree, Some(1));
        assert_eq!(r.rows[3].bound.as_deref(), Some("1/27"));
    }

    #[test]
    fn unit_subject_has_no_kernel() {
        let unit = SubjectSpec::scalar(vec![SubjectTerm::identity("1")]);
        let r = scalar_scan(&cfg(3, 1, 1, 0, "fp", unit, [1, 3])).unwrap();
        assert!(r.rows.iter().all(|r| r.kernel_dim == 0 && r.ratio_num == 0));
        assert!(r.pass());
    }

    #[test]
    fn extension_shift() {
        // G = CS(1) over Γ = CS(2); h = 1 + 3 has depth 1 in G
        let r = extension_scan(&cfg(3, 1, 2, 1, "fp", g_minus_1(), [1, 3])).unwrap();
        let ratios: Vec<(u64, u64)> = r.rows.iter().map(|r| (r.ratio_num, r.ratio_den)).collect();
        assert_eq!(ratios, vec![(1, 3), (1, 9), (1, 27)]);
        // a subject in k[Γ]: 1 + 9 = 10 lies in CS(2)
        let inner = SubjectSpec::scalar(vec![SubjectTerm::matrix("1", vec![vec![10]]), SubjectTerm::identity("-1")]);
        let r = extension_scan(&cfg(3, 1, 2, 1, "fp", inner, [1, 3])).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.summary.assertions.len(), 1);
    }

    #[test]
    fn matrix_diag_scan() {
        let zero = SubjectSpec {
            modulus: None,
            blocks: vec![
                vec![g_minus_1().blocks[0][0].clone(), vec![]],
                vec![vec![], vec![]],
            ],
        };
        let r = matrix_scan(&cfg(3, 1, 1, 0, "q", zero, [1, 4])).unwrap();
        assert!(r.pass(), "{r:?}");
        let ratios: Vec<(u64, u64)> = r.rows.iter().map(|r| (r.ratio_num, r.ratio_den)).collect();
        assert_eq!(ratios, vec![(2, 1), (4, 3), (10, 9), (28, 27)]);
        assert_eq!(r.summary.delta_hat, Some(1));
        assert_eq!(r.summary.residuals.last().unwrap().value, "1/27");
    }

    #[test]
    fn zero_block_scan() {
        let zero = SubjectSpec::scalar(vec![]);
        let r = matrix_scan(&cfg(3, 1, 1, 0, "q", zero, [1, 3])).unwrap();
        assert!(r.pass());
        assert!(r.rows.iter().all(|r| (r.ratio_num, r.ratio_den) == (1, 1)));
        assert_eq!(r.summary.delta_hat, Some(1));
    }

    #[test]
    fn nearest_integer_ties() {
        assert_eq!(nearest_integer(3, 2), None);
        assert_eq!(nearest_integer(4, 3), Some(1));
        assert_eq!(nearest_integer(5, 3), Some(2));
        assert_eq!(residual(4, 3, 1), (1, 3));
    }
}
