//! Finite-level checks of the filtration statements: nilpotency and the
//! layer-ideal inclusions, dimension subgroups, the `N_p` conditions, and the
//! domain behaviour of bottom symbols.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::filtration::capped_count_at_least;
use crate::algebra::{
    augmentation_powers, passman_basis, AlgebraElement, AlgebraElementJson, BottomDegree,
    CoefficientDomain, Filtration, GroupAlgebra,
};
use crate::error::{Error, Result};
use crate::group::{Extended, GeneratorSet, GroupParams, GroupTable, QuotientElement};
use crate::kernel::fp::FpVec;
use crate::rng;

pub const SCHEMA: &str = "congruence-kernel/1";

/// Largest group order swept element by element.
pub const EXHAUSTIVE_ORDER: u64 = 1 << 16;

/// Evidence attached to a failed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<AlgebraElementJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub group_elements: Vec<QuotientElement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
}

impl Witness {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            element: None,
            group_elements: Vec::new(),
            expected: None,
            actual: None,
        }
    }

    pub fn element(mut self, a: &AlgebraElement) -> Self {
        self.element = Some(a.to_json());
        self
    }

    pub fn group_elements(mut self, gs: Vec<QuotientElement>) -> Self {
        self.group_elements = gs;
        self
    }

    pub fn mismatch(mut self, expected: impl ToString, actual: impl ToString) -> Self {
        self.expected = Some(expected.to_string());
        self.actual = Some(actual.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub lemma: String,
    pub params: GroupParams,
    pub level: u32,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub millis: u64,
    pub details: serde_json::Value,
}

impl VerificationReport {
    pub(crate) fn finish(
        lemma: &str,
        params: GroupParams,
        level: u32,
        started: Instant,
        witness: Option<Witness>,
        details: serde_json::Value,
    ) -> Self {
        Self {
            schema: SCHEMA.into(),
            lemma: lemma.into(),
            params,
            level,
            pass: witness.is_none(),
            witness,
            millis: started.elapsed().as_millis() as u64,
            details,
        }
    }

    /// Zeroes the timing field so that output bytes depend only on inputs.
    pub fn without_timing(mut self) -> Self {
        self.millis = 0;
        self
    }
}

fn fp_algebra(params: GroupParams, t: u32) -> Result<GroupAlgebra> {
    GroupAlgebra::new(GroupTable::new(params, t)?, CoefficientDomain::PrimeField { p: params.p() })
}

/// Nilpotency of `ω` at level `t` and the sandwich
/// `ω^(p^(t-1)e-e+1) ⊆ ker(F_p[Γ/Γ_(t+1)] → F_p[Γ/Γ_t]) ⊆ ω^(p^(t-1))`
/// at level `t + 1`, where the middle term is the ideal generated by the
/// augmentation ideal of the layer `Γ_t`.
pub fn verify_equiv(params: GroupParams, t: u32) -> Result<VerificationReport> {
    if t == 0 {
        return Err(Error::Validation("level must be at least 1".into()));
    }
    let started = Instant::now();
    let (p, e) = (params.p(), params.e() as u64);
    let top = t + 1;
    let nil = p.pow(t - 1) * e - e + 1;
    let lower = p.pow(t - 1);
    let low = GroupTable::new(params, t)?;
    let high = GroupTable::new(params, top)?;
    let mut witness = None;

    // (i) ω^nil vanishes at level t
    let zero_power = passman_basis(&low, nil)?;
    let mut power_checked = false;
    if zero_power.dimension() > 0 {
        let v = &zero_power.echelon().rows()[0];
        witness = Some(
            Witness::new(format!("omega^{nil} = 0 at level {t}"))
                .element(&AlgebraElement::from_fpvec(t, v))
                .mismatch(0, zero_power.dimension()),
        );
    } else if low.order() <= 1024 {
        // independent route through iterated products of augmentation generators
        let powers = augmentation_powers(&low)?;
        power_checked = true;
        let first_zero = powers.len() as u64 - 1;
        if first_zero > nil {
            let v = &powers[nil as usize].rows()[0];
            witness = Some(
                Witness::new(format!("omega^{nil} = 0 at level {t} (products)"))
                    .element(&AlgebraElement::from_fpvec(t, v))
                    .mismatch(format!("<= {nil}"), first_zero),
            );
        }
    }

    // (ii) the kernel of the projection, spanned by g - rep(π(g))
    let proj: Vec<u64> = high
        .iter()
        .map(|g| params.project(&g, t).map(|x| low.index(&x)))
        .collect::<Result<_>>()?;
    let lifted: Vec<u64> = (0..low.order())
        .map(|i| params.lift(&low.element(i), top).map(|x| high.index(&x)))
        .collect::<Result<_>>()?;
    let order_high = high.order() as usize;
    let mut kernel_gens = Vec::new();
    for (g, &img) in proj.iter().enumerate() {
        let rep = lifted[img as usize];
        if rep != g as u64 {
            let mut v = FpVec::zeros(p, order_high);
            v.add_at(g, 1);
            v.add_at(rep as usize, p - 1);
            kernel_gens.push(v);
        }
    }
    let upper_basis = passman_basis(&high, lower)?;
    if witness.is_none() {
        if let Some(v) = kernel_gens.iter().find(|v| !upper_basis.contains(v)) {
            witness = Some(
                Witness::new(format!("layer ideal inside omega^{lower} at level {top}"))
                    .element(&AlgebraElement::from_fpvec(top, v)),
            );
        }
    }
    let lower_basis = passman_basis(&high, nil)?;
    if witness.is_none() {
        for row in lower_basis.echelon().rows() {
            let mut image = FpVec::zeros(p, low.order() as usize);
            for (i, c) in row.nonzeros() {
                image.add_at(proj[i] as usize, c);
            }
            if !image.is_zero() {
                witness = Some(
                    Witness::new(format!("omega^{nil} inside the layer ideal at level {top}"))
                        .element(&AlgebraElement::from_fpvec(top, row)),
                );
                break;
            }
        }
    }
    // sanity: the projection kernel has the expected dimension
    let expected_kernel = high.order() - low.order();
    if witness.is_none() && kernel_gens.len() as u64 != expected_kernel {
        witness = Some(
            Witness::new("projection kernel dimension").mismatch(expected_kernel, kernel_gens.len()),
        );
    }
    let details = json!({
        "upper_level": top,
        "nilpotency_exponent": nil,
        "lower_exponent": lower,
        "dim_omega_nil_at_level": zero_power.dimension(),
        "checked_by_products": power_checked,
        "layer_ideal_dim": kernel_gens.len(),
        "dim_omega_lower_at_upper": upper_basis.dimension(),
        "dim_omega_nil_at_upper": lower_basis.dimension(),
    });
    Ok(VerificationReport::finish("equiv", params, t, started, witness, details))
}

/// `D_n(Γ/Γ_t) = {g : g - 1 ∈ ω^n}` against `{g : height(g) >= n}`, with a
/// normality check under conjugation by the generators.
pub fn dimension_subgroup(params: GroupParams, t: u32, n: u64) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::Validation("dimension subgroups start at n = 1".into()));
    }
    let started = Instant::now();
    let table = GroupTable::new(params, t)?;
    if table.order() > EXHAUSTIVE_ORDER {
        return Err(Error::Size(format!(
            "dimension subgroups need an exhaustive sweep; order {} exceeds {EXHAUSTIVE_ORDER}",
            table.order()
        )));
    }
    let p = params.p();
    let basis = passman_basis(&table, n)?;
    let order = table.order() as usize;
    let id = table.identity_index() as usize;
    let mut members = HashSet::new();
    let mut witness = None;
    for (k, g) in table.iter().enumerate() {
        let mut v = FpVec::zeros(p, order);
        v.add_at(k, 1);
        v.add_at(id, p - 1);
        let inside = basis.contains(&v);
        let tall = params.height(&g) >= Extended::Finite(n);
        if inside {
            members.insert(k as u64);
        }
        if inside != tall && witness.is_none() {
            witness = Some(
                Witness::new(format!("g - 1 in omega^{n} iff height(g) >= {n}"))
                    .group_elements(vec![g.clone()])
                    .mismatch(tall, inside),
            );
        }
    }
    let gens = GeneratorSet::new(params, t)?;
    let mut normal = true;
    'outer: for y in gens.elements() {
        let yi = params.inv(y);
        for &k in &members {
            let g = table.element(k);
            let c = params.mul(&params.mul(y, &g)?, &yi)?;
            if !members.contains(&table.index(&c)) {
                normal = false;
                if witness.is_none() {
                    witness = Some(
                        Witness::new("dimension subgroup closed under conjugation")
                            .group_elements(vec![g, y.clone()]),
                    );
                }
                break 'outer;
            }
        }
    }
    let details = json!({
        "n": n,
        "size": members.len(),
        "star_index": crate::group::star_index(n, p),
        "normal": normal,
    });
    Ok(VerificationReport::finish("dimsub", params, t, started, witness, details))
}

/// Every `n` from 1 to one past the top filtration degree.
pub fn dimension_subgroups(params: GroupParams, t: u32) -> Result<Vec<VerificationReport>> {
    let top = (params.p().pow(t.saturating_sub(1)) - 1) * params.e() as u64 + 1;
    (1..=top).map(|n| dimension_subgroup(params, t, n)).collect()
}

fn add_ext(a: Extended, b: Extended, extra: u64) -> Extended {
    match (a, b) {
        (Extended::Finite(x), Extended::Finite(y)) => Extended::Finite(x + y + extra),
        _ => Extended::Infinite,
    }
}

fn scale_ext(a: Extended, k: u64) -> Extended {
    match a {
        Extended::Finite(x) => Extended::Finite(x * k),
        Extended::Infinite => Extended::Infinite,
    }
}

/// The `N_p` conditions for the height filtration:
/// `height([g,h]) >= height(g) + height(h)` and
/// `height(g^p) >= p·height(g)`, plus the sharper commutator depth bound
/// for `p = 2`. Uses every element when the order is at most 1024 and the
/// layer generators `y^(p^(j-1))` otherwise.
pub fn np_check(params: GroupParams, t: u32) -> Result<VerificationReport> {
    let started = Instant::now();
    let table = GroupTable::new(params, t)?;
    let p = params.p();
    let full = table.order() <= 1024;
    let elements: Vec<QuotientElement> = if full {
        table.iter().collect()
    } else {
        let gens = GeneratorSet::new(params, t)?;
        (1..t)
            .flat_map(|j| gens.elements().iter().map(move |y| (j, y)))
            .map(|(j, y)| params.pow(y, p.pow(j - 1)))
            .collect()
    };
    let heights: Vec<Extended> = elements.iter().map(|g| params.height(g)).collect();
    let depths: Vec<Extended> = elements.iter().map(|g| params.depth(g)).collect();
    let mut witness = None;
    let mut pairs = 0u64;
    for (a, g) in elements.iter().enumerate() {
        let gp = params.pow_p(g);
        if params.height(&gp) < scale_ext(heights[a], p) && witness.is_none() {
            witness = Some(
                Witness::new("height(g^p) >= p height(g)")
                    .group_elements(vec![g.clone()])
                    .mismatch(scale_ext(heights[a], p), params.height(&gp)),
            );
        }
        for (b, h) in elements.iter().enumerate() {
            pairs += 1;
            let c = params.commutator(g, h)?;
            let need = add_ext(heights[a], heights[b], 0);
            if params.height(&c) < need && witness.is_none() {
                witness = Some(
                    Witness::new("height([g,h]) >= height(g) + height(h)")
                        .group_elements(vec![g.clone(), h.clone()])
                        .mismatch(need, params.height(&c)),
                );
            }
            if p == 2 {
                let need = add_ext(depths[a], depths[b], 1);
                if params.depth(&c) < need && witness.is_none() {
                    witness = Some(
                        Witness::new("depth([g,h]) >= depth(g) + depth(h) + 1 for p = 2")
                            .group_elements(vec![g.clone(), h.clone()])
                            .mismatch(need, params.depth(&c)),
                    );
                }
            }
        }
    }
    let details = json!({
        "elements": elements.len(),
        "pairs": pairs,
        "exhaustive": full,
        "strengthened_p2": p == 2,
    });
    Ok(VerificationReport::finish("np", params, t, started, witness, details))
}

/// Random product of `k` augmentation generators, summed over a few terms.
fn random_element<R: Rng>(alg: &GroupAlgebra, k: u64, rng: &mut R) -> Result<AlgebraElement> {
    let p = alg.params().p();
    let table = alg.table();
    let mut acc = alg.zero();
    for _ in 0..rng.gen_range(1..=3) {
        let c = rng.gen_range(1..p);
        let mut term = alg.scalar(crate::algebra::Scalar::Residue(c));
        if k == 0 {
            let g = table.element(rng.gen_range(0..table.order()));
            term = alg.convolve(&term, &alg.embed(&g))?;
        }
        for _ in 0..k {
            let g = table.element(rng.gen_range(0..table.order()));
            term = alg.convolve(&term, &alg.augmentation_generator(&g))?;
        }
        acc = alg.add(&acc, &term)?;
    }
    Ok(acc)
}

/// Products of elements whose certified degrees sum below the cap are
/// nonzero, with additive degree and multiplicative bottom symbol.
/// `trials` counts checked pairs; pairs past the cap are skipped.
pub fn domain_probe(params: GroupParams, t: u32, trials: u64, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let alg = fp_algebra(params, t)?;
    let filt = Filtration::build(alg.table())?;
    let (p, cap) = (params.p(), filt.cap());
    let order = alg.table().order();
    let mut rng = rng::stream(seed, rng::tags::DOMAIN_PROBE);
    let mut witness = None;
    let (mut checked, mut skipped) = (0u64, 0u64);
    let max_attempts = trials.saturating_mul(50).max(100);
    let mut attempts = 0;
    while checked < trials && attempts < max_attempts {
        attempts += 1;
        let ka = rng.gen_range(0..=cap / 2);
        let kb = rng.gen_range(0..=cap / 2);
        let a = random_element(&alg, ka, &mut rng)?;
        let b = random_element(&alg, kb, &mut rng)?;
        let va = a.to_fpvec(order)?;
        let vb = b.to_fpvec(order)?;
        let (BottomDegree::Certified(sa), BottomDegree::Certified(sb)) =
            (filt.bottom_degree(&va), filt.bottom_degree(&vb))
        else {
            skipped += 1;
            continue;
        };
        if sa + sb >= cap {
            skipped += 1;
            continue;
        }
        checked += 1;
        let ab = alg.convolve(&a, &b)?;
        let vab = ab.to_fpvec(order)?;
        let deg = filt.bottom_degree(&vab);
        let sym_a = filt.bottom_symbol(&va).expect("nonzero");
        let sym_b = filt.bottom_symbol(&vb).expect("nonzero");
        let expected = sym_a.product(&sym_b, p, cap);
        let fail = if ab.is_zero() {
            Some(Witness::new("ab != 0").mismatch("nonzero", 0))
        } else if deg != BottomDegree::Certified(sa + sb) {
            Some(Witness::new("deg(ab) = deg(a) + deg(b)").mismatch(sa + sb, format!("{deg:?}")))
        } else if filt.bottom_symbol(&vab).as_ref() != Some(&expected) {
            Some(Witness::new("symbol(ab) = symbol(a) symbol(b)"))
        } else {
            None
        };
        if let Some(w) = fail {
            if witness.is_none() {
                let mut w = w.element(&a);
                w.actual = Some(format!(
                    "{}; b = {}",
                    w.actual.unwrap_or_default(),
                    serde_json::to_string(&b.to_json())?
                ));
                witness = Some(w);
            }
        }
    }
    if checked < trials && witness.is_none() {
        witness = Some(Witness::new("enough probe pairs below the cap").mismatch(trials, checked));
    }
    let details = json!({
        "trials": trials,
        "checked": checked,
        "skipped": skipped,
        "cap": cap,
        "seed": seed,
    });
    Ok(VerificationReport::finish("domain", params, t, started, witness, details))
}

/// `(x_i - 1)(x_j - 1) - (x_j - 1)(x_i - 1) ∈ ω^3` for all generator pairs.
pub fn graded_commutativity(params: GroupParams, t: u32) -> Result<VerificationReport> {
    let started = Instant::now();
    let alg = fp_algebra(params, t)?;
    let basis = passman_basis(alg.table(), 3)?;
    let gens = GeneratorSet::new(params, t)?;
    let order = alg.table().order();
    let mut witness = None;
    let mut pairs = 0;
    for gi in gens.elements() {
        for gj in gens.elements() {
            pairs += 1;
            let (a, b) = (alg.augmentation_generator(gi), alg.augmentation_generator(gj));
            let c = alg.sub(&alg.convolve(&a, &b)?, &alg.convolve(&b, &a)?)?;
            if !basis.contains(&c.to_fpvec(order)?) && witness.is_none() {
                witness = Some(Witness::new("commutator of generators in omega^3").element(&c));
            }
        }
    }
    let details = json!({ "pairs": pairs });
    Ok(VerificationReport::finish("graded-commutativity", params, t, started, witness, details))
}

/// Passman words against the augmentation filtration: word counts equal
/// capped monomial counts and `dim ω^s`, with the spans equal, for every `s`.
pub fn passman_span(params: GroupParams, t: u32) -> Result<VerificationReport> {
    let started = Instant::now();
    let table = GroupTable::new(params, t)?;
    let filt = Filtration::build(&table)?;
    let powers = augmentation_powers(&table)?;
    let graded = filt.graded_dims();
    let cap = params.p().pow(t - 1);
    let mut witness = None;
    for (i, &dim) in graded.iter().enumerate() {
        let want = crate::arith::capped_monomial_count(params.e(), cap, i as u64);
        if dim != want && witness.is_none() {
            witness = Some(Witness::new(format!("graded dimension {i}")).mismatch(want, dim));
        }
    }
    if graded.iter().sum::<u64>() != table.order() && witness.is_none() {
        witness = Some(Witness::new("graded dimensions sum to the order"));
    }
    for (s, power) in powers.iter().enumerate() {
        let basis = passman_basis(&table, s as u64)?;
        let words = capped_count_at_least(&params, t, s as u64);
        if (basis.dimension() as u64 != words || power.rank() != basis.dimension()) && witness.is_none() {
            witness = Some(
                Witness::new(format!("dim omega^{s} = word count"))
                    .mismatch(words, power.rank()),
            );
        }
        if let Some(r) = power.rows().iter().find(|r| !basis.contains(r)) {
            witness.get_or_insert_with(|| {
                Witness::new(format!("omega^{s} inside the word span"))
                    .element(&AlgebraElement::from_fpvec(t, r))
            });
        }
        if let Some(r) = basis.echelon().rows().iter().find(|r| !power.contains(r)) {
            witness.get_or_insert_with(|| {
                Witness::new(format!("word span inside omega^{s}"))
                    .element(&AlgebraElement::from_fpvec(t, r))
            });
        }
    }
    let details = json!({ "graded_dims": graded, "powers": powers.len() });
    Ok(VerificationReport::finish("passman", params, t, started, witness, details))
}

/// Coordinates of `g ∈ Γ_j` in the layer `Γ_j/Γ_(j+1) ≅ F_p^e`.
fn layer_coords(params: &GroupParams, g: &QuotientElement, j: u32) -> Result<Vec<u64>> {
    let t = g.level();
    let m = params.modulus(t)?;
    let scale = params.p().pow(params.u() + j - 1);
    let d = params.d();
    Ok(g.entries()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let diag = u64::from(k / d == k % d);
            ((x + m - diag) % m / scale) % params.p()
        })
        .collect())
}

/// Structure of the tower at level `t`: the order, each layer
/// `Γ_j/Γ_(j+1)` elementary abelian of rank `e`, the `p`-power map
/// bijective between consecutive layers, and `samples` random `p`-th root
/// round trips.
pub fn tower_check(params: GroupParams, t: u32, samples: u64, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let table = GroupTable::build(params, t)?;
    let (p, e) = (params.p(), params.e());
    let mut witness = None;
    let expected_order = p.pow(((t - 1) as usize * e) as u32);
    if table.order() != expected_order {
        witness = Some(Witness::new("order p^((t-1)e)").mismatch(expected_order, table.order()));
    }
    let gens = GeneratorSet::new(params, t)?;
    let mut layers = Vec::new();
    for j in 1..t {
        let layer: Vec<QuotientElement> = gens.elements().iter().map(|y| params.pow(y, p.pow(j - 1))).collect();
        // independent images in F_p^e
        let coords: Vec<FpVec> = layer
            .iter()
            .map(|g| layer_coords(&params, g, j).map(|c| FpVec::from_values(p, &c)))
            .collect::<Result<_>>()?;
        let rank = crate::kernel::fp::rank_of(p, e, coords);
        let next = Extended::Finite(j as u64 + 1);
        let mut abelian = true;
        for a in &layer {
            abelian &= params.depth(&params.pow_p(a)) >= next;
            for b in &layer {
                abelian &= params.depth(&params.commutator(a, b)?) >= next;
            }
        }
        // the p-power map from layer j to layer j + 1 on all p^e cosets
        let mut bijective = None;
        if j + 1 < t {
            let mut images = HashSet::new();
            let scale = p.pow(params.u() + j - 1);
            for code in 0..p.pow(e as u32) {
                let mut entries: Vec<i64> = (0..e)
                    .map(|k| ((code / p.pow(k as u32)) % p * scale) as i64)
                    .collect();
                for k in 0..params.d() {
                    entries[k * params.d() + k] += 1;
                }
                let g = params.element_from_matrix(t, &entries)?;
                images.insert(layer_coords(&params, &params.pow_p(&g), j + 1)?);
            }
            bijective = Some(images.len() as u64 == p.pow(e as u32));
        }
        if witness.is_none() && (rank != e || !abelian || bijective == Some(false)) {
            witness = Some(
                Witness::new(format!("layer {j} elementary abelian of rank {e} with bijective p-power map"))
                    .group_elements(layer.clone())
                    .mismatch(e, rank),
            );
        }
        layers.push(json!({ "layer": j, "rank": rank, "abelian": abelian, "p_power_bijective": bijective }));
    }
    let mut rng = rng::stream(seed, rng::tags::SAMPLING);
    let mut roots = 0;
    if t >= 3 {
        // uniform over Γ_2/Γ_t: I + p^(u+1)·N with N mod p^(t-2)
        let step = p.pow(params.u() + 1) as i64;
        let range = p.pow(t - 2);
        for _ in 0..samples {
            let mut entries: Vec<i64> = (0..e).map(|_| rng.gen_range(0..range) as i64 * step).collect();
            for k in 0..params.d() {
                entries[k * params.d() + k] += 1;
            }
            let x = params.element_from_matrix(t, &entries)?;
            roots += 1;
            let y = params.p_th_root(&x)?;
            if params.pow_p(&y) != x && witness.is_none() {
                witness = Some(Witness::new("p_th_root round trip").group_elements(vec![x, y]));
            }
        }
    }
    let details = json!({
        "order": table.order(),
        "layers": layers,
        "root_round_trips": roots,
        "depth_profile": table.depth_profile(),
    });
    Ok(VerificationReport::finish("tower", params, t, started, witness, details))
}
