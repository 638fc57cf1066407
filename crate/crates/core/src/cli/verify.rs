//! The verification suite behind `lglu verify`.
//!
//! Checks run in a fixed order and each one ends as pass, fail or skipped.
//! Skips happen only when a cap prevents the check from running; they never
//! count as failures.

use std::cell::OnceCell;
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use super::config::{Caps, InstanceConfig};
use crate::error::{Error, Result};
use crate::gf::{enumerate_complements, gl_order, Mat, Subspace};
use crate::iso::{decide_isomorphic, invariants};
use crate::lglu::{
    nonnormality_example, Enumerated, Instance, NonNormalCase, Relation, SubgroupKind,
    DEFAULT_RANK_BUDGET,
};
use crate::semigroup::{green_oracle, GreenPartitions};

/// Largest matrix space scanned by the brute-force membership count.
const BRUTE_FORCE_LIMIT: u128 = 1 << 20;

/// Pair budget for the factorization sweep; larger tables are sampled.
const MAX_FACTOR_PAIRS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: &'static str,
    pub statement: &'static str,
    pub status: Status,
    pub detail: String,
    pub counts: BTreeMap<&'static str, u64>,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceSummary {
    pub p: u32,
    pub n: usize,
    pub r: usize,
    pub u: Vec<String>,
}

impl InstanceSummary {
    pub fn of(inst: &Instance) -> InstanceSummary {
        InstanceSummary {
            p: inst.p(),
            n: inst.n(),
            r: inst.r(),
            u: inst
                .u()
                .basis()
                .iter()
                .map(|row| row.iter().map(|d| char::from_digit(*d as u32, 16).unwrap_or('?')).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub instance: InstanceSummary,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render_text(&self) -> String {
        let i = &self.instance;
        let mut out = format!("instance p={} n={} r={} U=<{}>\n", i.p, i.n, i.r, i.u.join(","));
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{}  {:<28} {}  [{:.1} ms]",
                c.status.label(),
                c.name,
                c.detail,
                c.runtime_ms
            );
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let skipped = self.checks.iter().filter(|c| c.status == Status::Skipped).count();
        let _ = writeln!(
            out,
            "{} checks: {} passed, {failed} failed, {skipped} skipped",
            self.checks.len(),
            self.checks.len() - failed - skipped
        );
        out
    }
}

/// Check names with the statement each one tests, in run order.
pub const CHECKS: [(&str, &str); 14] = [
    ("order_law", "|L| = |GL_r(p)| * p^(n(n-r))"),
    ("complement_count", "U has p^(r(n-r)) complements"),
    ("green_equivalence", "L: Va=Vb, R: ker a=ker b, H: both, D=J: equal codim"),
    ("ideal_structure", "proper ideals are the Q(k); minimal ideal Q(1)=J(0)"),
    ("minimal_idempotents", "minimal idempotents are the idempotents with image U"),
    ("regularity", "every element is regular"),
    ("constructive_factorizations", "a=λbμ iff codim a<=codim b; J(k) in J(k+1)J(k+1); J(n-r-1) in unit·a·unit"),
    ("generation", "L = <J(n-r) ∪ {a}>, <J(k)> = Q(k+1)"),
    ("rank_identity", "rank(L) = rank(J(n-r)) + 1"),
    ("unit_decomposition", "J(n-r) = Fix(W) ⋉ Fix(U), Fix(U) = G(W) N(W)"),
    ("subgroup_isomorphisms", "Fix(W)≅GL(U), G(W)≅GL(W), N(W)≅U^(n-r)"),
    ("nonnormality_examples", "Fix(W) not normal in J(n-r); G(W) not normal in Fix(U)"),
    ("isomorphism_theorem", "instances isomorphic iff some φ: V→V' has Uφ=U'"),
    ("j_class_count", "number of J-classes versus dim(V/U)"),
];

struct Outcome {
    status: Status,
    detail: String,
    counts: BTreeMap<&'static str, u64>,
}

impl Outcome {
    fn verdict(ok: bool, detail: impl Into<String>) -> Outcome {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            counts: BTreeMap::new(),
        }
    }

    fn skip(reason: impl Into<String>) -> Outcome {
        Outcome {
            status: Status::Skipped,
            detail: reason.into(),
            counts: BTreeMap::new(),
        }
    }

    fn count(mut self, key: &'static str, value: impl TryInto<u64>) -> Outcome {
        self.counts.insert(key, value.try_into().unwrap_or(u64::MAX));
        self
    }
}

struct Ctx {
    inst: Instance,
    caps: Caps,
    table: std::result::Result<Enumerated, String>,
    green: OnceCell<std::result::Result<GreenPartitions, String>>,
}

impl Ctx {
    fn table(&self) -> std::result::Result<&Enumerated, Outcome> {
        self.table
            .as_ref()
            .map_err(|reason| Outcome::skip(format!("cap: {reason}")))
    }

    fn green(&self) -> std::result::Result<&GreenPartitions, Outcome> {
        let e = self.table()?;
        self.green
            .get_or_init(|| green_oracle(e.table()).map_err(|err| err.to_string()))
            .as_ref()
            .map_err(|err| Outcome::verdict(false, err.clone()))
    }
}

macro_rules! need {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(outcome) => return Ok(outcome),
        }
    };
}

/// Runs every check on the configured instance.
pub fn cmd_verify(cfg: &InstanceConfig, caps: Caps) -> Result<VerifyReport> {
    let inst = cfg.instance()?;
    let table = match inst.enumerate(caps.enumeration) {
        Ok(e) => Ok(e),
        Err(Error::Capacity { needed, cap, .. }) => {
            Err(format!("order {needed} exceeds enumeration cap {cap}"))
        }
        Err(e) => return Err(e),
    };
    let ctx = Ctx {
        inst,
        caps,
        table,
        green: OnceCell::new(),
    };
    let runners: [fn(&Ctx) -> Result<Outcome>; 14] = [
        order_law,
        complement_count,
        green_equivalence,
        ideal_structure,
        minimal_idempotents,
        regularity,
        constructive_factorizations,
        generation,
        rank_identity,
        unit_decomposition,
        subgroup_isomorphisms,
        nonnormality,
        isomorphism_theorem,
        j_class_count,
    ];
    let mut checks = Vec::with_capacity(CHECKS.len());
    for ((name, statement), run) in CHECKS.iter().zip(runners) {
        let start = Instant::now();
        let outcome = run(&ctx).unwrap_or_else(|e| Outcome::verdict(false, format!("error: {e}")));
        checks.push(CheckRecord {
            name,
            statement,
            status: outcome.status,
            detail: outcome.detail,
            counts: outcome.counts,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(VerifyReport {
        instance: InstanceSummary::of(&ctx.inst),
        checks,
    })
}

fn order_law(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let predicted = ctx.inst.order();
    let brute = ctx.inst.count_members_brute_force(BRUTE_FORCE_LIMIT);
    let closed = e.table().check_associative(20_000);
    let ok = e.len() as u128 == predicted && brute.is_none_or(|b| b == predicted) && closed;
    let detail = match brute {
        Some(b) => format!("order {} (formula {predicted}, brute force {b})", e.len()),
        None => format!("order {} (formula {predicted}, brute force not run)", e.len()),
    };
    let mut out = Outcome::verdict(ok, detail)
        .count("order", e.len())
        .count("formula", predicted);
    if let Some(b) = brute {
        out = out.count("brute_force", b);
    }
    Ok(out)
}

fn complement_count(ctx: &Ctx) -> Result<Outcome> {
    let predicted = ctx.inst.complement_count();
    if predicted > ctx.caps.enumeration as u128 {
        return Ok(Outcome::skip(format!(
            "cap: {predicted} complements exceed cap {}",
            ctx.caps.enumeration
        )));
    }
    let list = enumerate_complements(ctx.inst.u());
    let distinct: HashSet<&Subspace> = list.iter().collect();
    let all_complements = list.iter().all(|w| w.is_complement_of(ctx.inst.u()));
    let ok = list.len() as u128 == predicted && distinct.len() == list.len() && all_complements;
    Ok(Outcome::verdict(ok, format!("{} complements (formula {predicted})", list.len()))
        .count("complements", list.len())
        .count("formula", predicted))
}

fn green_equivalence(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let g = need!(ctx.green());
    let n = e.len();
    let mut mismatches = 0u64;
    for rel in Relation::ALL {
        let oracle = match rel {
            Relation::L => &g.l,
            Relation::R => &g.r,
            Relation::H => &g.h,
            Relation::D => &g.d,
            Relation::J => &g.j,
        };
        for a in 0..n {
            for b in 0..n {
                if oracle.related(a, b) != e.green_char(a, b, rel) {
                    mismatches += 1;
                }
            }
        }
    }
    let d_is_j = g.d == g.j;
    let ok = mismatches == 0 && d_is_j && g.lattice_holds();
    Ok(Outcome::verdict(
        ok,
        format!(
            "{} pairs x 5 relations, {mismatches} mismatches, D=J: {d_is_j}",
            n * n
        ),
    )
    .count("pairs", n * n)
    .count("mismatches", mismatches)
    .count("l_classes", g.l.num_classes())
    .count("r_classes", g.r.num_classes())
    .count("h_classes", g.h.num_classes())
    .count("d_classes", g.d.num_classes()))
}

fn ideal_structure(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let inst = &ctx.inst;
    let top = inst.top();
    let t = e.table();
    let mut failures = Vec::new();
    for k in 1..=top {
        if !t.verify_ideal(&e.q_ideal(k)?) {
            failures.push(format!("Q({k}) is not an ideal"));
        }
    }
    if t.verify_ideal(&e.j_class(top)?) {
        failures.push("J(n-r) passed as an ideal".into());
    }
    let principal = t.principal_ideals();
    let full = t.full_set();
    for (a, ideal) in principal.iter().enumerate() {
        let c = e.codim(a);
        let want = if c < top { e.q_ideal(c + 1)? } else { full.clone() };
        if *ideal != want {
            failures.push(format!("principal ideal of element {a} is not Q({})", c + 1));
            break;
        }
    }
    let minimal = e.q_ideal(1)?;
    if minimal != e.j_class(0)? {
        failures.push("Q(1) differs from J(0)".into());
    }
    if !principal.iter().all(|p| minimal.is_subset(p)) {
        failures.push("Q(1) is not inside every ideal".into());
    }
    for a in minimal.ones() {
        let m = t.element(a);
        if m.image() != *inst.u() || !m.kernel().is_complement_of(inst.u()) {
            failures.push(format!("minimal ideal element {m} is not a projection onto U"));
            break;
        }
    }
    Ok(Outcome::verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("Q(1)..Q({top}) are ideals, |Q(1)| = {}", minimal.count_ones(..))
        } else {
            failures.join("; ")
        },
    )
    .count("ideals", top)
    .count("minimal_ideal", minimal.count_ones(..)))
}

fn minimal_idempotents(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let oracle = e.table().minimal_idempotents();
    let charac = e.minimal_idempotents_char();
    let predicted = ctx.inst.complement_count();
    let idempotent_law = (0..e.len())
        .all(|i| ctx.inst.idempotent_char(&e.element(i)) == e.table().is_idempotent(i));
    let split = charac
        .iter()
        .all(|&i| e.table().element(i).kernel().is_complement_of(ctx.inst.u()));
    let ok = oracle == charac && charac.len() as u128 == predicted && idempotent_law && split;
    Ok(Outcome::verdict(
        ok,
        format!(
            "{} minimal idempotents (oracle {}, complements {predicted})",
            charac.len(),
            oracle.len()
        ),
    )
    .count("minimal_idempotents", charac.len())
    .count("idempotents", e.table().idempotents().len()))
}

fn regularity(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let inst = &ctx.inst;
    let mut failures = 0u64;
    for i in 0..e.len() {
        let a = e.element(i);
        match inst.regular_witness(&a) {
            Ok(b) => {
                let aba = inst.compose(&inst.compose(&a, &b), &a);
                let bab = inst.compose(&inst.compose(&b, &a), &b);
                if aba != a || bab != b {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Ok(Outcome::verdict(failures == 0, format!("{} of {} elements regular", e.len() as u64 - failures, e.len()))
        .count("elements", e.len())
        .count("failures", failures))
}

fn constructive_factorizations(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let inst = &ctx.inst;
    let n = e.len();
    let top = inst.top();
    let stride = (n * n).div_ceil(MAX_FACTOR_PAIRS).max(1);
    let (mut through, mut dclass, mut sandwich, mut raise) = (0u64, 0u64, 0u64, 0u64);
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |msg: String| {
        if failures.len() < 5 {
            failures.push(msg);
        }
    };

    for t in (0..n * n).step_by(stride) {
        let (ia, ib) = (t / n, t % n);
        let (a, b) = (e.element(ia), e.element(ib));
        if a.codim() <= b.codim() {
            through += 1;
            match inst.factor_through(&a, &b) {
                Ok((l, m)) if inst.compose(&inst.compose(&l, &b), &m) == a => {}
                Ok(_) => fail(format!("factor_through({ia},{ib}) does not recompose")),
                Err(err) => fail(format!("factor_through({ia},{ib}): {err}")),
            }
        } else if !matches!(inst.factor_through(&a, &b), Err(Error::Infeasible(_))) {
            fail(format!("factor_through({ia},{ib}) should be infeasible"));
        }
        if a.codim() == b.codim() {
            dclass += 1;
            match inst.dclass_witness(&a, &b).map(|g| e.index_of(g.mat())) {
                Ok(Some(ig)) if e.green_char(ia, ig, Relation::L) && e.green_char(ig, ib, Relation::R) => {}
                Ok(_) => fail(format!("dclass_witness({ia},{ib}) is not in L(a) ∩ R(b)")),
                Err(err) => fail(format!("dclass_witness({ia},{ib}): {err}")),
            }
            if a.codim() + 1 == top {
                sandwich += 1;
                match inst.sandwich_factor(&b, &a) {
                    Ok((l, m))
                        if inst.is_unit(&l)
                            && inst.is_unit(&m)
                            && inst.compose(&inst.compose(&l, &a), &m) == b => {}
                    Ok(_) => fail(format!("sandwich_factor({ib},{ia}) does not recompose")),
                    Err(err) => fail(format!("sandwich_factor({ib},{ia}): {err}")),
                }
            }
        }
    }
    for i in 0..n {
        let a = e.element(i);
        if a.codim() + 2 <= top {
            raise += 1;
            match inst.raise_factor(&a) {
                Ok((l, m))
                    if l.codim() == a.codim() + 1
                        && m.codim() == a.codim() + 1
                        && inst.compose(&l, &m) == a => {}
                Ok(_) => fail(format!("raise_factor({i}) does not recompose")),
                Err(err) => fail(format!("raise_factor({i}): {err}")),
            }
        }
    }
    let scope = if stride == 1 {
        "all pairs".to_string()
    } else {
        format!("every {stride}th pair")
    };
    let detail = if failures.is_empty() {
        format!(
            "{scope}: {through} factor_through, {dclass} dclass_witness, {sandwich} sandwich_factor, {raise} raise_factor"
        )
    } else {
        failures.join("; ")
    };
    Ok(Outcome::verdict(failures.is_empty(), detail)
        .count("factor_through", through)
        .count("dclass_witness", dclass)
        .count("sandwich_factor", sandwich)
        .count("raise_factor", raise)
        .count("pair_stride", stride))
}

fn generation(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let t = e.table();
    let top = ctx.inst.top();
    let gens = e.generating_set();
    let whole = t.closure(&gens).count_ones(..) == e.len();
    let mut failures = Vec::new();
    if !whole {
        failures.push("J(n-r) plus one element does not generate".to_string());
    }
    for k in 1..top {
        let jk: Vec<usize> = e.j_class(k)?.ones().collect();
        if t.closure(&jk) != e.q_ideal(k + 1)? {
            failures.push(format!("<J({k})> differs from Q({})", k + 1));
        }
    }
    Ok(Outcome::verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} generators reach all {} elements; <J(k)> = Q(k+1) for {} values of k", gens.len(), e.len(), top.saturating_sub(1))
        } else {
            failures.join("; ")
        },
    )
    .count("generators", gens.len()))
}

fn rank_identity(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let report = e.rank_value(ctx.caps.rank, DEFAULT_RANK_BUDGET)?;
    let mut out = match (report.exhaustive, report.via_identity) {
        (Some(full), Some(via)) => Outcome::verdict(
            full == via,
            format!("exhaustive rank {full}, rank(J(n-r)) + 1 = {via}"),
        ),
        (_, via) => Outcome::skip(format!(
            "cap: rank search not computed within subset cap {} (units rank + 1: {})",
            ctx.caps.rank,
            via.map_or("not computed".to_string(), |v| v.to_string())
        )),
    };
    if let Some(u) = report.unit_group {
        out = out.count("unit_rank", u);
    }
    if let Some(full) = report.exhaustive {
        out = out.count("rank", full);
    }
    Ok(out)
}

fn inverses(e: &Enumerated, units: &[usize]) -> Result<BTreeMap<usize, usize>> {
    let id = e.identity_index();
    let t = e.table();
    units
        .iter()
        .map(|&g| {
            units
                .iter()
                .find(|&&h| t.mul(g, h) == id)
                .map(|&h| (g, h))
                .ok_or_else(|| Error::Internal(format!("unit {g} has no inverse")))
        })
        .collect()
}

/// Checks `whole = left · right` as a product of subgroups meeting in the identity.
fn is_exact_product(e: &Enumerated, left: &[usize], right: &[usize], whole: usize) -> bool {
    let t = e.table();
    let id = e.identity_index();
    let right_set: HashSet<usize> = right.iter().copied().collect();
    let meet: Vec<&usize> = left.iter().filter(|x| right_set.contains(x)).collect();
    let products: HashSet<usize> = left
        .iter()
        .flat_map(|&x| right.iter().map(move |&y| t.mul(x, y)))
        .collect();
    meet == vec![&id] && left.len() * right.len() == whole && products.len() == whole
}

fn unit_decomposition(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let inst = &ctx.inst;
    if inst.r() == 0 {
        return Ok(Outcome::skip("dim U = 0: no unit-group decomposition"));
    }
    let t = e.table();
    let units = e.units();
    let fix_u = e.special_subgroup(&SubgroupKind::FixU)?;
    let fix_u_set: HashSet<usize> = fix_u.iter().copied().collect();
    let inv = inverses(e, &units)?;
    let mut failures: Vec<String> = Vec::new();

    if units.len() as u128 != inst.unit_order() {
        failures.push(format!("{} units, formula {}", units.len(), inst.unit_order()));
    }
    let normal = units
        .iter()
        .all(|&g| fix_u.iter().all(|&x| fix_u_set.contains(&t.mul(t.mul(g, x), inv[&g]))));
    if !normal {
        failures.push("Fix(U) is not closed under conjugation".into());
    }
    let (p, r, top) = (inst.p(), inst.r(), inst.top());
    let translations = inst.complement_count();
    let complements = enumerate_complements(inst.u());
    let mut decomposed = 0u64;
    for w in &complements {
        let fix_w = e.special_subgroup(&SubgroupKind::FixW(w.clone()))?;
        let g_w = e.special_subgroup(&SubgroupKind::GW(w.clone()))?;
        let n_w = e.special_subgroup(&SubgroupKind::NW(w.clone()))?;
        let sizes_ok = fix_w.len() as u128 == gl_order(p, r)
            && g_w.len() as u128 == gl_order(p, top)
            && n_w.len() as u128 == translations
            && fix_u.len() as u128 == gl_order(p, top) * translations;
        if !sizes_ok {
            failures.push(format!("subgroup orders wrong for W = {w}"));
        }
        if !is_exact_product(e, &fix_w, &fix_u, units.len()) {
            failures.push(format!("units are not Fix(W)·Fix(U) for W = {w}"));
        }
        if !is_exact_product(e, &g_w, &n_w, fix_u.len()) {
            failures.push(format!("Fix(U) is not G(W)·N(W) for W = {w}"));
        }
        for &i in &units {
            let a = e.element(i);
            let (x, y) = inst.decompose_unit(&a, w)?;
            let ok = inst.in_subgroup(&SubgroupKind::FixW(w.clone()), &x)?
                && inst.in_subgroup(&SubgroupKind::FixU, &y)?
                && inst.compose(&x, &y) == a;
            if !ok {
                failures.push(format!("decompose_unit fails on {a} for W = {w}"));
            }
            decomposed += 1;
        }
        for &i in &fix_u {
            let a = e.element(i);
            let (b, g) = inst.decompose_fix_u(&a, w)?;
            let ok = inst.in_subgroup(&SubgroupKind::GW(w.clone()), &b)?
                && inst.in_subgroup(&SubgroupKind::NW(w.clone()), &g)?
                && inst.compose(&b, &g) == a;
            if !ok {
                failures.push(format!("decompose_fix_u fails on {a} for W = {w}"));
            }
            decomposed += 1;
        }
        if failures.len() > 5 {
            break;
        }
    }
    Ok(Outcome::verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "|J(n-r)| = {}, |Fix(U)| = {}, {} complements, {decomposed} decompositions",
                units.len(),
                fix_u.len(),
                complements.len()
            )
        } else {
            failures.join("; ")
        },
    )
    .count("units", units.len())
    .count("fix_u", fix_u.len())
    .count("complements", complements.len())
    .count("decompositions", decomposed))
}

fn subgroup_isomorphisms(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    if ctx.inst.r() == 0 {
        return Ok(Outcome::skip("dim U = 0: no unit-group decomposition"));
    }
    let mut pairs = 0usize;
    let mut checked = 0usize;
    let complements = enumerate_complements(ctx.inst.u());
    for w in &complements {
        for kind in [
            SubgroupKind::FixW(w.clone()),
            SubgroupKind::GW(w.clone()),
            SubgroupKind::NW(w.clone()),
        ] {
            match e.subgroup_iso_check(&kind) {
                Ok(c) => {
                    pairs += c.pairs_checked;
                    checked += 1;
                }
                Err(err) => {
                    return Ok(Outcome::verdict(false, format!("{} for W = {w}: {err}", kind.name())))
                }
            }
        }
    }
    Ok(Outcome::verdict(
        true,
        format!("{checked} isomorphisms over {} complements, {pairs} products checked", complements.len()),
    )
    .count("isomorphisms", checked)
    .count("pairs", pairs))
}

fn nonnormality(ctx: &Ctx) -> Result<Outcome> {
    let p = ctx.inst.p();
    let a = nonnormality_example(p, NonNormalCase::FixWInUnits)?;
    let b = nonnormality_example(p, NonNormalCase::GWInFixU)?;
    let ok = a.reproduced() && b.reproduced();
    Ok(Outcome::verdict(
        ok,
        format!(
            "GF({p}): W·αβα⁻¹ = {} ≠ {}; {} ≠ {}",
            a.conjugated_w, a.w, b.conjugated_w, b.w
        ),
    ))
}

/// `e_i ↦ e_i + e_(i+1)`, last basis vector fixed.
fn shear(inst: &Instance) -> Mat {
    let f = inst.field();
    let n = inst.n();
    let rows: Vec<_> = (0..n)
        .map(|i| {
            let mut row = f.unit_vector(n, i);
            if i + 1 < n {
                row[i + 1] = 1;
            }
            row
        })
        .collect();
    Mat::from_rows(f, &rows).expect("square")
}

fn isomorphism_theorem(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let inst = &ctx.inst;
    let moved = Instance::from_subspace(inst.u().image_under(&shear(inst)))?;
    let other = match moved.enumerate(ctx.caps.enumeration) {
        Ok(t) => t,
        Err(Error::Capacity { .. }) => return Ok(Outcome::skip("cap: second instance too large")),
        Err(err) => return Err(err),
    };
    let Some(mut witness) = decide_isomorphic(inst, &moved)? else {
        return Ok(Outcome::verdict(false, "no witness for an isomorphic pair"));
    };
    if let Err(err) = witness.attach_tables(e, &other) {
        return Ok(Outcome::verdict(false, format!("transport failed: {err}")));
    }
    let same_invariants = invariants(e) == invariants(&other);
    let alt_r = if inst.r() + 1 < inst.n() {
        Some(inst.r() + 1)
    } else {
        inst.r().checked_sub(1)
    };
    let negative = match alt_r {
        Some(r2) => {
            let i3 = Instance::new(inst.p(), inst.n(), r2)?;
            Some(decide_isomorphic(inst, &i3)?.is_none() && i3.order() != inst.order())
        }
        None => None,
    };
    let ok = same_invariants && negative != Some(false);
    Ok(Outcome::verdict(
        ok,
        format!(
            "U={} vs U'={}: Ψ multiplicative on {} pairs; different dim U rejected: {}",
            inst.u(),
            moved.u(),
            e.len() * e.len(),
            negative.map_or("n/a".into(), |b| b.to_string())
        ),
    )
    .count("pairs", e.len() * e.len()))
}

/// Observed number of J-classes against the stated `dim(V/U)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JClassCount {
    pub observed: usize,
    pub stated: usize,
    pub flagged: bool,
}

pub fn j_class_count_of(inst: &Instance, g: &GreenPartitions) -> JClassCount {
    let observed = g.j.num_classes();
    let stated = inst.top();
    JClassCount {
        observed,
        stated,
        flagged: observed != stated,
    }
}

fn j_class_count(ctx: &Ctx) -> Result<Outcome> {
    let e = need!(ctx.table());
    let g = need!(ctx.green());
    let c = j_class_count_of(&ctx.inst, g);
    let grades: HashSet<usize> = (0..e.len()).map(|i| e.codim(i)).collect();
    let detail = if c.flagged {
        format!(
            "observed {} J-classes, stated dim(V/U) = {}: discrepancy flagged",
            c.observed, c.stated
        )
    } else {
        format!("observed {} J-classes, matches dim(V/U)", c.observed)
    };
    Ok(Outcome::verdict(c.observed == grades.len(), detail)
        .count("observed", c.observed)
        .count("stated", c.stated)
        .count("flagged", c.flagged as u64))
}
