//! Machine-readable structural summary behind `lglu report`.

use serde::Serialize;

use super::config::Caps;
use super::verify::{j_class_count_of, InstanceSummary, JClassCount};
use crate::error::{Error, Result};
use crate::gf::gl_order;
use crate::iso::{invariants, IsoInvariants};
use crate::lglu::{Instance, SubgroupKind, DEFAULT_RANK_BUDGET};
use crate::semigroup::green_oracle;

#[derive(Clone, Debug, Serialize)]
pub struct ClassSize {
    pub k: usize,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitGroup {
    pub order: u128,
    pub rank: Option<usize>,
    /// Subgroup orders for the default complement `W`; counted when enumerated.
    pub fix_w: u128,
    pub fix_u: u128,
    pub g_w: u128,
    pub n_w: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankSummary {
    pub semigroup: Option<usize>,
    /// `rank(units) + 1`
    pub via_identity: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub instance: InstanceSummary,
    /// Always the closed-form order; `enumerated` says whether it was confirmed.
    pub order: u128,
    pub enumerated: bool,
    pub complements: u128,
    pub j_classes: Vec<ClassSize>,
    pub ideals: Vec<ClassSize>,
    pub minimal_idempotents: Option<usize>,
    pub unit_group: UnitGroup,
    pub rank: RankSummary,
    pub invariants: Option<IsoInvariants>,
    pub j_class_count: Option<JClassCount>,
    pub skipped: Vec<String>,
}

pub fn build_report(inst: &Instance, caps: Caps) -> Result<Report> {
    let mut report = Report {
        instance: InstanceSummary::of(inst),
        order: inst.order(),
        enumerated: false,
        complements: inst.complement_count(),
        j_classes: Vec::new(),
        ideals: Vec::new(),
        minimal_idempotents: None,
        unit_group: UnitGroup {
            order: inst.unit_order(),
            rank: None,
            fix_w: gl_order(inst.p(), inst.r()),
            fix_u: gl_order(inst.p(), inst.top()).saturating_mul(inst.complement_count()),
            g_w: gl_order(inst.p(), inst.top()),
            n_w: inst.complement_count(),
        },
        rank: RankSummary {
            semigroup: None,
            via_identity: None,
        },
        invariants: None,
        j_class_count: None,
        skipped: Vec::new(),
    };
    let e = match inst.enumerate(caps.enumeration) {
        Ok(e) => e,
        Err(Error::Capacity { needed, cap, .. }) => {
            report.skipped.push(format!(
                "enumeration: order {needed} exceeds cap {cap}; only closed forms reported"
            ));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.enumerated = true;
    report.order = e.len() as u128;
    for k in 0..=inst.top() {
        report.j_classes.push(ClassSize {
            k,
            size: e.j_class(k)?.count_ones(..),
        });
    }
    for k in 1..=inst.top() {
        report.ideals.push(ClassSize {
            k,
            size: e.q_ideal(k)?.count_ones(..),
        });
    }
    report.minimal_idempotents = Some(e.minimal_idempotents_char().len());
    report.unit_group.order = e.units().len() as u128;
    if inst.r() > 0 {
        let w = inst.default_complement();
        let ug = &mut report.unit_group;
        ug.fix_w = e.special_subgroup(&SubgroupKind::FixW(w.clone()))?.len() as u128;
        ug.fix_u = e.special_subgroup(&SubgroupKind::FixU)?.len() as u128;
        ug.g_w = e.special_subgroup(&SubgroupKind::GW(w.clone()))?.len() as u128;
        ug.n_w = e.special_subgroup(&SubgroupKind::NW(w))?.len() as u128;
    }
    let ranks = e.rank_value(caps.rank, DEFAULT_RANK_BUDGET)?;
    report.unit_group.rank = ranks.unit_group;
    report.rank = RankSummary {
        semigroup: ranks.exhaustive,
        via_identity: ranks.via_identity,
    };
    if ranks.unit_group.is_none() {
        report
            .skipped
            .push(format!("unit group rank: not found within subset cap {}", caps.rank));
    }
    if ranks.exhaustive.is_none() {
        report
            .skipped
            .push(format!("semigroup rank: not found within subset cap {}", caps.rank + 1));
    }
    report.invariants = Some(invariants(&e));
    report.j_class_count = Some(j_class_count_of(inst, &green_oracle(e.table())?));
    Ok(report)
}
