//! Graphviz egg-box diagrams.
//!
//! One cluster per D-class. Inside it, rows are R-classes, columns are
//! L-classes and each cell is an H-class. A cell holding an idempotent is
//! marked `*`, one holding a minimal idempotent `**`. Dashed edges join
//! consecutive classes of the ideal chain.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::lglu::Enumerated;
use crate::semigroup::{green_oracle, GreenPartitions, SemigroupTable};
use crate::error::Result;

/// Tables at most this large list their elements inside each cell.
const LIST_ELEMENTS_UP_TO: usize = 64;

/// Options for [`eggbox_dot`].
pub struct EggboxInput<'a, T> {
    pub table: &'a SemigroupTable<T>,
    pub green: &'a GreenPartitions,
    /// Position of each element's D-class in the ideal chain.
    pub grade: &'a dyn Fn(usize) -> usize,
    pub label: &'a dyn Fn(usize) -> String,
    pub minimal_idempotents: &'a [usize],
    pub title: String,
}

pub fn eggbox_dot<T>(input: &EggboxInput<'_, T>) -> String {
    let t = input.table;
    let g = input.green;
    let minimal: HashSet<usize> = input.minimal_idempotents.iter().copied().collect();
    let list = t.len() <= LIST_ELEMENTS_UP_TO;

    // grade -> D-classes at that grade
    let mut by_grade: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (d, class) in g.d.classes().iter().enumerate() {
        by_grade.entry((input.grade)(class[0])).or_default().push(d);
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph eggbox {{");
    let _ = writeln!(out, "  label=\"{}\";", escape(&input.title));
    let _ = writeln!(out, "  rankdir=BT;\n  compound=true;\n  node [shape=plaintext];");
    let mut node_of_grade: Vec<(usize, String)> = Vec::new();
    for (&grade, ds) in &by_grade {
        for &d in ds {
            let members = &g.d.classes()[d];
            let mut rows: Vec<usize> = Vec::new();
            let mut cols: Vec<usize> = Vec::new();
            for &a in members {
                let (rc, lc) = (g.r.class_of(a), g.l.class_of(a));
                if !rows.contains(&rc) {
                    rows.push(rc);
                }
                if !cols.contains(&lc) {
                    cols.push(lc);
                }
            }
            let node = format!("d{d}");
            let _ = writeln!(out, "  subgraph cluster_{d} {{");
            let _ = writeln!(
                out,
                "    label=\"D-class {d}, grade {grade}: {} elements, {}x{} H-cells\";",
                members.len(),
                rows.len(),
                cols.len()
            );
            let _ = writeln!(out, "    {node} [label=<<table border=\"0\" cellborder=\"1\" cellspacing=\"0\">");
            for &rc in &rows {
                let _ = write!(out, "      <tr>");
                for &lc in &cols {
                    let cell: Vec<usize> = members
                        .iter()
                        .copied()
                        .filter(|&a| g.r.class_of(a) == rc && g.l.class_of(a) == lc)
                        .collect();
                    let mark = if cell.iter().any(|a| minimal.contains(a)) {
                        "**"
                    } else if cell.iter().any(|&a| t.is_idempotent(a)) {
                        "*"
                    } else {
                        ""
                    };
                    let body = if list {
                        cell.iter()
                            .map(|&a| escape(&(input.label)(a)))
                            .collect::<Vec<_>>()
                            .join("<br/>")
                    } else {
                        format!("|H|={}", cell.len())
                    };
                    let _ = write!(out, "<td>{mark}{body}</td>");
                }
                let _ = writeln!(out, "</tr>");
            }
            let _ = writeln!(out, "    </table>>];");
            let _ = writeln!(out, "  }}");
            node_of_grade.push((grade, node));
        }
    }
    for pair in node_of_grade.windows(2) {
        if pair[0].0 != pair[1].0 {
            let _ = writeln!(
                out,
                "  {} -> {} [style=dashed, ltail=cluster_{}, lhead=cluster_{}];",
                pair[0].1,
                pair[1].1,
                &pair[0].1[1..],
                &pair[1].1[1..]
            );
        }
    }
    let _ = writeln!(out, "}}");
    out
}

/// Egg-box diagram of a whole enumerated instance, graded by codimension.
pub fn instance_eggbox(e: &Enumerated) -> Result<String> {
    let green = green_oracle(e.table())?;
    let inst = e.instance();
    let minimal = e.minimal_idempotents_char();
    let grade = |i: usize| e.codim(i);
    let label = |i: usize| e.table().element(i).to_string();
    Ok(eggbox_dot(&EggboxInput {
        table: e.table(),
        green: &green,
        grade: &grade,
        label: &label,
        minimal_idempotents: &minimal,
        title: format!("p={} n={} r={} U={}", inst.p(), inst.n(), inst.r(), inst.u()),
    }))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lglu::Instance;

    #[test]
    fn one_cluster_per_codim() {
        let e = Instance::new(2, 2, 1).unwrap().enumerate(100).unwrap();
        let dot = instance_eggbox(&e).unwrap();
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        assert_eq!(dot.matches("style=dashed").count(), 1);
        assert!(dot.contains("**"));
    }

    #[test]
    fn units_only_table_is_a_single_cluster() {
        let e = Instance::new(2, 3, 1).unwrap().enumerate(1000).unwrap();
        let units = e.unit_table().unwrap();
        let green = green_oracle(&units).unwrap();
        let grade = |_| 0;
        let label = |i: usize| units.element(i).to_string();
        let dot = eggbox_dot(&EggboxInput {
            table: &units,
            green: &green,
            grade: &grade,
            label: &label,
            minimal_idempotents: &[],
            title: "units".into(),
        });
        assert_eq!(dot.matches("subgraph cluster_").count(), 1);
        assert!(!dot.contains("style=dashed"));
        assert!(dot.contains("<td>*"));
    }
}
