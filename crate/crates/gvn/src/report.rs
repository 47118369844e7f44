//! Machine-readable views of analysis results.
//!
//! Every struct here serializes to a stable JSON shape: a per-point report
//! carries `point`, `algo`, `classes`, and — for the SED analyses — `nodes`
//! and `instrumentation`. Output is deterministic for a fixed input: classes
//! and witnesses are sorted, and node children refer to positions in the
//! exported node list.

use crate::analyses::AnalysisRun;
use crate::cfg::Point;
use crate::error::Result;
use crate::sed::{self, NodeKind, Sed};
use crate::term::Term;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

/// One SED node; `children` are indices into the surrounding node list
/// (empty for ⊥ and constant nodes).
#[derive(Debug, Clone, Serialize)]
pub struct NodeReport {
    pub vars: Vec<String>,
    #[serde(rename = "type")]
    pub node_type: String,
    pub children: Vec<usize>,
}

/// Join instrumentation aggregated over an analysis run: the worst single
/// join is compared against the documented budget.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Instrumentation {
    /// Distinct node-pair evaluations in the most expensive join.
    pub intersect_calls: usize,
    /// The documented per-join budget e², for e the number of distinct
    /// expressions in the program.
    pub bound_e_squared: usize,
    /// Deepest recursion reached by any join.
    pub recursion_depth_max: usize,
}

/// The analysis state at one program point.
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: String,
    pub algo: String,
    /// Equivalence classes over the bounded universe, each sorted, the list
    /// of classes sorted.
    pub classes: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instrumentation: Option<Instrumentation>,
}

/// Answer to an availability query: is some equivalent of `term` already
/// computed at `point`?
#[derive(Debug, Clone, Serialize)]
pub struct AvailabilityAnswer {
    pub point: String,
    pub algo: String,
    pub term: String,
    pub available: bool,
    /// The equivalence class certifying availability; it always contains a
    /// member other than the queried term.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

/// Equivalences detected by exactly one of two analyses at one point.
#[derive(Debug, Clone, Serialize)]
pub struct DiffReport {
    pub point: String,
    #[serde(rename = "algoA")]
    pub algo_a: String,
    #[serde(rename = "algoB")]
    pub algo_b: String,
    #[serde(rename = "pairs_only_in_A")]
    pub pairs_only_in_a: Vec<(String, String)>,
    #[serde(rename = "pairs_only_in_B")]
    pub pairs_only_in_b: Vec<(String, String)>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.pairs_only_in_a.is_empty() && self.pairs_only_in_b.is_empty()
    }
}

fn sorted_strings(terms: &BTreeSet<Term>) -> Vec<String> {
    let mut out: Vec<String> = terms.iter().map(Term::to_string).collect();
    out.sort();
    out
}

fn node_reports(sed: &Sed) -> Vec<NodeReport> {
    let order = sed.export_order();
    let position: HashMap<_, _> = order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    order
        .iter()
        .map(|&id| {
            let node = sed.node(id);
            let children = match node.kind {
                NodeKind::App(_, l, r) => vec![position[&l], position[&r]],
                _ => Vec::new(),
            };
            NodeReport {
                vars: node.vars.iter().cloned().collect(),
                node_type: sed::type_string(&node.kind),
                children,
            }
        })
        .collect()
}

/// Aggregates a run's join statistics, or `None` for analyses that do not
/// instrument joins.
pub fn instrumentation(run: &AnalysisRun, bound_e_squared: usize) -> Option<Instrumentation> {
    let stats = run.join_stats().ok()?;
    Some(Instrumentation {
        intersect_calls: stats.iter().map(|s| s.intersect_calls).max().unwrap_or(0),
        bound_e_squared,
        recursion_depth_max: stats
            .iter()
            .map(|s| s.recursion_depth_max)
            .max()
            .unwrap_or(0),
    })
}

/// The state of `run` at `point`, rendered for output.
pub fn point_report(run: &mut AnalysisRun, point: Point, bound_e_squared: usize) -> PointReport {
    let mut classes: Vec<Vec<String>> = run
        .classes_at(point)
        .iter()
        .map(sorted_strings)
        .collect();
    classes.sort();
    let nodes = run.sed_at(point).map(|sed| node_reports(&sed));
    PointReport {
        point: run.cfg().describe_point(point),
        algo: run.algo().to_string(),
        classes,
        nodes,
        instrumentation: instrumentation(run, bound_e_squared),
    }
}

/// Whether an equivalent of `expr` is already computed at `point` under
/// `run`'s analysis.
pub fn availability(run: &mut AnalysisRun, point: Point, expr: &Term) -> Result<AvailabilityAnswer> {
    let witness = run.available_at(point, expr)?;
    Ok(AvailabilityAnswer {
        point: run.cfg().describe_point(point),
        algo: run.algo().to_string(),
        term: expr.to_string(),
        available: witness.is_some(),
        witness: witness.as_ref().map(sorted_strings),
    })
}

/// Compares two analyses at `point` over `universe_terms`: every unordered
/// pair is queried under both, and pairs detected by exactly one side are
/// listed. Each emitted pair is thereby verified against both analyses'
/// equivalence queries.
pub fn diff_report(
    a: &mut AnalysisRun,
    b: &mut AnalysisRun,
    point: Point,
    universe_terms: &[Term],
) -> Result<DiffReport> {
    let mut only_in_a = Vec::new();
    let mut only_in_b = Vec::new();
    for (i, t1) in universe_terms.iter().enumerate() {
        for t2 in &universe_terms[i + 1..] {
            let in_a = a.equiv_at(point, t1, t2)?;
            let in_b = b.equiv_at(point, t1, t2)?;
            if in_a == in_b {
                continue;
            }
            let mut pair = [t1.to_string(), t2.to_string()];
            pair.sort();
            let [first, second] = pair;
            if in_a {
                only_in_a.push((first, second));
            } else {
                only_in_b.push((first, second));
            }
        }
    }
    only_in_a.sort();
    only_in_b.sort();
    Ok(DiffReport {
        point: a.cfg().describe_point(point),
        algo_a: a.algo().to_string(),
        algo_b: b.algo().to_string(),
        pairs_only_in_a: only_in_a,
        pairs_only_in_b: only_in_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::{AlgoKind, Toolkit};

    const FIG1: &str = "x := 1; y := 2; z := x + y; \
         if (*) { z := 3; c := x + y; p1: } else { z := 4; d := x + y; p2: } \
         p3: e := x + y;";

    fn run_at(algo: AlgoKind) -> (Toolkit, AnalysisRun, Point) {
        let toolkit = Toolkit::new(FIG1, None).unwrap();
        let run = toolkit.run(algo).unwrap();
        let point = toolkit.cfg().point("p3").unwrap();
        (toolkit, run, point)
    }

    #[test]
    fn kildall_point_report_has_classes_but_no_nodes() {
        let (toolkit, mut run, p3) = run_at(AlgoKind::Kildall);
        let e = toolkit.expression_count();
        let report = point_report(&mut run, p3, e * e);
        assert_eq!(report.point, "p3");
        assert_eq!(report.algo, "kildall");
        assert!(report.nodes.is_none(), "partitions are not DAGs");
        assert!(report.instrumentation.is_none());
        assert!(
            report
                .classes
                .contains(&vec![
                    "1+2".to_string(),
                    "1+y".to_string(),
                    "x+2".to_string(),
                    "x+y".to_string()
                ]),
            "recombined + class expected, got {:?}",
            report.classes
        );
        let json = serde_json::to_string(&report).unwrap();
        assert!(!json.contains("\"nodes\""), "absent fields are omitted");
    }

    #[test]
    fn sed_point_report_lists_nodes_with_positional_children() {
        let (toolkit, mut run, p3) = run_at(AlgoKind::SedModified);
        let e = toolkit.expression_count();
        let report = point_report(&mut run, p3, e * e);
        let nodes = report.nodes.as_ref().expect("SED analyses export nodes");
        let sed = run.sed_at(p3).unwrap();
        assert_eq!(nodes.len(), sed.node_count());
        for node in nodes {
            for &child in &node.children {
                assert!(child < nodes.len(), "children index into the node list");
            }
        }
        let plus = nodes
            .iter()
            .find(|n| n.node_type == "+")
            .expect("the recombined + node survives the modified join");
        assert_eq!(
            plus.children.len(),
            2,
            "applications report both operands"
        );
        let instr = report.instrumentation.expect("joins were instrumented");
        assert!(instr.intersect_calls <= instr.bound_e_squared);
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["nodes"][0]["type"].is_string(), "field renamed to `type`");
    }

    #[test]
    fn availability_answers_carry_a_sorted_witness() {
        let (_, mut run, p3) = run_at(AlgoKind::SedModified);
        let expr: Term = "x + y".parse().unwrap();
        let answer = availability(&mut run, p3, &expr).unwrap();
        assert!(answer.available);
        let witness = answer.witness.unwrap();
        assert!(
            witness.contains(&"1+2".to_string()),
            "the anonymous recombined node holds 1+2, got {witness:?}"
        );
        let mut sorted = witness.clone();
        sorted.sort();
        assert_eq!(witness, sorted);

        let (_, mut run, p3) = run_at(AlgoKind::SedOriginal);
        let answer = availability(&mut run, p3, &expr).unwrap();
        assert!(!answer.available, "per-variable join loses the + node");
        assert!(answer.witness.is_none());
    }

    #[test]
    fn diff_reports_equivalences_detected_by_exactly_one_side() {
        let toolkit = Toolkit::new(FIG1, None).unwrap();
        let mut original = toolkit.run(AlgoKind::SedOriginal).unwrap();
        let mut modified = toolkit.run(AlgoKind::SedModified).unwrap();
        let p3 = toolkit.cfg().point("p3").unwrap();
        let terms = toolkit.universe().enumerate().unwrap();
        let report = diff_report(&mut original, &mut modified, p3, &terms).unwrap();
        assert_eq!(report.pairs_only_in_a, Vec::new(), "original ⊆ modified");
        for pair in [("1+2", "x+y"), ("1+y", "x+y"), ("1+2", "x+2")] {
            let pair = (pair.0.to_string(), pair.1.to_string());
            assert!(
                report.pairs_only_in_b.contains(&pair),
                "{pair:?} missing from {:?}",
                report.pairs_only_in_b
            );
        }

        let mut again = toolkit.run(AlgoKind::SedOriginal).unwrap();
        let mut original = toolkit.run(AlgoKind::SedOriginal).unwrap();
        let self_diff = diff_report(&mut original, &mut again, p3, &terms).unwrap();
        assert!(self_diff.is_empty(), "an analysis never differs from itself");
    }
}
