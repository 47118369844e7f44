//! Differential testing of the three analyses on generated programs.
//!
//! Two kinds of comparison run at every program point, each on the terms it
//! is meaningful for:
//!
//! * The two SED pipelines are compared on their enumerated classes
//!   directly. Both speak the same language — a class is the term set of
//!   one node — so the per-variable pipeline's relation must be contained
//!   in the all-pairs pipeline's, which retains strictly more structure.
//! * The all-pairs pipeline is compared against the partition analysis over
//!   the partition's tracked pool — the terms the oracle can actually
//!   certify. On that pool the all-pairs pipeline must never detect more
//!   than the partition analysis, and must agree with it exactly on
//!   loop-free programs. The domain restriction matters: an anonymous SED
//!   node can carry a value through a point where its every in-bound name
//!   transiently mentions the assigned variable (`b := (b+b)*b` leaves no
//!   bounded spelling of b's new value), while the partition necessarily
//!   drops the class and, being name-based, can never re-admit the variable
//!   by congruence. Equivalences the SED retains beyond the tracked pool
//!   are real but outside what a bounded oracle can check.
//!
//! Join instrumentation must respect the documented bounds as well:
//! distinct intersection calls per join at most e², recursion depth at most
//! the point count, post-cleanup SED size at most e, for e the number of
//! distinct expressions in the program.
//!
//! Findings are split by severity. Precision orderings and the all-pairs
//! pipeline's complexity bounds are hard violations. The size bound and the
//! per-variable pipeline's call counts are advisory reports: the per-variable
//! pipeline deliberately retains old-value structure that can outgrow e on
//! self-referential assignment chains, so overages there document behaviour
//! rather than breaking a guarantee.
//!
//! Any hard violation is shrunk with a greedy statement-removal minimizer
//! before being reported, and the whole run is deterministic in the seed.

use crate::analyses::{AlgoKind, Toolkit};
use crate::error::Result;
use crate::generator::{generate, GenConfig};
use crate::program::{Program, Stmt};
use crate::term::Term;
use serde::Serialize;
use std::collections::BTreeSet;

type Relation = BTreeSet<BTreeSet<Term>>;

/// True iff every equivalence detected by `a` is also detected by `b`
/// (i.e. each class of `a` lies inside a single class of `b`).
pub fn relation_subset(a: &Relation, b: &Relation) -> bool {
    a.iter().all(|class| {
        let Some(first) = class.first() else {
            return true;
        };
        b.iter()
            .find(|c| c.contains(first))
            .is_some_and(|c| class.is_subset(c))
    })
}

/// Stable identifiers for the properties a program can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    /// sed-original detected an equivalence sed-modified missed.
    OriginalExceedsModified,
    /// sed-modified detected an equivalence kildall missed.
    ModifiedExceedsKildall,
    /// Loop-free program where sed-modified and kildall disagree.
    LoopFreeMismatch,
    /// A join evaluated more distinct node pairs than e².
    IntersectCallBound,
    /// A join recursed deeper than the point count s'.
    RecursionDepthBound,
    /// A cleaned SED held more than e nodes.
    SedSizeBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct Issue {
    pub kind: IssueKind,
    /// Point or join the issue was observed at.
    pub location: String,
    pub detail: String,
}

/// Differential result for one program.
#[derive(Debug, Clone, Serialize)]
pub struct ProgramCheck {
    pub points: usize,
    /// Points where sed-original detects strictly less than sed-modified.
    pub strict_subset_points: usize,
    /// Hard violations: soundness orderings and the all-pairs join bounds.
    pub issues: Vec<Issue>,
    /// Advisory findings: size-bound overages and the per-variable
    /// pipeline's call counts, which the retained old-value structure can
    /// legitimately exceed.
    pub reports: Vec<Issue>,
}

pub fn has_loops(program: &Program) -> bool {
    let mut found = false;
    program.visit_stmts(&mut |stmt| {
        if matches!(stmt, Stmt::While { .. }) {
            found = true;
        }
    });
    found
}

/// Runs all three analyses and checks every differential property at every
/// program point.
pub fn check_program(program: &Program, max_term_size: Option<usize>) -> Result<ProgramCheck> {
    let toolkit = Toolkit::from_program(program.clone(), max_term_size)?;
    let mut kildall = toolkit.run(AlgoKind::Kildall)?;
    let mut original = toolkit.run(AlgoKind::SedOriginal)?;
    let mut modified = toolkit.run(AlgoKind::SedModified)?;

    let loop_free = !has_loops(program);
    let e = toolkit.expression_count();
    let budget = toolkit.budget();
    let mut check = ProgramCheck {
        points: 0,
        strict_subset_points: 0,
        issues: Vec::new(),
        reports: Vec::new(),
    };

    for point in toolkit.cfg().all_points() {
        check.points += 1;
        let location = toolkit.cfg().describe_point(point);

        // SED vs SED: both relations are read off the nodes' enumerated
        // term classes.
        let rel_orig = original.relation_at(point);
        let rel_modi = modified.relation_at(point);
        if !relation_subset(&rel_orig, &rel_modi) {
            check.issues.push(Issue {
                kind: IssueKind::OriginalExceedsModified,
                location: location.clone(),
                detail: format!("original {rel_orig:?} vs modified {rel_modi:?}"),
            });
        } else if rel_orig != rel_modi {
            check.strict_subset_points += 1;
        }

        // SED vs partition: compared over the partition's tracked pool,
        // the terms the oracle can certify.
        let kildall_classes = kildall.classes_at(point);
        let terms: BTreeSet<Term> = kildall_classes.iter().flatten().cloned().collect();
        let rel_kild: Relation = kildall_classes.into_iter().collect();
        let rel_modi = modified.relation_over(point, &terms);
        if !relation_subset(&rel_modi, &rel_kild) {
            check.issues.push(Issue {
                kind: IssueKind::ModifiedExceedsKildall,
                location: location.clone(),
                detail: format!("modified {rel_modi:?} vs kildall {rel_kild:?}"),
            });
        }
        if loop_free && rel_modi != rel_kild {
            check.issues.push(Issue {
                kind: IssueKind::LoopFreeMismatch,
                location: location.clone(),
                detail: format!("modified {rel_modi:?} vs kildall {rel_kild:?}"),
            });
        }
        // The size bound is advisory for both pipelines: the claim holds only
        // after unrepresented structure is collapsed, and the per-variable
        // pipeline keeps that structure by design.
        for (algo, run) in [
            (AlgoKind::SedOriginal, &mut original),
            (AlgoKind::SedModified, &mut modified),
        ] {
            let sed = run.sed_at(point).expect("SED analyses produce SEDs");
            if sed.node_count() > e {
                check.reports.push(Issue {
                    kind: IssueKind::SedSizeBound,
                    location: location.clone(),
                    detail: format!("{algo}: {} nodes exceeds e = {e}", sed.node_count()),
                });
            }
        }
    }

    for (algo, run) in [
        (AlgoKind::SedOriginal, &original),
        (AlgoKind::SedModified, &modified),
    ] {
        // The e² call bound is the all-pairs join's complexity guarantee; the
        // per-variable join inherits it only as an advisory expectation, since
        // its inputs may hold retained structure beyond e nodes.
        let call_bound_is_hard = algo == AlgoKind::SedModified;
        for (i, stats) in run.join_stats()?.iter().enumerate() {
            if stats.intersect_calls > e * e {
                let issue = Issue {
                    kind: IssueKind::IntersectCallBound,
                    location: format!("{algo} join #{i}"),
                    detail: format!(
                        "{} distinct intersect calls exceeds e² = {}",
                        stats.intersect_calls,
                        e * e
                    ),
                };
                if call_bound_is_hard {
                    check.issues.push(issue);
                } else {
                    check.reports.push(issue);
                }
            }
            if stats.recursion_depth_max > budget {
                check.issues.push(Issue {
                    kind: IssueKind::RecursionDepthBound,
                    location: format!("{algo} join #{i}"),
                    detail: format!(
                        "recursion depth {} exceeds s' = {budget}",
                        stats.recursion_depth_max
                    ),
                });
            }
        }
    }

    Ok(check)
}

/// Greedily shrinks `program` while `predicate` keeps holding. One step
/// removes a single statement or replaces a branch/loop construct by one of
/// its bodies; steps repeat until no further reduction preserves the
/// predicate.
pub fn minimize(program: &Program, predicate: &mut impl FnMut(&Program) -> bool) -> Program {
    let mut current = program.clone();
    loop {
        let mut reduced = None;
        for candidate in reductions(&current) {
            if predicate(&candidate) {
                reduced = Some(candidate);
                break;
            }
        }
        match reduced {
            Some(next) => current = next,
            None => return current,
        }
    }
}

/// All programs obtainable from `program` by one reduction step, larger
/// reductions first so minimization takes few predicate calls.
fn reductions(program: &Program) -> Vec<Program> {
    let mut out = Vec::new();
    for i in 0..program.stmts.len() {
        // Unwrapping a construct before deleting it keeps inner statements
        // available for smaller counterexamples.
        if let Stmt::If {
            then_branch,
            else_branch,
        } = &program.stmts[i]
        {
            for branch in [then_branch, else_branch] {
                let mut stmts = program.stmts.clone();
                stmts.splice(i..=i, branch.iter().cloned());
                out.push(Program { stmts });
            }
        }
        if let Stmt::While { body } = &program.stmts[i] {
            let mut stmts = program.stmts.clone();
            stmts.splice(i..=i, body.iter().cloned());
            out.push(Program { stmts });
        }
        let mut stmts = program.stmts.clone();
        stmts.remove(i);
        if !stmts.is_empty() {
            out.push(Program { stmts });
        }
        // Reductions inside nested bodies.
        match &program.stmts[i] {
            Stmt::If {
                then_branch,
                else_branch,
            } => {
                for (which, branch) in [(true, then_branch), (false, else_branch)] {
                    for inner in reductions(&Program {
                        stmts: branch.clone(),
                    }) {
                        let mut stmts = program.stmts.clone();
                        let Stmt::If {
                            then_branch,
                            else_branch,
                        } = &mut stmts[i]
                        else {
                            unreachable!()
                        };
                        *(if which { then_branch } else { else_branch }) = inner.stmts;
                        out.push(Program { stmts });
                    }
                }
            }
            Stmt::While { body } => {
                for inner in reductions(&Program { stmts: body.clone() }) {
                    let mut stmts = program.stmts.clone();
                    let Stmt::While { body } = &mut stmts[i] else {
                        unreachable!()
                    };
                    *body = inner.stmts;
                    out.push(Program { stmts });
                }
            }
            _ => {}
        }
    }
    out
}

/// One reported violation, with its shrunk reproducer.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub kind: IssueKind,
    pub location: String,
    pub detail: String,
    pub program: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub programs_checked: usize,
    pub points_checked: usize,
    /// Points at which sed-original detected strictly less than
    /// sed-modified.
    pub strict_subset_points: usize,
    /// Programs with at least one such point.
    pub programs_with_strict_subset: usize,
    pub violations: Vec<Violation>,
    /// Advisory findings (see [`ProgramCheck::reports`]), counted in full.
    pub reports: usize,
    /// The first few advisory findings, unminimized.
    pub report_samples: Vec<Violation>,
}

/// Generates and checks `count` programs derived from `seed`. Violations are
/// minimized (preserving the violation kind) before reporting. The summary
/// is a pure function of the arguments.
pub fn fuzz(
    seed: u64,
    count: usize,
    gen: &GenConfig,
    max_term_size: Option<usize>,
) -> Result<FuzzSummary> {
    const REPORT_SAMPLE_CAP: usize = 5;
    let mut summary = FuzzSummary {
        seed,
        programs_checked: 0,
        points_checked: 0,
        strict_subset_points: 0,
        programs_with_strict_subset: 0,
        violations: Vec::new(),
        reports: 0,
        report_samples: Vec::new(),
    };
    for i in 0..count {
        let program_seed = seed.wrapping_add(i as u64);
        let program = generate(program_seed, gen);
        let check = check_program(&program, max_term_size)?;
        summary.programs_checked += 1;
        summary.points_checked += check.points;
        summary.strict_subset_points += check.strict_subset_points;
        if check.strict_subset_points > 0 {
            summary.programs_with_strict_subset += 1;
        }
        let mut kinds: Vec<IssueKind> = check.issues.iter().map(|i| i.kind).collect();
        kinds.dedup();
        for kind in kinds {
            let mut exhibits = |p: &Program| -> bool {
                check_program(p, max_term_size)
                    .map(|c| c.issues.iter().any(|i| i.kind == kind))
                    .unwrap_or(false)
            };
            let minimized = minimize(&program, &mut exhibits);
            let witness = check_program(&minimized, max_term_size)?;
            let issue = witness
                .issues
                .into_iter()
                .find(|i| i.kind == kind)
                .expect("minimization preserves the issue kind");
            summary.violations.push(Violation {
                seed: program_seed,
                kind,
                location: issue.location,
                detail: issue.detail,
                program: minimized.to_string(),
            });
        }
        summary.reports += check.reports.len();
        for report in check.reports {
            if summary.report_samples.len() >= REPORT_SAMPLE_CAP {
                break;
            }
            summary.report_samples.push(Violation {
                seed: program_seed,
                kind: report.kind,
                location: report.location,
                detail: report.detail,
                program: program.to_string(),
            });
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = "x := 1; y := 2; z := x + y; \
         if (*) { z := 3; c := x + y; } else { z := 4; d := x + y; } \
         e := x + y;";

    #[test]
    fn the_recombination_diamond_is_clean_with_a_strict_precision_gap() {
        let program = Program::parse(DIAMOND).unwrap();
        let check = check_program(&program, None).unwrap();
        assert_eq!(
            check.issues,
            Vec::new(),
            "no differential property is violated"
        );
        assert!(
            check.strict_subset_points >= 1,
            "the join point separates the two SED pipelines"
        );
    }

    impl PartialEq for Issue {
        fn eq(&self, other: &Self) -> bool {
            self.kind == other.kind && self.location == other.location
        }
    }

    #[test]
    fn old_value_chains_survive_the_oracle_comparison() {
        // The second assignment's rhs mentions b four times, so every
        // within-bound name of b's new value transiently contains b and the
        // partition analysis drops the class entirely — b can never rejoin
        // it, since congruence closure only merges applications. The
        // all-pairs SED carries the value anonymously; once `a := 1*3`
        // makes it nameable again the SED still knows what b equals. That
        // surplus lies outside the oracle's tracked pool and must not be
        // flagged as disagreement.
        let program = Program::parse("b := 1*3; b := (b + (b + b)) * b; a := 1*3;").unwrap();
        let check = check_program(&program, None).unwrap();
        assert_eq!(check.issues, Vec::new(), "reports: {:#?}", check.reports);

        let toolkit = Toolkit::from_program(program, None).unwrap();
        let exit = toolkit.cfg().point("__exit").unwrap();
        let mut modified = toolkit.run(AlgoKind::SedModified).unwrap();
        let mut kildall = toolkit.run(AlgoKind::Kildall).unwrap();
        let b_value: Term = "(a + (a + a)) * a".parse().unwrap();
        assert!(
            modified
                .equiv_at(exit, &Term::var("b"), &b_value)
                .unwrap(),
            "the anonymous node still names b's value"
        );
        assert!(
            !kildall.equiv_at(exit, &Term::var("b"), &b_value).unwrap(),
            "the bounded partition lost b at the naming bottleneck"
        );
    }

    #[test]
    fn relation_subset_is_containment_of_detected_equivalences() {
        let class = |terms: &[&str]| -> BTreeSet<Term> {
            terms.iter().map(|t| Term::var(*t)).collect()
        };
        let small: Relation = [class(&["a", "b"])].into_iter().collect();
        let merged: Relation = [class(&["a", "b", "c"])].into_iter().collect();
        let split: Relation = [class(&["a", "c"])].into_iter().collect();
        assert!(relation_subset(&small, &merged));
        assert!(!relation_subset(&merged, &small));
        assert!(!relation_subset(&small, &split));
        assert!(relation_subset(&Relation::new(), &small));
    }

    #[test]
    fn minimize_strips_statements_irrelevant_to_the_predicate() {
        let program = Program::parse("a := 1; b := 2; c := a + b; d := 3;").unwrap();
        let mut assigns_c = |p: &Program| {
            let mut found = false;
            p.visit_stmts(&mut |s| {
                if let Stmt::Assign { var, .. } = s {
                    found |= var == "c";
                }
            });
            found
        };
        let minimized = minimize(&program, &mut assigns_c);
        assert_eq!(minimized.to_string().trim(), "c := a+b;");
    }

    #[test]
    fn minimize_unwraps_branches_and_loops() {
        let program =
            Program::parse("if (*) { x := 1; while (*) { y := 2; } } else { z := 3; }").unwrap();
        let mut assigns_y = |p: &Program| {
            let mut found = false;
            p.visit_stmts(&mut |s| {
                if let Stmt::Assign { var, .. } = s {
                    found |= var == "y";
                }
            });
            found
        };
        let minimized = minimize(&program, &mut assigns_y);
        assert_eq!(minimized.to_string().trim(), "y := 2;");
    }

    #[test]
    fn fuzzing_a_batch_is_deterministic_and_clean() {
        let gen = GenConfig::default();
        let a = fuzz(42, 40, &gen, None).unwrap();
        let b = fuzz(42, 40, &gen, None).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
            "same seed, same summary"
        );
        assert_eq!(
            a.violations.len(),
            0,
            "violations: {:#?}",
            a.violations
        );
        assert!(
            a.programs_with_strict_subset >= 1,
            "expected at least one program separating the SED pipelines, strict points = {}",
            a.strict_subset_points
        );
    }
}
