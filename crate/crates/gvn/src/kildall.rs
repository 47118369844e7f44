//! Kildall-style structured partitions: equivalence classes of terms at a
//! program point, closed under congruence.
//!
//! A partition explicitly tracks the terms that carry their own information
//! at a point: every program variable, plus each constant and application
//! term that has been computed (or is congruent to a computed term, within
//! the size bound). The relation on the rest of the universe is
//! determined by congruence — untracked applications are equivalent exactly
//! when their operands are — so it is computed on demand ([`Partition::equiv`])
//! instead of being stored. This keeps states small without changing the
//! induced relation: congruence closure eagerly tracks every within-bound
//! term congruent to a tracked application (its "mates"), so an untracked
//! term can never be equivalent to a tracked one, and the lazily evaluated
//! relation coincides with a partition maintained over the full bounded
//! universe.

use crate::error::{Error, Result};
use crate::term::{Op, Term};
use crate::universe::Universe;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Disjoint, non-empty classes of tracked terms.
    classes: BTreeSet<BTreeSet<Term>>,
}

pub struct TransferOutcome {
    pub partition: Partition,
    pub warnings: Vec<String>,
}

impl Partition {
    /// Entry-state partition: every variable in a singleton class. Nothing
    /// else is tracked yet — a constant enters the pool when a statement
    /// first uses it — so no two distinct terms are equivalent, and the
    /// listed classes match the pools a path actually builds.
    pub fn initial(u: &Universe) -> Partition {
        let mut classes = BTreeSet::new();
        for v in &u.vars {
            classes.insert(BTreeSet::from([Term::var(v)]));
        }
        Partition { classes }
    }

    pub fn classes(&self) -> impl Iterator<Item = &BTreeSet<Term>> {
        self.classes.iter()
    }

    pub fn is_tracked(&self, t: &Term) -> bool {
        self.classes.iter().any(|c| c.contains(t))
    }

    pub fn class_of(&self, t: &Term) -> Option<&BTreeSet<Term>> {
        self.classes.iter().find(|c| c.contains(t))
    }

    /// Classes that relate at least two distinct terms — the informative part
    /// of the induced equivalence relation.
    pub fn nontrivial_classes(&self) -> BTreeSet<BTreeSet<Term>> {
        self.classes
            .iter()
            .filter(|c| c.len() >= 2)
            .cloned()
            .collect()
    }

    /// The partition with every class intersected against `terms`, empty
    /// intersections dropped. Used to compare against externally given pools
    /// that mention only some of the tracked terms.
    pub fn restricted_to(&self, terms: &BTreeSet<Term>) -> BTreeSet<BTreeSet<Term>> {
        self.classes
            .iter()
            .map(|c| c.intersection(terms).cloned().collect::<BTreeSet<Term>>())
            .filter(|c| !c.is_empty())
            .collect()
    }

    /// Transfer function for `target := rhs`.
    ///
    /// Pre-substitution semantics: the rhs is interpreted in the incoming
    /// state, so occurrences of `target` in `rhs` mean its old value. The
    /// sequence is: materialize the rhs (tracking it and its congruence
    /// mates), snapshot its class, kill every tracked term that mentions
    /// `target`, re-insert `target` into what survives of the snapshot (or a
    /// fresh singleton), and restore congruence closure.
    pub fn transfer(&self, target: &str, rhs: &Term, u: &Universe) -> TransferOutcome {
        let mut warnings = Vec::new();
        let mut classes: Vec<BTreeSet<Term>> = self.classes.iter().cloned().collect();

        let rhs_class: Option<BTreeSet<Term>> = if rhs.size() <= u.bound {
            materialize(&mut classes, rhs);
            close(&mut classes, u);
            let class = classes
                .iter()
                .find(|c| c.contains(rhs))
                .expect("materialized rhs is tracked");
            // A reassignment that re-derives the target's current value
            // (`x := x`, or `b := 1*3` when b already equals 1*3) changes
            // nothing: the kill/insert machinery below would forget
            // equivalences among terms that mention the target, which still
            // hold since the target kept its value.
            if class.contains(&Term::var(target)) {
                return TransferOutcome {
                    partition: Partition {
                        classes: classes.into_iter().collect(),
                    },
                    warnings,
                };
            }
            Some(class.clone())
        } else {
            warnings.push(format!(
                "rhs `{rhs}` has size {} exceeding the universe bound {}; `{target}` is tracked unbound",
                rhs.size(),
                u.bound
            ));
            None
        };

        // Kill: every tracked term mentioning the target loses its meaning.
        for class in classes.iter_mut() {
            class.retain(|t| !t.contains_var(target));
        }
        classes.retain(|c| !c.is_empty());

        // Insert: the target now means the (pre-state) rhs value.
        let target_term = Term::var(target);
        let survivors: Option<Term> = rhs_class.and_then(|snapshot| {
            snapshot
                .into_iter()
                .find(|t| !t.contains_var(target))
        });
        match survivors {
            Some(witness) => {
                let class = classes
                    .iter_mut()
                    .find(|c| c.contains(&witness))
                    .expect("kill never splits classes, so the witness is still tracked");
                class.insert(target_term);
            }
            None => classes.push(BTreeSet::from([target_term])),
        }

        close(&mut classes, u);
        TransferOutcome {
            partition: Partition {
                classes: classes.into_iter().collect(),
            },
            warnings,
        }
    }

    /// Meet of two partitions: a term stays tracked when both sides track it,
    /// and the result classes are the non-empty pairwise intersections of
    /// input classes — exactly "equivalent iff equivalent in both".
    pub fn meet(&self, other: &Partition) -> Partition {
        let here = class_index(&self.classes);
        let there = class_index(&other.classes);
        let mut groups: BTreeMap<(usize, usize), BTreeSet<Term>> = BTreeMap::new();
        for (term, &c1) in &here {
            if let Some(&c2) = there.get(term) {
                groups.entry((c1, c2)).or_default().insert((*term).clone());
            }
        }
        Partition {
            classes: groups.into_values().collect(),
        }
    }

    /// Whether two universe terms are equivalent. Tracked terms are
    /// equivalent exactly when they share a class; untracked applications
    /// are equivalent exactly when their operands are, pairwise — the
    /// congruence closure of the tracked classes over the rest of the
    /// universe (after `x := 1`, the untracked `x+x` and `1+x` are
    /// equivalent because `x` and `1` are). A tracked and an untracked term
    /// are never equivalent: every within-bound term congruent to a tracked
    /// application is tracked in its class by closure, so an equivalence
    /// partner of a tracked term cannot have stayed untracked. Terms outside
    /// the universe are a query error, not a `false`.
    pub fn equiv(&self, u: &Universe, t1: &Term, t2: &Term) -> Result<bool> {
        for t in [t1, t2] {
            if !u.contains(t) {
                return Err(Error::UnknownTerm(t.to_string()));
            }
        }
        Ok(self.entails_equal(t1, t2))
    }

    fn entails_equal(&self, t1: &Term, t2: &Term) -> bool {
        if t1 == t2 {
            return true;
        }
        match (self.class_of(t1), self.class_of(t2)) {
            (Some(c1), Some(_)) => c1.contains(t2),
            (None, None) => match (t1, t2) {
                (Term::App(o1, l1, r1), Term::App(o2, l2, r2)) => {
                    o1 == o2 && self.entails_equal(l1, l2) && self.entails_equal(r1, r2)
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// Class members in display order: variables alphabetically, then the
    /// remaining terms by (size, rendered text).
    pub fn render_class(class: &BTreeSet<Term>) -> Vec<String> {
        let mut vars: Vec<String> = Vec::new();
        let mut rest: Vec<(usize, String)> = Vec::new();
        for t in class {
            match t {
                Term::Var(v) => vars.push(v.clone()),
                _ => rest.push((t.size(), t.to_string())),
            }
        }
        vars.sort();
        rest.sort();
        vars.extend(rest.into_iter().map(|(_, s)| s));
        vars
    }

    /// All classes in display order: smaller classes first, ties broken by
    /// member text.
    pub fn render_classes(&self) -> Vec<Vec<String>> {
        let mut rendered: Vec<Vec<String>> = self.classes.iter().map(Self::render_class).collect();
        rendered.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        rendered
    }

    /// Test- and diagnostics-only validity check; returns a description of
    /// the first violated invariant.
    pub fn check_invariants(&self, u: &Universe) -> std::result::Result<(), String> {
        let mut seen: BTreeSet<&Term> = BTreeSet::new();
        for class in &self.classes {
            if class.is_empty() {
                return Err("empty class".to_string());
            }
            for t in class {
                if !seen.insert(t) {
                    return Err(format!("term {t} appears in two classes"));
                }
                if !u.contains(t) {
                    return Err(format!("tracked term {t} is outside the universe"));
                }
                if let Term::App(_, l, r) = t {
                    if !self.is_tracked(l) || !self.is_tracked(r) {
                        return Err(format!("operands of tracked {t} are not tracked"));
                    }
                }
            }
        }
        // Congruence: tracked applications with pairwise-equivalent operands
        // must share a class; and every within-bound combination over the
        // operand classes of a tracked application must itself be tracked in
        // that class (its "congruence mates").
        let mut classes: Vec<BTreeSet<Term>> = self.classes.iter().cloned().collect();
        close(&mut classes, u);
        let reclosed: BTreeSet<BTreeSet<Term>> = classes.into_iter().collect();
        if reclosed != self.classes {
            return Err("partition is not congruence-closed".to_string());
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = self.render_classes();
        if rendered.is_empty() {
            return write!(f, "{{ }}");
        }
        let body: Vec<String> = rendered
            .into_iter()
            .map(|class| format!("[{}]", class.join(", ")))
            .collect();
        write!(f, "{{ {} }}", body.join(", "))
    }
}

fn class_index(classes: &BTreeSet<BTreeSet<Term>>) -> HashMap<&Term, usize> {
    let mut index = HashMap::new();
    for (i, class) in classes.iter().enumerate() {
        for t in class {
            index.insert(t, i);
        }
    }
    index
}

fn position_of(classes: &[BTreeSet<Term>], t: &Term) -> Option<usize> {
    classes.iter().position(|c| c.contains(t))
}

/// Ensures `term` (and recursively its subterms) is tracked: an application
/// joins the class of an existing congruent application when one exists,
/// otherwise it starts a fresh class.
fn materialize(classes: &mut Vec<BTreeSet<Term>>, term: &Term) {
    if position_of(classes, term).is_some() {
        return;
    }
    match term {
        // Variables and universe constants are tracked from the entry state
        // onward; a constant term outside the universe cannot occur in a
        // within-bound rhs of the same program.
        Term::Var(_) | Term::Const(_) => {
            classes.push(BTreeSet::from([term.clone()]));
        }
        Term::App(op, l, r) => {
            materialize(classes, l);
            materialize(classes, r);
            let li = position_of(classes, l).expect("left operand just materialized");
            let ri = position_of(classes, r).expect("right operand just materialized");
            let congruent_home = classes.iter().position(|class| {
                class.iter().any(|t| match t {
                    Term::App(op2, l2, r2) => {
                        op2 == op
                            && position_of(classes, l2) == Some(li)
                            && position_of(classes, r2) == Some(ri)
                    }
                    _ => false,
                })
            });
            match congruent_home {
                Some(ci) => {
                    classes[ci].insert(term.clone());
                }
                None => classes.push(BTreeSet::from([term.clone()])),
            }
        }
    }
}

/// Congruence closure: merges classes of applications whose operands are
/// pairwise equivalent, and tracks every within-bound "mate" — a term built
/// by the same operator over members of the operand classes of a tracked
/// application — in that application's class. Iterates to a fixpoint.
fn close(classes: &mut Vec<BTreeSet<Term>>, u: &Universe) {
    loop {
        let mut changed = false;

        // Merge congruent application classes.
        loop {
            let index: HashMap<Term, usize> = classes
                .iter()
                .enumerate()
                .flat_map(|(i, c)| c.iter().map(move |t| (t.clone(), i)))
                .collect();
            let mut merge: Option<(usize, usize)> = None;
            let mut groups: BTreeMap<(Op, usize, usize), usize> = BTreeMap::new();
            'scan: for (ci, class) in classes.iter().enumerate() {
                for t in class {
                    if let Term::App(op, l, r) = t {
                        let (Some(&li), Some(&ri)) =
                            (index.get(l.as_ref()), index.get(r.as_ref()))
                        else {
                            continue;
                        };
                        match groups.get(&(*op, li, ri)) {
                            Some(&prev) if prev != ci => {
                                merge = Some((prev, ci));
                                break 'scan;
                            }
                            _ => {
                                groups.insert((*op, li, ri), ci);
                            }
                        }
                    }
                }
            }
            match merge {
                Some((a, b)) => {
                    let absorbed = classes.remove(b.max(a));
                    classes[a.min(b)].extend(absorbed);
                    changed = true;
                }
                None => break,
            }
        }

        // Track congruence mates of every tracked application.
        let snapshot = classes.clone();
        let index: HashMap<&Term, usize> = {
            let mut m = HashMap::new();
            for (i, c) in snapshot.iter().enumerate() {
                for t in c {
                    m.insert(t, i);
                }
            }
            m
        };
        for (ci, class) in snapshot.iter().enumerate() {
            for t in class {
                let Term::App(op, l, r) = t else { continue };
                let (Some(&li), Some(&ri)) = (index.get(l.as_ref()), index.get(r.as_ref()))
                else {
                    continue;
                };
                for l2 in &snapshot[li] {
                    for r2 in &snapshot[ri] {
                        let mate = Term::app(*op, l2.clone(), r2.clone());
                        if mate.size() <= u.bound && !index.contains_key(&mate) {
                            if position_of(classes, &mate).is_none() {
                                classes[ci].insert(mate);
                                changed = true;
                            }
                        }
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{Program, Stmt};
    use num_bigint::BigInt;

    fn universe(vars: &[&str], consts: &[i64], bound: usize) -> Universe {
        Universe::new(
            vars.iter().map(|v| v.to_string()),
            consts.iter().map(|&c| BigInt::from(c)),
            [Op::Add],
            bound,
        )
    }

    fn apply(p: &Partition, stmt: &str, u: &Universe) -> Partition {
        let program = Program::parse(stmt).unwrap();
        let Stmt::Assign { var, rhs } = &program.stmts[0] else {
            panic!("expected an assignment statement");
        };
        let out = p.transfer(var, rhs, u);
        assert!(out.warnings.is_empty(), "unexpected warnings: {:?}", out.warnings);
        out.partition
    }

    fn run(stmts: &[&str], u: &Universe) -> Partition {
        let mut p = Partition::initial(u);
        for s in stmts {
            p = apply(&p, s, u);
        }
        p.check_invariants(u).expect("valid partition");
        p
    }

    fn classes_of(p: &Partition) -> Vec<Vec<String>> {
        p.render_classes()
    }

    #[test]
    fn straight_line_left_branch_reaches_its_branch_pool() {
        let u = universe(&["c", "d", "x", "y", "z"], &[1, 2, 3], 1);
        let p = run(
            &["x := 1;", "y := 2;", "z := x + y;", "z := 3;", "c := x + y;"],
            &u,
        );
        assert_eq!(
            classes_of(&p),
            vec![
                vec!["d"],
                vec!["x", "1"],
                vec!["y", "2"],
                vec!["z", "3"],
                vec!["c", "1+2", "1+y", "x+2", "x+y"],
            ]
        );
    }

    #[test]
    fn meet_of_branch_pools_keeps_the_shared_application_class() {
        let u = universe(&["c", "d", "x", "y", "z"], &[1, 2, 3, 4], 1);
        let prefix = ["x := 1;", "y := 2;", "z := x + y;"];
        let base = run(&prefix, &u);
        let left = apply(&apply(&base, "z := 3;", &u), "c := x + y;", &u);
        let right = apply(&apply(&base, "z := 4;", &u), "d := x + y;", &u);
        let merged = left.meet(&right);
        merged.check_invariants(&u).expect("meet output valid");
        assert_eq!(
            classes_of(&merged),
            vec![
                vec!["c"],
                vec!["d"],
                vec!["z"],
                vec!["x", "1"],
                vec!["y", "2"],
                vec!["1+2", "1+y", "x+2", "x+y"],
            ]
        );
        let xy = Term::app(Op::Add, Term::var("x"), Term::var("y"));
        let od = Term::app(Op::Add, Term::int(1), Term::int(2));
        assert!(merged.equiv(&u, &xy, &od).unwrap(), "x+y and 1+2 stay equivalent");
        assert!(
            !merged.equiv(&u, &Term::var("c"), &Term::var("d")).unwrap(),
            "c and d disagree across branches"
        );
    }

    #[test]
    fn rendering_matches_the_documented_format() {
        let u = universe(&["c", "d", "x", "y", "z"], &[1, 2, 3, 4], 1);
        let prefix = ["x := 1;", "y := 2;", "z := x + y;"];
        let base = run(&prefix, &u);
        let left = apply(&apply(&base, "z := 3;", &u), "c := x + y;", &u);
        let right = apply(&apply(&base, "z := 4;", &u), "d := x + y;", &u);
        let merged = left.meet(&right);
        let printed_terms: BTreeSet<Term> = ["c", "d", "z", "x", "y"]
            .iter()
            .map(|v| Term::var(*v))
            .chain([Term::int(1), Term::int(2)])
            .chain([
                Term::app(Op::Add, Term::var("x"), Term::var("y")),
                Term::app(Op::Add, Term::int(1), Term::var("y")),
                Term::app(Op::Add, Term::var("x"), Term::int(2)),
                Term::app(Op::Add, Term::int(1), Term::int(2)),
            ])
            .collect();
        let restricted = Partition {
            classes: merged.restricted_to(&printed_terms),
        };
        assert_eq!(
            restricted.to_string(),
            "{ [c], [d], [z], [x, 1], [y, 2], [1+2, 1+y, x+2, x+y] }"
        );
    }

    #[test]
    fn identity_assignment_changes_nothing() {
        let u = universe(&["x", "z"], &[], 1);
        let p = run(&["z := x + x;"], &u);
        let q = apply(&p, "x := x;", &u);
        assert_eq!(p, q, "x := x must preserve even equivalences that mention x");
        let xx = Term::app(Op::Add, Term::var("x"), Term::var("x"));
        assert!(q.equiv(&u, &Term::var("z"), &xx).unwrap());
    }

    #[test]
    fn redundant_recomputation_preserves_equivalences_mentioning_the_target() {
        // The second `b := 1*3` re-derives b's current value, so it must be
        // a no-op; running kill/insert instead would needlessly forget that
        // c = 2+(2*b), which still holds since b kept its value.
        let u = Universe::new(
            ["b", "c"].map(str::to_string),
            [1, 2, 3].map(BigInt::from),
            [Op::Add, Op::Mul],
            5,
        );
        let p = run(&["b := 1 * 3;", "c := 2 + (2 * b);", "b := 1 * 3;"], &u);
        let rhs = Term::app(
            Op::Add,
            Term::int(2),
            Term::app(Op::Mul, Term::int(2), Term::var("b")),
        );
        assert!(
            p.equiv(&u, &Term::var("c"), &rhs).unwrap(),
            "c still equals 2+(2*b) after b is redundantly recomputed"
        );
    }

    #[test]
    fn equivalence_extends_to_untracked_terms_by_congruence() {
        let u = universe(&["x", "y"], &[1], 1);
        let p = run(&["x := 1;"], &u);
        let xx = Term::app(Op::Add, Term::var("x"), Term::var("x"));
        let ox = Term::app(Op::Add, Term::int(1), Term::var("x"));
        let oo = Term::app(Op::Add, Term::int(1), Term::int(1));
        let yy = Term::app(Op::Add, Term::var("y"), Term::var("y"));
        assert!(!p.is_tracked(&xx), "x+x was never computed");
        assert!(p.equiv(&u, &xx, &ox).unwrap(), "x = 1 entails x+x = 1+x");
        assert!(p.equiv(&u, &xx, &oo).unwrap());
        assert!(!p.equiv(&u, &xx, &yy).unwrap(), "y's value is unrelated");
        assert!(
            !p.equiv(&u, &xx, &Term::var("x")).unwrap(),
            "a tracked term is never equivalent to an untracked one"
        );
    }

    #[test]
    fn killed_value_class_is_recovered_by_congruence_once_renamed() {
        // After the second assignment, every within-bound name of b's first
        // value (1*3) plus itself contains b, so the whole class is killed.
        // Once `a := 1*3` re-names that value, congruence alone must relate
        // the previously unnameable combinations over it.
        let u = Universe::new(
            ["a", "b"].map(str::to_string),
            [1, 3].map(BigInt::from),
            [Op::Add, Op::Mul],
            3,
        );
        let p = run(
            &["b := 1 * 3;", "b := (b + (b + b)) * b;", "a := 1 * 3;"],
            &u,
        );
        let a = Term::var("a");
        let m = Term::app(Op::Mul, Term::int(1), Term::int(3));
        let aa = Term::app(Op::Add, a.clone(), a.clone());
        let t1 = Term::app(Op::Add, a.clone(), aa.clone());
        let t2 = Term::app(Op::Add, m.clone(), aa.clone());
        assert!(p.equiv(&u, &a, &m).unwrap());
        assert!(!p.is_tracked(&t1), "a+(a+a) was never computed");
        assert!(
            p.equiv(&u, &t1, &t2).unwrap(),
            "a = 1*3 entails a+(a+a) = (1*3)+(a+a)"
        );
    }

    #[test]
    fn self_referential_rhs_without_known_value_isolates_the_target() {
        let u = universe(&["x"], &[1], 1);
        let p = run(&["x := x + 1;"], &u);
        assert_eq!(classes_of(&p), vec![vec!["1"], vec!["x"]]);
    }

    #[test]
    fn self_referential_rhs_with_known_value_substitutes_the_old_value() {
        let u = universe(&["x"], &[1, 5], 1);
        let p = run(&["x := 5;", "x := x + 1;"], &u);
        // x_new = x_old + 1 = 5 + 1, and x_old's class provides the witness.
        let five_plus_one = Term::app(Op::Add, Term::int(5), Term::int(1));
        assert!(p.equiv(&u, &Term::var("x"), &five_plus_one).unwrap());
    }

    #[test]
    fn later_assignment_merges_previously_distinct_applications() {
        let u = universe(&["c", "d", "x", "y"], &[1], 1);
        let p = run(&["c := x + y;", "d := 1 + y;", "x := 1;"], &u);
        let xy = Term::app(Op::Add, Term::var("x"), Term::var("y"));
        let oy = Term::app(Op::Add, Term::int(1), Term::var("y"));
        assert!(
            p.equiv(&u, &xy, &oy).unwrap(),
            "x := 1 makes x+y congruent to 1+y"
        );
        assert!(p.equiv(&u, &Term::var("d"), &xy).unwrap());
        assert!(
            !p.equiv(&u, &Term::var("c"), &xy).unwrap(),
            "c holds the OLD x plus y, which is no longer expressible"
        );
    }

    #[test]
    fn repeated_computation_lands_in_the_same_class() {
        let u = universe(&["a", "b", "x", "y"], &[], 1);
        let p = run(&["a := x + y;", "b := x + y;"], &u);
        assert!(p.equiv(&u, &Term::var("a"), &Term::var("b")).unwrap());
    }

    #[test]
    fn oversized_rhs_yields_fresh_singleton_and_warning() {
        let u = universe(&["x", "y", "z"], &[1], 1);
        let p = Partition::initial(&u);
        let rhs = Term::app(
            Op::Add,
            Term::app(Op::Add, Term::var("x"), Term::var("y")),
            Term::int(1),
        );
        let out = p.transfer("z", &rhs, &u);
        assert_eq!(out.warnings.len(), 1, "one warning for the oversized rhs");
        assert!(out.partition.class_of(&Term::var("z")).unwrap().len() == 1);
        out.partition.check_invariants(&u).expect("still valid");
    }

    #[test]
    fn equiv_rejects_terms_outside_the_universe() {
        let u = universe(&["x"], &[1], 1);
        let p = Partition::initial(&u);
        let foreign = Term::var("nope");
        let err = p.equiv(&u, &Term::var("x"), &foreign).unwrap_err();
        assert!(matches!(err, Error::UnknownTerm(_)), "got {err}");
        // Untracked but in-universe terms are reflexively equivalent.
        let xx = Term::app(Op::Add, Term::var("x"), Term::var("x"));
        assert!(p.equiv(&u, &xx, &xx).unwrap());
        assert!(!p.equiv(&u, &xx, &Term::var("x")).unwrap());
    }

    #[test]
    fn meet_is_idempotent_and_commutative_on_a_sample() {
        let u = universe(&["a", "b", "x", "y"], &[1, 2], 1);
        let p = run(&["x := 1;", "a := x + y;"], &u);
        let q = run(&["y := 2;", "a := x + y;", "b := a;"], &u);
        assert_eq!(p.meet(&p), p);
        assert_eq!(p.meet(&q), q.meet(&p));
        p.meet(&q).check_invariants(&u).expect("meet output valid");
    }

    #[test]
    fn copy_assignment_aliases_the_source_class() {
        let u = universe(&["x", "y"], &[7], 1);
        let p = run(&["x := 7;", "y := x;"], &u);
        assert_eq!(classes_of(&p), vec![vec!["x", "y", "7"]]);
    }
}
