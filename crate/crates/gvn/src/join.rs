//! Joins of SED states at control-flow merge points. Both join variants are
//! built on one primitive: a memoized, recursion-budgeted pairwise node
//! intersection. They differ in which node pairs they intersect and in how
//! the result is cleaned, and that difference is exactly what separates the
//! two SED pipelines' precision.
//!
//! * The per-variable join intersects only the nodes the same variable sits
//!   on in both inputs, then prunes anonymous structure unreachable from a
//!   variable. Equivalences among values no longer held by any variable are
//!   discarded.
//! * The all-pairs join intersects every node of one input with every node
//!   of the other, then drops only nodes that represent no term at all.
//!   Anonymous nodes that still describe recomputable values survive.
//!
//! The intersection memo is shared across all root calls of one join, so the
//! number of distinct evaluations is bounded by the product of the two
//! inputs' node counts.

use crate::sed::{Node, NodeId, NodeKind, Sed};
use std::collections::HashMap;

/// Instrumentation for a single join.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JoinStats {
    /// Distinct `(left node, right node)` pairs evaluated (memo hits do not
    /// count).
    pub intersect_calls: usize,
    /// Deepest recursion reached, measured in budget consumed from the root.
    pub recursion_depth_max: usize,
    /// The recursion budget the join ran with.
    pub budget: usize,
    pub nodes_left: usize,
    pub nodes_right: usize,
}

struct IntersectCtx<'a> {
    g1: &'a Sed,
    g2: &'a Sed,
    out: Vec<Node>,
    memo: HashMap<(NodeId, NodeId), NodeId>,
    calls: usize,
    depth_max: usize,
    budget0: usize,
}

impl<'a> IntersectCtx<'a> {
    fn new(g1: &'a Sed, g2: &'a Sed, budget: usize) -> IntersectCtx<'a> {
        IntersectCtx {
            g1,
            g2,
            out: Vec::new(),
            memo: HashMap::new(),
            calls: 0,
            depth_max: 0,
            budget0: budget,
        }
    }

    /// Intersection of the term sets of `a` (left input) and `b` (right
    /// input), as a node in the output SED. Total: when the budget runs out
    /// the node degrades to ⊥, keeping the variables but forgetting deeper
    /// structure — an under-approximation, never an over-approximation.
    fn intersect(&mut self, a: NodeId, b: NodeId, budget: usize) -> NodeId {
        if let Some(&hit) = self.memo.get(&(a, b)) {
            return hit;
        }
        self.calls += 1;
        self.depth_max = self.depth_max.max(self.budget0 - budget);
        let na = self.g1.node(a);
        let nb = self.g2.node(b);
        let vars = na.vars.intersection(&nb.vars).cloned().collect();
        let kind = if budget == 0 {
            NodeKind::Bottom
        } else {
            match (&na.kind, &nb.kind) {
                (NodeKind::Const(c1), NodeKind::Const(c2)) if c1 == c2 => {
                    NodeKind::Const(c1.clone())
                }
                (NodeKind::App(o1, l1, r1), NodeKind::App(o2, l2, r2)) if o1 == o2 => {
                    let (l1, r1, l2, r2) = (*l1, *r1, *l2, *r2);
                    let l = self.intersect(l1, l2, budget - 1);
                    let r = self.intersect(r1, r2, budget - 1);
                    NodeKind::App(*o1, l, r)
                }
                _ => NodeKind::Bottom,
            }
        };
        let id = NodeId(self.out.len());
        self.out.push(Node { vars, kind });
        self.memo.insert((a, b), id);
        id
    }

    fn finish(self) -> (Sed, JoinStats) {
        let stats = JoinStats {
            intersect_calls: self.calls,
            recursion_depth_max: self.depth_max,
            budget: self.budget0,
            nodes_left: self.g1.node_count(),
            nodes_right: self.g2.node_count(),
        };
        (Sed::from_parts(self.out), stats)
    }
}

/// Per-variable join: for each variable, intersect the two nodes it lives
/// on. Anonymous structure survives only while some variable-bearing node
/// reaches it.
pub fn join_original(g1: &Sed, g2: &Sed, budget: usize) -> (Sed, JoinStats) {
    debug_assert!(
        g1.variables().eq(g2.variables()),
        "joined states must cover the same variables"
    );
    let mut ctx = IntersectCtx::new(g1, g2, budget);
    for v in g1.variables() {
        let a = g1.node_of_var(v).expect("variable present on the left");
        let b = g2.node_of_var(v).expect("variable present on the right");
        ctx.intersect(a, b, budget);
    }
    let (joined, stats) = ctx.finish();
    (joined.dedup().prune_unnecessary(), stats)
}

/// All-pairs join: intersect every left node with every right node, then
/// drop nodes that represent no term. A variable's node in the result is the
/// intersection of its two input nodes, which the pair enumeration always
/// covers.
pub fn join_modified(g1: &Sed, g2: &Sed, budget: usize) -> (Sed, JoinStats) {
    debug_assert!(
        g1.variables().eq(g2.variables()),
        "joined states must cover the same variables"
    );
    let mut ctx = IntersectCtx::new(g1, g2, budget);
    for a in g1.node_ids() {
        for b in g2.node_ids() {
            ctx.intersect(a, b, budget);
        }
    }
    let (joined, stats) = ctx.finish();
    (joined.dedup().cleanup_unrepresented(), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{Program, Stmt};
    use crate::sed::SedBuilder;
    use crate::term::{Op, Term};
    use std::collections::BTreeSet;

    fn chain(vars: &[&str], stmts: &str) -> Sed {
        let program = Program::parse(stmts).unwrap();
        let mut g = Sed::initial(vars.iter().copied());
        for stmt in &program.stmts {
            let Stmt::Assign { var, rhs } = stmt else {
                panic!("only assignments expected in test chains");
            };
            g = g.transfer(var, rhs);
        }
        g
    }

    fn branch_states() -> (Sed, Sed) {
        let vars = ["c", "d", "x", "y", "z"];
        let g1 = chain(&vars, "x := 1; y := 2; z := x + y; z := 3; c := x + y;");
        let g2 = chain(&vars, "x := 1; y := 2; z := x + y; z := 4; d := x + y;");
        (g1, g2)
    }

    #[test]
    fn per_variable_join_loses_the_recomputed_expression() {
        let (g1, g2) = branch_states();
        let (joined, stats) = join_original(&g1, &g2, 10);
        joined.check_invariants().expect("join output valid");

        let mut b = SedBuilder::new();
        b.bottom(["c"]);
        b.bottom(["d"]);
        b.constant(["x"], 1);
        b.constant(["y"], 2);
        b.bottom(["z"]);
        assert!(joined.bisim_eq(&b.build()), "got:\n{}", joined.to_dot());

        let xy = Term::app(Op::Add, Term::var("x"), Term::var("y"));
        assert!(
            joined.rep_of(&xy).is_none(),
            "x+y is not represented after the per-variable join"
        );
        assert_eq!(stats.intersect_calls, 5, "one evaluation per variable");
    }

    #[test]
    fn all_pairs_join_recovers_the_anonymous_application() {
        let (g1, g2) = branch_states();
        let (joined, stats) = join_modified(&g1, &g2, 10);
        joined.check_invariants().expect("join output valid");

        let mut b = SedBuilder::new();
        let x1 = b.constant(["x"], 1);
        let y2 = b.constant(["y"], 2);
        b.app([], Op::Add, x1, y2);
        b.bottom(["c"]);
        b.bottom(["d"]);
        b.bottom(["z"]);
        assert!(joined.bisim_eq(&b.build()), "got:\n{}", joined.to_dot());

        let xy = Term::app(Op::Add, Term::var("x"), Term::var("y"));
        let consts = Term::app(Op::Add, Term::int(1), Term::int(2));
        assert!(joined.equiv(&xy, &consts, 1));
        let node = joined.rep_of(&xy).unwrap();
        let terms: BTreeSet<String> = joined
            .terms_of(node, 1)
            .into_iter()
            .map(|t| t.to_string())
            .collect();
        let expected: BTreeSet<String> = ["x+y", "x+2", "1+y", "1+2"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(terms, expected);

        assert_eq!(
            stats.intersect_calls, 25,
            "5 × 5 node pairs, each evaluated exactly once"
        );
        assert!(stats.recursion_depth_max <= stats.budget);
    }

    #[test]
    fn joining_a_state_with_itself_changes_nothing() {
        let (g1, _) = branch_states();
        let (orig, _) = join_original(&g1, &g1, 10);
        assert!(orig.bisim_eq(&g1));
        let (modi, _) = join_modified(&g1, &g1, 10);
        assert!(modi.bisim_eq(&g1), "got:\n{}", modi.to_dot());
    }

    #[test]
    fn shared_memo_collapses_copy_aliased_variables_into_one_call() {
        let g = chain(&["x", "y"], "x := 1; y := x;");
        let (joined, stats) = join_original(&g, &g, 10);
        assert_eq!(
            stats.intersect_calls, 1,
            "x and y share a node, so both roots hit the same pair"
        );
        assert_eq!(joined.node_count(), 1);
    }

    #[test]
    fn exhausted_budget_degrades_to_bottom_but_keeps_variables() {
        let g = chain(&["p", "q", "w"], "w := (p + q) + p;");

        let (full, _) = join_original(&g, &g, 10);
        assert!(full.bisim_eq(&g), "enough budget reproduces the input");

        // With budget 1 the root pair is intersected as an application, but
        // the anonymous inner pair is first reached with no budget left and
        // degrades to an empty ⊥.
        let (shallow, stats) = join_original(&g, &g, 1);
        let mut b = SedBuilder::new();
        let p = b.bottom(["p"]);
        b.bottom(["q"]);
        let inner = b.bottom([]);
        b.app(["w"], Op::Add, inner, p);
        assert!(shallow.bisim_eq(&b.build()), "got:\n{}", shallow.to_dot());
        assert_eq!(stats.recursion_depth_max, 1);
        let w_node = shallow.node_of_var("w").unwrap();
        assert_eq!(
            shallow.terms_of(w_node, 5).len(),
            1,
            "the cutoff leaves w representing only itself"
        );

        // The all-pairs join reaches child pairs from its own top-level loop
        // (node order is child-first) before any parent recurses into them,
        // so the same budget loses nothing there and recursion never misses.
        let (modified, stats2) = join_modified(&g, &g, 1);
        assert!(modified.bisim_eq(&g), "got:\n{}", modified.to_dot());
        assert_eq!(stats2.recursion_depth_max, 0);

        // Budget 0 flattens every root pair, constants included.
        let g2 = chain(&["p", "w"], "p := 1; w := p + p;");
        let (flat, _) = join_modified(&g2, &g2, 0);
        let mut b0 = SedBuilder::new();
        b0.bottom(["p"]);
        b0.bottom(["w"]);
        assert!(
            flat.bisim_eq(&b0.build()),
            "budget 0 flattens even constant pairs to ⊥: got\n{}",
            flat.to_dot()
        );
    }

    #[test]
    fn join_results_satisfy_the_term_intersection_contract() {
        let (g1, g2) = branch_states();
        for (joined, _) in [join_original(&g1, &g2, 10), join_modified(&g1, &g2, 10)] {
            for id in joined.node_ids() {
                let out = joined.terms_of(id, 3);
                for t in &out {
                    let in_g1 = g1.rep_of(t).is_some();
                    let in_g2 = g2.rep_of(t).is_some();
                    assert!(
                        in_g1 && in_g2,
                        "term {t} appears in the join but not in both inputs"
                    );
                }
            }
        }
    }
}
