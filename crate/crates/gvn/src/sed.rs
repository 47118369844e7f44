//! Strong Equivalence DAGs: each node carries a set of variables and a type
//! (⊥ for "unknown value", a constant, or an operator over two child nodes),
//! and represents the set of terms built from its variables and type
//! structure. Two terms are equivalent exactly when one node represents
//! both — the DAG speaks only for values the program has computed, so a term
//! no node represents is equivalent to nothing (see [`Sed::equiv`]).
//!
//! Deduplication invariant: no two distinct Const or App nodes are congruent
//! (same constructor over the same children / the same constant value). ⊥
//! nodes are exempt — each stands for a separate unknown value, so several
//! anonymous ⊥ nodes may coexist.
//!
//! The node list is kept in child-before-parent order, which makes
//! bottom-up passes (term enumeration, interning, liveness) single sweeps.

use crate::term::{Op, Term};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Bottom,
    Const(BigInt),
    App(Op, NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub vars: BTreeSet<String>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone)]
pub struct Sed {
    nodes: Vec<Node>,
    var_node: BTreeMap<String, NodeId>,
}

impl Sed {
    /// Entry state: one ⊥ node per variable — every variable holds a distinct
    /// unknown value.
    pub fn initial<I, S>(vars: I) -> Sed
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut sed = Sed {
            nodes: Vec::new(),
            var_node: BTreeMap::new(),
        };
        for v in vars {
            let v = v.into();
            let id = NodeId(sed.nodes.len());
            sed.nodes.push(Node {
                vars: BTreeSet::from([v.clone()]),
                kind: NodeKind::Bottom,
            });
            sed.var_node.insert(v, id);
        }
        sed
    }

    /// Assembles a SED from raw nodes (child-before-parent order required);
    /// the variable index is derived.
    pub(crate) fn from_parts(nodes: Vec<Node>) -> Sed {
        let mut var_node = BTreeMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if let NodeKind::App(_, l, r) = node.kind {
                debug_assert!(l.0 < i && r.0 < i, "children must precede parents");
            }
            for v in &node.vars {
                let prev = var_node.insert(v.clone(), NodeId(i));
                debug_assert!(prev.is_none(), "variable {v} appears on two nodes");
            }
        }
        Sed { nodes, var_node }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.var_node.keys().map(|s| s.as_str())
    }

    pub fn node_of_var(&self, var: &str) -> Option<NodeId> {
        self.var_node.get(var).copied()
    }

    fn find_const(&self, value: &BigInt) -> Option<NodeId> {
        self.node_ids()
            .find(|&id| matches!(&self.nodes[id.0].kind, NodeKind::Const(c) if c == value))
    }

    fn find_app(&self, op: Op, l: NodeId, r: NodeId) -> Option<NodeId> {
        self.node_ids().find(
            |&id| matches!(self.nodes[id.0].kind, NodeKind::App(o, a, b) if o == op && a == l && b == r),
        )
    }

    fn push_node(&mut self, node: Node) -> NodeId {
        let id = NodeId(self.nodes.len());
        for v in &node.vars {
            self.var_node.insert(v.clone(), id);
        }
        self.nodes.push(node);
        id
    }

    /// Returns the node representing `term`, creating anonymous Const/App
    /// nodes for structure the SED does not have yet. Variables must already
    /// be present.
    fn materialize(&mut self, term: &Term) -> NodeId {
        match term {
            Term::Var(v) => self
                .node_of_var(v)
                .unwrap_or_else(|| panic!("variable {v} is not in the SED")),
            Term::Const(c) => self.find_const(c).unwrap_or_else(|| {
                self.push_node(Node {
                    vars: BTreeSet::new(),
                    kind: NodeKind::Const(c.clone()),
                })
            }),
            Term::App(op, l, r) => {
                let ln = self.materialize(l);
                let rn = self.materialize(r);
                self.find_app(*op, ln, rn).unwrap_or_else(|| {
                    self.push_node(Node {
                        vars: BTreeSet::new(),
                        kind: NodeKind::App(*op, ln, rn),
                    })
                })
            }
        }
    }

    /// Transfer function for `target := rhs`: the right-hand side is
    /// materialized against the incoming state (so occurrences of `target`
    /// mean its old value), then the target variable moves onto the rhs node.
    /// The old node is retained — it may still describe other variables or
    /// serve as a child — unless it is an unreferenced anonymous ⊥, which
    /// represents nothing.
    pub fn transfer(&self, target: &str, rhs: &Term) -> Sed {
        let mut g = self.clone();
        let rhs_node = g.materialize(rhs);
        let old = g
            .node_of_var(target)
            .unwrap_or_else(|| panic!("variable {target} is not in the SED"));
        if old != rhs_node {
            g.nodes[old.0].vars.remove(target);
            g.nodes[rhs_node.0].vars.insert(target.to_string());
            g.var_node.insert(target.to_string(), rhs_node);
        }
        g.drop_dead_bottoms();
        g
    }

    /// Removes anonymous ⊥ nodes that no node references.
    fn drop_dead_bottoms(&mut self) {
        let mut referenced = vec![false; self.nodes.len()];
        for node in &self.nodes {
            if let NodeKind::App(_, l, r) = node.kind {
                referenced[l.0] = true;
                referenced[r.0] = true;
            }
        }
        let keep: Vec<bool> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                referenced[i] || !n.vars.is_empty() || !matches!(n.kind, NodeKind::Bottom)
            })
            .collect();
        *self = self.retain(&keep);
    }

    /// Rebuilds the SED keeping exactly the flagged nodes. Callers must flag
    /// the children of every kept node.
    fn retain(&self, keep: &[bool]) -> Sed {
        let mut remap: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            let kind = match &node.kind {
                NodeKind::App(op, l, r) => NodeKind::App(
                    *op,
                    remap[l.0].expect("kept node depends on a dropped child"),
                    remap[r.0].expect("kept node depends on a dropped child"),
                ),
                other => other.clone(),
            };
            remap[i] = Some(NodeId(nodes.len()));
            nodes.push(Node {
                vars: node.vars.clone(),
                kind,
            });
        }
        Sed::from_parts(nodes)
    }

    fn reachable_from(&self, seeds: impl Iterator<Item = NodeId>) -> Vec<bool> {
        let mut keep = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = seeds.collect();
        while let Some(id) = stack.pop() {
            if keep[id.0] {
                continue;
            }
            keep[id.0] = true;
            if let NodeKind::App(_, l, r) = self.nodes[id.0].kind {
                stack.push(l);
                stack.push(r);
            }
        }
        keep
    }

    /// The original pipeline's pruning step: keep exactly the nodes reachable
    /// from some variable-bearing node. Equivalently, anonymous nodes with no
    /// (transitive) variable-bearing ancestor are dropped, innermost-last.
    pub fn prune_unnecessary(&self) -> Sed {
        let seeds = self
            .node_ids()
            .filter(|&id| !self.nodes[id.0].vars.is_empty());
        let keep = self.reachable_from(seeds);
        self.retain(&keep)
    }

    /// Per-node flag: does the node represent at least one term (of any
    /// size)? ⊥ contributes only its variables; a constant always represents
    /// itself; an application needs both children inhabited.
    pub fn has_terms(&self) -> Vec<bool> {
        let mut flags = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            flags[i] = !node.vars.is_empty()
                || match node.kind {
                    NodeKind::Bottom => false,
                    NodeKind::Const(_) => true,
                    NodeKind::App(_, l, r) => flags[l.0] && flags[r.0],
                };
        }
        flags
    }

    /// The modified pipeline's cleanup: keep exactly the nodes that represent
    /// at least one term, collapsing structure that contributes nothing.
    ///
    /// An application over a termless child represents only its own
    /// variables, so it is rewritten to ⊥ (and the termless child, now
    /// unreferenced, is dropped). This loses no information, now or later: a
    /// node without terms can never regain them — `materialize` only ever
    /// finds or creates nodes that represent the term being materialized, and
    /// intersection never produces a term both inputs lacked. Without the
    /// collapse, self-referential assignments such as `a := a + a` would pile
    /// up old-value applications over termless ⊥ children, growing the SED
    /// (and the cost of every later join) linearly with the number of
    /// assignments instead of with the number of distinct expressions.
    pub fn cleanup_unrepresented(&self) -> Sed {
        let flags = self.has_terms();
        let mut collapsed = self.clone();
        for (i, node) in collapsed.nodes.iter_mut().enumerate() {
            if let NodeKind::App(_, l, r) = node.kind {
                if flags[i] && !(flags[l.0] && flags[r.0]) {
                    node.kind = NodeKind::Bottom;
                }
            }
        }
        collapsed.retain(&flags)
    }

    /// Merges congruent Const/App nodes (unioning their variable sets) until
    /// the deduplication invariant holds. ⊥ nodes are never merged.
    pub fn dedup(&self) -> Sed {
        let mut remap: Vec<NodeId> = Vec::with_capacity(self.nodes.len());
        let mut nodes: Vec<Node> = Vec::new();
        let mut seen: HashMap<(u8, Option<BigInt>, Option<(Op, NodeId, NodeId)>), NodeId> =
            HashMap::new();
        for node in &self.nodes {
            let kind = match &node.kind {
                NodeKind::App(op, l, r) => NodeKind::App(*op, remap[l.0], remap[r.0]),
                other => other.clone(),
            };
            let key = match &kind {
                NodeKind::Bottom => None,
                NodeKind::Const(c) => Some((1u8, Some(c.clone()), None)),
                NodeKind::App(op, l, r) => Some((2u8, None, Some((*op, *l, *r)))),
            };
            let target = key.and_then(|k| seen.get(&k).copied());
            match target {
                Some(existing) => {
                    let vars = node.vars.clone();
                    nodes[existing.0].vars.extend(vars);
                    remap.push(existing);
                }
                None => {
                    let id = NodeId(nodes.len());
                    if let NodeKind::Const(c) = &kind {
                        seen.insert((1u8, Some(c.clone()), None), id);
                    } else if let NodeKind::App(op, l, r) = kind {
                        seen.insert((2u8, None, Some((op, l, r))), id);
                    }
                    nodes.push(Node {
                        vars: node.vars.clone(),
                        kind,
                    });
                    remap.push(id);
                }
            }
        }
        Sed::from_parts(nodes)
    }

    /// All terms of size ≤ `max_size` the node represents.
    pub fn terms_of(&self, id: NodeId, max_size: usize) -> BTreeSet<Term> {
        let mut memo = HashMap::new();
        self.terms_rec(id, max_size, &mut memo)
    }

    fn terms_rec(
        &self,
        id: NodeId,
        budget: usize,
        memo: &mut HashMap<(NodeId, usize), BTreeSet<Term>>,
    ) -> BTreeSet<Term> {
        if let Some(hit) = memo.get(&(id, budget)) {
            return hit.clone();
        }
        let node = &self.nodes[id.0];
        let mut terms: BTreeSet<Term> = node.vars.iter().map(Term::var).collect();
        match &node.kind {
            NodeKind::Bottom => {}
            NodeKind::Const(c) => {
                terms.insert(Term::Const(c.clone()));
            }
            NodeKind::App(op, l, r) => {
                if budget >= 1 {
                    let left = self.terms_rec(*l, budget - 1, memo);
                    for lt in &left {
                        let remaining = budget - 1 - lt.size();
                        for rt in self.terms_rec(*r, remaining, memo) {
                            terms.insert(Term::app(*op, lt.clone(), rt));
                        }
                    }
                }
            }
        }
        memo.insert((id, budget), terms.clone());
        terms
    }

    /// Per-node represented-term classes (size-bounded), skipping nodes that
    /// represent nothing.
    pub fn term_classes(&self, max_size: usize) -> Vec<BTreeSet<Term>> {
        self.node_ids()
            .map(|id| self.terms_of(id, max_size))
            .filter(|c| !c.is_empty())
            .collect()
    }

    /// The unique node representing `term`, if any. Relies on the
    /// deduplication invariant: in a deduplicated SED a term has at most one
    /// representing node, found by structural descent.
    pub fn rep_of(&self, term: &Term) -> Option<NodeId> {
        match term {
            Term::Var(v) => self.node_of_var(v),
            Term::Const(c) => self.find_const(c),
            Term::App(op, l, r) => {
                let ln = self.rep_of(l)?;
                let rn = self.rep_of(r)?;
                self.find_app(*op, ln, rn)
            }
        }
    }

    /// Whether some single node represents both terms (each within the size
    /// bound). A term the SED does not represent is equivalent to nothing —
    /// not even itself: the DAG records which values the program has
    /// computed, and an absent term is an uncomputed one.
    pub fn equiv(&self, t1: &Term, t2: &Term, max_size: usize) -> bool {
        if t1.size() > max_size || t2.size() > max_size {
            return false;
        }
        match (self.rep_of(t1), self.rep_of(t2)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// Export/rendering order: by (sorted variable list, type string), with
    /// creation order breaking ties among anonymous same-type nodes.
    pub fn export_order(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self.node_ids().collect();
        ids.sort_by(|&a, &b| {
            let na = &self.nodes[a.0];
            let nb = &self.nodes[b.0];
            na.vars
                .cmp(&nb.vars)
                .then_with(|| type_string(&na.kind).cmp(&type_string(&nb.kind)))
                .then_with(|| a.cmp(&b))
        });
        ids
    }

    /// `⟨x,y | +⟩`-style label for one node.
    pub fn node_label(&self, id: NodeId) -> String {
        let node = &self.nodes[id.0];
        let vars: Vec<&str> = node.vars.iter().map(|s| s.as_str()).collect();
        format!("⟨{} | {}⟩", vars.join(","), type_string(&node.kind))
    }

    /// Deterministic DOT rendering, one record per node, child edges labeled
    /// L and R.
    pub fn to_dot(&self) -> String {
        let order = self.export_order();
        let position: HashMap<NodeId, usize> = order
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        let mut out = String::from("digraph sed {\n");
        for (i, &id) in order.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", self.node_label(id));
        }
        for (i, &id) in order.iter().enumerate() {
            if let NodeKind::App(_, l, r) = self.nodes[id.0].kind {
                let _ = writeln!(out, "  n{i} -> n{} [label=\"L\"];", position[&l]);
                let _ = writeln!(out, "  n{i} -> n{} [label=\"R\"];", position[&r]);
            }
        }
        out.push_str("}\n");
        out
    }

    /// Structural equality up to node identity and sharing: two SEDs are
    /// equal when they have the same multiset of nodes compared by variable
    /// set, type, and (recursively) children. This is the state-equality
    /// notion used by the fixpoint engine and the golden isomorphism checks.
    pub fn bisim_eq(&self, other: &Sed) -> bool {
        let mut interner: HashMap<(BTreeSet<String>, u8, Option<BigInt>, Option<(Op, usize, usize)>), usize> =
            HashMap::new();
        let mut sig = |sed: &Sed| -> Vec<usize> {
            let mut ids: Vec<usize> = Vec::with_capacity(sed.nodes.len());
            for node in &sed.nodes {
                let key = match &node.kind {
                    NodeKind::Bottom => (node.vars.clone(), 0u8, None, None),
                    NodeKind::Const(c) => (node.vars.clone(), 1u8, Some(c.clone()), None),
                    NodeKind::App(op, l, r) => (
                        node.vars.clone(),
                        2u8,
                        None,
                        Some((*op, ids[l.0], ids[r.0])),
                    ),
                };
                let next = interner.len();
                ids.push(*interner.entry(key).or_insert(next));
            }
            ids.sort_unstable();
            ids
        };
        sig(self) == sig(other)
    }

    /// Test- and diagnostics-only validity check.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, node) in self.nodes.iter().enumerate() {
            if let NodeKind::App(_, l, r) = node.kind {
                if l.0 >= i || r.0 >= i {
                    return Err(format!("node {i} references a non-preceding child"));
                }
            }
            for v in &node.vars {
                if self.var_node.get(v) != Some(&NodeId(i)) {
                    return Err(format!("variable index out of sync for {v}"));
                }
            }
        }
        for (v, id) in &self.var_node {
            if !self.nodes[id.0].vars.contains(v) {
                return Err(format!("variable {v} missing from its node"));
            }
        }
        for a in self.node_ids() {
            for b in self.node_ids().filter(|&b| b > a) {
                let congruent = match (&self.nodes[a.0].kind, &self.nodes[b.0].kind) {
                    (NodeKind::Const(c1), NodeKind::Const(c2)) => c1 == c2,
                    (NodeKind::App(o1, l1, r1), NodeKind::App(o2, l2, r2)) => {
                        o1 == o2 && l1 == l2 && r1 == r2
                    }
                    _ => false,
                };
                if congruent {
                    return Err(format!(
                        "nodes {} and {} are congruent duplicates",
                        a.0, b.0
                    ));
                }
            }
        }
        Ok(())
    }
}

pub fn type_string(kind: &NodeKind) -> String {
    match kind {
        NodeKind::Bottom => "⊥".to_string(),
        NodeKind::Const(c) => c.to_string(),
        NodeKind::App(op, _, _) => op.symbol().to_string(),
    }
}

/// Builds literal SEDs node by node, for tests and fixtures.
pub struct SedBuilder {
    nodes: Vec<Node>,
}

impl SedBuilder {
    #[allow(clippy::new_without_default)]
    pub fn new() -> SedBuilder {
        SedBuilder { nodes: Vec::new() }
    }

    fn add<const N: usize>(&mut self, vars: [&str; N], kind: NodeKind) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            kind,
        });
        id
    }

    pub fn bottom<const N: usize>(&mut self, vars: [&str; N]) -> NodeId {
        self.add(vars, NodeKind::Bottom)
    }

    pub fn constant<const N: usize>(&mut self, vars: [&str; N], value: i64) -> NodeId {
        self.add(vars, NodeKind::Const(BigInt::from(value)))
    }

    pub fn app<const N: usize>(
        &mut self,
        vars: [&str; N],
        op: Op,
        left: NodeId,
        right: NodeId,
    ) -> NodeId {
        self.add(vars, NodeKind::App(op, left, right))
    }

    pub fn build(self) -> Sed {
        let sed = Sed::from_parts(self.nodes);
        if let Err(msg) = sed.check_invariants() {
            panic!("builder produced an invalid SED: {msg}");
        }
        sed
    }
}
