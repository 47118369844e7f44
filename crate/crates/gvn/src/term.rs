//! Terms of the analyzed language: variables, integer constants, and binary
//! applications of uninterpreted operators.
//!
//! Operators are pure constructors. `1 + 2` is *not* the same term as `3`,
//! and `x + y` is *not* the same term as `y + x`; no arithmetic identity is
//! ever applied. Equality of terms is purely structural.

use num_bigint::BigInt;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// A binary operator symbol. All four are uninterpreted: they build syntax
/// trees and are never evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }

    pub fn from_symbol(c: char) -> Option<Op> {
        match c {
            '+' => Some(Op::Add),
            '-' => Some(Op::Sub),
            '*' => Some(Op::Mul),
            '/' => Some(Op::Div),
            _ => None,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A term over program symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(BigInt),
    App(Op, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn int(value: i64) -> Term {
        Term::Const(BigInt::from(value))
    }

    pub fn app(op: Op, left: Term, right: Term) -> Term {
        Term::App(op, Box::new(left), Box::new(right))
    }

    /// Term size: the number of operator applications. Atoms have size 0.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Const(_) => false,
            Term::App(_, l, r) => l.contains_var(name) || r.contains_var(name),
        }
    }

    /// Collects variable names occurring in the term.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Collects constants occurring in the term.
    pub fn constants(&self) -> BTreeSet<BigInt> {
        let mut out = BTreeSet::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut BTreeSet<BigInt>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::App(_, l, r) => {
                l.collect_constants(out);
                r.collect_constants(out);
            }
        }
    }

    /// Collects operators occurring in the term.
    pub fn operators(&self) -> BTreeSet<Op> {
        let mut out = BTreeSet::new();
        self.collect_operators(&mut out);
        out
    }

    fn collect_operators(&self, out: &mut BTreeSet<Op>) {
        if let Term::App(op, l, r) = self {
            out.insert(*op);
            l.collect_operators(out);
            r.collect_operators(out);
        }
    }

    /// All subterms including the term itself (set semantics: repeated
    /// occurrences collapse).
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        out.insert(self.clone());
        if let Term::App(_, l, r) = self {
            l.collect_subterms(out);
            r.collect_subterms(out);
        }
    }

    /// Number of subterm occurrences, counting repetitions. An atom counts 1;
    /// `(a+b)+a` counts 5.
    pub fn occurrence_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, l, r) => 1 + l.occurrence_count() + r.occurrence_count(),
        }
    }

    /// Comparison among same-size terms: variables before constants before
    /// applications; variables by name, constants by value, applications by
    /// (operator, left, right).
    fn structural_cmp(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::Var(_), _) => Ordering::Less,
            (_, Term::Var(_)) => Ordering::Greater,
            (Term::Const(a), Term::Const(b)) => a.cmp(b),
            (Term::Const(_), _) => Ordering::Less,
            (_, Term::Const(_)) => Ordering::Greater,
            (Term::App(o1, l1, r1), Term::App(o2, l2, r2)) => o1
                .cmp(o2)
                .then_with(|| l1.cmp(l2))
                .then_with(|| r1.cmp(r2)),
        }
    }
}

/// Canonical term order: by size first, then structurally. This is the order
/// used for universe enumeration and for all deterministic renderings.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.structural_cmp(other))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Renders with the minimal parentheses needed to re-parse identically under
/// the left-associative single-precedence grammar: the right operand of an
/// application is parenthesized when it is itself an application.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(op, l, r) => {
                write!(f, "{l}{op}")?;
                if r.is_app() {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

impl Term {
    fn is_app(&self) -> bool {
        matches!(self, Term::App(..))
    }
}
