//! The bounded term universe: every term of size at most `bound` built from a
//! program's variables, constants, and operators.
//!
//! The universe is what makes partition-based value numbering executable: it
//! finitizes the otherwise infinite space of expressions. Counting is
//! analytic, so oversized universes are rejected before any enumeration work
//! happens.

use crate::error::{Error, Result};
use crate::program::Program;
use crate::term::{Op, Term};
use num_bigint::BigInt;
use std::collections::BTreeSet;

/// Default ceiling on the number of terms [`Universe::enumerate`] will
/// materialize.
pub const DEFAULT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    pub vars: BTreeSet<String>,
    pub consts: BTreeSet<BigInt>,
    pub ops: BTreeSet<Op>,
    /// Maximum term size (number of operator applications).
    pub bound: usize,
}

impl Universe {
    pub fn new(
        vars: impl IntoIterator<Item = String>,
        consts: impl IntoIterator<Item = BigInt>,
        ops: impl IntoIterator<Item = Op>,
        bound: usize,
    ) -> Universe {
        Universe {
            vars: vars.into_iter().collect(),
            consts: consts.into_iter().collect(),
            ops: ops.into_iter().collect(),
            bound,
        }
    }

    /// Universe of a program: its variables, constants, and operators, with
    /// the bound defaulting to the largest right-hand-side size (at least 1).
    pub fn from_program(program: &Program, bound: Option<usize>) -> Universe {
        Universe {
            vars: program.variables(),
            consts: program.constants(),
            ops: program.operators(),
            bound: bound.unwrap_or_else(|| program.max_rhs_size().max(1)),
        }
    }

    pub fn contains(&self, term: &Term) -> bool {
        term.size() <= self.bound
            && term.vars().iter().all(|v| self.vars.contains(v))
            && term.constants().iter().all(|c| self.consts.contains(c))
            && term.operators().iter().all(|op| self.ops.contains(op))
    }

    /// Number of terms of each size 0..=bound, saturating at `u128::MAX`.
    fn counts_by_size(&self) -> Vec<u128> {
        let mut counts = Vec::with_capacity(self.bound + 1);
        counts.push((self.vars.len() + self.consts.len()) as u128);
        for size in 1..=self.bound {
            // A term of size s splits the remaining s-1 applications between
            // its two children in every possible way.
            let mut total: u128 = 0;
            for left in 0..size {
                let right = size - 1 - left;
                total = total.saturating_add(counts[left].saturating_mul(counts[right]));
            }
            counts.push(total.saturating_mul(self.ops.len() as u128));
        }
        counts
    }

    /// Total number of terms in the universe, saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        self.counts_by_size()
            .iter()
            .fold(0u128, |acc, &n| acc.saturating_add(n))
    }

    /// Enumerates the whole universe in canonical term order (size first,
    /// then structural order), or fails if it exceeds `cap` terms.
    pub fn enumerate_capped(&self, cap: u128) -> Result<Vec<Term>> {
        let count = self.count();
        if count > cap {
            return Err(Error::UniverseTooLarge {
                count,
                bound: self.bound,
                cap,
            });
        }
        let mut by_size: Vec<Vec<Term>> = Vec::with_capacity(self.bound + 1);
        let mut atoms: Vec<Term> = self.vars.iter().map(Term::var).collect();
        atoms.extend(self.consts.iter().cloned().map(Term::Const));
        by_size.push(atoms);
        for size in 1..=self.bound {
            let mut level = Vec::new();
            for op in &self.ops {
                for left_size in 0..size {
                    let right_size = size - 1 - left_size;
                    for left in &by_size[left_size] {
                        for right in &by_size[right_size] {
                            level.push(Term::app(*op, left.clone(), right.clone()));
                        }
                    }
                }
            }
            by_size.push(level);
        }
        let mut all: Vec<Term> = by_size.into_iter().flatten().collect();
        all.sort();
        Ok(all)
    }

    pub fn enumerate(&self) -> Result<Vec<Term>> {
        self.enumerate_capped(DEFAULT_CAP)
    }
}
