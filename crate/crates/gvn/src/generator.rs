//! Seeded random program generator for differential testing.
//!
//! Programs are built directly as ASTs, so they are valid by construction,
//! and the same seed and shape always produce the same program. Right-hand
//! sides are drawn from a growing pool and frequently reused — recomputing
//! an earlier expression (often for a different target, on a different
//! branch) is exactly the pattern on which the analyses disagree, so plain
//! uniform expression sampling would make differences rare.

use crate::program::{Program, Stmt};
use crate::term::{Op, Term};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Shape limits for generated programs.
#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Number of distinct variables (capped at 10).
    pub max_vars: usize,
    /// Total assignments, across all nesting levels.
    pub max_stmts: usize,
    /// Total `if`/`while` constructs.
    pub max_joins: usize,
    /// Whether `while` loops may appear at all.
    pub allow_loops: bool,
    /// Maximum operator count in one right-hand side.
    pub max_rhs_size: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            max_vars: 5,
            max_stmts: 12,
            max_joins: 2,
            allow_loops: true,
            max_rhs_size: 2,
        }
    }
}

const VAR_NAMES: [&str; 10] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];
const CONSTS: [i64; 4] = [0, 1, 2, 3];
const OPS: [Op; 2] = [Op::Add, Op::Mul];

pub fn generate(seed: u64, config: &GenConfig) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let var_count = rng.gen_range(1..=config.max_vars.clamp(1, VAR_NAMES.len()));
    let mut gen = Gen {
        vars: VAR_NAMES[..var_count].to_vec(),
        pool: Vec::new(),
        stmts_left: config.max_stmts.max(1),
        joins_left: config.max_joins,
        config: config.clone(),
        rng,
    };
    let mut stmts = gen.block(0);
    // `assign` is the only consumer of the statement budget, so an untouched
    // budget means the program has no assignment anywhere — give it one.
    if gen.stmts_left == config.max_stmts.max(1) {
        stmts.push(gen.assign());
    }
    Program { stmts }
}

struct Gen {
    vars: Vec<&'static str>,
    /// Previously emitted right-hand sides, available for reuse.
    pool: Vec<Term>,
    stmts_left: usize,
    joins_left: usize,
    config: GenConfig,
    rng: ChaCha8Rng,
}

impl Gen {
    fn block(&mut self, depth: usize) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        // Geometric block length, biased longer at the top level.
        let continue_prob = if depth == 0 { 0.9 } else { 0.6 };
        loop {
            if self.stmts_left == 0 || !self.rng.gen_bool(continue_prob) {
                break;
            }
            stmts.push(self.item(depth));
        }
        stmts
    }

    fn item(&mut self, depth: usize) -> Stmt {
        let can_nest = self.joins_left > 0 && depth < 2 && self.stmts_left >= 2;
        if can_nest && self.rng.gen_bool(0.25) {
            self.joins_left -= 1;
            if self.config.allow_loops && self.rng.gen_bool(0.4) {
                return Stmt::While {
                    body: self.block(depth + 1),
                };
            }
            return Stmt::If {
                then_branch: self.block(depth + 1),
                else_branch: self.block(depth + 1),
            };
        }
        self.assign()
    }

    fn assign(&mut self) -> Stmt {
        self.stmts_left -= 1;
        let var = self.vars.choose(&mut self.rng).unwrap().to_string();
        // Reuse an earlier expression more often than not: recomputation is
        // what differentiates the analyses.
        let rhs = if !self.pool.is_empty() && self.rng.gen_bool(0.5) {
            self.pool.choose(&mut self.rng).unwrap().clone()
        } else {
            let size = self.rng.gen_range(0..=self.config.max_rhs_size);
            let rhs = self.expr(size);
            self.pool.push(rhs.clone());
            rhs
        };
        Stmt::Assign { var, rhs }
    }

    /// A random expression with exactly `size` operator applications.
    fn expr(&mut self, size: usize) -> Term {
        if size == 0 {
            return if self.rng.gen_bool(0.6) {
                Term::var(*self.vars.choose(&mut self.rng).unwrap())
            } else {
                Term::int(*CONSTS.choose(&mut self.rng).unwrap())
            };
        }
        let left_size = self.rng.gen_range(0..size);
        let op = *OPS.choose(&mut self.rng).unwrap();
        Term::app(op, self.expr(left_size), self.expr(size - 1 - left_size))
    }
}
