//! Control-flow graph over basic blocks of assignments.
//!
//! Structured statements are lowered to explicit blocks and edges: an `if`
//! produces two branch blocks converging on a join block, and a `while`
//! produces an empty loop-head block with a back edge from the body. Every
//! position between consecutive assignments of a block is a program point; a
//! block with `n` assignments has `n + 1` points. The synthesized names
//! `__entry` and `__exit` always refer to the first point of the entry block
//! and the last point of the exit block, and source labels name the point at
//! their own position.

use crate::error::{Error, Result};
use crate::program::{Program, Stmt};
use crate::term::Term;
use std::collections::BTreeMap;

pub const ENTRY_POINT: &str = "__entry";
pub const EXIT_POINT: &str = "__exit";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(pub usize);

/// A program point: the position immediately before `stmts[index]` of the
/// block, or after the final assignment when `index == stmts.len()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub block: BlockId,
    pub index: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Block {
    /// Assignments `var := rhs`, in execution order.
    pub stmts: Vec<(String, Term)>,
    pub preds: Vec<BlockId>,
    pub succs: Vec<BlockId>,
}

#[derive(Debug, Clone)]
pub struct Cfg {
    pub blocks: Vec<Block>,
    pub entry: BlockId,
    pub exit: BlockId,
    named_points: BTreeMap<String, Point>,
}

impl Cfg {
    pub fn from_program(program: &Program) -> Cfg {
        let mut builder = Builder {
            blocks: vec![Block::default()],
            named_points: BTreeMap::new(),
        };
        let entry = BlockId(0);
        let exit = builder.lower(entry, &program.stmts);
        builder
            .named_points
            .insert(ENTRY_POINT.to_string(), Point { block: entry, index: 0 });
        builder.named_points.insert(
            EXIT_POINT.to_string(),
            Point {
                block: exit,
                index: builder.blocks[exit.0].stmts.len(),
            },
        );
        Cfg {
            blocks: builder.blocks,
            entry,
            exit,
            named_points: builder.named_points,
        }
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.0]
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Human-readable location, using a source label when one names the
    /// point exactly.
    pub fn describe_point(&self, point: Point) -> String {
        for (name, p) in &self.named_points {
            if *p == point {
                return name.clone();
            }
        }
        format!("block {}, index {}", point.block.0, point.index)
    }

    /// Looks up a point by label (or by `__entry` / `__exit`).
    pub fn point(&self, name: &str) -> Result<Point> {
        self.named_points
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    /// All named points, `__entry` and `__exit` included.
    pub fn named_points(&self) -> impl Iterator<Item = (&str, Point)> {
        self.named_points.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Every program point, grouped by block in reverse postorder.
    pub fn all_points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for &block in &self.reverse_postorder() {
            for index in 0..=self.blocks[block.0].stmts.len() {
                out.push(Point { block, index });
            }
        }
        out
    }

    /// Total number of program points across all blocks.
    pub fn total_points(&self) -> usize {
        self.blocks.iter().map(|b| b.stmts.len() + 1).sum()
    }

    /// Reverse postorder over successor edges from the entry block. Every
    /// block is reachable by construction, so this covers the whole graph.
    pub fn reverse_postorder(&self) -> Vec<BlockId> {
        let mut visited = vec![false; self.blocks.len()];
        let mut postorder = Vec::with_capacity(self.blocks.len());
        // Iterative DFS; the second stack entry tracks the next successor.
        let mut stack = vec![(self.entry, 0usize)];
        visited[self.entry.0] = true;
        while let Some(&mut (block, ref mut next)) = stack.last_mut() {
            let succs = &self.blocks[block.0].succs;
            if *next < succs.len() {
                let succ = succs[*next];
                *next += 1;
                if !visited[succ.0] {
                    visited[succ.0] = true;
                    stack.push((succ, 0));
                }
            } else {
                postorder.push(block);
                stack.pop();
            }
        }
        postorder.reverse();
        postorder
    }
}

struct Builder {
    blocks: Vec<Block>,
    named_points: BTreeMap<String, Point>,
}

impl Builder {
    fn new_block(&mut self) -> BlockId {
        self.blocks.push(Block::default());
        BlockId(self.blocks.len() - 1)
    }

    fn add_edge(&mut self, from: BlockId, to: BlockId) {
        self.blocks[from.0].succs.push(to);
        self.blocks[to.0].preds.push(from);
    }

    /// Lowers `stmts` starting inside `current`; returns the block that
    /// control ends in.
    fn lower(&mut self, mut current: BlockId, stmts: &[Stmt]) -> BlockId {
        for stmt in stmts {
            match stmt {
                Stmt::Assign { var, rhs } => {
                    self.blocks[current.0].stmts.push((var.clone(), rhs.clone()));
                }
                Stmt::Label(name) => {
                    let point = Point {
                        block: current,
                        index: self.blocks[current.0].stmts.len(),
                    };
                    self.named_points.insert(name.clone(), point);
                }
                Stmt::If {
                    then_branch,
                    else_branch,
                } => {
                    let then_entry = self.new_block();
                    let else_entry = self.new_block();
                    self.add_edge(current, then_entry);
                    self.add_edge(current, else_entry);
                    let then_exit = self.lower(then_entry, then_branch);
                    let else_exit = self.lower(else_entry, else_branch);
                    let join = self.new_block();
                    self.add_edge(then_exit, join);
                    self.add_edge(else_exit, join);
                    current = join;
                }
                Stmt::While { body } => {
                    let head = self.new_block();
                    self.add_edge(current, head);
                    let body_entry = self.new_block();
                    self.add_edge(head, body_entry);
                    let body_exit = self.lower(body_entry, body);
                    self.add_edge(body_exit, head);
                    let after = self.new_block();
                    self.add_edge(head, after);
                    current = after;
                }
            }
        }
        current
    }
}
