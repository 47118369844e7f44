//! Worklist fixpoint engine over the CFG, generic in the abstract state.
//!
//! Blocks are processed in reverse-postorder priority (or a seeded
//! permutation, for order-independence testing). A block visited before all
//! of its predecessors have states joins only the states that exist —
//! optimistic first visits — and is revisited when the missing predecessors
//! produce output. Visits are capped so a non-converging analysis reports
//! divergence instead of spinning.

use crate::cfg::{BlockId, Cfg, Point};
use crate::error::{Error, Result};
use crate::term::Term;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashSet};

/// Hard cap on block visits before the engine reports divergence.
pub const MAX_VISITS: usize = 10_000;

/// One dataflow analysis: state type plus the lattice-ish operations the
/// engine needs. Methods take `&mut self` so implementations can memoize and
/// collect instrumentation across calls.
pub trait Analysis {
    type State: Clone;

    /// State on entry to the program.
    fn initial(&mut self) -> Self::State;

    /// State after `target := rhs`.
    fn transfer(&mut self, state: &Self::State, target: &str, rhs: &Term) -> Self::State;

    /// Merge of two incoming states at a join point.
    fn join(&mut self, left: &Self::State, right: &Self::State) -> Self::State;

    /// Convergence check.
    fn equal(&mut self, left: &Self::State, right: &Self::State) -> bool;

    /// Diagnostics produced since the last drain, without location context
    /// (the engine adds it).
    fn drain_warnings(&mut self) -> Vec<String> {
        Vec::new()
    }
}

/// How the worklist orders blocks of equal urgency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Reverse postorder: predecessors generally first; loop-free programs
    /// visit each block exactly once.
    Rpo,
    /// A seeded random permutation. The fixpoint must not depend on it.
    Seeded(u64),
}

#[derive(Debug, Clone)]
pub struct FixpointResult<S> {
    /// Per-block state at block entry.
    pub entry: Vec<S>,
    /// Per-block state after the last statement.
    pub out: Vec<S>,
    /// Total block visits performed.
    pub iterations: usize,
    /// Deduplicated, location-tagged diagnostics.
    pub warnings: Vec<String>,
}

pub fn run_fixpoint<A: Analysis>(
    cfg: &Cfg,
    analysis: &mut A,
    tie_break: TieBreak,
) -> Result<FixpointResult<A::State>> {
    let n = cfg.block_count();
    let priority = block_priorities(cfg, tie_break);

    let mut entry: Vec<Option<A::State>> = vec![None; n];
    let mut out: Vec<Option<A::State>> = vec![None; n];
    let mut warnings: BTreeSet<String> = BTreeSet::new();
    let mut worklist: BTreeSet<(usize, BlockId)> = BTreeSet::new();
    let mut queued: HashSet<BlockId> = HashSet::new();

    let push = |worklist: &mut BTreeSet<(usize, BlockId)>,
                    queued: &mut HashSet<BlockId>,
                    b: BlockId| {
        if queued.insert(b) {
            worklist.insert((priority[b.0], b));
        }
    };
    push(&mut worklist, &mut queued, cfg.entry);

    let mut iterations = 0usize;
    while let Some(&(p, b)) = worklist.iter().next() {
        worklist.remove(&(p, b));
        queued.remove(&b);
        iterations += 1;
        if iterations > MAX_VISITS {
            return Err(Error::Divergence(MAX_VISITS));
        }

        let in_state = if b == cfg.entry {
            Some(analysis.initial())
        } else {
            let mut acc: Option<A::State> = None;
            for &pred in &cfg.block(b).preds {
                if let Some(pred_out) = &out[pred.0] {
                    acc = Some(match acc {
                        None => pred_out.clone(),
                        Some(joined) => analysis.join(&joined, pred_out),
                    });
                }
            }
            acc
        };
        let Some(in_state) = in_state else {
            // No predecessor has produced output yet; a later visit is
            // triggered when one does.
            continue;
        };

        let entry_changed = match &entry[b.0] {
            Some(old) => !analysis.equal(old, &in_state),
            None => true,
        };
        if !entry_changed {
            continue;
        }

        let mut state = in_state.clone();
        for (i, (target, rhs)) in cfg.block(b).stmts.iter().enumerate() {
            state = analysis.transfer(&state, target, rhs);
            for w in analysis.drain_warnings() {
                warnings.insert(format!(
                    "at {}: {w}",
                    cfg.describe_point(Point { block: b, index: i })
                ));
            }
        }
        entry[b.0] = Some(in_state);

        let out_changed = match &out[b.0] {
            Some(old) => !analysis.equal(old, &state),
            None => true,
        };
        out[b.0] = Some(state);
        if out_changed {
            for &succ in &cfg.block(b).succs {
                push(&mut worklist, &mut queued, succ);
            }
        }
    }

    let unwrap_all = |states: Vec<Option<A::State>>| -> Vec<A::State> {
        states
            .into_iter()
            .map(|s| s.expect("every block is reachable from entry"))
            .collect()
    };
    Ok(FixpointResult {
        entry: unwrap_all(entry),
        out: unwrap_all(out),
        iterations,
        warnings: warnings.into_iter().collect(),
    })
}

fn block_priorities(cfg: &Cfg, tie_break: TieBreak) -> Vec<usize> {
    let mut priority = vec![0usize; cfg.block_count()];
    match tie_break {
        TieBreak::Rpo => {
            for (rank, b) in cfg.reverse_postorder().into_iter().enumerate() {
                priority[b.0] = rank;
            }
        }
        TieBreak::Seeded(seed) => {
            let mut order: Vec<usize> = (0..cfg.block_count()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            for (rank, b) in order.into_iter().enumerate() {
                priority[b] = rank;
            }
        }
    }
    priority
}

/// State at an arbitrary program point: the block's entry state pushed
/// through the statements before the point. Warnings raised during this
/// replay were already reported by the fixpoint run and are discarded.
pub fn state_at_point<A: Analysis>(
    cfg: &Cfg,
    analysis: &mut A,
    result: &FixpointResult<A::State>,
    point: Point,
) -> A::State {
    let block = cfg.block(point.block);
    debug_assert!(point.index <= block.stmts.len());
    let mut state = result.entry[point.block.0].clone();
    for (target, rhs) in &block.stmts[..point.index] {
        state = analysis.transfer(&state, target, rhs);
        analysis.drain_warnings();
    }
    state
}
