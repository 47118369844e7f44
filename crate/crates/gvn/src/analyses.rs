//! One front door for the three analyses: parse a program once, run any
//! algorithm over its CFG, and query equivalence classes, term equivalence,
//! and expression availability at named points.

use crate::cfg::{Cfg, Point};
use crate::dataflow::{self, Analysis, FixpointResult, TieBreak};
use crate::error::{Error, Result};
use crate::join::{self, JoinStats};
use crate::kildall::{Partition, TransferOutcome};
use crate::program::{Program, Stmt};
use crate::sed::Sed;
use crate::term::{Op, Term};
use crate::universe::Universe;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// The three analyses, by their command-line identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum AlgoKind {
    /// Partition-based analysis over the bounded term universe.
    #[value(name = "kildall")]
    Kildall,
    /// SED analysis with the per-variable join.
    #[value(name = "sed-original")]
    SedOriginal,
    /// SED analysis with the all-pairs join.
    #[value(name = "sed-modified")]
    SedModified,
}

impl AlgoKind {
    pub const ALL: [AlgoKind; 3] = [AlgoKind::Kildall, AlgoKind::SedOriginal, AlgoKind::SedModified];

    pub fn id(self) -> &'static str {
        match self {
            AlgoKind::Kildall => "kildall",
            AlgoKind::SedOriginal => "sed-original",
            AlgoKind::SedModified => "sed-modified",
        }
    }

    pub fn from_id(id: &str) -> Result<AlgoKind> {
        AlgoKind::ALL
            .into_iter()
            .find(|a| a.id() == id)
            .ok_or_else(|| {
                Error::Cli(format!(
                    "unknown algorithm `{id}` (expected kildall, sed-original, or sed-modified)"
                ))
            })
    }

    /// Whether states are SEDs (and can be exported as DOT graphs).
    pub fn produces_dags(self) -> bool {
        !matches!(self, AlgoKind::Kildall)
    }
}

impl std::fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Partition analysis adapter.
pub struct KildallAnalysis {
    universe: Universe,
    pending: Vec<String>,
}

impl KildallAnalysis {
    pub fn new(universe: Universe) -> KildallAnalysis {
        KildallAnalysis {
            universe,
            pending: Vec::new(),
        }
    }
}

impl Analysis for KildallAnalysis {
    type State = Partition;

    fn initial(&mut self) -> Partition {
        Partition::initial(&self.universe)
    }

    fn transfer(&mut self, state: &Partition, target: &str, rhs: &Term) -> Partition {
        let TransferOutcome { partition, warnings } = state.transfer(target, rhs, &self.universe);
        self.pending.extend(warnings);
        partition
    }

    fn join(&mut self, left: &Partition, right: &Partition) -> Partition {
        left.meet(right)
    }

    fn equal(&mut self, left: &Partition, right: &Partition) -> bool {
        left == right
    }

    fn drain_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.pending)
    }
}

/// Which SED pipeline a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SedPipeline {
    /// Per-variable join; unreferenced anonymous structure pruned after
    /// every step.
    Original,
    /// All-pairs join; only nodes representing no term are removed.
    Modified,
}

/// SED analysis adapter; accumulates per-join instrumentation.
pub struct SedAnalysis {
    vars: Vec<String>,
    pipeline: SedPipeline,
    budget: usize,
    joins: Vec<JoinStats>,
}

impl SedAnalysis {
    fn new(vars: Vec<String>, pipeline: SedPipeline, budget: usize) -> SedAnalysis {
        SedAnalysis {
            vars,
            pipeline,
            budget,
            joins: Vec::new(),
        }
    }

    pub fn join_stats(&self) -> &[JoinStats] {
        &self.joins
    }
}

impl Analysis for SedAnalysis {
    type State = Sed;

    fn initial(&mut self) -> Sed {
        Sed::initial(self.vars.iter().cloned())
    }

    fn transfer(&mut self, state: &Sed, target: &str, rhs: &Term) -> Sed {
        let raw = state.transfer(target, rhs);
        match self.pipeline {
            SedPipeline::Original => raw.prune_unnecessary(),
            SedPipeline::Modified => raw.cleanup_unrepresented(),
        }
    }

    fn join(&mut self, left: &Sed, right: &Sed) -> Sed {
        let (joined, stats) = match self.pipeline {
            SedPipeline::Original => join::join_original(left, right, self.budget),
            SedPipeline::Modified => join::join_modified(left, right, self.budget),
        };
        self.joins.push(stats);
        joined
    }

    fn equal(&mut self, left: &Sed, right: &Sed) -> bool {
        left.bisim_eq(right)
    }
}

/// A parsed program plus everything needed to run and query analyses.
pub struct Toolkit {
    program: Program,
    cfg: Cfg,
    universe: Universe,
    /// Recursion budget for joins: the number of program points unless
    /// overridden.
    budget: usize,
}

impl Toolkit {
    pub fn new(source: &str, max_term_size: Option<usize>) -> Result<Toolkit> {
        let program = Program::parse(source)?;
        Toolkit::from_program(program, max_term_size)
    }

    pub fn from_program(program: Program, max_term_size: Option<usize>) -> Result<Toolkit> {
        let cfg = Cfg::from_program(&program);
        let universe = Universe::from_program(&program, max_term_size);
        let budget = cfg.total_points();
        Ok(Toolkit {
            program,
            cfg,
            universe,
            budget,
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn cfg(&self) -> &Cfg {
        &self.cfg
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Number of distinct expressions in the program: its variables plus
    /// every distinct right-hand-side subexpression.
    pub fn expression_count(&self) -> usize {
        let mut exprs: BTreeSet<Term> = self.program.variables().into_iter().map(Term::Var).collect();
        self.program.visit_stmts(&mut |stmt| {
            if let Stmt::Assign { rhs, .. } = stmt {
                exprs.extend(rhs.subterms());
            }
        });
        exprs.len()
    }

    pub fn run(&self, algo: AlgoKind) -> Result<AnalysisRun> {
        self.run_with(algo, TieBreak::Rpo)
    }

    pub fn run_with(&self, algo: AlgoKind, tie_break: TieBreak) -> Result<AnalysisRun> {
        let vars: Vec<String> = self.program.variables().into_iter().collect();
        let inner = match algo {
            AlgoKind::Kildall => {
                let mut analysis = KildallAnalysis::new(self.universe.clone());
                let result = dataflow::run_fixpoint(&self.cfg, &mut analysis, tie_break)?;
                RunInner::Kildall(analysis, result)
            }
            AlgoKind::SedOriginal | AlgoKind::SedModified => {
                let pipeline = if algo == AlgoKind::SedOriginal {
                    SedPipeline::Original
                } else {
                    SedPipeline::Modified
                };
                let mut analysis = SedAnalysis::new(vars, pipeline, self.budget);
                let result = dataflow::run_fixpoint(&self.cfg, &mut analysis, tie_break)?;
                RunInner::Sed(analysis, result)
            }
        };
        Ok(AnalysisRun {
            algo,
            cfg: self.cfg.clone(),
            universe: self.universe.clone(),
            inner,
        })
    }
}

enum RunInner {
    Kildall(KildallAnalysis, FixpointResult<Partition>),
    Sed(SedAnalysis, FixpointResult<Sed>),
}

/// Canonical name for a term's equivalence class at a state. Two distinct
/// terms get the same signature exactly when the analysis answers true to
/// their pairwise equivalence query.
///
/// For partitions, explicitly tracked terms go by class index and every
/// other term by its structure over operand signatures — the partition's
/// relation is a congruence, so equalities among untracked terms follow
/// from their operands. A SED speaks only for terms some node represents,
/// so its signature is the node, and each unrepresented term stays alone.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Sig {
    Rep(usize),
    App(Op, Box<Sig>, Box<Sig>),
    Leaf(Term),
}

fn kildall_sig(index: &HashMap<Term, usize>, t: &Term) -> Sig {
    if let Some(&i) = index.get(t) {
        return Sig::Rep(i);
    }
    match t {
        Term::App(op, l, r) => Sig::App(
            *op,
            Box::new(kildall_sig(index, l)),
            Box::new(kildall_sig(index, r)),
        ),
        other => Sig::Leaf(other.clone()),
    }
}

fn sed_sig(sed: &Sed, t: &Term) -> Sig {
    match sed.rep_of(t) {
        Some(node) => Sig::Rep(node.0),
        None => Sig::Leaf(t.clone()),
    }
}

/// A completed fixpoint run, queryable at any program point. Queries take
/// `&mut self` because states at mid-block points are replayed on demand.
pub struct AnalysisRun {
    algo: AlgoKind,
    cfg: Cfg,
    universe: Universe,
    inner: RunInner,
}

impl AnalysisRun {
    pub fn algo(&self) -> AlgoKind {
        self.algo
    }

    pub fn warnings(&self) -> &[String] {
        match &self.inner {
            RunInner::Kildall(_, r) => &r.warnings,
            RunInner::Sed(_, r) => &r.warnings,
        }
    }

    pub fn iterations(&self) -> usize {
        match &self.inner {
            RunInner::Kildall(_, r) => r.iterations,
            RunInner::Sed(_, r) => r.iterations,
        }
    }

    /// The partition at a point (partition analysis only).
    pub fn partition_at(&mut self, point: Point) -> Option<Partition> {
        match &mut self.inner {
            RunInner::Kildall(analysis, result) => {
                Some(dataflow::state_at_point(&self.cfg, analysis, result, point))
            }
            RunInner::Sed(..) => None,
        }
    }

    /// The SED at a point (SED analyses only).
    pub fn sed_at(&mut self, point: Point) -> Option<Sed> {
        match &mut self.inner {
            RunInner::Sed(analysis, result) => {
                Some(dataflow::state_at_point(&self.cfg, analysis, result, point))
            }
            RunInner::Kildall(..) => None,
        }
    }

    /// Equivalence classes at a point as explicit term sets, bounded by the
    /// universe's maximum term size. Singleton classes are included; the
    /// implicit "every other term is its own class" remainder is not.
    pub fn classes_at(&mut self, point: Point) -> Vec<BTreeSet<Term>> {
        match &mut self.inner {
            RunInner::Kildall(analysis, result) => {
                let p = dataflow::state_at_point(&self.cfg, analysis, result, point);
                p.classes().cloned().collect()
            }
            RunInner::Sed(analysis, result) => {
                let sed = dataflow::state_at_point(&self.cfg, analysis, result, point);
                sed.term_classes(self.universe.bound)
            }
        }
    }

    /// The detected equivalence relation at a point: classes with at least
    /// two members. Singletons carry no information. Note that each analysis
    /// lists classes over its own explicitly tracked terms; to compare two
    /// analyses, partition a shared term set with [`Self::relation_over`]
    /// instead.
    pub fn relation_at(&mut self, point: Point) -> BTreeSet<BTreeSet<Term>> {
        self.classes_at(point)
            .into_iter()
            .filter(|c| c.len() >= 2)
            .collect()
    }

    /// Partitions `terms` by the equivalence relation the analysis reports
    /// at the point — the same relation [`Self::equiv_at`] queries pairwise.
    /// For the partition analysis that includes equalities among untracked
    /// terms, which follow by congruence from their operands; a SED relates
    /// only terms its nodes represent. Singleton blocks are kept, so the
    /// result is a partition of `terms`.
    pub fn relation_over(
        &mut self,
        point: Point,
        terms: &BTreeSet<Term>,
    ) -> BTreeSet<BTreeSet<Term>> {
        let mut groups: BTreeMap<Sig, BTreeSet<Term>> = BTreeMap::new();
        match &mut self.inner {
            RunInner::Kildall(analysis, result) => {
                let p = dataflow::state_at_point(&self.cfg, analysis, result, point);
                let mut index = HashMap::new();
                for (i, class) in p.classes().enumerate() {
                    for t in class {
                        index.insert(t.clone(), i);
                    }
                }
                for t in terms {
                    groups
                        .entry(kildall_sig(&index, t))
                        .or_default()
                        .insert(t.clone());
                }
            }
            RunInner::Sed(analysis, result) => {
                let sed = dataflow::state_at_point(&self.cfg, analysis, result, point);
                for t in terms {
                    groups.entry(sed_sig(&sed, t)).or_default().insert(t.clone());
                }
            }
        }
        groups.into_values().collect()
    }

    /// Whether two terms are detected equivalent at a point.
    pub fn equiv_at(&mut self, point: Point, t1: &Term, t2: &Term) -> Result<bool> {
        match &mut self.inner {
            RunInner::Kildall(analysis, result) => {
                let p = dataflow::state_at_point(&self.cfg, analysis, result, point);
                p.equiv(&analysis.universe, t1, t2)
            }
            RunInner::Sed(analysis, result) => {
                let sed = dataflow::state_at_point(&self.cfg, analysis, result, point);
                Ok(sed.equiv(t1, t2, self.universe.bound))
            }
        }
    }

    /// Whether `expr` is available at the point: some class contains it
    /// together with at least one other term. Returns the full witness class
    /// when it is.
    pub fn available_at(&mut self, point: Point, expr: &Term) -> Result<Option<BTreeSet<Term>>> {
        if !self.universe.contains(expr) {
            return Err(Error::UnknownTerm(expr.to_string()));
        }
        let witness = match &mut self.inner {
            RunInner::Kildall(analysis, result) => {
                let p = dataflow::state_at_point(&self.cfg, analysis, result, point);
                p.class_of(expr).cloned()
            }
            RunInner::Sed(analysis, result) => {
                let sed = dataflow::state_at_point(&self.cfg, analysis, result, point);
                sed.rep_of(expr)
                    .map(|node| sed.terms_of(node, self.universe.bound))
            }
        };
        Ok(witness.filter(|class| class.len() >= 2))
    }

    /// Per-join intersection instrumentation, in join order. Errors for the
    /// partition analysis, which performs no intersections.
    pub fn join_stats(&self) -> Result<&[JoinStats]> {
        match &self.inner {
            RunInner::Sed(analysis, _) => Ok(analysis.join_stats()),
            RunInner::Kildall(..) => Err(Error::InstrumentationDisabled(
                self.algo.id().to_string(),
            )),
        }
    }

    pub fn cfg(&self) -> &Cfg {
        &self.cfg
    }
}
