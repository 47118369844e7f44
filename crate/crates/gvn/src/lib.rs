//! Global value numbering toolkit: three analyses that detect Herbrand
//! equivalences (operators treated as uninterpreted symbols) over a small
//! structured language, plus machinery to compare them.
//!
//! * `kildall` — the classic partition-based analysis, used as the
//!   precision oracle.
//! * `sed` + `join` — strong equivalence DAGs with two join pipelines: the
//!   per-variable join (which loses anonymous recomputable values at merge
//!   points) and the all-pairs join (which keeps them).
//! * `dataflow` — the worklist fixpoint engine both run under.
//! * `analyses` — one front door tying programs, algorithms, and queries
//!   together; `report` and `cli` expose it as a command-line tool.

pub mod analyses;
pub mod cfg;
pub mod cli;
pub mod dataflow;
pub mod error;
pub mod generator;
pub mod harness;
pub mod join;
pub mod kildall;
pub mod program;
pub mod report;
pub mod sed;
pub mod term;
pub mod universe;
