//! Command-line front end.
//!
//! Five subcommands: `analyze` prints per-point states, `available` answers
//! availability queries, `diff` compares two analyses over the bounded term
//! universe, `fuzz` differential-tests the three analyses on generated
//! programs, and `dot` exports a SED as Graphviz text.
//!
//! [`execute`] returns the full stdout text plus the process exit code:
//! 0 for success, 1 when findings were requested and found (a non-empty
//! `diff --expect-equal`, or fuzz violations), 2 for errors (the caller maps
//! `Err` to 2). Analysis warnings go to stderr so `--json` output stays
//! parseable.

use crate::analyses::{AlgoKind, AnalysisRun, Toolkit};
use crate::cfg::Point;
use crate::error::{Error, Result};
use crate::generator::GenConfig;
use crate::harness;
use crate::report::{self, PointReport};
use crate::term::Term;
use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "gvn",
    about = "Global value numbering: partition- and SED-based Herbrand equivalence analyses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the analysis state at program points.
    Analyze {
        /// Program file.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoKind::Kildall)]
        algo: AlgoKind,
        /// Labeled point to print (repeatable; default: every point).
        #[arg(long = "point")]
        points: Vec<String>,
        /// Maximum tracked term size (default: the largest rhs in the file).
        #[arg(long)]
        max_term_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Ask whether an equivalent of an expression is already computed at a
    /// point.
    Available {
        /// Program file.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoKind::SedModified)]
        algo: AlgoKind,
        /// Labeled point to query.
        #[arg(long)]
        point: String,
        /// Expression to query, e.g. `x + y`.
        #[arg(long)]
        expr: String,
        #[arg(long)]
        max_term_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// List equivalences detected by exactly one of two analyses.
    Diff {
        /// Program file.
        file: PathBuf,
        /// The two analyses to compare: `--algos sed-original,sed-modified`.
        #[arg(long, value_enum, value_delimiter = ',')]
        algos: Vec<AlgoKind>,
        /// Labeled point to compare at (repeatable; default: every point).
        #[arg(long = "point")]
        points: Vec<String>,
        #[arg(long)]
        max_term_size: Option<usize>,
        #[arg(long)]
        json: bool,
        /// Exit with status 1 if the analyses differ anywhere.
        #[arg(long)]
        expect_equal: bool,
    },
    /// Differential-test the three analyses on generated programs.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of programs to generate and check.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_vars: usize,
        #[arg(long, default_value_t = 12)]
        max_stmts: usize,
        /// Maximum number of branch/loop constructs per program.
        #[arg(long, default_value_t = 2)]
        max_joins: usize,
        /// Allow `while` loops in generated programs.
        #[arg(long)]
        loops: bool,
        /// Maximum operator count in generated right-hand sides.
        #[arg(long, default_value_t = 2)]
        max_rhs_size: usize,
        #[arg(long)]
        max_term_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Export the SED at a point as Graphviz DOT.
    Dot {
        /// Program file.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoKind::SedModified)]
        algo: AlgoKind,
        /// Labeled point to export.
        #[arg(long)]
        point: String,
    },
}

/// Runs a parsed command line. Returns the stdout text and the exit code.
pub fn execute(cli: Cli) -> Result<(String, i32)> {
    let mut out = String::new();
    let code = match cli.command {
        Command::Analyze {
            file,
            algo,
            points,
            max_term_size,
            json,
        } => cmd_analyze(&mut out, &file, algo, &points, max_term_size, json)?,
        Command::Available {
            file,
            algo,
            point,
            expr,
            max_term_size,
            json,
        } => cmd_available(&mut out, &file, algo, &point, &expr, max_term_size, json)?,
        Command::Diff {
            file,
            algos,
            points,
            max_term_size,
            json,
            expect_equal,
        } => cmd_diff(
            &mut out,
            &file,
            &algos,
            &points,
            max_term_size,
            json,
            expect_equal,
        )?,
        Command::Fuzz {
            seed,
            count,
            max_vars,
            max_stmts,
            max_joins,
            loops,
            max_rhs_size,
            max_term_size,
            json,
        } => {
            let config = GenConfig {
                max_vars,
                max_stmts,
                max_joins,
                allow_loops: loops,
                max_rhs_size,
            };
            cmd_fuzz(&mut out, seed, count, &config, max_term_size, json)?
        }
        Command::Dot { file, algo, point } => cmd_dot(&mut out, &file, algo, &point)?,
    };
    Ok((out, code))
}

fn read_source(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path, max_term_size: Option<usize>) -> Result<Toolkit> {
    Toolkit::new(&read_source(path)?, max_term_size)
}

fn start(toolkit: &Toolkit, algo: AlgoKind) -> Result<AnalysisRun> {
    let run = toolkit.run(algo)?;
    for warning in run.warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(run)
}

/// `--point` arguments resolved to points; with none given, every point.
fn resolve_points(toolkit: &Toolkit, names: &[String]) -> Result<Vec<Point>> {
    if names.is_empty() {
        Ok(toolkit.cfg().all_points())
    } else {
        names.iter().map(|n| toolkit.cfg().point(n)).collect()
    }
}

fn push_json(out: &mut String, value: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push_str(&text);
    out.push('\n');
}

fn node_line(report: &report::NodeReport, index: usize) -> String {
    let mut line = format!(
        "    n{index} ⟨{} | {}⟩",
        report.vars.join(","),
        report.node_type
    );
    if !report.children.is_empty() {
        let refs: Vec<String> = report.children.iter().map(|c| format!("n{c}")).collect();
        line.push_str(&format!(" -> {}", refs.join(", ")));
    }
    line
}

fn push_point_report(out: &mut String, report: &PointReport) {
    writeln!(out, "== {} · {}", report.point, report.algo).unwrap();
    for class in &report.classes {
        writeln!(out, "  [{}]", class.join(", ")).unwrap();
    }
    if let Some(nodes) = &report.nodes {
        writeln!(out, "  nodes:").unwrap();
        for (i, node) in nodes.iter().enumerate() {
            writeln!(out, "{}", node_line(node, i)).unwrap();
        }
    }
    if let Some(instr) = &report.instrumentation {
        writeln!(
            out,
            "  instrumentation: intersect_calls={} bound_e_squared={} recursion_depth_max={}",
            instr.intersect_calls, instr.bound_e_squared, instr.recursion_depth_max
        )
        .unwrap();
    }
}

fn cmd_analyze(
    out: &mut String,
    file: &Path,
    algo: AlgoKind,
    points: &[String],
    max_term_size: Option<usize>,
    json: bool,
) -> Result<i32> {
    let toolkit = load(file, max_term_size)?;
    let mut run = start(&toolkit, algo)?;
    let e = toolkit.expression_count();
    let reports: Vec<PointReport> = resolve_points(&toolkit, points)?
        .into_iter()
        .map(|p| report::point_report(&mut run, p, e * e))
        .collect();
    if json {
        push_json(out, &reports);
    } else {
        for report in &reports {
            push_point_report(out, report);
        }
    }
    Ok(0)
}

fn cmd_available(
    out: &mut String,
    file: &Path,
    algo: AlgoKind,
    point: &str,
    expr: &str,
    max_term_size: Option<usize>,
    json: bool,
) -> Result<i32> {
    let toolkit = load(file, max_term_size)?;
    let mut run = start(&toolkit, algo)?;
    let term: Term = expr.parse()?;
    let answer = report::availability(&mut run, toolkit.cfg().point(point)?, &term)?;
    if json {
        push_json(out, &answer);
    } else {
        match &answer.witness {
            Some(witness) => writeln!(
                out,
                "{} at {} ({}): available, witness [{}]",
                answer.term,
                answer.point,
                answer.algo,
                witness.join(", ")
            )
            .unwrap(),
            None => writeln!(
                out,
                "{} at {} ({}): not available",
                answer.term, answer.point, answer.algo
            )
            .unwrap(),
        }
    }
    Ok(0)
}

fn cmd_diff(
    out: &mut String,
    file: &Path,
    algos: &[AlgoKind],
    points: &[String],
    max_term_size: Option<usize>,
    json: bool,
    expect_equal: bool,
) -> Result<i32> {
    let [algo_a, algo_b] = algos else {
        return Err(Error::Cli(format!(
            "--algos takes exactly two comma-separated analyses, got {}",
            algos.len()
        )));
    };
    let toolkit = load(file, max_term_size)?;
    let terms = toolkit.universe().enumerate().map_err(|e| match e {
        Error::UniverseTooLarge { .. } => {
            Error::Cli(format!("{e}; pass a smaller --max-term-size"))
        }
        other => other,
    })?;
    let mut run_a = start(&toolkit, *algo_a)?;
    let mut run_b = start(&toolkit, *algo_b)?;
    let reports: Vec<report::DiffReport> = resolve_points(&toolkit, points)?
        .into_iter()
        .map(|p| report::diff_report(&mut run_a, &mut run_b, p, &terms))
        .collect::<Result<_>>()?;
    let differences: usize = reports
        .iter()
        .map(|r| r.pairs_only_in_a.len() + r.pairs_only_in_b.len())
        .sum();
    if json {
        push_json(out, &reports);
    } else {
        for report in reports.iter().filter(|r| !r.is_empty()) {
            writeln!(out, "== {}", report.point).unwrap();
            for (label, algo, pairs) in [
                ("only under", &report.algo_a, &report.pairs_only_in_a),
                ("only under", &report.algo_b, &report.pairs_only_in_b),
            ] {
                for (t1, t2) in pairs {
                    writeln!(out, "  {label} {algo}: {t1} = {t2}").unwrap();
                }
            }
        }
        writeln!(
            out,
            "{differences} difference(s) between {algo_a} and {algo_b}"
        )
        .unwrap();
    }
    Ok(if expect_equal && differences > 0 { 1 } else { 0 })
}

fn cmd_fuzz(
    out: &mut String,
    seed: u64,
    count: usize,
    config: &GenConfig,
    max_term_size: Option<usize>,
    json: bool,
) -> Result<i32> {
    if count == 0 {
        return Err(Error::Cli("--count must be at least 1".to_string()));
    }
    let summary = harness::fuzz(seed, count, config, max_term_size)?;
    if json {
        push_json(out, &summary);
    } else {
        writeln!(
            out,
            "checked {} programs ({} points) from seed {}",
            summary.programs_checked, summary.points_checked, summary.seed
        )
        .unwrap();
        writeln!(
            out,
            "sed-original strictly below sed-modified at {} points in {} programs",
            summary.strict_subset_points, summary.programs_with_strict_subset
        )
        .unwrap();
        writeln!(out, "advisory reports: {}", summary.reports).unwrap();
        for sample in &summary.report_samples {
            writeln!(
                out,
                "  report seed={} {:?} at {}: {}",
                sample.seed, sample.kind, sample.location, sample.detail
            )
            .unwrap();
        }
        writeln!(out, "violations: {}", summary.violations.len()).unwrap();
        for v in &summary.violations {
            writeln!(
                out,
                "  violation seed={} {:?} at {}: {}",
                v.seed, v.kind, v.location, v.detail
            )
            .unwrap();
            for line in v.program.lines() {
                writeln!(out, "    {line}").unwrap();
            }
        }
    }
    Ok(if summary.violations.is_empty() { 0 } else { 1 })
}

fn cmd_dot(out: &mut String, file: &Path, algo: AlgoKind, point: &str) -> Result<i32> {
    if !algo.produces_dags() {
        return Err(Error::NotADagAnalysis(algo.id().to_string()));
    }
    let toolkit = load(file, None)?;
    let mut run = start(&toolkit, algo)?;
    let point = toolkit.cfg().point(point)?;
    let sed = run
        .sed_at(point)
        .expect("DAG-producing analyses yield SEDs at every point");
    out.push_str(&sed.to_dot());
    Ok(0)
}
