//! Error types shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),

    #[error("identifier `{0}` uses the reserved `__` prefix")]
    ReservedIdent(String),

    #[error("unknown program point `{0}`")]
    UnknownPoint(String),

    #[error("unknown term `{0}`: not in the bounded universe")]
    UnknownTerm(String),

    #[error("instrumentation disabled: {0}")]
    InstrumentationDisabled(String),

    #[error("`{0}` is not a DAG-producing analysis")]
    NotADagAnalysis(String),

    #[error(
        "universe too large to enumerate: {count} terms up to size {bound} exceeds the cap of {cap}"
    )]
    UniverseTooLarge {
        count: u128,
        bound: usize,
        cap: u128,
    },

    #[error("fixpoint iteration exceeded {0} block visits without stabilizing")]
    Divergence(usize),

    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Cli(String),
}

pub type Result<T> = std::result::Result<T, Error>;
