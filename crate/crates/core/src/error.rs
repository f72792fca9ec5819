use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numerical,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numerical => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    // numerical / domain
    #[error("degenerate-time: all observation times are equal")]
    DegenerateTime,
    #[error("insufficient-points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("rank-deficient: need at least 3 distinct x values, got {distinct}")]
    RankDeficient { distinct: usize },
    #[error("leverage-one: observation {index} has leverage 1")]
    LeverageOne { index: usize },
    #[error("base-slope-zero: slope for base year {year} is {slope:e}")]
    BaseSlopeZero { year: i32, slope: f64 },
    #[error("tax-rate-unity: tax rate {value} at {date} is not below 1")]
    TaxRateUnity { date: String, value: f64 },
    #[error("markup-pole: profit share {value} at {date} is not below 2")]
    MarkupPole { date: String, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),

    // data
    #[error("year {year}: {source}")]
    YearFit {
        year: i32,
        #[source]
        source: Box<Error>,
    },
    /// A report stage failed; the category is the underlying error's.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error("empty series{}", .0.as_deref().map(|id| format!(" '{id}'")).unwrap_or_default())]
    EmptySeries(Option<String>),
    #[error("no full window: no window of {years} years has at least {needed} points")]
    NoFullWindow { years: u32, needed: usize },
    #[error("missing year {year} in series '{series}'")]
    MissingYear { series: String, year: i32 },
    #[error("frequency mismatch: {0}")]
    FrequencyMismatch(String),
    #[error("empty intersection: series share no dates")]
    EmptyIntersection,
    #[error("invalid series '{id}': {reason}")]
    InvalidSeries { id: String, reason: String },
    #[error("invalid window: start {start} is after end {end}")]
    InvalidWindow { start: String, end: String },
    #[error("window mismatch: fit and series disagree on the sample")]
    WindowMismatch,
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("unknown series '{0}'")]
    UnknownSeries(String),
    #[error("authentication rejected (HTTP {status}): {message}")]
    Auth { status: u16, message: String },
    #[error("HTTP {status}: {message}")]
    Http { status: u16, message: String },
    #[error("network exhausted after {attempts} attempts: {last}")]
    NetworkExhausted { attempts: u32, last: String },
    #[error("offline: network access is disabled")]
    Offline,
    #[error("hash-mismatch: {} does not match its manifest digest", .0.display())]
    HashMismatch(PathBuf),
    #[error("no-manifest: {} has no manifest.json", .0.display())]
    NoManifest(PathBuf),
    #[error("no-snapshot: {} does not exist", .0.display())]
    NoSnapshot(PathBuf),
    #[error("snapshot exists: {} is not empty", .0.display())]
    SnapshotExists(PathBuf),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    // configuration
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Wraps `self` with the name of the report stage that produced it.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage { stage: stage.into(), source: Box::new(self) }
    }

    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            DegenerateTime
            | InsufficientPoints { .. }
            | RankDeficient { .. }
            | LeverageOne { .. }
            | BaseSlopeZero { .. }
            | TaxRateUnity { .. }
            | MarkupPole { .. }
            | Domain(_) => ErrorCategory::Numerical,
            YearFit { source, .. } | Stage { source, .. } => source.category(),
            Config(_) => ErrorCategory::Config,
            _ => ErrorCategory::Data,
        }
    }
}
