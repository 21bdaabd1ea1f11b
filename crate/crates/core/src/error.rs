use std::fmt;

use serde::Serialize;

/// A conditioning cell of the data, used to describe empty-cell failures.
///
/// Unset fields are unconstrained. `t` is only used for repeated
/// cross-sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Cell {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s1: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u8>,
}

impl Cell {
    pub fn panel(d: Option<u8>, s0: Option<u8>, s1: Option<u8>) -> Self {
        Cell {
            d,
            s0,
            s1,
            ..Default::default()
        }
    }

    pub fn rcs(d: u8, t: u8, s: u8) -> Self {
        Cell {
            d: Some(d),
            t: Some(t),
            s: Some(s),
            ..Default::default()
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, v) in [
            ("d", self.d),
            ("t", self.t),
            ("s", self.s),
            ("s0", self.s0),
            ("s1", self.s1),
        ] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if parts.is_empty() {
            f.write_str("all units")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}

/// Broad class of an error; the CLI maps these to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed files, invalid arguments, inconsistent flags.
    Validation,
    /// The input was valid but the requested quantity is not estimable.
    Estimation,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("empty file")]
    EmptyFile,
    #[error("unexpected header {found:?}, expected {expected:?}")]
    BadHeader { found: String, expected: String },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: selected unit has no outcome in period {period}")]
    MissingOutcome { line: u64, period: u32 },
    #[error("degenerate sampling: {0}")]
    DegenerateSampling(String),
    #[error("unit {id}: inconsistent gvar across rows")]
    InconsistentGvar { id: String },
    #[error("unit {id}: duplicate row for period {period}")]
    DuplicatePeriod { id: String, period: u32 },
    #[error("unit {id}: no baseline (period 0) row")]
    MissingBaseline { id: String },
    #[error("no units in cell {0}")]
    EmptyCell(Cell),
    #[error("{name} = {value} lies outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("quantile level {0} lies outside (0, 1]")]
    QuantileLevel(f64),
    #[error("trimming share must be positive")]
    ZeroShare,
    #[error("identification is vacuous: {0}")]
    VacuousIdentification(String),
    #[error("assumptions do not support this parameter: {0}")]
    AssumptionMismatch(String),
    #[error("lower bound {lb} exceeds upper bound {ub}; check support overrides")]
    CrossedBounds { lb: f64, ub: f64 },
    #[error("no units first treated in period {0}")]
    EmptyGroup(u32),
    #[error("period {0} is not present in the data")]
    MissingPeriod(u32),
    #[error("{failed} of {reps} bootstrap replicates failed")]
    TooManyFailedReps { failed: usize, reps: usize },
    #[error("critical value root is not bracketed")]
    RootNotBracketed,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::EmptyFile => "empty_file",
            Error::BadHeader { .. } => "bad_header",
            Error::MalformedRow { .. } => "malformed_row",
            Error::MissingOutcome { .. } => "missing_outcome",
            Error::DegenerateSampling(_) => "degenerate_sampling",
            Error::InconsistentGvar { .. } => "inconsistent_gvar",
            Error::DuplicatePeriod { .. } => "duplicate_period",
            Error::MissingBaseline { .. } => "missing_baseline",
            Error::EmptyCell(_) => "empty_cell",
            Error::OutOfRange { .. } => "out_of_range",
            Error::QuantileLevel(_) => "quantile_level",
            Error::ZeroShare => "zero_share",
            Error::VacuousIdentification(_) => "vacuous_identification",
            Error::AssumptionMismatch(_) => "assumption_mismatch",
            Error::CrossedBounds { .. } => "crossed_bounds",
            Error::EmptyGroup(_) => "empty_group",
            Error::MissingPeriod(_) => "missing_period",
            Error::TooManyFailedReps { .. } => "too_many_failed_reps",
            Error::RootNotBracketed => "root_not_bracketed",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Csv(_) => "csv",
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::EmptyCell(_)
            | Error::OutOfRange { .. }
            | Error::QuantileLevel(_)
            | Error::ZeroShare
            | Error::VacuousIdentification(_)
            | Error::CrossedBounds { .. }
            | Error::EmptyGroup(_)
            | Error::MissingPeriod(_)
            | Error::TooManyFailedReps { .. }
            | Error::RootNotBracketed => ErrorKind::Estimation,
            _ => ErrorKind::Validation,
        }
    }

    /// Structured detail for machine consumers.
    pub fn context(&self) -> ErrorContext {
        use ErrorContext as C;
        match self {
            Error::MalformedRow { line, .. } | Error::MissingOutcome { line, .. } => {
                C::Line { line: *line }
            }
            Error::EmptyCell(cell) => C::Cell { cell: *cell },
            Error::InconsistentGvar { id }
            | Error::MissingBaseline { id }
            | Error::DuplicatePeriod { id, .. } => C::Id { id: id.clone() },
            Error::TooManyFailedReps { failed, reps } => C::Reps {
                failed: *failed,
                reps: *reps,
            },
            Error::EmptyGroup(p) | Error::MissingPeriod(p) => C::Period { period: *p },
            _ => C::None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ErrorContext {
    None,
    Line { line: u64 },
    Cell { cell: Cell },
    Id { id: String },
    Period { period: u32 },
    Reps { failed: usize, reps: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
