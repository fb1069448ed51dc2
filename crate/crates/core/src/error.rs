use std::path::PathBuf;

use crate::lang::Iso3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// [`Error::code`] gives a stable identifier suitable for machine-parseable
/// diagnostics (`ERROR <code>: <detail>`).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },
    #[error("invalid ISO 639-3 code {0:?}")]
    InvalidCode(String),
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("name {name:?} is ambiguous between {}", join_codes(candidates))]
    AmbiguousName { name: String, candidates: Vec<Iso3> },
    #[error("duplicate language {0}")]
    DuplicateLanguage(Iso3),
    #[error("macro-language {0} has no members")]
    EmptyMemberSet(Iso3),
    #[error("{member} is not a member of {macro_code}")]
    NotAMember { member: Iso3, macro_code: Iso3 },
    #[error("unknown country {0:?}")]
    UnknownCountry(String),
    #[error("country {0:?} has zero population")]
    ZeroCountryPopulation(String),
    #[error("no language mapping for country {0:?}")]
    UnmappedCountry(String),
    #[error("score {score} out of range for {task}: {reason}")]
    OutOfRangeScore {
        task: String,
        score: f64,
        reason: String,
    },
    #[error("trade shares for {reporter} ({flow}) sum to {sum:.6} > 1")]
    ShareSumExceedsOne {
        reporter: Iso3,
        flow: String,
        sum: f64,
    },
    #[error("no trade rows with flow {0}")]
    NoRowsForFlow(String),
    #[error("normalizer needs {0} but it was not supplied")]
    MissingContext(&'static str),
    #[error("degenerate normalization range for {task}: {detail}")]
    DegenerateRange { task: String, detail: String },
    #[error("empty language universe")]
    EmptyUniverse,
    #[error("all populations are zero while tau = {0}")]
    AllZeroPopulations(f64),
    #[error("tau {0} outside [0, 1]")]
    InvalidTau(f64),
    #[error("utility for {0} lies outside the demand universe")]
    UniverseMismatch(Iso3),
    #[error("empty language subset")]
    EmptySubset,
    #[error("language {0} is not a node of the translation graph")]
    UnknownNode(Iso3),
    #[error("source and target are both {0}")]
    SelfPair(Iso3),
    #[error("empty citation group")]
    EmptyGroup,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier used on the `ERROR <code>: ...` diagnostic line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "MissingFile",
            Error::Parse { .. } => "ParseError",
            Error::InvalidCode(_) => "InvalidCode",
            Error::UnknownLanguage(_) => "UnknownLanguage",
            Error::AmbiguousName { .. } => "AmbiguousName",
            Error::DuplicateLanguage(_) => "DuplicateLanguage",
            Error::EmptyMemberSet(_) => "EmptyMemberSet",
            Error::NotAMember { .. } => "NotAMember",
            Error::UnknownCountry(_) => "UnknownCountry",
            Error::ZeroCountryPopulation(_) => "ZeroCountryPopulation",
            Error::UnmappedCountry(_) => "UnmappedCountry",
            Error::OutOfRangeScore { .. } => "OutOfRangeScore",
            Error::ShareSumExceedsOne { .. } => "ShareSumExceedsOne",
            Error::NoRowsForFlow(_) => "NoRowsForFlow",
            Error::MissingContext(_) => "MissingContext",
            Error::DegenerateRange { .. } => "DegenerateRange",
            Error::EmptyUniverse => "EmptyUniverse",
            Error::AllZeroPopulations(_) => "AllZeroPopulations",
            Error::InvalidTau(_) => "InvalidTau",
            Error::UniverseMismatch(_) => "UniverseMismatch",
            Error::EmptySubset => "EmptySubset",
            Error::UnknownNode(_) => "UnknownNode",
            Error::SelfPair(_) => "SelfPair",
            Error::EmptyGroup => "EmptyGroup",
            Error::InsufficientData(_) => "InsufficientData",
            Error::UnknownTask(_) => "UnknownTask",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    pub(crate) fn parse(file: &str, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.to_owned(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn join_codes(codes: &[Iso3]) -> String {
    codes
        .iter()
        .map(Iso3::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if (0.0..=1.0).contains(&tau) {
        Ok(())
    } else {
        Err(Error::InvalidTau(tau))
    }
}
