use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Resolution outside `1..=24`.
    ResolutionOutOfRange(u32),
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    ResolutionMismatch {
        left: u32,
        right: u32,
    },
    /// A dyadic interval finer than the working resolution.
    LevelBeyondResolution {
        level: u32,
        resolution: u32,
    },
    InvalidIndex {
        level: u32,
        index: usize,
    },
    EmptyFrequencyInterval {
        start: usize,
        end: usize,
    },
    FrequencyOutOfRange {
        frequency: usize,
        limit: usize,
    },
    /// Averages need `p >= 1`; quasi-norms go through the Orlicz module.
    InvalidExponent(f64),
    InvalidParameter(String),
    InvalidAtom(String),
    NotAdapted {
        level: u32,
    },
    NotInExpansion,
    StoppingConditionViolated {
        observed: f64,
        allowed: f64,
    },
    NotLacunary,
    NonzeroMean(f64),
    NotGood(String),
    NotBlockForm(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ResolutionOutOfRange(n) => write!(f, "resolution {n} outside 1..=24"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            Error::ResolutionMismatch { left, right } => {
                write!(f, "resolution mismatch: {left} vs {right}")
            }
            Error::LevelBeyondResolution { level, resolution } => {
                write!(
                    f,
                    "dyadic level {level} is finer than resolution {resolution}"
                )
            }
            Error::InvalidIndex { level, index } => {
                write!(f, "index {index} out of range at level {level}")
            }
            Error::EmptyFrequencyInterval { start, end } => {
                write!(f, "empty frequency interval [{start}, {end})")
            }
            Error::FrequencyOutOfRange { frequency, limit } => {
                write!(f, "frequency {frequency} exceeds limit {limit}")
            }
            Error::InvalidExponent(p) => write!(f, "exponent {p} must be finite and >= 1"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidAtom(msg) => write!(f, "invalid atom: {msg}"),
            Error::NotAdapted { level } => {
                write!(
                    f,
                    "multiplier is not adapted to an interval of level {level}"
                )
            }
            Error::NotInExpansion => write!(f, "tile is not part of the binary tile expansion"),
            Error::StoppingConditionViolated { observed, allowed } => write!(
                f,
                "stopping condition violated: {observed} exceeds {allowed}"
            ),
            Error::NotLacunary => write!(f, "sequence is not lacunary"),
            Error::NonzeroMean(m) => write!(f, "signal has nonzero mean {m}"),
            Error::NotGood(msg) => write!(f, "not a good collection: {msg}"),
            Error::NotBlockForm(msg) => write!(f, "multiplier not of signed block form: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
