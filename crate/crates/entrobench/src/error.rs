//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Register width outside the supported dense-simulation range.
    #[error("register width {n} outside supported range 1..={max}")]
    WidthOutOfRange { n: usize, max: usize },

    /// A gate or channel addressed a qubit index past the register.
    #[error("qubit index {index} out of range for width {n}")]
    QubitOutOfRange { index: usize, n: usize },

    /// A two-qubit gate or channel was given the same qubit twice.
    #[error("duplicate qubit index {index} on a two-qubit operation")]
    DuplicateQubit { index: usize },

    /// A probability argument fell outside [0, 1].
    #[error("probability {value} for `{name}` outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    /// A generic numeric argument failed validation.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// The state diagonal summed to zero or less after clipping; the
    /// matrix no longer describes a physical state.
    #[error("corrupted state: diagonal sums to {sum} after clipping")]
    CorruptedState { sum: f64 },

    /// An estimation protocol was configured with too little data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A resampling dataset did not cover every measurement setting.
    #[error("dataset is missing measurement setting {setting}")]
    MissingSetting { setting: String },

    /// The least-squares problem cannot be solved as posed.
    #[error("degenerate fit data: {0}")]
    DegenerateData(String),

    /// Malformed text input (calibration tables, bitstrings, bases).
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
