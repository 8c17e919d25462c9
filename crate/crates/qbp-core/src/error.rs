//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias for `std::result::Result<T, Error>`.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by constructors, simulators, transpilers and analyses.
///
/// Validation *findings* are not errors: checks that merely discover broken
/// invariants report them as data in a
/// [`ValidationReport`](crate::model::ValidationReport). `Error` is reserved
/// for calls whose preconditions make the requested computation meaningless
/// (bad parameters, out-of-range indices, structurally invalid programs).
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or transpiler was handed an unusable parameter
    /// (odd Parity size, zero NQBP step budget, …).
    #[error("invalid parameter: {0}")]
    BadParameter(String),

    /// A program failed validation where a valid one is a hard precondition.
    #[error("invalid program: {0}")]
    InvalidProgram(String),

    /// An input bit string has the wrong length for the program.
    #[error("input has {got} bits, program reads {expected}")]
    InputLength { expected: usize, got: usize },

    /// A level-step index lies outside `1..=length`.
    #[error("step index {index} out of range 1..={length}")]
    StepIndex { index: usize, length: usize },

    /// Exhaustive enumeration over `2ⁿ` inputs would exceed the configured
    /// cap (default 20, override with the `QBP_MAX_N` environment variable).
    #[error("n = {n} exceeds the enumeration cap {cap} (set QBP_MAX_N to raise it)")]
    CapExceeded { n: usize, cap: usize },

    /// A Boolean truth table was requested from a program whose acceptance
    /// probability is not 0 or 1 on some input.
    #[error("acceptance probability {value} on input {input:0b} is not Boolean")]
    NotBoolean { input: u64, value: f64 },

    /// Two objects compared for equivalence read different numbers of bits.
    #[error("input-size mismatch: {a} vs {b} bits")]
    MismatchedN { a: usize, b: usize },

    /// The requested reduction is not defined for this source object.
    #[error("unsupported conversion: {0}")]
    Unsupported(String),

    /// Deterministic evolution of a classical branching program hit a
    /// transition probability other than 0 or 1.
    #[error("transition probability {p} at {location} is not deterministic")]
    NotDeterministic { location: String, p: f64 },
}
