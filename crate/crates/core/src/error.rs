use thiserror::Error;

/// Errors raised by the library. Check failures inside the axiom harness are
/// report content and never surface here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("pair is not in the admissible set of pairing `{pairing}`")]
    Membership { pairing: String },

    #[error("{0}")]
    Domain(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("arity mismatch: expression has {got} components, expected {expected}")]
    Arity { expected: usize, got: usize },

    #[error("evaluation error at t = {t}: {message}")]
    Evaluation { t: f64, message: String },

    #[error("incompatible operands: {0}")]
    Composition(String),

    #[error("function is not of bounded variation (estimate {value} classified as diverging)")]
    NotBounded { value: f64 },

    #[error("variation estimate did not converge within {max_points} points")]
    Unconverged { max_points: usize },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
