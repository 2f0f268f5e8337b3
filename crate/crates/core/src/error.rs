use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Register size outside `1..=MAX_QUBITS`.
    QubitCount { requested: usize },
    /// A gate or measurement addressed a qubit the register does not have.
    QubitIndex { index: usize, num_qubits: usize },
    /// CNOT with identical control and target.
    ControlIsTarget { qubit: usize },
    /// Rotation angle was NaN or infinite.
    NonFiniteAngle,
    /// A vector had the wrong length.
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// Quantum-Train target must have at least two parameters.
    TargetTooSmall { params: usize },
    /// An operation needed at least one element.
    Empty(&'static str),
    /// A configuration value violates its documented range.
    Config {
        key: &'static str,
        reason: &'static str,
    },
    /// Bundles handed to the aggregator disagree on kind or length.
    HeterogeneousBundles,
    /// Training produced NaN/inf. `client` is `None` for the central evaluation.
    NonFiniteLoss { round: usize, client: Option<usize> },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::QubitCount { requested } => {
                write!(
                    f,
                    "qubit count {requested} outside 1..={}",
                    crate::qsim::MAX_QUBITS
                )
            }
            Error::QubitIndex { index, num_qubits } => {
                write!(
                    f,
                    "qubit {index} out of range for {num_qubits}-qubit register"
                )
            }
            Error::ControlIsTarget { qubit } => {
                write!(f, "CNOT control and target are both qubit {qubit}")
            }
            Error::NonFiniteAngle => f.write_str("rotation angle is not finite"),
            Error::Dimension {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::TargetTooSmall { params } => {
                write!(
                    f,
                    "Quantum-Train target needs at least 2 parameters, got {params}"
                )
            }
            Error::Empty(what) => write!(f, "{what} is empty"),
            Error::Config { key, reason } => write!(f, "invalid `{key}`: {reason}"),
            Error::HeterogeneousBundles => {
                f.write_str("parameter bundles differ in model kind or length")
            }
            Error::NonFiniteLoss { round, client } => match client {
                Some(c) => write!(f, "non-finite loss in round {round} on client {c}"),
                None => write!(f, "non-finite global loss after round {round}"),
            },
        }
    }
}

impl core::error::Error for Error {}
