use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: gate {label} is not unitary (max deviation {deviation:.3e})")]
    NonUnitary {
        line: usize,
        label: String,
        deviation: f64,
    },

    #[error("line {line}: qubit {qubit} out of range for {num_qubits} qubit(s)")]
    QubitOutOfRange {
        line: usize,
        qubit: usize,
        num_qubits: usize,
    },

    #[error("line {line}: {message}")]
    StepAssignment { line: usize, message: String },

    #[error("invalid circuit: {}", .0.join("; "))]
    InvalidCircuit(Vec<String>),

    #[error("basis is for M={basis_qubits}, N={basis_steps} but circuit has M={circuit_qubits}, N={circuit_steps}")]
    BasisMismatch {
        basis_qubits: usize,
        basis_steps: usize,
        circuit_qubits: usize,
        circuit_steps: usize,
    },

    #[error("Hilbert space dimension overflows for M={num_qubits}, N={num_steps}")]
    DimensionOverflow { num_qubits: usize, num_steps: usize },

    #[error("coupling {0} outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("step {step} outside 1..={num_steps}")]
    StepOutOfRange { step: usize, num_steps: usize },

    #[error("invalid qubit arguments: {0}")]
    InvalidQubits(String),

    #[error("final row is numerically unoccupied (probability {probability:.3e})")]
    EmptyFinalRow { probability: f64 },

    #[error("dimension {dim} exceeds the dense eigensolver limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigensolver failed at lambda = {lambda}: {source}")]
    Eigensolver {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("time step {dt} too large for operator norm bound {norm_bound:.4}; use dt <= {suggested:.6}")]
    DtTooLarge {
        dt: f64,
        norm_bound: f64,
        suggested: f64,
    },

    #[error("norm drift {drift:.3e} at t = {time} (dt = {dt})")]
    NormDrift { drift: f64, time: f64, dt: f64 },

    #[error("bisection cap exceeded; bracket [{lo}, {hi}]")]
    BisectionCap { lo: f64, hi: f64 },

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
