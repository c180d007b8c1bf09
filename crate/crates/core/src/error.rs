use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("backend mismatch: cannot combine exact and float matrices here")]
    BackendMismatch,

    #[error("dimension mismatch: {left} qubits vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("partial trace needs at least one qubit")]
    NoQubitToTrace,

    #[error("matrix has {len} entries, expected {expected} for {n_qubits} qubits")]
    BadShape { n_qubits: usize, len: usize, expected: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: String },

    #[error("matrix is not a projection: {reason}")]
    NotProjection { reason: String },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("projection annihilates state (weight {weight:e})")]
    ProjectionAnnihilatesState { weight: f64 },

    #[error("depth {requested} exceeds the declared bound {max}")]
    DepthExceeded { requested: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("measure invariant violated at {at}: {detail}")]
    MeasureInvariant { at: String, detail: String },

    #[error("measure bound violated at level {level}: measure {measure} > bound {bound}")]
    MeasureBoundViolated { level: usize, measure: String, bound: String },

    #[error("mass bound violated: {0}")]
    MassBoundViolated(String),

    #[error("sequence is not monotone at depth {depth} (deviation {deviation:e})")]
    NotMonotone { depth: usize, deviation: f64 },

    #[error("state passes at this level: value {value} does not exceed {threshold}")]
    StatePasses { value: f64, threshold: f64 },

    #[error("statistic undefined at this depth: {0}")]
    StatisticUndefined(String),

    #[error("malformed test: {0}")]
    MalformedTest(String),

    #[error("no witness of length at most {n} reaches the requested accuracy")]
    NoWitness { n: usize },

    #[error("empty list of values")]
    EmptyValues,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
