use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid spacing {spacing_nm} nm exceeds the {max_nm} nm limit")]
    GridTooCoarse { spacing_nm: f64, max_nm: f64 },

    #[error("non-uniform grid: {0}")]
    NonUniformGrid(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular matrix during factorization at row {0}")]
    Singular(usize),

    #[error("at k-point {index}: {source}")]
    AtKPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("barrier collapsed, dots not confined (barrier height {barrier_mev} meV)")]
    BarrierCollapsed { barrier_mev: f64 },

    #[error("found {found} bound states, need {needed}")]
    NotEnoughBoundStates { found: usize, needed: usize },

    #[error("bound state {state} has {found} interior nodes, expected {expected}")]
    WrongNodeCount {
        state: &'static str,
        found: usize,
        expected: usize,
    },

    #[error("density not normalized: integral is {0}")]
    Unnormalized(f64),

    #[error("charge-transition crossing: exchange denominator {0} is not positive")]
    ChargeTransitionCrossing(f64),

    #[error("non-positive exchange J = {0} μeV")]
    NonPositiveExchange(f64),

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("norm drift {0:e} exceeds the propagator tolerance")]
    NormDrift(f64),

    #[error("leakage {0:e} out of the computational subspace exceeds the threshold")]
    Leakage(f64),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("no coupler between qubits {0} and {1}")]
    NotNeighbors(usize, usize),

    #[error("instruction {index}: {source}")]
    AtInstruction {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("circuit parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
