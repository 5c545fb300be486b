use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {msg} at line {line}")]
    Parse { line: usize, msg: String },

    #[error("invalid molecule: {0}")]
    Molecule(String),

    #[error("invalid basis: {0}")]
    Basis(String),

    #[error("nuclear coincidence between atoms {0} and {1}")]
    NuclearCoincidence(usize, usize),

    #[error("FCIDUMP: {0}")]
    Fcidump(String),

    #[error("linear dependence in basis (smallest overlap eigenvalue {0:e})")]
    LinearDependence(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-canonical orbitals: off-diagonal Fock element {0:e}")]
    NonCanonical(f64),

    #[error("degenerate occupied/virtual gap for pair ({i},{j}) -> ({a},{b})")]
    DegenerateGap { i: usize, j: usize, a: usize, b: usize },

    #[error("qubit budget {requested} infeasible: {reason} (maximum feasible {max_feasible})")]
    Budget { requested: usize, max_feasible: usize, reason: String },

    #[error("linearly dependent PNO selection")]
    LinearlyDependentPnos,

    #[error("invalid orbital selection: {0}")]
    Orbitals(String),

    #[error("operator: {0}")]
    Operator(String),

    #[error("ansatz: {0}")]
    Ansatz(String),

    #[error("PNO metadata required")]
    MissingPnoMetadata,

    #[error("state: {0}")]
    State(String),

    #[error("non-Hermitian operator (imaginary part {0:e})")]
    NonHermitian(f64),

    #[error("optimizer aborted: {msg} at theta = {theta:?}")]
    NonFinite { msg: String, theta: Vec<f64> },

    #[error("oracle: {0}")]
    Oracle(String),

    #[error("not converged: {0}")]
    Convergence(String),

    #[error("config: {0}")]
    Config(String),

    #[error("metrics: {0}")]
    Metrics(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}
