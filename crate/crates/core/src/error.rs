use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon-number sector mismatch: expected {expected} photons, found {found}")]
    SectorMismatch { expected: u32, found: u32 },
    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate occupation vector {0} in state entries")]
    DuplicateKey(String),
    #[error("a state needs at least one entry or an explicit sector")]
    EmptyState,
    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("reflectivity {0} outside [0, 1]")]
    InvalidReflectivity(f64),
    #[error("beamsplitter couples mode {0} to itself")]
    SelfCoupling(usize),
    #[error("matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NonSquare { rows: usize, row: usize, cols: usize },
    #[error("permanent of a {0}x{0} matrix exceeds the supported size")]
    PermanentTooLarge(usize),
    #[error("{found} photons exceeds the supported maximum of {max}")]
    TooManyPhotons { found: u32, max: u32 },
    #[error("mode {0} listed more than once")]
    DuplicateMode(usize),
    #[error("qubit amplitudes have squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("cut {cut} is not defined for gate {gate}")]
    UnknownCut { gate: String, cut: String },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("operation not defined for gate {0:?}")]
    UnsupportedGate(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
