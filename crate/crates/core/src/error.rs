use thiserror::Error;

/// Errors produced by the simulation, scoring, and benchmarking layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown model family `{0}`")]
    UnknownFamily(String),

    #[error("unknown classifier `{0}`")]
    UnknownClassifier(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unrecognized override key `{0}`")]
    UnknownOverride(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("non-finite state in {family} path (class {class}, path {path}, step {step})")]
    NonFiniteState {
        family: String,
        class: u8,
        path: usize,
        step: usize,
    },

    #[error("non-finite score for path {path}")]
    NonFiniteScore { path: usize },

    #[error("downsample stride {stride} does not divide path length {len}")]
    BadStride { stride: usize, len: usize },

    #[error("dataset does not retain fine paths; regenerate with keep_fine")]
    MissingFinePaths,

    #[error("classifier requires family {expected}, dataset uses {got}")]
    FamilyMismatch { expected: String, got: String },

    #[error("observation grid is not uniform (step {step})")]
    NonUniformGrid { step: usize },

    #[error("score set is empty")]
    EmptyScores,

    #[error("score set contains a single class; both labels are required")]
    SingleClass,

    #[error("path needs at least two observations")]
    PathTooShort,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("invalid split fraction {0}: both sides must be nonempty per class")]
    BadSplit(f64),

    #[error("unknown case `{case}` or setting {setting}")]
    UnknownCase { case: String, setting: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),

    #[error("digest mismatch for {file}: manifest {expected}, computed {got}")]
    DigestMismatch {
        file: String,
        expected: String,
        got: String,
    },

    #[error("schema error in {file}: {reason}")]
    Schema { file: String, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub fn schema(file: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            file: file.into(),
            reason: reason.into(),
        }
    }

    pub fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
