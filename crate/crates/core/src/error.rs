use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("empty vertex set")]
    EmptyVertexSet,

    #[error("zero module where a nonzero module is required")]
    ZeroModule,

    #[error("orientation mismatch: {0}")]
    ParityMismatch(String),

    #[error("vertex {0} is not a sink")]
    NotASink(String),

    #[error("vertex {0} is not a source")]
    NotASource(String),

    #[error("module has locally reflected vertices; finish the shift first")]
    PartiallyReflected,

    #[error("module failed validation:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),

    #[error("radical needs p > {required} (field has p = {p})")]
    FieldTooSmall { p: u64, required: usize },

    #[error("module is decomposable")]
    Decomposable,

    #[error("module is not regular")]
    NotRegular,

    #[error("regularity undetermined within {0} Coxeter steps")]
    RegularityUndetermined(usize),

    #[error("endomorphism ring is not local with one-dimensional top (End/rad has dimension {0})")]
    NotLocalBrickTop(usize),

    #[error("socle of Ext^1 is zero")]
    ZeroSocle,

    #[error("ray construction failed at step {step}: {reason}")]
    RayStep { step: usize, reason: String },

    #[error("horizon too small: {0}; widen the horizon")]
    Horizon(String),

    #[error("generator exhausted after {attempts} attempts ({decomposable} decomposable, {non_regular} non-regular, {too_large} over budget)")]
    Exhausted {
        attempts: usize,
        decomposable: usize,
        non_regular: usize,
        too_large: usize,
    },

    #[error("structural law falsified: {claim}")]
    Falsified {
        claim: String,
        bundle: serde_json::Value,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn falsified(claim: impl Into<String>, bundle: serde_json::Value) -> Self {
        Error::Falsified {
            claim: claim.into(),
            bundle,
        }
    }
}
