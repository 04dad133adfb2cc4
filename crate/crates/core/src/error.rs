use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("point {point} out of range for domain of size {size}")]
    PointOutOfRange { point: usize, size: usize },

    #[error("image list {0:?} is not a bijection")]
    NotABijection(Vec<usize>),

    #[error("domain mismatch: expected degree {expected}, got {got}")]
    DomainMismatch { expected: usize, got: usize },

    #[error("{context}: group must be non-trivial")]
    TrivialGroup { context: &'static str },

    #[error("subset is not invariant: generator {generator} maps {point} outside the subset")]
    SubsetNotInvariant { generator: usize, point: usize },

    #[error("search budget exceeded: {what}")]
    BudgetExceeded { what: String },

    #[error("materialization cap exceeded: {what} (size {size}, cap {cap})")]
    CapExceeded {
        what: String,
        size: String,
        cap: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level {level} out of range for a sequence of {len} terms")]
    LevelOutOfRange { level: usize, len: usize },

    #[error("chain step {step}: subgroup is not normal in its predecessor")]
    NonNormalStep { step: usize },

    #[error("chain step {step}: factor of order {order} is not simple")]
    NonSimpleFactor { step: usize, order: usize },

    #[error("composition chain does not terminate in the trivial group")]
    NonTrivialTail,

    #[error("chain step {step}: not strictly decreasing")]
    NotStrictlyDecreasing { step: usize },

    #[error("element does not belong to the group: {0}")]
    NotAMember(String),

    #[error("coset representative undefined: element lies outside the subgroup level {level}")]
    RepresentativeUndefined { level: usize },

    #[error("degree {degree} embedding rejected: {reason}")]
    DegreeRejected { degree: String, reason: String },

    #[error("term {index} is not transitive; verdicts require transitive terms")]
    NonTransitiveTerm { index: usize },

    #[error("no subgroup witness available for term {term} into term {target}")]
    MissingWitness { term: usize, target: usize },

    #[error("index map must be strictly increasing and exceed the identity somewhere: {0}")]
    BadIndexMap(String),

    #[error("unknown group spec `{0}`")]
    UnknownSpec(String),

    #[error("group `{0}` is only available as catalog metadata, not as a permutation group")]
    MetadataOnly(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
