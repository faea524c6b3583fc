use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed graph document: {0}")]
    GraphDocument(String),
    #[error("malformed morphism document: {0}")]
    MorphismDocument(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidGeneratorName(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("self-loop on generator `{0}`")]
    SelfLoop(String),
    #[error("malformed word token `{0}`")]
    BadToken(String),
    #[error("elements belong to different graph groups")]
    AlphabetMismatch,
    #[error("`{0}` and `{1}` commute but their images do not")]
    WellDefinednessViolation(String, String),
    #[error("generator subset is not independent: `{0}` and `{1}` commute")]
    NotIndependent(String, String),
    #[error("invalid witness triple: {0}")]
    InvalidTriple(String),
    #[error("graph is not a transitive forest: {0}")]
    NotTransitiveForest(String),
    #[error("graph is not a union of cliques")]
    NotCliqueUnion,
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
