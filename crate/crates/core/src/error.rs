use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: i64, rank: usize },
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("trivial subgroup")]
    TrivialSubgroup,
    #[error("images do not form a basis")]
    NotABasis,
    #[error("word is not in the subgroup")]
    NotInSubgroup,
    #[error("subgroup is not a free factor: {0}")]
    NotFreeFactor(String),
    #[error("invalid marked graph: {0}")]
    InvalidMarkedGraph(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("factor is not embedded in the marked graph")]
    NotEmbedded,
    #[error("projection undefined: {0}")]
    ProjectionUndefined(String),
    #[error("{0} is not a proper rank-1 factor of the target")]
    NotARankOneFactor(String),
    #[error("same vertex given twice")]
    SameVertex,
    #[error("no conjugator found: {0}")]
    NoConjugator(String),
    #[error("syllables must be nonzero: {0}")]
    BadSyllables(String),
    #[error("chain hypothesis fails at index {index}: {reason}")]
    ChainHypothesis { index: usize, reason: String },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
