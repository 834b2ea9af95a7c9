use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank parameter n = {0} is too small (need n >= 2)")]
    RankTooSmall(usize),
    #[error("simple root index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("coweight parameter must be nonzero")]
    ZeroCoweight,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("exact rational input required, got a float matrix")]
    FloatInput,
    #[error("zero highest weight has no projective embedding")]
    ZeroWeight,
    #[error("top eigenvalue is not simple (gap {gap:e} below {threshold:e})")]
    DegenerateTop { gap: f64, threshold: f64 },
    #[error("line is orthogonal to the top eigenvector; outside the chart")]
    ChartOverflow,
    #[error("point lies outside the totally nonnegative part: {0}")]
    Outside(String),
    #[error("index set J = {0:?} is not stable under the diagram automorphism")]
    NotSigmaStable(Vec<usize>),
    #[error("folding sign pattern fails the pinning identity for index {0}")]
    FoldingSign(usize),
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
    #[error("census incomplete: {0}")]
    Undersampled(String),
    #[error("malformed document: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
