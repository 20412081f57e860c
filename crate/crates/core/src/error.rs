use thiserror::Error;

/// Errors produced by the spline library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle (signed area {0:e})")]
    DegenerateTriangle(f64),
    #[error("point ({0}, {1}) lies outside the macrotriangle")]
    OutsideTriangle(f64, f64),
    #[error("degenerate knot set: all knots are collinear")]
    CollinearKnots,
    #[error("invalid multiplicity vector {0:?}")]
    InvalidMultiplicity(String),
    #[error("derivative order {order} exceeds supported maximum {max}")]
    InvalidOrder { order: usize, max: usize },
    #[error("knot triangle straddles subtriangle {0}; knots must lie on the split sites")]
    CellStraddle(usize),
    #[error("Marsden normalization residual {0:e} exceeds tolerance")]
    Normalization(f64),
    #[error("edge reduction mismatch: {0}")]
    EdgeReduction(String),
    #[error("singular matrix (pivot ratio {0:e})")]
    Singular(f64),
    #[error("glyph {0} is not an element of the basis")]
    UnknownGlyph(String),
    #[error("classification mismatch: {0}")]
    ClassificationMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-conforming mesh: {0}")]
    NonConforming(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
