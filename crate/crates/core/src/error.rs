use thiserror::Error;

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("rank deficient Jacobian: smallest singular value {smallest:.3e} below {threshold:.3e}")]
    Rank { smallest: f64, threshold: f64 },
    #[error("normal bundle is not flat: max shape-operator commutator {0:.3e}")]
    Flatness(f64),
    #[error("principal decomposition is not generic after {0} attempts")]
    Genericity(usize),
    #[error("immersion is not Einstein: max deviation {0:.3e}")]
    NotEinstein(f64),
    #[error("tangential part of the vertical field vanishes (|T| = {0:.3e})")]
    DegenerateT(f64),
    #[error("immersion is not minimal: |H| = {0:.3e}")]
    NotMinimal(f64),
    #[error("warped product spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("parameter `{name}` out of range: {reason}")]
    ParamRange { name: String, reason: String },
}
