use thiserror::Error;

/// Errors shared across the solver, norm, and symbol machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: only {found} dyadic bands resolvable, need at least {need}")]
    TooFewBands { found: usize, need: usize },

    #[error("band index {j} outside resolvable range [{min}, {max}]")]
    BandOutOfRange { j: i32, min: i32, max: i32 },

    #[error("grids mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("positivity floor crossed: min(1 + eps*a) = {margin:.6e} <= floor {floor:.6e}")]
    PositivityViolation { margin: f64, floor: f64 },

    #[error("time stepping became unstable at t = {t:.6e}: {reason}")]
    Unstable { t: f64, reason: String },

    #[error("eigenvalue routes disagree at xi = {xi:?}: max mismatch {mismatch:.3e}")]
    EigenvalueMismatch { xi: [f64; 3], mismatch: f64 },

    #[error("mode fails decay bound inside validity region: xi = {xi:?}, abscissa {abscissa:.6e} > required {required:.6e}")]
    DecayBoundViolation {
        xi: [f64; 3],
        abscissa: f64,
        required: f64,
    },

    #[error("unreachable target norm: {0}")]
    UnreachableTarget(String),

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed snapshot file: {0}")]
    MalformedSnapshot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
