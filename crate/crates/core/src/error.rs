use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid needs at least 8 points, got {0}")]
    GridTooSmall(usize),
    #[error("invalid grid extent [{x_min}, {x_max}]")]
    InvalidExtent { x_min: f64, x_max: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grids are incompatible: {0}")]
    GridMismatch(String),
    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },
    #[error("derivative evaluation returned non-finite values")]
    NonFiniteDerivative,
    #[error(
        "imaginary-time relaxation did not converge in {steps} steps (last relative energy change {last_change:e})"
    )]
    NotConverged { steps: usize, last_change: f64 },
    #[error("stationary residual {residual:e} exceeds {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("deflation failed: mode overlap {overlap:e}")]
    DeflationFailed { overlap: f64 },
    #[error("doublet splitting {0:e} is not positive")]
    NonPositiveSplitting(f64),
    #[error("quadrature paths disagree: direct {direct:e}, fft {fft:e}")]
    QuadratureMismatch { direct: f64, fft: f64 },
    #[error("norm drift {drift:e} exceeds {limit:e}")]
    NormDrift { drift: f64, limit: f64 },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("two-bit coefficient mode is not set")]
    CoefficientModeUnset,
    #[error("derived coefficient mode requires overlap tensors")]
    MissingTensors,
    #[error("closed form requires zero tunneling, got omega_a = {omega_a}, omega_b = {omega_b}")]
    NonzeroTunneling { omega_a: f64, omega_b: f64 },
    #[error("closed form requires a diagonal generator; off-diagonal tensor weight {0:e}")]
    NonDiagonalGenerator(f64),
    #[error("trajectory needs at least 3 uniformly spaced snapshots, got {0}")]
    TooFewSnapshots(usize),
    #[error("trajectory snapshots are not uniformly spaced")]
    NonUniformSnapshots,
    #[error("wrong number of pair-field components: expected {expected}, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("singular value decomposition failed")]
    SvdFailed,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
