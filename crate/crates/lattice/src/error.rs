use thiserror::Error;

pub type Result<T, E = LatticeError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("invalid chain specification: {field} {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("eigendecomposition did not converge")]
    Eigen,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("site {site} at t = {time} lies outside the steady window (front passed at distance < {reach}, window ends at {window_end})")]
    OutsideSteadyWindow {
        site: usize,
        time: f64,
        reach: f64,
        window_end: f64,
    },

    #[error("no front found at distance {distance}: {reason}")]
    FrontNotFound { distance: f64, reason: String },

    #[error("counting field {theta} outside the supported range |theta| <= {limit}")]
    CountingField { theta: f64, limit: f64 },

    #[error("singular determinant at counting field {theta}, t = {time}")]
    SingularDeterminant { theta: f64, time: f64 },

    #[error("log branch guard tripped at k = {k}: argument {re} + {im}i")]
    BranchCut { k: f64, re: f64, im: f64 },

    #[error("adaptive quadrature did not reach tolerance {tolerance} (estimated error {error}) on [{a}, {b}]")]
    Quadrature {
        a: f64,
        b: f64,
        tolerance: f64,
        error: f64,
    },

    #[error("Fock-space oracle limited to {max} sites, got {n}")]
    FockTooLarge { n: usize, max: usize },

    #[error("time grid needs at least {needed} points, got {got}")]
    TimeGrid { needed: usize, got: usize },

    #[error(transparent)]
    Core(#[from] ness_core::Error),
}
