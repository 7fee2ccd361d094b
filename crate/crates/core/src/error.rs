use crate::thermo::Side;
use crate::C64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// `Re(beta - i lambda)` is not safely positive.
    #[error(
        "{side} chiral term outside its analytic domain at lambda = {lambda}: \
         too close to or beyond the pole lambda = {pole}"
    )]
    PoleDomain { side: Side, lambda: C64, pole: C64 },

    #[error("one-point function needs Re(beta) > 0, got beta = {beta}")]
    OnePointDomain { beta: C64 },

    #[error("c* reduction requires beta_l mu_l = beta_r mu_r; mismatch {mismatch:e} exceeds {tolerance:e}")]
    OffConstraintSurface { mismatch: f64, tolerance: f64 },

    #[error("series operation `{op}` needs a nonzero constant term")]
    ZeroConstantTerm { op: &'static str },

    #[error("series is not a log-generating function: constant term {constant}")]
    NotLogGenerating { constant: C64 },

    #[error("sector {sector} is not in 0..{modulus}")]
    InvalidSector { sector: i64, modulus: i64 },

    #[error(
        "q-series truncated at order {order} is insufficient: boundary terms are \
         {ratio:e} of the sum; raise the order or lower R/beta"
    )]
    TruncationInsufficient { order: i64, ratio: f64 },

    #[error("integer overflow while expanding a product to order {order}")]
    Overflow { order: i64 },

    #[error("q-series operation `{op}` unsupported: {reason}")]
    UnsupportedSeries { op: &'static str, reason: &'static str },
}
