//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the laboratory.
///
/// `Domain` and `UnsupportedChart` signal caller mistakes (bad parameters or
/// out-of-range evaluation points); the remaining variants signal numerical
/// breakdowns that for the built-in families indicate an implementation bug
/// and are therefore worth surfacing loudly rather than papering over.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside its documented domain; the message names the violated
    /// inequality.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative kernel (root bracketing, adaptive quadrature) failed to
    /// reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A chart/family pair with no defined coordinate change.
    #[error("chart {chart} is not defined for family {family}")]
    UnsupportedChart {
        family: &'static str,
        chart: &'static str,
    },

    /// The adaptive step controller underflowed; reported with the latitude
    /// at failure.
    #[error("integrator step size underflow at t = {t}, theta = {theta}")]
    StepFailure { t: f64, theta: f64 },

    /// The rotation number could not be matched to a rational multiple of pi
    /// within the classification threshold.
    #[error("rational classification failed: {0}")]
    Classification(String),

    /// The flow did not return to its initial phase point within the searched
    /// arclength.
    #[error("no closure return within arclength {searched}")]
    NoReturn { searched: f64 },

    /// A profile radicand that embeddability analysis promised nonnegative
    /// came out negative.
    #[error("negative radicand {value} at chart value {at}")]
    NegativeRadicand { at: f64, value: f64 },

    /// Operation not defined for this family (for reasons documented at the
    /// call site, e.g. no embedding analysis exists).
    #[error("unsupported: {0}")]
    Unsupported(String),
}
