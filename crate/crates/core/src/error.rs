//! Error and warning types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received an out-of-contract parameter.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Requested a correlator combination outside the supported set.
    #[error("unsupported correlator: {requested}; supported: {supported}")]
    Unsupported {
        requested: String,
        supported: &'static str,
    },

    /// Geometric domain error (e.g. spacelike separated events).
    #[error("domain error: {0}")]
    Domain(String),

    /// Massless field in one spatial dimension has no finite answer.
    #[error("infrared divergence: d=1 massless field has no finite correlator; set a positive mass")]
    InfraredDivergence,

    /// Integrable endpoint singularity the caller's quadrature must treat.
    #[error("integrable endpoint singularity at omega = mass (d=1)")]
    EndpointSingularity,

    /// Quadrature failed to reach its tolerance; carries the best estimate.
    #[error("quadrature did not converge: best estimate {best_re}+{best_im}i, residual {residual}")]
    QuadratureNonConvergence {
        best_re: f64,
        best_im: f64,
        residual: f64,
    },

    /// An operation requiring a stationary correlator received a
    /// non-stationary one.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Correlator evaluation failed at a specific comb pair.
    #[error("correlator evaluation failed at pair (m={m}, n={n}), lapse {lapse}: {source}")]
    PairEvaluation {
        m: usize,
        n: usize,
        lapse: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal diagnostics attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Adjacent comb teeth carry overlapping mass above the reporting level.
    TeethOverlap { overlap_mass: f64 },
    /// The largest single-tooth excitation probability is too large for the
    /// leading-order treatment to be trustworthy.
    Perturbativity { max_local_probability: f64 },
    /// The error sequence of a width sweep did not decrease monotonically.
    NonMonotoneSweep,
    /// Measured convergence order contradicted the second-order assumption;
    /// extrapolation fell back to first order.
    FirstOrderFallback { measured_order: f64 },
    /// A subtraction of nearly equal quantities left fewer than three
    /// decades of headroom over the quadrature error estimate.
    PrecisionLimited { value: f64, error_estimate: f64 },
    /// Scaling fit residual too large to trust the reported slope.
    InconclusiveFit { r_squared: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::TeethOverlap { overlap_mass } => {
                write!(f, "teeth overlap: adjacent teeth share mass {overlap_mass:.3e}")
            }
            Warning::Perturbativity { max_local_probability } => write!(
                f,
                "perturbativity: largest single-tooth probability {max_local_probability:.3e} >= 0.1"
            ),
            Warning::NonMonotoneSweep => write!(f, "non-monotone width sweep"),
            Warning::FirstOrderFallback { measured_order } => write!(
                f,
                "measured convergence order {measured_order:.2} contradicts second order; using first order"
            ),
            Warning::PrecisionLimited { value, error_estimate } => write!(
                f,
                "precision-limited subtraction: value {value:.3e} vs quadrature error {error_estimate:.3e}"
            ),
            Warning::InconclusiveFit { r_squared } => {
                write!(f, "inconclusive scaling fit: R^2 = {r_squared:.6}")
            }
        }
    }
}
