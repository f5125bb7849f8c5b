//! Simulation library for the response of a pulsed two-level detector
//! coupled to a scalar field, and for the reconstruction of the field's
//! two-point correlator from excitation probabilities.
//!
//! The building blocks:
//!
//! - [`switching`]: unit-area pulse shapes, width-parametrized pulses,
//!   and combs of evenly spaced pulses.
//! - [`trajectories`]: inertial and uniformly accelerated worldlines and
//!   invariant intervals.
//! - [`correlators`]: regulated two-point kernels of the lapse (closed
//!   forms, spectral integrals, toy single-mode states) plus their
//!   Fourier-side rates.
//! - [`response`]: the leading-order excitation probability of a comb and
//!   its split into local and non-local parts.
//! - [`delta_limit`]: the zero-width limit of the non-local terms, width
//!   sweeps with extrapolation, density of states, and the single-kick
//!   scaling experiment.
//! - [`protocol`]: gap synchronization and the reconstruction of the
//!   correlator from probability differences.
//!
//! All math is generic over the scalar type via [`real::Real`]; concrete
//! `f64` aliases live at the crate root.

pub mod correlators;
pub mod delta_limit;
pub mod error;
pub mod extrapolate;
pub mod protocol;
pub mod quad;
pub mod real;
pub mod response;
pub mod special;
pub mod switching;
pub mod trajectories;

pub use error::{Error, Result, Warning};
pub use real::{Cplx, Real};

/// Concrete `f64` instantiations of the main types.
pub type C64 = num_complex::Complex<f64>;
pub type NascentDelta64 = switching::NascentDelta<f64>;
pub type Comb64 = switching::Comb<f64>;
pub type Worldline64 = trajectories::Worldline<f64>;
pub type Event64 = trajectories::Event<f64>;
pub type CorrelatorSpec64 = correlators::CorrelatorSpec<f64>;
pub type StationaryCorrelator64 = correlators::StationaryCorrelator<f64>;
pub type Detector64 = response::Detector<f64>;
pub type ProbeOutcome64 = response::ProbeOutcome<f64>;
pub type EtaSchedule64 = delta_limit::EtaSchedule<f64>;
pub type ScalingReport64 = delta_limit::ScalingReport<f64>;
pub type ProtocolConfig64 = protocol::ProtocolConfig<f64>;
pub type ReconstructionResult64 = protocol::ReconstructionResult<f64>;
pub type QuadConfig64 = quad::QuadConfig<f64>;
