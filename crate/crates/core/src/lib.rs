//! Deterministic simulation of nonlinear compliant actuation and adaptive
//! control experiments.
//!
//! Models are generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below name the double-precision instantiations used by the CLI.

// `!(x > 0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the matrix algebra in the numeric kernels.
#![allow(clippy::needless_range_loop)]

pub mod actuators;
pub mod afo;
pub mod analysis;
pub mod error;
pub mod optim;
pub mod scalar;
pub mod sim;
pub mod swimmer;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use sim::{integrate, integrate_observed, step_rk4, IntegratorConfig, Rk4, TimeSeries};

pub type TimeSeries64 = sim::TimeSeries<f64>;
pub type IntegratorConfig64 = sim::IntegratorConfig<f64>;
pub type JointGeometry64 = actuators::JointGeometry<f64>;
pub type SpringConfig64 = actuators::SpringConfig<f64>;
pub type MagneticSpringModel64 = actuators::MagneticSpringModel<f64>;
pub type PidGains64 = actuators::PidGains<f64>;
pub type AfoParams64 = afo::AfoParams<f64>;
pub type DuffingParams64 = afo::DuffingParams<f64>;
pub type Spectrum64 = analysis::Spectrum<f64>;
pub type Envelope64 = analysis::Envelope<f64>;
pub type SwimmerConfig64 = swimmer::SwimmerConfig<f64>;
pub type StiffnessProfile64 = swimmer::StiffnessProfile<f64>;

pub type TimeSeries32 = sim::TimeSeries<f32>;
pub type AfoParams32 = afo::AfoParams<f32>;
pub type DuffingParams32 = afo::DuffingParams<f32>;
