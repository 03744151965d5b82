//! Radar-threat aware path planning with navigation uncertainty.
//!
//! The crate couples a single-pulse radar detection model with an aided
//! inertial navigation covariance model. Navigation errors are mapped into a
//! standard deviation of the probability of detection, which drives an
//! iterative visibility-graph planner around radar detection polygons.
//!
//! Modules, from the bottom up:
//!
//! * [`math`]: rotations, skew matrices and the error function pair.
//! * [`radar`]: detection probability, ellipsoid RCS and analytic Jacobians.
//! * [`trajectory`]: clothoid fillets and sampled trajectories with IMU signals.
//! * [`ins`]: 15-state error covariance propagation and measurement updates.
//! * [`lincov`]: augmented truth/navigation dispersion analysis and error budgets.
//! * [`montecarlo`]: a full error-state filter ensemble used as a validation oracle.
//! * [`planner`]: radar polygons, visibility graph search and polygon expansion.
//! * [`scenario`]: configuration parsing and result export.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ins;
pub mod lincov;
pub mod math;
pub mod montecarlo;
pub mod planner;
pub mod radar;
pub mod scenario;
pub mod trajectory;

pub use error::{Error, Result};
