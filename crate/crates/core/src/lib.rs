//! Pitch-channel control laboratory for an agile missile.
//!
//! The crate simulates a nonlinear longitudinal plant with boost-sustain
//! thrust, burn-driven mass and centre-of-gravity shifts, limited
//! second-order actuators with phase-lead compensation, and a noisy,
//! filtered gyro path. A saturated sliding-mode controller tracks pitch
//! steps using only launch-time knowledge of the plant, and a grid-search
//! tuner maps the two channel gains to step-response quality.
//!
//! All models are generic over the scalar type ([`Real`]); `f64` aliases
//! for the main entry points sit at the crate root.

pub mod actuation;
pub mod controller;
pub mod dynamics;
pub mod fsio;
pub mod metrics;
pub mod scalar;
pub mod scenario;
pub mod seeds;
pub mod sensing;
pub mod simulation;
pub mod tuner;

pub mod acceptance;

pub use scalar::Real;
pub use scenario::{Scenario, ScenarioError};

/// Default-precision aliases for the main entry points.
pub type Scenario64 = scenario::Scenario<f64>;
pub type Trajectory64 = simulation::Trajectory<f64>;
pub type StepMetrics64 = metrics::StepMetrics<f64>;
pub type SweepGrid64 = tuner::SweepGrid<f64>;
pub type SweepResult64 = tuner::SweepResult<f64>;
