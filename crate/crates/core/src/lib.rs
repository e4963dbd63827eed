//! Discrete-time simulator of a two-mass spring hopper landing on a slope.
//!
//! * [`dynamics`] holds the kinematic update, spring and contact model.
//! * [`control`] holds touchdown-angle planning, the impact angular impulse
//!   model, pre-takeoff correction and the horizontal damper.
//! * [`engine`] runs the flight / impact / stance state machine.
//! * [`metrics`] turns a recorded run into drift statistics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod params;
pub mod state;
pub mod vec2;

pub use error::{ControlError, DynamicsError, SimError};
pub use params::{RobotParams, WorldParams};
pub use state::{AttitudeState, MassState, Phase, RobotState};
pub use vec2::Vec2;
