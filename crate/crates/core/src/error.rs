use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("body and foot coincide (|d| = {0:e} m)")]
    DegenerateSpring(f64),
    /// The ground would have to pull on the foot. Signals takeoff.
    #[error("required normal force is negative ({0:e} N)")]
    LiftoffDetected(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("flight time must be positive, got {0}")]
    NonpositiveFlightTime(f64),
    #[error("restitution must lie in [0, 1], got {0}")]
    InvalidRestitution(f64),
    #[error("|B + 1/T| = {0:e} is too small to solve for the touchdown angle")]
    DegenerateOptimization(f64),
    #[error("torque window must be positive, got {0}")]
    NonpositiveWindow(f64),
    #[error("probe angles must differ")]
    DegenerateProbes,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error("non-finite state at t = {t} s")]
    NonFinite { t: f64 },
}
