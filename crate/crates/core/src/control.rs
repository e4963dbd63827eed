//! Slope-aware landing control: touchdown-angle planning, the impact angular
//! impulse model, pre-takeoff correction and the horizontal damper.

use crate::error::ControlError;
use crate::params::{RobotParams, WorldParams};
use crate::state::RobotState;
use crate::vec2::Vec2;

/// Which mass the ground stops at impact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImpactMass {
    Foot,
    Total,
}

impl ImpactMass {
    pub fn value(self, robot: &RobotParams) -> f64 {
        match self {
            ImpactMass::Foot => robot.m_f,
            ImpactMass::Total => robot.total_mass(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlConfig {
    /// Slope-aware touchdown angle. When off the robot still lands upright.
    pub step1_enabled: bool,
    pub step2_torque_enabled: bool,
    pub step2_damper_enabled: bool,
    /// Lean relative to the slope normal at touchdown.
    pub alpha_real: f64,
    pub gamma: f64,
    pub t_s: f64,
    pub e: f64,
    /// Aim for the corrected optimum instead of `alpha_real + phi`.
    pub use_optimal_alpha: bool,
    /// `(A, B)` for the corrected optimum. Calibrated from probe hops when absent.
    pub ab: Option<(f64, f64)>,
    pub impact_mass: ImpactMass,
}

impl ControlConfig {
    pub fn off() -> Self {
        ControlConfig {
            step1_enabled: false,
            step2_torque_enabled: false,
            step2_damper_enabled: false,
            alpha_real: 0.006f64.to_radians(),
            gamma: 7.0,
            t_s: 0.02,
            e: 0.0,
            use_optimal_alpha: false,
            ab: None,
            impact_mass: ImpactMass::Foot,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err("gamma must be non-negative".into());
        }
        if !(self.t_s > 0.0 && self.t_s.is_finite()) {
            return Err("t_s must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.e) {
            return Err("e must lie in [0, 1]".into());
        }
        if !self.alpha_real.is_finite() {
            return Err("alpha_real must be finite".into());
        }
        Ok(())
    }
}

/// World-frame body angle to land at.
pub fn desired_touchdown_angle(alpha_real: f64, phi: f64) -> f64 {
    alpha_real + phi
}

/// Body angle after a ballistic flight of duration `t` at constant spin.
pub fn predict_body_angle(alpha_0: f64, omega_0: f64, t: f64) -> f64 {
    alpha_0 + omega_0 * t
}

/// Spin at takeoff that lands the body at `alpha_d`.
pub fn takeoff_rotation_rate(alpha_0: f64, alpha_d: f64, t: f64) -> Result<f64, ControlError> {
    if !(t > 0.0) {
        return Err(ControlError::NonpositiveFlightTime(t));
    }
    Ok((alpha_d - alpha_0) / t)
}

/// Normal impulse needed to stop mass `m` approaching at `v_n_td`.
pub fn impact_impulse(m: f64, e: f64, v_n_td: f64) -> Result<f64, ControlError> {
    if !(0.0..=1.0).contains(&e) {
        return Err(ControlError::InvalidRestitution(e));
    }
    Ok(m * (1.0 + e) * v_n_td)
}

pub fn impact_angular_impulse(r_perp: f64, j_n: f64) -> f64 {
    r_perp * j_n
}

/// Signed distance from the center of mass to the line of the normal impulse
/// through the contact point.
///
/// The center of mass sits on the body axis at `(m_b / M) * |d|` from the foot;
/// the body axis points along `(-sin alpha, cos alpha)`. The result is zero when
/// the body is aligned with the slope normal and positive for a body more upright
/// than the normal.
pub fn lever_arm(state: &RobotState, robot: &RobotParams, world: &WorldParams) -> f64 {
    let d = (state.body.r - state.foot.r).norm();
    com_distance(d, robot) * (world.phi - state.attitude.alpha).sin()
}

fn com_distance(d: f64, robot: &RobotParams) -> f64 {
    robot.m_b / robot.total_mass() * d
}

/// Lever arm for a body at angle `alpha` with body-to-foot distance `d`.
pub fn lever_arm_at(alpha: f64, d: f64, robot: &RobotParams, world: &WorldParams) -> f64 {
    com_distance(d, robot) * (world.phi - alpha).sin()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpulsePrediction {
    pub m: f64,
    pub e: f64,
    pub v_n_td: f64,
    pub j_n: f64,
    pub r_perp: f64,
    pub dl_impact: f64,
}

impl ImpulsePrediction {
    pub fn new(m: f64, e: f64, v_n_td: f64, r_perp: f64) -> Result<Self, ControlError> {
        let j_n = impact_impulse(m, e, v_n_td)?;
        Ok(ImpulsePrediction {
            m,
            e,
            v_n_td,
            j_n,
            r_perp,
            dl_impact: impact_angular_impulse(r_perp, j_n),
        })
    }
}

/// Lean angle balancing the impact sensitivity against the rotation needed in flight.
pub fn optimal_touchdown_angle(
    a: f64,
    b: f64,
    t: f64,
    alpha_d: f64,
    alpha_0: f64,
) -> Result<f64, ControlError> {
    if !(t > 0.0) {
        return Err(ControlError::NonpositiveFlightTime(t));
    }
    let den = b + 1.0 / t;
    if !(den.abs() >= 1e-12) {
        return Err(ControlError::DegenerateOptimization(den.abs()));
    }
    Ok((alpha_d * b - a + alpha_0 / t) / den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TouchdownOptimization {
    pub a: f64,
    pub b: f64,
    pub alpha_d_star: f64,
}

/// Affine fit `dL(alpha) = A + B * (alpha - alpha_nominal)` through two probe measurements.
pub fn fit_ab(alpha_nominal: f64, probes: [(f64, f64); 2]) -> Result<(f64, f64), ControlError> {
    let [(a1, y1), (a2, y2)] = probes;
    if a1 == a2 {
        return Err(ControlError::DegenerateProbes);
    }
    let b = (y2 - y1) / (a2 - a1);
    Ok((y1 - b * (a1 - alpha_nominal), b))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationError<E> {
    Control(ControlError),
    Probe(E),
}

/// Measures the angular impulse at both probe angles and fits `(A, B)`.
pub fn calibrate_ab<E, F>(
    alpha_nominal: f64,
    probe_angles: [f64; 2],
    mut probe: F,
) -> Result<(f64, f64), CalibrationError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if probe_angles[0] == probe_angles[1] {
        return Err(CalibrationError::Control(ControlError::DegenerateProbes));
    }
    let mut pts = [(0.0, 0.0); 2];
    for (pt, &alpha) in pts.iter_mut().zip(&probe_angles) {
        *pt = (alpha, probe(alpha).map_err(CalibrationError::Probe)?);
    }
    fit_ab(alpha_nominal, pts).map_err(CalibrationError::Control)
}

/// Angular impulse to add before takeoff so the upcoming impact leaves no spin.
pub fn pre_takeoff_impulse(l_minus: f64, dl_impact: f64) -> f64 {
    -l_minus + dl_impact
}

pub fn pre_takeoff_torque(dl_pre: f64, t_s: f64) -> Result<f64, ControlError> {
    if !(t_s > 0.0) {
        return Err(ControlError::NonpositiveWindow(t_s));
    }
    Ok(dl_pre / t_s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreTakeoffCorrection {
    pub l_minus: f64,
    pub dl_pre: f64,
    pub t_s: f64,
    pub tau: f64,
}

impl PreTakeoffCorrection {
    pub fn new(l_minus: f64, dl_impact: f64, t_s: f64) -> Result<Self, ControlError> {
        let dl_pre = pre_takeoff_impulse(l_minus, dl_impact);
        Ok(PreTakeoffCorrection {
            l_minus,
            dl_pre,
            t_s,
            tau: pre_takeoff_torque(dl_pre, t_s)?,
        })
    }
}

/// Force opposing horizontal velocity.
pub fn horizontal_damping_force(gamma: f64, v: Vec2) -> Vec2 {
    Vec2::new(-gamma * v.x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttitudePlan {
    pub alpha_real: f64,
    pub alpha_d: f64,
    pub alpha_0: f64,
    pub omega_0: f64,
    pub t: f64,
    pub t_td: f64,
}

impl AttitudePlan {
    /// Plan made at takeoff time `t_0` for a flight of predicted duration `t`.
    pub fn new(
        alpha_real: f64,
        phi: f64,
        alpha_0: f64,
        t: f64,
        t_0: f64,
    ) -> Result<Self, ControlError> {
        let alpha_d = desired_touchdown_angle(alpha_real, phi);
        let omega_0 = takeoff_rotation_rate(alpha_0, alpha_d, t)?;
        Ok(AttitudePlan {
            alpha_real,
            alpha_d,
            alpha_0,
            omega_0,
            t,
            t_td: t_0 + t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_paths() {
        assert_eq!(
            takeoff_rotation_rate(0.0, 1.0, 0.0),
            Err(ControlError::NonpositiveFlightTime(0.0))
        );
        assert!(matches!(
            impact_impulse(0.005, 1.5, 1.0),
            Err(ControlError::InvalidRestitution(_))
        ));
        assert!(matches!(
            impact_impulse(0.005, -0.1, 1.0),
            Err(ControlError::InvalidRestitution(_))
        ));
        assert!(matches!(
            optimal_touchdown_angle(0.0, -2.0, 0.5, 0.0, 0.0),
            Err(ControlError::DegenerateOptimization(_))
        ));
        assert_eq!(
            pre_takeoff_torque(1.0, 0.0),
            Err(ControlError::NonpositiveWindow(0.0))
        );
        assert_eq!(
            fit_ab(0.0, [(0.1, 1.0), (0.1, 2.0)]),
            Err(ControlError::DegenerateProbes)
        );
    }

    #[test]
    fn affine_fit_recovers_line() {
        let (a, b) = fit_ab(0.5, [(0.49, 0.3 - 0.01 * 2.0), (0.51, 0.3 + 0.01 * 2.0)]).unwrap();
        assert!((a - 0.3).abs() < 1e-15 && (b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn plan_lands_on_target() {
        let p = AttitudePlan::new(1e-4, 0.5, 0.1, 0.7, 2.0).unwrap();
        assert!((predict_body_angle(p.alpha_0, p.omega_0, p.t) - p.alpha_d).abs() < 1e-15);
        assert_eq!(p.t_td, 2.7);
    }

    #[test]
    fn damper_never_adds_energy() {
        for vx in [-2.0, -0.1, 0.0, 0.3] {
            let v = Vec2::new(vx, -1.0);
            assert!(horizontal_damping_force(7.0, v).dot(v) <= 0.0);
        }
    }
}
