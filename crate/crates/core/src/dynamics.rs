//! Kinematic update, spring forces, slope contact and friction.

use crate::error::DynamicsError;
use crate::params::{RobotParams, WorldParams};
use crate::state::{MassState, RobotState};
use crate::vec2::Vec2;

/// Shortest separation treated as a valid spring.
pub const MIN_SPRING_LENGTH: f64 = 1e-9;

/// Direction the hip holds the leg in while the foot is on the ground.
pub const LEG_AXIS: Vec2 = Vec2::Z;

/// Tangent and outward normal of the slope plane.
pub fn slope_frame(world: &WorldParams) -> (Vec2, Vec2) {
    let (s, c) = world.phi.sin_cos();
    (Vec2::new(c, s), Vec2::new(-s, c))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpringGeometry {
    /// Body position minus foot position.
    pub d: Vec2,
    pub d_hat: Vec2,
    /// Elongation `(|d| - d_0) * d_hat`.
    pub s: Vec2,
}

pub fn spring_geometry(
    body_r: Vec2,
    foot_r: Vec2,
    d_0: f64,
) -> Result<SpringGeometry, DynamicsError> {
    let d = body_r - foot_r;
    let len = d.norm();
    if !(len > MIN_SPRING_LENGTH) {
        return Err(DynamicsError::DegenerateSpring(len));
    }
    let d_hat = d / len;
    Ok(SpringGeometry {
        d,
        d_hat,
        s: d_hat * (len - d_0),
    })
}

/// Accelerations of both masses under gravity and the spring alone.
pub fn flight_accelerations(
    state: &RobotState,
    robot: &RobotParams,
    world: &WorldParams,
) -> Result<(Vec2, Vec2), DynamicsError> {
    let geo = spring_geometry(state.body.r, state.foot.r, robot.d_0)?;
    let g = Vec2::new(0.0, -world.g);
    Ok((
        g - geo.s * (robot.k / robot.m_b),
        g + geo.s * (robot.k / robot.m_f),
    ))
}

/// Foot acceleration that cancels its velocity over one sample.
pub fn impact_acceleration(v_foot_prev: Vec2, dt: f64) -> Vec2 {
    -v_foot_prev / dt
}

fn advance(m: &MassState, a: Vec2, dt: f64) -> MassState {
    MassState {
        r: m.r + m.v * dt + a * (0.5 * dt * dt),
        v: m.v + a * dt,
        a,
    }
}

/// One sample of the constant-acceleration update for both masses and the pitch angle.
pub fn integrate_step(state: &RobotState, a_b: Vec2, a_f: Vec2, dt: f64) -> RobotState {
    let mut next = *state;
    next.body = advance(&state.body, a_b, dt);
    next.foot = advance(&state.foot, a_f, dt);
    next.attitude.alpha += state.attitude.omega * dt;
    next.t += dt;
    next
}

/// Copy of `state` with both positions moved half a sample along their velocities.
pub fn half_step_positions(state: &RobotState, dt: f64) -> RobotState {
    let mut mid = *state;
    mid.body.r += state.body.v * (0.5 * dt);
    mid.foot.r += state.foot.v * (0.5 * dt);
    mid
}

/// Signed distance from the foot surface to the slope plane. Negative means penetration.
pub fn contact_gap(foot_r: Vec2, foot_radius: f64, world: &WorldParams) -> f64 {
    let (_, n_hat) = slope_frame(world);
    foot_r.dot(n_hat) - foot_radius
}

/// Spring elongation along the leg axis while in stance.
pub fn stance_spring(body_r: Vec2, foot_r: Vec2, d_0: f64) -> Vec2 {
    LEG_AXIS * ((body_r - foot_r).dot(LEG_AXIS) - d_0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootReaction {
    /// Total ground force on the foot.
    pub force: Vec2,
    /// Normal component, `>= 0`.
    pub normal: f64,
    /// Tangential component of `force` along the slope tangent.
    pub tangential: f64,
    pub slipping: bool,
}

/// Ground reaction on the stance foot.
///
/// A pinned foot (zero velocity) gets the reaction that cancels the spring and
/// its weight, unless that violates the static friction cone. A sliding foot
/// gets kinetic friction against its tangential velocity.
pub fn stance_foot_reaction(
    state: &RobotState,
    robot: &RobotParams,
    world: &WorldParams,
) -> Result<FootReaction, DynamicsError> {
    let (t_hat, n_hat) = slope_frame(world);
    let applied = stance_spring(state.body.r, state.foot.r, robot.d_0) * robot.k
        + Vec2::new(0.0, -robot.m_f * world.g);
    let normal = -applied.dot(n_hat);
    if normal < 0.0 {
        return Err(DynamicsError::LiftoffDetected(normal));
    }
    let v_t = state.foot.v.dot(t_hat);
    let (tangential, slipping) = if state.foot.v == Vec2::ZERO {
        let f_t = -applied.dot(t_hat);
        if f_t.abs() <= world.mu_s * normal {
            (f_t, false)
        } else {
            (f_t.signum() * world.mu_k * normal, true)
        }
    } else {
        (-v_t.signum() * world.mu_k * normal, true)
    };
    Ok(FootReaction {
        force: n_hat * normal + t_hat * tangential,
        normal,
        tangential,
        slipping,
    })
}

pub fn mechanical_energy(state: &RobotState, robot: &RobotParams, world: &WorldParams) -> f64 {
    let b = &state.body;
    let f = &state.foot;
    let s = (b.r - f.r).norm() - robot.d_0;
    0.5 * robot.m_b * b.v.norm_sq()
        + 0.5 * robot.m_f * f.v.norm_sq()
        + robot.m_b * world.g * b.r.z
        + robot.m_f * world.g * f.r.z
        + 0.5 * robot.k * s * s
        + 0.5 * robot.inertia * state.attitude.omega * state.attitude.omega
}

/// Mass-weighted average of both masses.
pub fn com_state(state: &RobotState, robot: &RobotParams) -> MassState {
    let m = robot.total_mass();
    let (wb, wf) = (robot.m_b / m, robot.m_f / m);
    MassState {
        r: state.body.r * wb + state.foot.r * wf,
        v: state.body.v * wb + state.foot.v * wf,
        a: state.body.a * wb + state.foot.a * wf,
    }
}

/// Total angular momentum about the center of mass: orbital part of both masses plus body spin.
pub fn angular_momentum_about_com(state: &RobotState, robot: &RobotParams) -> f64 {
    let c = com_state(state, robot);
    let orbital = |m: f64, s: &MassState| m * (s.r - c.r).cross(s.v - c.v);
    orbital(robot.m_b, &state.body) + orbital(robot.m_f, &state.foot) + state.attitude.l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{AttitudeState, Phase};

    fn state(body: Vec2, foot: Vec2) -> RobotState {
        RobotState {
            body: MassState::at_rest(body),
            foot: MassState::at_rest(foot),
            attitude: AttitudeState::default(),
            phase: Phase::Stance,
            t: 0.0,
        }
    }

    #[test]
    fn coincident_masses_are_rejected() {
        let p = Vec2::new(0.2, 0.3);
        assert!(matches!(
            spring_geometry(p, p, 0.1),
            Err(DynamicsError::DegenerateSpring(_))
        ));
    }

    #[test]
    fn flat_static_reaction_carries_foot_weight() {
        let world = WorldParams {
            phi: 0.0,
            ..WorldParams::reference()
        };
        let robot = RobotParams::reference();
        let r = stance_foot_reaction(
            &state(Vec2::new(0.0, 0.105), Vec2::new(0.0, 0.005)),
            &robot,
            &world,
        )
        .unwrap();
        assert_eq!(r.tangential, 0.0);
        assert!(!r.slipping);
        assert!((r.normal - robot.m_f * world.g).abs() < 1e-12);
    }

    #[test]
    fn stretched_leg_pulls_foot_off_the_ground() {
        let robot = RobotParams::reference();
        let r = stance_foot_reaction(
            &state(Vec2::new(0.0, 0.2), Vec2::ZERO),
            &robot,
            &WorldParams::reference(),
        );
        assert!(matches!(r, Err(DynamicsError::LiftoffDetected(n)) if n < 0.0));
    }

    #[test]
    fn sliding_foot_gets_kinetic_friction_against_motion() {
        let world = WorldParams::reference();
        let robot = RobotParams::reference();
        let (t_hat, _) = slope_frame(&world);
        let mut s = state(Vec2::new(0.0, 0.09), Vec2::ZERO);
        s.foot.v = t_hat * -0.2;
        let r = stance_foot_reaction(&s, &robot, &world).unwrap();
        assert!(r.slipping);
        assert!((r.tangential - world.mu_k * r.normal).abs() < 1e-15);
    }

    #[test]
    fn pinned_reaction_cancels_applied_forces() {
        let world = WorldParams::reference();
        let robot = RobotParams::reference();
        let s = state(Vec2::new(0.001, 0.08), Vec2::ZERO);
        let r = stance_foot_reaction(&s, &robot, &world).unwrap();
        let applied = stance_spring(s.body.r, s.foot.r, robot.d_0) * robot.k
            + Vec2::new(0.0, -robot.m_f * world.g);
        let net = applied + r.force;
        assert!(net.norm() < 1e-12, "{net:?}");
    }
}
