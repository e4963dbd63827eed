//! Hybrid flight / impact / stance state machine.
//!
//! Model summary:
//! * Flight: both masses move under gravity and the spring, with accelerations
//!   evaluated at the mid-sample positions so the update stays symplectic.
//! * Impact: one sample. The foot is stopped, projected back onto the slope and
//!   pinned. The angular impulse of the normal impulse about the center of mass
//!   rotates the robot about the foot, split between body spin and body swing.
//! * Stance: the hip holds the leg along world vertical and the spring acts along
//!   that axis. The foot sticks or slides by the Coulomb test. Liftoff happens
//!   when the leg is back at rest length and extending; a hard stop then locks
//!   both masses to the center-of-mass velocity and the hip swings the leg back
//!   under the body.
//! * Attitude: at liftoff the pitch rate is set so the body reaches its target
//!   angle at the predicted touchdown. The target is upright unless the
//!   slope-aware touchdown angle is enabled.

use crate::control::{
    self, desired_touchdown_angle, horizontal_damping_force, lever_arm, lever_arm_at,
    optimal_touchdown_angle, takeoff_rotation_rate, CalibrationError, ControlConfig,
    ImpulsePrediction, PreTakeoffCorrection,
};
use crate::dynamics::{
    com_state, contact_gap, flight_accelerations, half_step_positions, impact_acceleration,
    integrate_step, mechanical_energy, slope_frame, stance_foot_reaction, stance_spring, LEG_AXIS,
};
use crate::error::{DynamicsError, SimError};
use crate::metrics::{compute_metrics, Metrics};
use crate::params::{RobotParams, WorldParams};
use crate::state::{AttitudeState, MassState, Phase, RobotState};
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub world: WorldParams,
    pub robot: RobotParams,
    pub control: ControlConfig,
    /// Vertical height of the foot center above the slope at `x = 0`.
    pub initial_foot_height: f64,
    /// Body height above the foot along the leg.
    pub initial_body_offset: f64,
    pub duration: f64,
    pub sample_rate: f64,
    pub record_decimation: usize,
}

/// The three experiment stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    NoControl,
    TouchdownAngle,
    TouchdownAngleDamper,
}

impl Stage {
    pub const ALL: [Stage; 3] = [
        Stage::NoControl,
        Stage::TouchdownAngle,
        Stage::TouchdownAngleDamper,
    ];

    pub fn number(self) -> usize {
        match self {
            Stage::NoControl => 1,
            Stage::TouchdownAngle => 2,
            Stage::TouchdownAngleDamper => 3,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Stage::NoControl => "stage1_no_control",
            Stage::TouchdownAngle => "stage2_touchdown_angle",
            Stage::TouchdownAngleDamper => "stage3_touchdown_angle_damper",
        }
    }
}

impl Scenario {
    /// 30° slope, 3 s at 200 kHz, dropped from rest with the foot 0.6 m up.
    pub fn reference(stage: Stage) -> Self {
        let mut control = ControlConfig::off();
        control.step1_enabled = stage != Stage::NoControl;
        control.step2_damper_enabled = stage == Stage::TouchdownAngleDamper;
        let sample_rate = 200_000.0;
        Scenario {
            world: WorldParams {
                dt: 1.0 / sample_rate,
                ..WorldParams::reference()
            },
            robot: RobotParams::reference(),
            control,
            initial_foot_height: 0.6,
            initial_body_offset: 0.10,
            duration: 3.0,
            sample_rate,
            record_decimation: 100,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScenario(m));
        if let Err(m) = self.world.validate() {
            return bad(m);
        }
        if let Err(m) = self.robot.validate() {
            return bad(m);
        }
        if let Err(m) = self.control.validate() {
            return bad(m);
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration must be positive".into());
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return bad("sample_rate must be positive".into());
        }
        if self.record_decimation == 0 {
            return bad("decimation must be at least 1".into());
        }
        if (self.world.dt * self.sample_rate - 1.0).abs() > 1e-12 {
            return bad("dt must equal 1 / sample_rate".into());
        }
        if !(self.initial_body_offset > 0.0) {
            return bad("initial_body_offset must be positive".into());
        }
        let gap = contact_gap(
            Vec2::new(0.0, self.initial_foot_height),
            self.robot.foot_radius,
            &self.world,
        );
        if !(gap > 0.0) {
            return bad("initial_foot_height must place the foot above the slope".into());
        }
        Ok(())
    }

    pub fn steps(&self) -> u64 {
        (self.duration * self.sample_rate).round() as u64
    }

    /// World-frame angle the slope-aware controller lands at.
    pub fn nominal_touchdown_angle(&self) -> f64 {
        desired_touchdown_angle(self.control.alpha_real, self.world.phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Touchdown,
    Liftoff,
    Apex,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Touchdown => "touchdown",
            EventKind::Liftoff => "liftoff",
            EventKind::Apex => "apex",
        }
    }
}

/// Phase event. Liftoff events carry the attitude before the takeoff command.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopEvent {
    pub kind: EventKind,
    pub t: f64,
    pub com: MassState,
    pub attitude: AttitudeState,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub body: MassState,
    pub foot: MassState,
    pub attitude: AttitudeState,
    pub phase: Phase,
    pub energy: f64,
}

/// Recorded samples. The first and last sample are always present.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub metrics: Metrics,
    pub events: Vec<HopEvent>,
}

pub fn initial_state(s: &Scenario, alpha: f64) -> RobotState {
    let foot = Vec2::new(0.0, s.initial_foot_height);
    RobotState {
        body: MassState::at_rest(foot + LEG_AXIS * s.initial_body_offset),
        foot: MassState::at_rest(foot),
        attitude: AttitudeState::new(alpha, 0.0, s.robot.inertia),
        phase: Phase::Flight,
        t: 0.0,
    }
}

/// Time for the center of mass to fall to the height at which the foot,
/// hanging at rest length below it, touches the slope.
pub fn predict_flight_time(
    com: &MassState,
    robot: &RobotParams,
    world: &WorldParams,
) -> Option<f64> {
    let tan = world.phi.tan();
    let h = robot.m_b / robot.total_mass() * robot.d_0 + robot.foot_radius / world.phi.cos();
    let b = com.v.z - tan * com.v.x;
    let c = com.r.z - h - tan * com.r.x;
    let disc = b * b + 2.0 * world.g * c;
    if disc < 0.0 {
        return None;
    }
    let t = (b + disc.sqrt()) / world.g;
    (t > 0.0 && t.is_finite()).then_some(t)
}

/// Remaining stance time until the leg returns to rest length, for a pinned foot
/// and the axial spring. `u` is the current leg compression offset `len - d_0`
/// (negative when compressed) and `u_dot` its rate.
pub fn predict_stance_remaining(
    u: f64,
    u_dot: f64,
    robot: &RobotParams,
    world: &WorldParams,
) -> f64 {
    let w = (robot.k / robot.m_b).sqrt();
    let g_w2 = world.g / (w * w);
    let c = u + g_w2;
    let d = u_dot / w;
    let amp = c.hypot(d);
    if amp <= g_w2 {
        return 0.0;
    }
    let delta = d.atan2(c);
    let mut phase = delta - (g_w2 / amp).acos();
    while phase <= 0.0 {
        phase += 2.0 * std::f64::consts::PI;
    }
    phase / w
}

struct TorqueWindow {
    start: f64,
    tau: f64,
    samples_left: u64,
    applied: f64,
}

/// Stepping simulator with the controller memory the state machine needs.
pub struct Simulator {
    scenario: Scenario,
    state: RobotState,
    t_hat: Vec2,
    n_hat: Vec2,
    target: f64,
    ab: Option<(f64, f64)>,
    last_flight_time: f64,
    anchor: Vec2,
    window: Option<TorqueWindow>,
    step: u64,
}

impl Simulator {
    pub fn new(scenario: &Scenario) -> Result<Self, SimError> {
        scenario.validate()?;
        let s = *scenario;
        let nominal = s.nominal_touchdown_angle();
        let ab = if s.control.step1_enabled && s.control.use_optimal_alpha {
            match s.control.ab {
                Some(ab) => Some(ab),
                None => Some(calibrate_scenario_ab(&s, [nominal - 0.01, nominal + 0.01])?),
            }
        } else {
            None
        };
        let target = if s.control.step1_enabled {
            nominal
        } else {
            0.0
        };
        let state = initial_state(&s, target);
        let drop = state.foot.r.z
            - (s.robot.foot_radius / s.world.phi.cos() + s.world.phi.tan() * state.foot.r.x);
        let (t_hat, n_hat) = slope_frame(&s.world);
        Ok(Simulator {
            scenario: s,
            state,
            t_hat,
            n_hat,
            target,
            ab,
            last_flight_time: (2.0 * drop / s.world.g).sqrt(),
            anchor: state.foot.r,
            window: None,
            step: 0,
        })
    }

    pub fn state(&self) -> &RobotState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut RobotState {
        &mut self.state
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Coefficients used by the corrected touchdown angle, when enabled.
    pub fn ab(&self) -> Option<(f64, f64)> {
        self.ab
    }

    /// Advances one sample.
    pub fn step(&mut self) -> Result<Option<HopEvent>, SimError> {
        let event = match self.state.phase {
            Phase::Flight => self.flight_step()?,
            Phase::Impact => self.impact_step()?,
            Phase::Stance => self.stance_step()?,
        };
        self.step += 1;
        self.state.t = self.step as f64 * self.scenario.world.dt;
        if !self.state.is_finite() {
            return Err(SimError::NonFinite { t: self.state.t });
        }
        Ok(event)
    }

    fn event(&self, kind: EventKind) -> HopEvent {
        HopEvent {
            kind,
            t: self.state.t,
            com: com_state(&self.state, &self.scenario.robot),
            attitude: self.state.attitude,
        }
    }

    fn flight_step(&mut self) -> Result<Option<HopEvent>, SimError> {
        let (robot, world) = (&self.scenario.robot, &self.scenario.world);
        let vz_before = com_state(&self.state, robot).v.z;
        self.state = flight_step(&self.state, robot, world)?;
        self.state.t = (self.step + 1) as f64 * world.dt;
        let gap = contact_gap(self.state.foot.r, robot.foot_radius, world);
        if gap <= 0.0 && self.state.foot.v.dot(self.n_hat) < 0.0 {
            self.state.phase = Phase::Impact;
            return Ok(Some(self.event(EventKind::Touchdown)));
        }
        let vz_after = com_state(&self.state, robot).v.z;
        if vz_before > 0.0 && vz_after <= 0.0 {
            return Ok(Some(self.event(EventKind::Apex)));
        }
        Ok(None)
    }

    fn impact_step(&mut self) -> Result<Option<HopEvent>, SimError> {
        let (robot, world, control) = (
            self.scenario.robot,
            self.scenario.world,
            self.scenario.control,
        );
        let v_n = -self.state.foot.v.dot(self.n_hat);
        let r_perp = lever_arm(&self.state, &robot, &world);
        let imp =
            ImpulsePrediction::new(control.impact_mass.value(&robot), control.e, v_n, r_perp)?;
        apply_impact_rotation(&mut self.state, imp.dl_impact, &robot);

        let mid = half_step_positions(&self.state, world.dt);
        let (a_b, _) = flight_accelerations(&mid, &robot, &world)?;
        let a_f = impact_acceleration(self.state.foot.v, world.dt);
        self.state = integrate_step(&self.state, a_b, a_f, world.dt);
        self.state.foot.v = Vec2::ZERO;
        let gap = contact_gap(self.state.foot.r, robot.foot_radius, &world);
        self.state.foot.r -= self.n_hat * gap;
        self.anchor = self.state.foot.r;
        self.state.phase = Phase::Stance;

        self.window = None;
        if control.step2_torque_enabled {
            let d = self.state.body.r - self.state.foot.r;
            let u = d.dot(LEG_AXIS) - robot.d_0;
            let u_dot = self.state.body.v.dot(LEG_AXIS);
            let t_lo = self.state.t + world.dt + predict_stance_remaining(u, u_dot, &robot, &world);
            self.window = Some(TorqueWindow {
                start: t_lo - control.t_s,
                tau: f64::NAN,
                samples_left: (control.t_s / world.dt).round() as u64,
                applied: 0.0,
            });
        }
        Ok(None)
    }

    fn stance_step(&mut self) -> Result<Option<HopEvent>, SimError> {
        let (robot, world, control) = (
            self.scenario.robot,
            self.scenario.world,
            self.scenario.control,
        );
        let dt = world.dt;
        self.apply_torque_window()?;

        let mid = half_step_positions(&self.state, dt);
        let spring = stance_spring(mid.body.r, mid.foot.r, robot.d_0);
        let mut a_b = Vec2::new(0.0, -world.g) - spring * (robot.k / robot.m_b);
        if control.step2_damper_enabled {
            a_b += horizontal_damping_force(control.gamma, self.state.body.v) / robot.m_b;
        }
        let reaction = match stance_foot_reaction(&mid, &robot, &world) {
            Ok(r) => r,
            Err(DynamicsError::LiftoffDetected(_)) => {
                let event = self.liftoff()?;
                self.state = flight_step(&self.state, &robot, &world)?;
                return Ok(Some(event));
            }
            Err(e) => return Err(e.into()),
        };
        let applied = spring * robot.k + Vec2::new(0.0, -robot.m_f * world.g);
        let a_f = if reaction.slipping {
            self.t_hat * ((applied + reaction.force).dot(self.t_hat) / robot.m_f)
        } else {
            Vec2::ZERO
        };
        let v_t_before = self.state.foot.v.dot(self.t_hat);
        self.state = integrate_step(&self.state, a_b, a_f, dt);
        if reaction.slipping {
            let v_t = self.state.foot.v.dot(self.t_hat);
            if v_t_before * v_t < 0.0 {
                self.state.foot.v = Vec2::ZERO;
            }
            self.anchor = self.state.foot.r;
        } else {
            self.state.foot.v = Vec2::ZERO;
            self.state.foot.r = self.anchor;
        }

        let rel = self.state.body.r - self.state.foot.r;
        let rel_v = self.state.body.v - self.state.foot.v;
        if rel.dot(LEG_AXIS) >= robot.d_0 && rel_v.dot(LEG_AXIS) > 0.0 {
            self.state.t = (self.step + 1) as f64 * dt;
            return Ok(Some(self.liftoff()?));
        }
        Ok(None)
    }

    fn apply_torque_window(&mut self) -> Result<(), SimError> {
        let Some(w) = self.window.as_mut() else {
            return Ok(());
        };
        if self.state.t < w.start || w.samples_left == 0 {
            return Ok(());
        }
        if w.tau.is_nan() {
            let dl_spin =
                predicted_spin_impulse(&self.state, self.anchor, self.target, &self.scenario)?;
            let c = PreTakeoffCorrection::new(
                self.state.attitude.l,
                dl_spin,
                self.scenario.control.t_s,
            )?;
            w.tau = c.tau;
        }
        let dl = w.tau * self.scenario.world.dt;
        self.state
            .attitude
            .add_momentum(dl, self.scenario.robot.inertia);
        w.applied += dl;
        w.samples_left -= 1;
        Ok(())
    }

    fn liftoff(&mut self) -> Result<HopEvent, SimError> {
        let (robot, world) = (self.scenario.robot, self.scenario.world);
        let event = self.event(EventKind::Liftoff);
        let c = com_state(&self.state, &robot);
        let m = robot.total_mass();
        self.state.body.r = c.r + LEG_AXIS * (robot.m_f / m * robot.d_0);
        self.state.foot.r = c.r - LEG_AXIS * (robot.m_b / m * robot.d_0);
        self.state.body.v = c.v;
        self.state.foot.v = c.v;
        self.state.phase = Phase::Flight;

        let t = predict_flight_time(&c, &robot, &world).unwrap_or(self.last_flight_time);
        self.last_flight_time = t;
        let alpha_0 = self.state.attitude.alpha;
        let target = match self.ab {
            Some((a, b)) => optimal_touchdown_angle(a, b, t, self.target, alpha_0)?,
            None => self.target,
        };
        let preload = self.window.take().map_or(0.0, |w| w.applied);
        let omega_0 = takeoff_rotation_rate(alpha_0, target, t)?;
        self.state
            .attitude
            .set_omega(omega_0 + preload / robot.inertia, robot.inertia);
        Ok(event)
    }
}

/// One flight sample with accelerations evaluated at the mid-sample positions.
pub fn flight_step(
    state: &RobotState,
    robot: &RobotParams,
    world: &WorldParams,
) -> Result<RobotState, DynamicsError> {
    let mid = half_step_positions(state, world.dt);
    let (a_b, a_f) = flight_accelerations(&mid, robot, world)?;
    Ok(integrate_step(state, a_b, a_f, world.dt))
}

/// Applies an impact angular impulse `dl` about the center of mass, taken with
/// the sign that cancels a pre-takeoff impulse of `+dl`. The robot pivots about
/// the stopped foot: the body spin and the body swing share the change.
pub fn apply_impact_rotation(state: &mut RobotState, dl: f64, robot: &RobotParams) {
    let rho = state.body.r - state.foot.r;
    let dw = -dl / (robot.inertia + robot.m_b * rho.norm_sq());
    state.body.v += rho.perp() * dw;
    let omega = state.attitude.omega + dw;
    state.attitude.set_omega(omega, robot.inertia);
}

/// Part of an impact angular impulse that lands on the body spin.
pub fn spin_share(dl: f64, d: f64, robot: &RobotParams) -> f64 {
    dl * robot.inertia / (robot.inertia + robot.m_b * d * d)
}

/// Spin impulse the next landing is expected to deliver, predicted from the
/// current stance state. The damper and any slip are ignored.
fn predicted_spin_impulse(
    state: &RobotState,
    anchor: Vec2,
    target: f64,
    s: &Scenario,
) -> Result<f64, SimError> {
    let (robot, world, control) = (&s.robot, &s.world, &s.control);
    let u = (state.body.r - anchor).dot(LEG_AXIS) - robot.d_0;
    let u_dot = state.body.v.dot(LEG_AXIS);
    let w2 = robot.k / robot.m_b;
    let v_up = (u_dot * u_dot + w2 * u * u + 2.0 * world.g * u)
        .max(0.0)
        .sqrt();
    let remaining = predict_stance_remaining(u, u_dot, robot, world);
    let body_r = Vec2::new(
        state.body.r.x + state.body.v.x * remaining,
        anchor.z + robot.d_0,
    );
    let body_v = Vec2::new(state.body.v.x, v_up);
    let m = robot.total_mass();
    let com = MassState {
        r: (body_r * robot.m_b + anchor * robot.m_f) / m,
        v: body_v * (robot.m_b / m),
        a: Vec2::ZERO,
    };
    let Some(t) = predict_flight_time(&com, robot, world) else {
        return Ok(0.0);
    };
    let v_td = com.v - Vec2::new(0.0, world.g * t);
    let (_, n_hat) = slope_frame(world);
    let v_n = (-v_td.dot(n_hat)).max(0.0);
    let r_perp = lever_arm_at(target, robot.d_0, robot, world);
    let imp = ImpulsePrediction::new(control.impact_mass.value(robot), control.e, v_n, r_perp)?;
    Ok(spin_share(imp.dl_impact, robot.d_0, robot))
}

/// Angular momentum about the stopped foot delivered by the first impact when
/// the robot is dropped from the scenario's start state with body angle `alpha`.
pub fn probe_impact_angular_impulse(s: &Scenario, alpha: f64) -> Result<f64, SimError> {
    let mut sim = Simulator::new(&Scenario {
        control: ControlConfig {
            use_optimal_alpha: false,
            ..s.control
        },
        ..*s
    })?;
    sim.state.attitude = AttitudeState::new(alpha, 0.0, s.robot.inertia);
    let limit = sim.scenario.steps().max(1) * 4;
    for _ in 0..limit {
        if sim.state.phase == Phase::Impact {
            let before = foot_angular_momentum(&sim.state, &s.robot);
            sim.step()?;
            return Ok(foot_angular_momentum(&sim.state, &s.robot) - before);
        }
        sim.step()?;
    }
    Err(SimError::InvalidScenario(
        "probe drop never reached the slope".into(),
    ))
}

fn foot_angular_momentum(state: &RobotState, robot: &RobotParams) -> f64 {
    let rho = state.body.r - state.foot.r;
    state.attitude.l + robot.m_b * rho.cross(state.body.v - state.foot.v)
}

/// Fits `(A, B)` from two probe drops.
pub fn calibrate_scenario_ab(s: &Scenario, probe_angles: [f64; 2]) -> Result<(f64, f64), SimError> {
    control::calibrate_ab(s.nominal_touchdown_angle(), probe_angles, |alpha| {
        probe_impact_angular_impulse(s, alpha)
    })
    .map_err(|e| match e {
        CalibrationError::Control(c) => SimError::Control(c),
        CalibrationError::Probe(p) => p,
    })
}

fn sample(state: &RobotState, s: &Scenario) -> Sample {
    Sample {
        t: state.t,
        body: state.body,
        foot: state.foot,
        attitude: state.attitude,
        phase: state.phase,
        energy: mechanical_energy(state, &s.robot, &s.world),
    }
}

/// Runs the scenario for its full duration.
pub fn run_scenario(s: &Scenario) -> Result<RunOutput, SimError> {
    let mut sim = Simulator::new(s)?;
    let steps = s.steps();
    let mut trajectory = Trajectory {
        samples: Vec::with_capacity((steps / s.record_decimation as u64 + 2) as usize),
    };
    let mut events = Vec::new();
    trajectory.samples.push(sample(&sim.state, s));
    for n in 1..=steps {
        if let Some(e) = sim.step()? {
            events.push(e);
        }
        if n % s.record_decimation as u64 == 0 || n == steps {
            trajectory.samples.push(sample(&sim.state, s));
        }
    }
    let metrics = compute_metrics(&trajectory, &events, &s.robot);
    Ok(RunOutput {
        trajectory,
        metrics,
        events,
    })
}
