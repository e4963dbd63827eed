use crate::vec2::Vec2;

/// Position, velocity and the acceleration applied over the current sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MassState {
    pub r: Vec2,
    pub v: Vec2,
    pub a: Vec2,
}

impl MassState {
    pub fn at_rest(r: Vec2) -> Self {
        MassState {
            r,
            ..Default::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.v.is_finite() && self.a.is_finite()
    }
}

/// Body pitch. `alpha` is measured from world vertical, counterclockwise positive.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AttitudeState {
    pub alpha: f64,
    pub omega: f64,
    /// Spin angular momentum, kept equal to `inertia * omega`.
    pub l: f64,
}

impl AttitudeState {
    pub fn new(alpha: f64, omega: f64, inertia: f64) -> Self {
        AttitudeState {
            alpha,
            omega,
            l: inertia * omega,
        }
    }

    pub fn set_omega(&mut self, omega: f64, inertia: f64) {
        self.omega = omega;
        self.l = inertia * omega;
    }

    pub fn add_momentum(&mut self, dl: f64, inertia: f64) {
        self.l += dl;
        self.omega = self.l / inertia;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Flight,
    Impact,
    Stance,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Flight => "flight",
            Phase::Impact => "impact",
            Phase::Stance => "stance",
        }
    }

    /// Legal successor in the hybrid cycle.
    pub fn next(self) -> Phase {
        match self {
            Phase::Flight => Phase::Impact,
            Phase::Impact => Phase::Stance,
            Phase::Stance => Phase::Flight,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotState {
    pub body: MassState,
    pub foot: MassState,
    pub attitude: AttitudeState,
    pub phase: Phase,
    pub t: f64,
}

impl RobotState {
    pub fn is_finite(&self) -> bool {
        self.body.is_finite()
            && self.foot.is_finite()
            && self.attitude.alpha.is_finite()
            && self.attitude.omega.is_finite()
            && self.attitude.l.is_finite()
            && self.t.is_finite()
    }
}
