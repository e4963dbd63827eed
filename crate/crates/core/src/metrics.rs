use crate::engine::{EventKind, HopEvent, Trajectory};
use crate::params::RobotParams;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metrics {
    /// `|x_com(end) - x_com(start)|`.
    pub horizontal_drift: f64,
    /// `|Δx_com|` between consecutive touchdowns.
    pub per_hop_drift: Vec<f64>,
    pub hop_count: usize,
    /// Time between consecutive touchdowns.
    pub hop_periods: Vec<f64>,
    /// Largest body pitch rate left at liftoff, before the takeoff command.
    pub max_residual_omega: f64,
}

fn com_x(body_x: f64, foot_x: f64, robot: &RobotParams) -> f64 {
    (robot.m_b * body_x + robot.m_f * foot_x) / robot.total_mass()
}

pub fn compute_metrics(
    trajectory: &Trajectory,
    events: &[HopEvent],
    robot: &RobotParams,
) -> Metrics {
    let drift = match (trajectory.samples.first(), trajectory.samples.last()) {
        (Some(a), Some(b)) => {
            (com_x(b.body.r.x, b.foot.r.x, robot) - com_x(a.body.r.x, a.foot.r.x, robot)).abs()
        }
        _ => 0.0,
    };
    let touchdowns: Vec<&HopEvent> = events
        .iter()
        .filter(|e| e.kind == EventKind::Touchdown)
        .collect();
    let per_hop_drift = touchdowns
        .windows(2)
        .map(|w| (w[1].com.r.x - w[0].com.r.x).abs())
        .collect();
    let hop_periods = touchdowns.windows(2).map(|w| w[1].t - w[0].t).collect();
    let max_residual_omega = events
        .iter()
        .filter(|e| e.kind == EventKind::Liftoff)
        .map(|e| e.attitude.omega.abs())
        .fold(0.0, f64::max);
    Metrics {
        horizontal_drift: drift,
        per_hop_drift,
        hop_count: touchdowns.len(),
        hop_periods,
        max_residual_omega,
    }
}

/// True when every element is strictly larger than the one before.
pub fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Sample;
    use crate::state::{AttitudeState, MassState, Phase};
    use crate::vec2::Vec2;

    fn sample(x: f64) -> Sample {
        let m = MassState::at_rest(Vec2::new(x, 0.5));
        Sample {
            t: 0.0,
            body: m,
            foot: m,
            attitude: AttitudeState::default(),
            phase: Phase::Flight,
            energy: 0.0,
        }
    }

    fn touchdown(t: f64, x: f64) -> HopEvent {
        HopEvent {
            kind: EventKind::Touchdown,
            t,
            com: MassState::at_rest(Vec2::new(x, 0.0)),
            attitude: AttitudeState::default(),
        }
    }

    #[test]
    fn stationary_run_has_no_drift() {
        let m = compute_metrics(
            &Trajectory {
                samples: vec![sample(0.0), sample(0.0)],
            },
            &[],
            &RobotParams::reference(),
        );
        assert_eq!(m, Metrics::default());
    }

    #[test]
    fn drift_is_end_to_end_com_displacement() {
        let traj = Trajectory {
            samples: vec![sample(0.0), sample(0.3), sample(0.79)],
        };
        let ev = [
            touchdown(0.3, 0.0),
            touchdown(1.0, -0.1),
            touchdown(1.8, 0.2),
        ];
        let m = compute_metrics(&traj, &ev, &RobotParams::reference());
        assert!((m.horizontal_drift - 0.79).abs() < 1e-15);
        assert_eq!(m.hop_count, 3);
        assert_eq!(m.per_hop_drift.len(), 2);
        assert!((m.per_hop_drift[1] - 0.3).abs() < 1e-15);
        assert!((m.hop_periods[0] - 0.7).abs() < 1e-15);
        assert!(strictly_increasing(&m.per_hop_drift));
    }
}
