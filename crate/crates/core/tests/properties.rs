use proptest::prelude::*;
use slopehop::control::*;
use slopehop::dynamics::*;
use slopehop::{AttitudeState, MassState, Phase, RobotParams, RobotState, Vec2, WorldParams};

fn robot() -> RobotParams {
    RobotParams::reference()
}

fn flight_state(body: Vec2, foot: Vec2) -> RobotState {
    RobotState {
        body: MassState::at_rest(body),
        foot: MassState::at_rest(foot),
        attitude: AttitudeState::default(),
        phase: Phase::Flight,
        t: 0.0,
    }
}

/// Grid point of spacing `h` in `[lo, hi]` where `f` is smallest.
fn grid_argmin(f: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> f64 {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n)
        .map(|i| lo + i as f64 * h)
        .fold((f64::INFINITY, lo), |best, x| {
            let r = f(x);
            if r < best.0 {
                (r, x)
            } else {
                best
            }
        })
        .1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn flight_plan_round_trip(a0 in -3.0..3.0f64, ad in -3.0..3.0f64, t in 1e-3..5.0f64) {
        let w = takeoff_rotation_rate(a0, ad, t).unwrap();
        let back = predict_body_angle(a0, w, t);
        prop_assert!((back - ad).abs() <= 1e-12 * ad.abs().max(1.0));
    }
}

proptest! {
    #[test]
    fn internal_forces_cancel(bx in -1.0..1.0f64, bz in -1.0..1.0f64, fx in -1.0..1.0f64, fz in -1.0..1.0f64) {
        let s = flight_state(Vec2::new(bx, bz), Vec2::new(fx, fz));
        prop_assume!((s.body.r - s.foot.r).norm() > 1e-3);
        let r = robot();
        let w = WorldParams::reference();
        let (a_b, a_f) = flight_accelerations(&s, &r, &w).unwrap();
        let net = a_b * r.m_b + a_f * r.m_f + Vec2::new(0.0, r.total_mass() * w.g);
        let scale = (a_b * r.m_b).norm().max(r.total_mass() * w.g);
        prop_assert!(net.norm() <= 1e-12 * scale, "{net:?}");
    }

    #[test]
    fn impulse_is_homogeneous(m in 1e-3..10.0f64, e in 0.0..1.0f64, v in 0.0..20.0f64, k in 0.0..5.0f64) {
        let j = impact_impulse(m, e, v).unwrap();
        prop_assert!((impact_impulse(m, e, k * v).unwrap() - k * j).abs() <= 1e-12 * (k * j).abs().max(1e-300));
        prop_assert!((j / (1.0 + e) - m * v).abs() <= 1e-12 * (m * v).max(1e-300));
    }

    #[test]
    fn correction_cancels_predicted_impact(l_minus in -1.0..1.0f64, dl in -1.0..1.0f64, t_s in 1e-3..0.1f64) {
        let c = PreTakeoffCorrection::new(l_minus, dl, t_s).unwrap();
        let n = 1000;
        let mut l = l_minus;
        for _ in 0..n {
            l += c.tau * (t_s / n as f64);
        }
        let post = l - dl;
        prop_assert!(post.abs() <= 1e-9 * l_minus.abs().max(1.0), "{post}");
    }

    #[test]
    fn damper_work_is_never_positive(gamma in 0.0..50.0f64, vx in -10.0..10.0f64, vz in -10.0..10.0f64, dt in 1e-6..1e-2f64) {
        let v = Vec2::new(vx, vz);
        prop_assert!(horizontal_damping_force(gamma, v).dot(v) * dt <= 0.0);
    }

    #[test]
    fn elongation_is_along_the_leg(bx in -1.0..1.0f64, bz in -1.0..1.0f64, d0 in 0.01..0.5f64) {
        let body = Vec2::new(bx, bz);
        prop_assume!(body.norm() > 1e-6);
        let g = spring_geometry(body, Vec2::ZERO, d0).unwrap();
        prop_assert!((g.d_hat.norm() - 1.0).abs() < 1e-15);
        prop_assert!(g.s.cross(g.d_hat).abs() < 1e-15);
        prop_assert!((g.s.dot(g.d_hat) - (body.norm() - d0)).abs() < 1e-15);
    }

    #[test]
    fn slope_frame_is_orthonormal(phi in 0.0..1.5f64) {
        let (t, n) = slope_frame(&WorldParams { phi, ..WorldParams::reference() });
        prop_assert!(t.dot(n).abs() < 1e-16);
        prop_assert!((t.norm() - 1.0).abs() < 1e-15 && (n.norm() - 1.0).abs() < 1e-15);
        prop_assert!((t.cross(n) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lever_arm_is_antisymmetric_about_the_normal(phi in 0.0..1.2f64, delta in 0.0..0.5f64, d in 0.05..0.2f64) {
        let w = WorldParams { phi, ..WorldParams::reference() };
        let r = robot();
        let up = lever_arm_at(phi + delta, d, &r, &w);
        let down = lever_arm_at(phi - delta, d, &r, &w);
        prop_assert!((up + down).abs() < 1e-15);
        prop_assert!(lever_arm_at(phi, d, &r, &w) == 0.0);
    }

    #[test]
    fn affine_probe_fit_is_exact(a in -1e-2..1e-2f64, b in -1.0..1.0f64, nominal in 0.0..1.0f64, h in 1e-3..0.1f64) {
        let line = |x: f64| Ok::<f64, ()>(a + b * (x - nominal));
        let (fa, fb) = calibrate_ab(nominal, [nominal - h, nominal + h], line).unwrap();
        prop_assert!((fa - a).abs() < 1e-14 && (fb - b).abs() < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn closed_form_optimum_matches_grid_search(
        a in -5e-3..5e-3f64,
        b in 0.05..1.0f64,
        t in 0.2..1.0f64,
        alpha_d in 0.0..0.6f64,
        alpha_0 in -0.3..0.3f64,
    ) {
        let h = 1e-5;
        let exact = optimal_touchdown_angle(a, b, t, alpha_d, alpha_0).unwrap();
        let residual = |x: f64| (b * (x - alpha_d) + a + (x - alpha_0) / t).powi(2);
        let grid = grid_argmin(residual, -1.0, 1.0, h);
        prop_assert!((grid - exact).abs() <= h, "{grid} vs {exact}");
    }
}
