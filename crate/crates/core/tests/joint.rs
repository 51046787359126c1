use std::f64::consts::{PI, TAU};

use morpho_core::actuators::{
    default_step_schedule, joint_torque, joint_torque_series_coeffs, simulate_joint_oscillator, JointGeometry,
    JointOscillatorConfig, SpringConfig,
};
use morpho_core::analysis::{dominant_frequency, spectrum, Window};
use morpho_core::IntegratorConfig;
use proptest::prelude::*;

/// Closed-form Taylor coefficients of the torque law, with `a = d·r`, `s = d − r`.
fn closed_form(r: f64, d: f64, k: f64, f: f64) -> (f64, f64) {
    let (a, s) = (d * r, d - r);
    (f * a / s, -a * f / (6.0 * s) - a * a * (f - k * s) / (2.0 * s.powi(3)))
}

fn geometry() -> impl Strategy<Value = (f64, f64)> {
    (0.002..0.05f64, 1.2..5.0f64).prop_map(|(r, ratio)| (r, r * ratio))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn torque_is_odd((r, d) in geometry(), k in 10.0..1000.0f64, f in 0.0..10.0f64, theta in -PI..PI) {
        let g = JointGeometry::new(r, d).unwrap();
        let s = SpringConfig::new(k, f).unwrap();
        prop_assert_eq!(joint_torque(&g, &s, theta), -joint_torque(&g, &s, -theta));
    }

    #[test]
    fn c1_matches_closed_form((r, d) in geometry(), k in 10.0..1000.0f64, f in 0.01..10.0f64) {
        let c = joint_torque_series_coeffs(&JointGeometry::new(r, d).unwrap(), &SpringConfig::new(k, f).unwrap());
        let (c1, c3) = closed_form(r, d, k, f);
        prop_assert!((c.c1 - c1).abs() <= 1e-6 * c1.abs(), "{} vs {}", c.c1, c1);
        prop_assert!((c.c3 - c3).abs() <= 1e-4 * c3.abs().max(c1), "{} vs {}", c.c3, c3);
    }

    #[test]
    fn c1_ignores_spring_stiffness((r, d) in geometry(), k in 10.0..1000.0f64, f in 0.01..10.0f64) {
        let g = JointGeometry::new(r, d).unwrap();
        let base = joint_torque_series_coeffs(&g, &SpringConfig::new(10.0, f).unwrap()).c1;
        let other = joint_torque_series_coeffs(&g, &SpringConfig::new(k, f).unwrap()).c1;
        prop_assert!((base - other).abs() <= 1e-9 * base.abs(), "{} vs {}", base, other);
    }

    #[test]
    fn c1_scales_with_pretension((r, d) in geometry(), f in 0.01..10.0f64, alpha in 0.1..10.0f64) {
        let g = JointGeometry::new(r, d).unwrap();
        let c = |f| joint_torque_series_coeffs(&g, &SpringConfig::new(200.0, f).unwrap()).c1;
        prop_assert!((c(alpha * f) - alpha * c(f)).abs() <= 1e-9 * (alpha * c(f)).abs());
    }
}

#[test]
fn odd_symmetry_on_ten_thousand_angles() {
    let g = JointGeometry::new(0.01, 0.03).unwrap();
    let s = SpringConfig::new(200.0, 1.0).unwrap();
    let mut theta = 0.123_f64;
    for _ in 0..10_000 {
        // Weyl sequence over (−π, π)
        theta = (theta + 0.618_033_988_749_895 * TAU) % TAU;
        let x = theta - PI;
        assert_eq!(joint_torque(&g, &s, x), -joint_torque(&g, &s, -x));
    }
}

#[test]
fn series_is_accurate_for_small_angles() {
    let (g, s) = (JointGeometry::new(0.01, 0.03).unwrap(), SpringConfig::new(200.0, 1.0).unwrap());
    let c = joint_torque_series_coeffs(&g, &s);
    for i in 1..=200 {
        let theta = 0.2 * i as f64 / 200.0;
        let tau = joint_torque(&g, &s, theta);
        assert!(((tau - c.eval(theta)) / tau).abs() < 0.01, "θ = {theta}");
    }
}

#[test]
fn pretension_step_raises_frequency() {
    let g = JointGeometry::new(0.01, 0.03).unwrap();
    let cfg = JointOscillatorConfig::default();
    let icfg = IntegratorConfig::new(1e-4, 10.0, 10).unwrap();
    let ts = simulate_joint_oscillator(&g, 200.0, &default_step_schedule(), &cfg, &icfg).unwrap();
    let band = (0.05, 50.0);
    let before =
        dominant_frequency(&spectrum(&ts.window(0.0, 4.9999).unwrap(), "theta", Window::Hann).unwrap(), band).unwrap();
    let after =
        dominant_frequency(&spectrum(&ts.window(5.0, 10.0).unwrap(), "theta", Window::Hann).unwrap(), band).unwrap();
    let (c1, _) = closed_form(0.01, 0.03, 200.0, 0.1);
    let linear = (c1 / cfg.inertia).sqrt() / TAU;
    assert!(after > 1.5 * before, "{before} → {after}");
    assert!((before / linear - 1.0).abs() < 0.05, "{before} vs {linear}");
}
