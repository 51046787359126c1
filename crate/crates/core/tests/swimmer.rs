use morpho_core::actuators::JointGeometry;
use morpho_core::swimmer::{
    default_integrator, energy_trace, homogeneous_oracle, log_grid, optimize_stiffness, simulate_swimmer,
    simulate_swimmer_from, ActuationParams, JointLaw, OptimizeOptions, StiffnessProfile, SwimmerConfig, SwimmerState,
};
use morpho_core::{IntegratorConfig, SwimmerConfig64};
use proptest::prelude::*;

fn cfg() -> SwimmerConfig64 {
    SwimmerConfig::default()
}

fn profile() -> StiffnessProfile<f64> {
    StiffnessProfile { k: [0.3, 0.05, 0.02, 0.008] }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn metrics_invariant_under_frame_rotation(angle in -3.1..3.1f64, x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let act = ActuationParams::default();
        let icfg = default_integrator();
        let base = simulate_swimmer_from(&cfg(), &profile(), &act, 10.0, &icfg, &SwimmerState::straight(x, y, 0.0)).unwrap();
        let init = SwimmerState::straight(x, y, 0.0).rotated(angle);
        let turned = simulate_swimmer_from(&cfg(), &profile(), &act, 10.0, &icfg, &init).unwrap();
        prop_assert!((base.metrics.mean_speed - turned.metrics.mean_speed).abs() < 1e-9);
        prop_assert!((base.metrics.input_power - turned.metrics.input_power).abs() < 1e-9);
    }
}

#[test]
fn no_actuation_no_speed() {
    let act = ActuationParams { amplitude: 0.0, ..ActuationParams::default() };
    let r = simulate_swimmer(&cfg(), &profile(), &act, 10.0, &default_integrator()).unwrap();
    assert!(r.metrics.mean_speed.abs() < 1e-4);
}

#[test]
fn mirrored_actuation_swims_equally_fast() {
    let act = ActuationParams::default();
    let mirrored = ActuationParams { phase: std::f64::consts::PI, ..act };
    let icfg = default_integrator();
    let a = simulate_swimmer(&cfg(), &profile(), &act, 10.0, &icfg).unwrap();
    let b = simulate_swimmer(&cfg(), &profile(), &mirrored, 10.0, &icfg).unwrap();
    assert!((a.metrics.mean_speed - b.metrics.mean_speed).abs() < 1e-6, "{:?} vs {:?}", a.metrics, b.metrics);
    // the mirrored gait swims along the reflected path
    let (ha, hb) = (a.trace.column("head_y").unwrap(), b.trace.column("head_y").unwrap());
    assert!(ha.iter().zip(&hb).all(|(p, q)| (p + q).abs() < 1e-6));
}

#[test]
fn drag_dissipates_energy() {
    let act = ActuationParams { amplitude: 0.0, ..ActuationParams::default() };
    let icfg = IntegratorConfig::new(1e-3, 5.0, 10).unwrap();

    // rigid glide: drag per unit length matches mass per unit length, so the body stays straight
    let mut glide = SwimmerState::straight(0.0, 0.0, 0.4);
    glide.velocities = [0.2, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0];
    let ke = energy_trace(&cfg(), &profile(), &act, &icfg, &glide).unwrap().column("kinetic").unwrap();
    assert!(ke[0] > 0.0 && ke.windows(2).all(|w| w[1] <= w[0]));

    // flexing start: kinetic and elastic energy trade, their sum only decays
    let mut flex = SwimmerState::straight(0.0, 0.0, 0.0);
    flex.angles = [0.0, 0.3, -0.2, 0.4, 0.1];
    flex.velocities = [0.05, 0.02, 1.0, -2.0, 1.5, 3.0, -1.0];
    let ts = energy_trace(&cfg(), &profile(), &act, &icfg, &flex).unwrap();
    let total: Vec<f64> = ts.rows().map(|r| r[0] + r[1]).collect();
    assert!(total.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    assert!(total[total.len() - 1] < 0.01 * total[0]);
}

#[test]
fn regression_baseline() {
    let r = simulate_swimmer(
        &cfg(),
        &StiffnessProfile::homogeneous(0.05),
        &ActuationParams::default(),
        10.0,
        &default_integrator(),
    )
    .unwrap();
    assert!((r.metrics.mean_speed - 6.556325387664529e-3).abs() < 1e-9, "{:?}", r.metrics);
    assert!(r.metrics.input_power > 0.0);
}

#[test]
fn oracle_single_cell_and_determinism() {
    let act = ActuationParams::default();
    let icfg = default_integrator();
    let one = homogeneous_oracle(&cfg(), &act, &[0.07], 10.0, &icfg).unwrap();
    assert_eq!(one.k_best, 0.07);
    assert!(homogeneous_oracle(&cfg(), &act, &[], 10.0, &icfg).is_err());
    assert!(homogeneous_oracle(&cfg(), &act, &[1.0], 10.0, &icfg).is_err());

    let grid = log_grid(0.005, 0.5, 12).unwrap();
    let a = homogeneous_oracle(&cfg(), &act, &grid, 10.0, &icfg).unwrap();
    let b = homogeneous_oracle(&cfg(), &act, &grid, 10.0, &icfg).unwrap();
    assert_eq!(a, b);
    assert!(a.is_interior(), "{:?}", a.table);
}

#[test]
fn optimizer_stays_in_box_and_beats_oracle() {
    let act = ActuationParams::default();
    let opts = OptimizeOptions { restarts: 2, max_evals: 25, grid_size: 6, ..OptimizeOptions::default() };
    let (oracle, report) = optimize_stiffness(&cfg(), &act, &opts, 10.0, &default_integrator()).unwrap();
    assert!(report.metric_best >= oracle.metric_best);
    assert!(report.profile_best.validate(&cfg()).is_ok());
    for r in &report.restarts {
        if let Ok((k, _)) = r.outcome {
            assert!(k.iter().all(|v| (0.005..=0.5).contains(v)));
        }
    }
}

#[test]
fn tunable_joint_law_swims() {
    let law = JointLaw::Tunable { geometry: JointGeometry::new(0.01, 0.03).unwrap(), spring_stiffness: 200.0 };
    let cfg = SwimmerConfig { law, k_min: 1.0, k_max: 60.0, ..cfg() };
    // pretension F gives c1 = 0.015·F, so F = 3.3 matches k ≈ 0.05
    let r = simulate_swimmer(
        &cfg,
        &StiffnessProfile::homogeneous(3.3),
        &ActuationParams::default(),
        10.0,
        &default_integrator(),
    )
    .unwrap();
    assert!(r.metrics.mean_speed.abs() > 1e-3, "{:?}", r.metrics);
}
