use morpho_core::actuators::{
    magnetic_force, pid_tracking_experiment, MagnetMode, MagneticSpringModel, Pid, PidGains, SpringPlant, TrackingSetup,
};
use morpho_core::IntegratorConfig;
use proptest::prelude::*;

proptest! {
    #[test]
    fn parametric_force_strictly_decreasing(a in 1e-8..1e-4f64, z_off in 1e-3..0.1f64) {
        let m = MagneticSpringModel::parametric(MagnetMode::Soft, a, z_off).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let gap = -0.9 * z_off + i as f64 * 10.0 * z_off / 1000.0;
            let f = magnetic_force(&m, gap).unwrap();
            prop_assert!(f < prev && f > 0.0);
            // inverse-quartic law evaluated independently
            prop_assert!((f - a / (gap + z_off).powi(4)).abs() <= 1e-12 * f);
            prev = f;
        }
    }

    #[test]
    fn pid_output_respects_saturation(errors in prop::collection::vec(-1.0..1.0f64, 1..200), sat in 0.1..50.0f64) {
        let mut pid = Pid::new(PidGains { kp: 100.0, ki: 1e3, kd: 1.0, saturation: sat }, 1e-3);
        for e in errors {
            let u = pid.update(e);
            prop_assert!(u.abs() <= sat);
        }
    }
}

#[test]
fn stiff_preset_dominates_soft() {
    let (stiff, soft) = (MagneticSpringModel::preset(MagnetMode::Stiff), MagneticSpringModel::preset(MagnetMode::Soft));
    for i in 0..1000 {
        let gap = i as f64 * 0.05 / 1000.0;
        assert!(stiff.force(gap).unwrap() >= soft.force(gap).unwrap());
    }
}

#[test]
fn magnetic_plant_is_harder_to_track() {
    let setup = TrackingSetup::default();
    let gains = PidGains::default();
    let icfg = IntegratorConfig::new(1e-4, 5.0, 10).unwrap();
    for mode in [MagnetMode::Stiff, MagnetMode::Soft] {
        let m = MagneticSpringModel::preset(mode);
        let linear = SpringPlant::matched_linear(&m, setup.gap_eq).unwrap();
        let rms_mag = pid_tracking_experiment(&SpringPlant::Magnetic(m), &setup, &gains, &icfg).unwrap().rms_error;
        let rms_lin = pid_tracking_experiment(&linear, &setup, &gains, &icfg).unwrap().rms_error;
        assert!(rms_mag > rms_lin, "{mode:?}: {rms_mag} vs {rms_lin}");
    }
}

#[test]
fn matched_stiffness_is_force_slope() {
    let m = MagneticSpringModel::preset(MagnetMode::Stiff);
    let gap = 0.01;
    let SpringPlant::Linear { stiffness } = SpringPlant::matched_linear(&m, gap).unwrap() else { unreachable!() };
    // 4A/(gap + z_off)⁵
    let expected = 4.0 * 1.6e-6 / 0.02f64.powi(5);
    assert!((stiffness - expected).abs() < 1e-9 * expected);
}
