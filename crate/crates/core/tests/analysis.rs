use std::f64::consts::TAU;

use morpho_core::actuators::{simulate_joint_oscillator, JointGeometry, JointOscillatorConfig, PretensionSchedule};
use morpho_core::afo::{run_forced_reference, DuffingParams, PlantState};
use morpho_core::analysis::{dominant_frequency, envelope_of, harmonic_ratios, spectrum, spectrum_of, Window};
use morpho_core::{IntegratorConfig, TimeSeries64};
use proptest::prelude::*;

fn sampled(f: impl Fn(f64) -> f64, fs: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let t: Vec<f64> = (0..n).map(|i| i as f64 / fs).collect();
    let x = t.iter().map(|&t| f(t)).collect();
    (t, x)
}

proptest! {
    #[test]
    fn envelope_scales_linearly(alpha in 0.01..100.0f64, f in 0.5..5.0f64, decay in 0.0..0.5f64) {
        let (t, x) = sampled(|t| (-decay * t).exp() * (TAU * f * t).sin(), 200.0, 1000);
        let scaled: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        let (a, b) = (envelope_of(&t, &x).unwrap(), envelope_of(&t, &scaled).unwrap());
        prop_assert_eq!(&a.times, &b.times);
        // rounding of the removed mean is relative to the signal scale
        let scale = alpha * x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (p, q) in a.amplitudes.iter().zip(&b.amplitudes) {
            prop_assert!((q - alpha * p).abs() <= 16.0 * f64::EPSILON * scale);
        }
    }

    #[test]
    fn off_grid_tone_within_tenth_of_bin(f in 2.0..40.0f64, n in 500usize..3000) {
        let (_, x) = sampled(|t| (TAU * f * t).sin(), 100.0, n);
        let sp = spectrum_of(&x, 0.01, Window::Hann).unwrap();
        let found = dominant_frequency(&sp, (1.0, 49.0)).unwrap();
        prop_assert!((found - f).abs() < 0.1 * sp.bin_width(), "{} vs {}", found, f);
    }

    #[test]
    fn parseval_within_one_percent(a1 in 0.1..2.0f64, a2 in 0.0..1.0f64, f1 in 1.0..10.0f64, f2 in 12.0..40.0f64, n in 100usize..2000) {
        let (_, x) = sampled(|t| a1 * (TAU * f1 * t).sin() + a2 * (TAU * f2 * t + 0.3).cos() + 0.7, 100.0, n);
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sp = spectrum_of(&x, 0.01, Window::None).unwrap();
        prop_assert!((sp.variance() / var - 1.0).abs() < 0.01);
        prop_assert!(sp.mags.iter().all(|m| *m >= 0.0));
        prop_assert!(sp.freqs.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn on_grid_tone_recovered() {
    let (_, x) = sampled(|t| (TAU * 5.0 * t).sin(), 1000.0, 10_000);
    let sp = spectrum_of(&x, 1e-3, Window::Hann).unwrap();
    let f = dominant_frequency(&sp, (1.0, 100.0)).unwrap();
    assert!((f - 5.0).abs() < 0.5 * sp.bin_width());
    let peak = sp.mags.iter().cloned().fold(0.0, f64::max);
    assert!((peak - 1.0).abs() < 0.03, "{peak}");
}

#[test]
fn cubic_plant_has_odd_harmonics() {
    let dp = DuffingParams { forcing: 0.0, ..DuffingParams::default() };
    let icfg = IntegratorConfig::new(1e-4, 4.0, 10).unwrap();
    let ts = run_forced_reference(&dp, 3.0, &PlantState { x: 0.3, v: 0.0 }, &icfg).unwrap();
    let sp = spectrum(&ts, "x", Window::Hann).unwrap();
    let f1 = dominant_frequency(&sp, (1.0, 50.0)).unwrap();
    let r = harmonic_ratios(&sp, f1, 4).unwrap();
    let (second, third, fourth): (f64, f64, f64) = (r[0], r[1], r[2]);
    assert!(third > 0.01, "{r:?}");
    assert!(third >= 10.0 * second.max(fourth), "{r:?}");
}

#[test]
fn pretension_modulation_adds_harmonics() {
    let g = JointGeometry::new(0.01, 0.03).unwrap();
    let schedule = PretensionSchedule::Sine { mean: 1.0, amplitude: 0.8, freq: 0.5 };
    let cfg = JointOscillatorConfig { theta0: 0.3, ..JointOscillatorConfig::default() };
    let icfg = IntegratorConfig::new(1e-4, 10.0, 10).unwrap();
    let ts = simulate_joint_oscillator(&g, 200.0, &schedule, &cfg, &icfg).unwrap();
    let sp = spectrum(&ts, "theta", Window::Hann).unwrap();
    let f1 = dominant_frequency(&sp, (0.1, 50.0)).unwrap();
    let joint = harmonic_ratios(&sp, f1, 3).unwrap();

    let tone = TimeSeries64::from_rows(
        0.0,
        ts.dt(),
        &["s"],
        &(0..ts.len()).map(|i| vec![(TAU * f1 * ts.time(i)).sin()]).collect::<Vec<_>>(),
    )
    .unwrap();
    let base = harmonic_ratios(&spectrum(&tone, "s", Window::Hann).unwrap(), f1, 3).unwrap();
    assert!(base.iter().all(|r| *r < 1e-3), "{base:?}");
    assert!(joint[0] > base[0] && joint[1] > base[1], "{joint:?} vs {base:?}");
}
