//! `joint-torque`, `joint-coeffs` and `joint-step`.

use std::f64::consts::PI;

use anyhow::{ensure, Result};
use clap::{Args, ValueEnum};
use morpho_core::actuators::{
    joint_torque, joint_torque_series_coeffs, linear_stiffness, simulate_joint_oscillator, JointGeometry,
    JointOscillatorConfig, PretensionSchedule, SpringConfig,
};
use morpho_core::analysis::{dominant_frequency, harmonic_ratios, spectrum, Window};
use morpho_core::IntegratorConfig;
use serde::Serialize;

use crate::output::{num, short, trace_csv, Outcome, Table};

#[derive(Args, Debug, Clone, Serialize)]
pub struct JointArgs {
    /// Pulley radius, m
    #[arg(long, default_value_t = 0.01)]
    pub r: f64,
    /// Distance from the joint axis to the spring anchor, m
    #[arg(long, default_value_t = 0.03)]
    pub d: f64,
    /// Linear spring stiffness, N/m
    #[arg(long = "K", default_value_t = 200.0)]
    #[serde(rename = "K")]
    pub k: f64,
    /// Spring pretension, N
    #[arg(long = "F", default_value_t = 1.0)]
    #[serde(rename = "F")]
    pub f: f64,
}

impl JointArgs {
    fn parts(&self) -> Result<(JointGeometry<f64>, SpringConfig<f64>)> {
        Ok((JointGeometry::new(self.r, self.d)?, SpringConfig::new(self.k, self.f)?))
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TorqueArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub joint: JointArgs,
    /// rad
    #[arg(long, default_value_t = -PI, allow_negative_numbers = true)]
    pub theta_min: f64,
    /// rad
    #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 361)]
    pub points: usize,
}

pub fn torque(a: &TorqueArgs) -> Result<Outcome> {
    let (g, s) = a.joint.parts()?;
    ensure!(a.points >= 2 && a.theta_max > a.theta_min, "need at least 2 points and theta-max > theta-min");
    let c = joint_torque_series_coeffs(&g, &s);
    let mut table = Table::new(&["theta", "torque", "series"]);
    for i in 0..a.points {
        let theta = a.theta_min + (a.theta_max - a.theta_min) * i as f64 / (a.points - 1) as f64;
        table.row(&[theta, joint_torque(&g, &s, theta), c.eval(theta)]);
    }
    let mut out = Outcome::default();
    out.file("joint_torque.csv", table.into_string());
    out.note("c1", short(c.c1));
    out.note("c3", short(c.c3));
    Ok(out)
}

pub fn coeffs(a: &JointArgs) -> Result<Outcome> {
    let (g, s) = a.parts()?;
    let c = joint_torque_series_coeffs(&g, &s);
    let closed = linear_stiffness(&g, &s);
    let mut table = Table::new(&["c1", "c3", "c1_closed_form"]);
    table.row(&[c.c1, c.c3, closed]);
    let mut out = Outcome::default();
    out.file("joint_coeffs.csv", table.into_string());
    out.note("c1", short(c.c1));
    out.note("c3", short(c.c3));
    out.note("c1_closed_form", short(closed));
    Ok(out)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Pretension jumps from --f-before to --f-after at --t-step.
    Step,
    /// Pretension oscillates as --f-mean + --f-amp·sin(2π·--f-freq·t).
    Sine,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct StepArgs {
    #[arg(long, default_value_t = 0.01)]
    pub r: f64,
    #[arg(long, default_value_t = 0.03)]
    pub d: f64,
    #[arg(long = "K", default_value_t = 200.0)]
    #[serde(rename = "K")]
    pub k: f64,
    /// Rotor inertia, kg·m²
    #[arg(long, default_value_t = 1e-4)]
    pub inertia: f64,
    /// Rotor damping, N·m·s/rad
    #[arg(long, default_value_t = 1e-5)]
    pub damping: f64,
    /// Initial deflection, rad
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub theta0: f64,
    #[arg(long, value_enum, default_value_t = Preset::Step)]
    pub preset: Preset,
    #[arg(long, default_value_t = 0.1)]
    pub f_before: f64,
    #[arg(long, default_value_t = 2.0)]
    pub f_after: f64,
    #[arg(long, default_value_t = 5.0)]
    pub t_step: f64,
    #[arg(long, default_value_t = 1.0)]
    pub f_mean: f64,
    #[arg(long, default_value_t = 0.8)]
    pub f_amp: f64,
    /// Hz
    #[arg(long, default_value_t = 0.5)]
    pub f_freq: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

/// Band searched for the dominant frequency, Hz.
const BAND: (f64, f64) = (0.05, 200.0);

pub fn step(a: &StepArgs) -> Result<Outcome> {
    let g = JointGeometry::new(a.r, a.d)?;
    let schedule = match a.preset {
        Preset::Step => PretensionSchedule::Step { before: a.f_before, after: a.f_after, t_step: a.t_step },
        Preset::Sine => PretensionSchedule::Sine { mean: a.f_mean, amplitude: a.f_amp, freq: a.f_freq },
    };
    let cfg = JointOscillatorConfig { inertia: a.inertia, damping: a.damping, theta0: a.theta0 };
    let icfg = IntegratorConfig::new(a.dt, a.t_end, a.stride)?;
    let ts = simulate_joint_oscillator(&g, a.k, &schedule, &cfg, &icfg)?;
    let band = (BAND.0, BAND.1.min(0.5 / ts.dt()));

    let mut out = Outcome::default();
    let predicted = |f: f64| {
        let c1 = linear_stiffness(&g, &SpringConfig { stiffness: a.k, pretension: f });
        (c1 / a.inertia).sqrt() / (2.0 * PI)
    };
    match a.preset {
        Preset::Step => {
            let before = ts.window(0.0, a.t_step - 0.5 * ts.dt())?;
            let after = ts.window(a.t_step, a.t_end)?;
            let f_before = dominant_frequency(&spectrum(&before, "theta", Window::Hann)?, band)?;
            let f_after = dominant_frequency(&spectrum(&after, "theta", Window::Hann)?, band)?;
            out.note("freq_before_hz", num(f_before));
            out.note("freq_after_hz", num(f_after));
            out.note("freq_ratio", num(f_after / f_before));
            out.note("linear_freq_before_hz", num(predicted(a.f_before)));
            out.note("linear_freq_after_hz", num(predicted(a.f_after)));
        }
        Preset::Sine => {
            let sp = spectrum(&ts, "theta", Window::Hann)?;
            let f1 = dominant_frequency(&sp, band)?;
            out.note("freq_hz", num(f1));
            out.note("linear_freq_mean_hz", num(predicted(a.f_mean)));
            if let Ok(r) = harmonic_ratios(&sp, f1, 3) {
                out.note("harmonic2_ratio", num(r[0]));
                out.note("harmonic3_ratio", num(r[1]));
            }
        }
    }
    out.file("joint_step.csv", trace_csv(&ts));
    Ok(out)
}
