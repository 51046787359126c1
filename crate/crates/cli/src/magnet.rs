//! `magnet-curve` and `pid-demo`.

use std::path::PathBuf;

use anyhow::{ensure, Result};
use clap::{Args, ValueEnum};
use morpho_core::actuators::magnet::{SOFT_STRENGTH, STIFF_STRENGTH};
use morpho_core::actuators::{
    pid_tracking_experiment, MagnetMode, MagneticSpringModel, PidGains, Sinusoid, SpringPlant, TrackingReport,
    TrackingSetup,
};
use morpho_core::IntegratorConfig;
use serde::Serialize;

use crate::output::{num, Outcome, Table};

#[derive(Args, Debug, Clone, Serialize)]
pub struct CurveArgs {
    /// Stiff-mode strength A in A/(gap + z_off)⁴, N·m⁴
    #[arg(long, default_value_t = 1.6e-6)]
    pub stiff_strength: f64,
    /// Soft-mode strength, N·m⁴
    #[arg(long, default_value_t = 1e-6)]
    pub soft_strength: f64,
    /// m
    #[arg(long, default_value_t = 0.01)]
    pub z_off: f64,
    /// Tabulated stiff curve (CSV `gap_m,force_N`), replaces the parametric one
    #[arg(long)]
    pub stiff_table: Option<PathBuf>,
    /// Tabulated soft curve, replaces the parametric one
    #[arg(long)]
    pub soft_table: Option<PathBuf>,
    /// m
    #[arg(long, default_value_t = 0.0)]
    pub gap_min: f64,
    /// m
    #[arg(long, default_value_t = 0.05)]
    pub gap_max: f64,
    #[arg(long, default_value_t = 501)]
    pub points: usize,
}

fn model(mode: MagnetMode, table: &Option<PathBuf>, strength: f64, z_off: f64) -> Result<MagneticSpringModel<f64>> {
    Ok(match table {
        Some(path) => MagneticSpringModel::load_csv(mode, path)?,
        None => MagneticSpringModel::parametric(mode, strength, z_off)?,
    })
}

pub fn curve(a: &CurveArgs) -> Result<Outcome> {
    ensure!(a.points >= 2 && a.gap_max > a.gap_min, "need at least 2 points and gap-max > gap-min");
    let stiff = model(MagnetMode::Stiff, &a.stiff_table, a.stiff_strength, a.z_off)?;
    let soft = model(MagnetMode::Soft, &a.soft_table, a.soft_strength, a.z_off)?;
    let mut table = Table::new(&["gap", "force_stiff", "force_soft", "stiffness_stiff", "stiffness_soft"]);
    for i in 0..a.points {
        let gap = a.gap_min + (a.gap_max - a.gap_min) * i as f64 / (a.points - 1) as f64;
        table.row(&[gap, stiff.force(gap)?, soft.force(gap)?, stiff.stiffness(gap)?, soft.stiffness(gap)?]);
    }
    let mut out = Outcome::default();
    out.file("magnet_curve.csv", table.into_string());
    out.note("force_stiff_at_gap_min", num(stiff.force(a.gap_min)?));
    out.note("force_soft_at_gap_min", num(soft.force(a.gap_min)?));
    Ok(out)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Stiff,
    Soft,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PidArgs {
    /// Magnet configuration of the nonlinear plant
    #[arg(long, value_enum, default_value_t = Mode::Stiff)]
    pub mode: Mode,
    /// Magnet strength; defaults to the preset of --mode
    #[arg(long)]
    pub strength: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub z_off: f64,
    /// kg
    #[arg(long, default_value_t = 0.05)]
    pub mass: f64,
    /// N·s/m
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    /// Equilibrium gap, m
    #[arg(long, default_value_t = 0.01)]
    pub gap_eq: f64,
    /// Reference amplitude, m
    #[arg(long, default_value_t = 0.004)]
    pub ref_amp: f64,
    /// Reference frequency, Hz
    #[arg(long, default_value_t = 2.0)]
    pub ref_freq: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub kp: f64,
    #[arg(long, default_value_t = 2e4)]
    pub ki: f64,
    #[arg(long, default_value_t = 20.0)]
    pub kd: f64,
    /// Force limit, N
    #[arg(long, default_value_t = 100.0)]
    pub saturation: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 5.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

impl PidArgs {
    /// Fills `strength` from the mode preset so the manifest records it.
    pub fn resolve(&mut self) {
        self.strength.get_or_insert(match self.mode {
            Mode::Stiff => STIFF_STRENGTH,
            Mode::Soft => SOFT_STRENGTH,
        });
    }
}

pub fn pid(a: &PidArgs) -> Result<Outcome> {
    let mode = match a.mode {
        Mode::Stiff => MagnetMode::Stiff,
        Mode::Soft => MagnetMode::Soft,
    };
    let mut a = a.clone();
    a.resolve();
    let magnet = MagneticSpringModel::parametric(mode, a.strength.unwrap_or_default(), a.z_off)?;
    let linear = SpringPlant::matched_linear(&magnet, a.gap_eq)?;
    let setup = TrackingSetup {
        mass: a.mass,
        damping: a.damping,
        gap_eq: a.gap_eq,
        reference: Sinusoid { amp: a.ref_amp, freq: a.ref_freq },
    };
    let gains = PidGains { kp: a.kp, ki: a.ki, kd: a.kd, saturation: a.saturation };
    let icfg = IntegratorConfig::new(a.dt, a.t_end, a.stride)?;
    let lin = pid_tracking_experiment(&linear, &setup, &gains, &icfg)?;
    let mag = pid_tracking_experiment(&SpringPlant::Magnetic(magnet), &setup, &gains, &icfg)?;

    let col = |r: &TrackingReport<f64>, c: &str| r.trace.column(c);
    let (gl, gm, rf) = (col(&lin, "gap")?, col(&mag, "gap")?, col(&lin, "reference")?);
    let (ul, um) = (col(&lin, "u")?, col(&mag, "u")?);
    let mut table = Table::new(&["t", "reference", "gap_linear", "gap_magnetic", "u_linear", "u_magnetic"]);
    for i in 0..lin.trace.len() {
        table.row(&[lin.trace.time(i), rf[i], gl[i], gm[i], ul[i], um[i]]);
    }
    let mut out = Outcome::default();
    out.file("pid_trace.csv", table.into_string());
    if let SpringPlant::Linear { stiffness } = linear {
        out.note("matched_stiffness", num(stiffness));
    }
    out.note("rms_error_linear", num(lin.rms_error));
    out.note("rms_error_magnetic", num(mag.rms_error));
    out.note("rms_ratio", num(mag.rms_error / lin.rms_error));
    Ok(out)
}
