//! `afo-run` and `afo-sweep`.

use std::f64::consts::TAU;

use anyhow::{ensure, Result};
use clap::Args;
use morpho_core::afo::{basin_sweep, run_coupled_loop, run_forced_reference, AfoParams, DuffingParams, PlantState};
use morpho_core::analysis::amplitude_envelope;
use morpho_core::{IntegratorConfig, TimeSeries64};
use serde::Serialize;

use crate::output::{num, trace_csv, Outcome, Table};

#[derive(Args, Debug, Clone, Serialize)]
pub struct PlantArgs {
    /// Linear natural frequency, Hz
    #[arg(long, default_value_t = 3.0)]
    pub f0: f64,
    /// Cubic stiffness, 1/(m²·s²)
    #[arg(long, default_value_t = 1.2e4)]
    pub a3: f64,
    /// Plant damping, 1/s
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    /// Forcing amplitude, m/s²
    #[arg(long, default_value_t = 1.0)]
    pub forcing: f64,
    /// Oscillator coupling strength
    #[arg(long, default_value_t = 300.0)]
    pub eps: f64,
    /// Squared oscillator radius
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Initial plant position, m
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub x0: f64,
    /// Initial plant velocity, m/s
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub v0: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

impl PlantArgs {
    fn duffing(&self) -> DuffingParams<f64> {
        DuffingParams { damping: self.damping, f0: self.f0, a3: self.a3, forcing: self.forcing }
    }

    fn plant0(&self) -> PlantState<f64> {
        PlantState { x: self.x0, v: self.v0 }
    }

    fn integrator(&self) -> Result<IntegratorConfig<f64>> {
        Ok(IntegratorConfig::new(self.dt, self.t_end, self.stride)?)
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub plant: PlantArgs,
    /// Initial oscillator frequency, rad/s; defaults to 0.9·2π·f0
    #[arg(long)]
    pub omega_init: Option<f64>,
    /// Drive frequency of the reference run, Hz; defaults to f0
    #[arg(long)]
    pub f_drive: Option<f64>,
    /// Time at which the early envelope is read, s
    #[arg(long, default_value_t = 2.0)]
    pub t_early: f64,
}

impl RunArgs {
    pub fn resolve(&mut self) {
        let f0 = self.plant.f0;
        self.omega_init.get_or_insert(0.9 * TAU * f0);
        self.f_drive.get_or_insert(f0);
    }
}

/// Largest envelope peak in the period ending at `t`.
fn envelope_at(ts: &TimeSeries64, t: f64, period: f64) -> Result<f64> {
    let env = amplitude_envelope(ts, "x")?;
    Ok(env.max_before(t + 0.5 * ts.dt(), period).unwrap_or(0.0))
}

pub fn run(a: &RunArgs) -> Result<Outcome> {
    let p = &a.plant;
    let dp = p.duffing();
    let icfg = p.integrator()?;
    let ap = AfoParams { mu: p.mu, eps: p.eps, omega_init: a.omega_init.unwrap_or(0.9 * TAU * p.f0) };
    let f_drive = a.f_drive.unwrap_or(p.f0);
    ensure!(a.t_early > 0.0 && a.t_early < p.t_end, "t-early must lie inside the run");

    let cubic = run_coupled_loop(&ap, &dp, &p.plant0(), &icfg)?;
    let linear = run_coupled_loop(&ap, &dp.linear(), &p.plant0(), &icfg)?;
    let reference = run_forced_reference(&dp.linear(), f_drive, &p.plant0(), &icfg)?;

    // one linear period, widened so slower nonlinear cycles still contain a peak
    let period = 1.5 / p.f0;
    let t_end = cubic.time(cubic.len() - 1);
    let mut out = Outcome::default();
    let last_e = |ts: &TimeSeries64| ts.row(ts.len() - 1)[4];
    for (name, ts) in [("cubic", &cubic), ("linear", &linear), ("reference", &reference)] {
        out.note(&format!("{name}_envelope_early"), num(envelope_at(ts, a.t_early, period)?));
        out.note(&format!("{name}_envelope_final"), num(envelope_at(ts, t_end, period)?));
        out.note(&format!("{name}_energy_final"), num(last_e(ts)));
    }
    out.note("energy_ratio_cubic_linear", num(last_e(&cubic) / last_e(&linear)));
    out.note("omega_final_cubic", num(cubic.row(cubic.len() - 1)[2]));
    out.note("omega_final_linear", num(linear.row(linear.len() - 1)[2]));
    out.file("coupled_trace.csv", trace_csv(&cubic));
    out.file("linear_trace.csv", trace_csv(&linear));
    out.file("reference_trace.csv", trace_csv(&reference));
    Ok(out)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub plant: PlantArgs,
    /// Lowest initial frequency as a multiple of 2π·f0
    #[arg(long, default_value_t = 0.5)]
    pub ratio_min: f64,
    /// Highest initial frequency as a multiple of 2π·f0
    #[arg(long, default_value_t = 2.0)]
    pub ratio_max: f64,
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    /// Relative tolerance on the final frequency
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
}

/// The sweep listens to the linear plant, so `--a3` is ignored.
pub fn sweep(a: &SweepArgs) -> Result<Outcome> {
    let p = &a.plant;
    ensure!(a.points >= 1 && a.ratio_max >= a.ratio_min && a.ratio_min > 0.0, "invalid sweep range");
    let w0 = TAU * p.f0;
    let grid: Vec<f64> = (0..a.points)
        .map(|i| {
            let s = if a.points == 1 { 0.0 } else { i as f64 / (a.points - 1) as f64 };
            w0 * (a.ratio_min + (a.ratio_max - a.ratio_min) * s)
        })
        .collect();
    let ap = AfoParams { mu: p.mu, eps: p.eps, omega_init: w0 };
    let cells = basin_sweep(&grid, &ap, &p.duffing().linear(), &p.plant0(), &p.integrator()?, a.tol)?;

    let mut table = Table::new(&["omega_init", "converged", "omega_final"]);
    let mut converged = 0;
    for c in &cells {
        converged += usize::from(c.converged);
        let fin = c.omega_final.map_or_else(|| "nan".to_string(), num);
        table.raw(&[num(c.omega_init), u8::from(c.converged).to_string(), fin]);
    }
    let mut out = Outcome::default();
    out.file("basin.csv", table.into_string());
    out.note("cells", cells.len());
    out.note("converged", converged);
    Ok(out)
}
