//! `swim` and `swim-opt`.

use anyhow::Result;
use clap::{Args, ValueEnum};
use morpho_core::actuators::JointGeometry;
use morpho_core::swimmer::{
    optimize_stiffness, simulate_swimmer, ActuationParams, JointLaw, OptimizeOptions, StiffnessProfile, SwimmerConfig,
};
use morpho_core::IntegratorConfig;
use serde::Serialize;

use crate::output::{num, trace_csv, Outcome, Table};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    /// Linear torsional springs; k in N·m/rad
    Linear,
    /// Tunable rotary joints; k is the pretension in N
    Tunable,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BodyArgs {
    /// Front segment length, m
    #[arg(long, default_value_t = 0.2)]
    pub front_length: f64,
    /// Length of each of the four rear segments, m
    #[arg(long, default_value_t = 0.05)]
    pub rear_length: f64,
    /// Mass per unit length, kg/m
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    /// Normal drag per unit length, N·s/m²
    #[arg(long, default_value_t = 5.0)]
    pub drag_normal: f64,
    /// Tangential drag per unit length, N·s/m²
    #[arg(long, default_value_t = 1.0)]
    pub drag_tangential: f64,
    /// N·m·s/rad
    #[arg(long, default_value_t = 1e-4)]
    pub joint_damping: f64,
    #[arg(long, default_value_t = 0.005)]
    pub k_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub k_max: f64,
    #[arg(long, value_enum, default_value_t = Law::Linear)]
    pub law: Law,
    /// Tunable joint pulley radius, m
    #[arg(long, default_value_t = 0.01)]
    pub joint_r: f64,
    /// Tunable joint anchor distance, m
    #[arg(long, default_value_t = 0.03)]
    pub joint_d: f64,
    /// Tunable joint spring stiffness, N/m
    #[arg(long = "joint-K", default_value_t = 200.0)]
    #[serde(rename = "joint_K")]
    pub joint_k: f64,
    /// Motor angle amplitude, rad
    #[arg(long, default_value_t = 0.3)]
    pub amplitude: f64,
    /// Motor frequency, Hz
    #[arg(long, default_value_t = 1.0)]
    pub frequency: f64,
    /// Motor phase, rad
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase: f64,
    /// Simulated time, s
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

impl BodyArgs {
    fn config(&self) -> SwimmerConfig<f64> {
        let law = match self.law {
            Law::Linear => JointLaw::Linear,
            Law::Tunable => JointLaw::Tunable {
                geometry: JointGeometry { r: self.joint_r, d: self.joint_d },
                spring_stiffness: self.joint_k,
            },
        };
        let (f, r) = (self.front_length, self.rear_length);
        SwimmerConfig {
            lengths: [f, r, r, r, r],
            masses: [f * self.density, r * self.density, r * self.density, r * self.density, r * self.density],
            drag_normal: self.drag_normal,
            drag_tangential: self.drag_tangential,
            joint_damping: self.joint_damping,
            k_min: self.k_min,
            k_max: self.k_max,
            law,
        }
    }

    fn actuation(&self) -> ActuationParams<f64> {
        ActuationParams { amplitude: self.amplitude, frequency: self.frequency, phase: self.phase }
    }

    fn integrator(&self) -> Result<IntegratorConfig<f64>> {
        Ok(IntegratorConfig::new(self.dt, self.duration, self.stride)?)
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SwimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub body: BodyArgs,
    /// Joint 1 (behind the motor) spring parameter
    #[arg(long, default_value_t = 0.05)]
    pub k1: f64,
    #[arg(long, default_value_t = 0.05)]
    pub k2: f64,
    #[arg(long, default_value_t = 0.05)]
    pub k3: f64,
    #[arg(long, default_value_t = 0.05)]
    pub k4: f64,
}

pub fn swim(a: &SwimArgs) -> Result<Outcome> {
    let b = &a.body;
    let profile = StiffnessProfile { k: [a.k1, a.k2, a.k3, a.k4] };
    let r = simulate_swimmer(&b.config(), &profile, &b.actuation(), b.duration, &b.integrator()?)?;
    let mut out = Outcome::default();
    out.file("swim_trace.csv", trace_csv(&r.trace));
    out.note("mean_speed", num(r.metrics.mean_speed));
    out.note("thrust", num(r.metrics.thrust));
    out.note("input_power", num(r.metrics.input_power));
    Ok(out)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OptArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub body: BodyArgs,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Simulations per restart
    #[arg(long, default_value_t = 80)]
    pub max_evals: usize,
    /// Size of the homogeneous log grid
    #[arg(long, default_value_t = 12)]
    pub grid_size: usize,
}

pub fn optimize(a: &OptArgs, seed: u64) -> Result<Outcome> {
    let b = &a.body;
    let opts = OptimizeOptions {
        restarts: a.restarts,
        seed,
        max_evals: a.max_evals,
        grid_size: a.grid_size,
        ..Default::default()
    };
    let (oracle, report) = optimize_stiffness(&b.config(), &b.actuation(), &opts, b.duration, &b.integrator()?)?;

    let mut table = Table::new(&["k", "thrust"]);
    for c in &oracle.table {
        table.raw(&[num(c.k), c.thrust.map_or_else(|| "nan".to_string(), num)]);
    }
    let mut restarts = Table::new(&[
        "restart", "start_k1", "start_k2", "start_k3", "start_k4", "k1", "k2", "k3", "k4", "thrust", "evals",
    ]);
    for (i, r) in report.restarts.iter().enumerate() {
        let mut cells = vec![i.to_string()];
        cells.extend(r.start.iter().map(|&k| num(k)));
        match &r.outcome {
            Ok((k, v)) => {
                cells.extend(k.iter().map(|&k| num(k)));
                cells.push(num(*v));
            }
            Err(_) => cells.extend(std::iter::repeat_n("nan".to_string(), 5)),
        }
        cells.push(r.evals.to_string());
        restarts.raw(&cells);
    }
    let mut history = Table::new(&["iteration", "best_thrust"]);
    for (i, h) in report.history.iter().enumerate() {
        history.raw(&[i.to_string(), num(*h)]);
    }

    let mut out = Outcome::default();
    out.file("oracle_table.csv", table.into_string());
    out.file("restarts.csv", restarts.into_string());
    out.file("history.csv", history.into_string());
    out.note("oracle_k_best", num(oracle.k_best));
    out.note("oracle_thrust", num(oracle.metric_best));
    out.note("oracle_interior", oracle.is_interior());
    for (i, k) in report.profile_best.k.iter().enumerate() {
        out.note(&format!("best_k{}", i + 1), num(*k));
    }
    out.note("best_thrust", num(report.metric_best));
    out.note("improvement", num(report.metric_best / oracle.metric_best - 1.0));
    if !oracle.is_interior() {
        out.note("warning", "homogeneous optimum at a grid end; widen the k box");
    }
    Ok(out)
}
