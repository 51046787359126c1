//! `morpho`: command-line front end for the simulation toolkit.
//!
//! Every subcommand writes its CSV outputs, `summary.txt` and
//! `run_manifest.txt` into `--out-dir`. Exit status is 0 on success, 1 on a
//! runtime failure and 2 on a usage error.

mod afo;
mod joint;
mod magnet;
mod output;
mod spectrum;
mod swim;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::output::{write_run, Outcome};

#[derive(Parser, Debug)]
#[command(name = "morpho", version, about = "Nonlinear actuator, adaptive oscillator and swimmer experiments")]
struct Cli {
    /// Directory receiving the outputs
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Seed for every stochastic choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Joint torque curve τ(θ) and its cubic approximation
    JointTorque(joint::TorqueArgs),
    /// Linear and cubic joint torque coefficients
    JointCoeffs(joint::JointArgs),
    /// Free joint oscillation under a pretension schedule
    JointStep(joint::StepArgs),
    /// Stiff and soft magnetic spring force curves
    MagnetCurve(magnet::CurveArgs),
    /// PID tracking on the magnetic spring and its matched linear spring
    PidDemo(magnet::PidArgs),
    /// Adaptive oscillator driving the cubic and linear plants, plus a fixed-frequency reference
    AfoRun(afo::RunArgs),
    /// Entrainment basin over initial oscillator frequencies
    AfoSweep(afo::SweepArgs),
    /// Amplitude spectrum of a trace CSV channel
    Spectrum(spectrum::SpectrumArgs),
    /// Single swimmer simulation
    Swim(swim::SwimArgs),
    /// Homogeneous stiffness oracle and per-joint stiffness optimisation
    SwimOpt(swim::OptArgs),
}

fn finish<A: Serialize>(cli: &Cli, name: &str, args: &A, outcome: Result<Outcome>) -> Result<()> {
    let outcome = outcome?;
    write_run(&cli.out_dir, name, cli.seed, args, &outcome)?;
    for (k, v) in &outcome.summary {
        println!("{k}={v}");
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::JointTorque(a) => finish(cli, "joint-torque", a, joint::torque(a)),
        Command::JointCoeffs(a) => finish(cli, "joint-coeffs", a, joint::coeffs(a)),
        Command::JointStep(a) => finish(cli, "joint-step", a, joint::step(a)),
        Command::MagnetCurve(a) => finish(cli, "magnet-curve", a, magnet::curve(a)),
        Command::PidDemo(a) => {
            let mut a = a.clone();
            a.resolve();
            finish(cli, "pid-demo", &a, magnet::pid(&a))
        }
        Command::AfoRun(a) => {
            let mut a = a.clone();
            a.resolve();
            finish(cli, "afo-run", &a, afo::run(&a))
        }
        Command::AfoSweep(a) => finish(cli, "afo-sweep", a, afo::sweep(a)),
        Command::Spectrum(a) => finish(cli, "spectrum", a, spectrum::run(a)),
        Command::Swim(a) => finish(cli, "swim", a, swim::swim(a)),
        Command::SwimOpt(a) => finish(cli, "swim-opt", a, swim::optimize(a, cli.seed)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
