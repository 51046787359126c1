//! Planar five-segment swimmer in a resistive fluid.
//!
//! A long front segment carries the motor; four short rear segments follow.
//! The motor drives joint 1 through a series torsional spring, and joints 2–4
//! are passive spring-dampers. Each of the four joint springs has its own
//! stiffness, which is the quantity the optimizer tunes.
//!
//! The fluid applies anisotropic resistive drag per unit length,
//! `f = −c_N·v_n·n − c_T·v_t·e`, with no added mass.

mod dynamics;
mod optimize;

pub use dynamics::{elastic_energy, kinetic_energy, SwimmerState};
pub use optimize::{
    homogeneous_oracle, log_grid, optimize_stiffness, optimize_with, OptimizeOptions, OptimizeReport, OracleCell,
    OracleReport, RestartReport,
};

use crate::actuators::{joint_torque, JointGeometry, SpringConfig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sim::{ensure_finite, integrate_observed, IntegratorConfig, Rk4, TimeSeries};

pub const N_SEGMENTS: usize = 5;
pub const N_JOINTS: usize = 4;
/// Generalised coordinates: front-segment centre `(x, y)` and five absolute segment angles.
pub const N_DOF: usize = 2 + N_SEGMENTS;

/// Torque law of the four joint springs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointLaw<T> {
    /// `τ = −k·q`; the profile holds `k` in N·m/rad.
    Linear,
    /// Tunable rotary joint torque law; the profile holds the pretension `F` in N.
    Tunable { geometry: JointGeometry<T>, spring_stiffness: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwimmerConfig<T> {
    /// Segment lengths front to tail, m (unit depth, so also areas in m²).
    pub lengths: [T; N_SEGMENTS],
    /// kg
    pub masses: [T; N_SEGMENTS],
    /// Normal drag per unit length, N·s/m².
    pub drag_normal: T,
    /// Tangential drag per unit length, N·s/m².
    pub drag_tangential: T,
    /// Viscous damping of every joint, N·m·s/rad.
    pub joint_damping: T,
    pub k_min: T,
    pub k_max: T,
    pub law: JointLaw<T>,
}

impl<T: Scalar> Default for SwimmerConfig<T> {
    fn default() -> Self {
        let front = T::lit(0.2);
        let rear = T::lit(0.05);
        let density = T::one();
        Self {
            lengths: [front, rear, rear, rear, rear],
            masses: [front * density, rear * density, rear * density, rear * density, rear * density],
            drag_normal: T::lit(5.0),
            drag_tangential: T::one(),
            joint_damping: T::lit(1e-4),
            k_min: T::lit(0.005),
            k_max: T::lit(0.5),
            law: JointLaw::Linear,
        }
    }
}

impl<T: Scalar> SwimmerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(format!("swimmer: {msg}")));
        if self.lengths.iter().chain(&self.masses).any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return bad("segment lengths and masses must be positive");
        }
        let rear: T = self.lengths[1..].iter().fold(T::zero(), |a, &l| a + l);
        if (self.lengths[0] - rear).abs() > T::lit(1e-9) * self.lengths[0] {
            return bad("front segment area must equal the total rear area");
        }
        if !(self.drag_normal > self.drag_tangential && self.drag_tangential > T::zero()) {
            return bad("drag coefficients need c_N > c_T > 0");
        }
        if self.joint_damping < T::zero() {
            return bad("joint damping must be non-negative");
        }
        if !(self.k_min > T::zero() && self.k_max > self.k_min) {
            return bad("stiffness box needs 0 < k_min < k_max");
        }
        if let JointLaw::Tunable { geometry, spring_stiffness } = self.law {
            geometry.validate()?;
            SpringConfig::new(spring_stiffness, T::zero())?;
        }
        Ok(())
    }

    fn inertia(&self, i: usize) -> T {
        self.masses[i] * self.lengths[i] * self.lengths[i] / T::lit(12.0)
    }

    /// Spring torque acting on the distal segment of a joint deflected by `q`.
    fn spring_torque(&self, k: T, q: T) -> T {
        match self.law {
            JointLaw::Linear => -k * q,
            JointLaw::Tunable { geometry, spring_stiffness } => {
                -joint_torque(&geometry, &SpringConfig { stiffness: spring_stiffness, pretension: k }, q)
            }
        }
    }
}

/// Per-joint spring parameter, joint 1 (behind the motor) first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessProfile<T> {
    pub k: [T; N_JOINTS],
}

impl<T: Scalar> StiffnessProfile<T> {
    pub fn homogeneous(k: T) -> Self {
        Self { k: [k; N_JOINTS] }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.k.iter().all(|&v| v == self.k[0])
    }

    pub fn validate(&self, cfg: &SwimmerConfig<T>) -> Result<()> {
        match self.k.iter().find(|&&v| !(v >= cfg.k_min && v <= cfg.k_max)) {
            Some(v) => Err(Error::OutOfRange { value: v.as_f64(), lo: cfg.k_min.as_f64(), hi: cfg.k_max.as_f64() }),
            None => Ok(()),
        }
    }
}

/// Motor angle `amplitude·sin(2π·frequency·t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuationParams<T> {
    /// rad
    pub amplitude: T,
    /// Hz
    pub frequency: T,
    /// rad
    pub phase: T,
}

impl<T: Scalar> Default for ActuationParams<T> {
    fn default() -> Self {
        Self { amplitude: T::lit(0.3), frequency: T::one(), phase: T::zero() }
    }
}

impl<T: Scalar> ActuationParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.amplitude >= T::zero()
            && self.amplitude < T::FRAC_PI_2()
            && self.frequency > T::zero()
            && self.phase.is_finite()
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("actuation needs amplitude in [0, π/2) and frequency > 0: {self:?}")))
        }
    }

    fn angle(&self, t: T) -> T {
        self.amplitude * (T::two_pi() * self.frequency * t + self.phase).sin()
    }

    fn rate(&self, t: T) -> T {
        let w = T::two_pi() * self.frequency;
        self.amplitude * w * (w * t + self.phase).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitMetrics<T> {
    /// Mean velocity of the centre of mass along the mean heading, m/s.
    pub mean_speed: T,
    /// Thrust proxy; equal to `mean_speed`.
    pub thrust: T,
    /// Mean mechanical power delivered by the motor, W.
    pub input_power: T,
}

#[derive(Debug, Clone)]
pub struct SwimResult<T> {
    /// Channels `head_x, head_y, heading, joint1..joint4`.
    pub trace: TimeSeries<T>,
    pub metrics: GaitMetrics<T>,
}

pub const TRACE_CHANNELS: [&str; 7] = ["head_x", "head_y", "heading", "joint1", "joint2", "joint3", "joint4"];

/// Simulates from the straight pose at rest.
pub fn simulate_swimmer<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    profile: &StiffnessProfile<T>,
    act: &ActuationParams<T>,
    duration: T,
    icfg: &IntegratorConfig<T>,
) -> Result<SwimResult<T>> {
    simulate_swimmer_from(cfg, profile, act, duration, icfg, &SwimmerState::default())
}

/// Simulates from an arbitrary initial state.
///
/// `icfg` supplies the step and recording stride; `duration` replaces its
/// horizon. Metrics average over the last half of the run, truncated to whole
/// actuation periods.
pub fn simulate_swimmer_from<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    profile: &StiffnessProfile<T>,
    act: &ActuationParams<T>,
    duration: T,
    icfg: &IntegratorConfig<T>,
    init: &SwimmerState<T>,
) -> Result<SwimResult<T>> {
    cfg.validate()?;
    profile.validate(cfg)?;
    act.validate()?;
    let icfg = icfg.with_t_end(duration);
    icfg.validate()?;
    let periods = duration * act.frequency;
    if periods < T::lit(10.0) - T::lit(1e-9) {
        return Err(Error::InvalidConfig(format!("duration must cover at least 10 actuation periods, got {periods}")));
    }

    let dt = icfg.dt;
    let n = icfg.n_steps();
    let window_periods = (periods / T::lit(2.0)).floor();
    let n_window = (window_periods / (act.frequency * dt)).round().to_usize().unwrap_or(0).clamp(1, n);
    let window_start = n - n_window;

    let mut trace = TimeSeries::empty(T::zero(), icfg.sample_dt(), &TRACE_CHANNELS)?;
    let mut y = init.to_vec();
    let mut stepper = Rk4::new(2 * N_DOF);
    let mut rhs = |t: T, s: &[T], ds: &mut [T]| dynamics::derivatives(cfg, profile, act, t, s, ds);

    let mut com_start = [T::zero(); 2];
    let mut heading_sum = [T::zero(); 2];
    let mut power_sum = T::zero();
    let mut row = [T::zero(); 7];

    for k in 0..=n {
        let t = dt * T::from_usize_lossy(k);
        if k % icfg.record_stride == 0 {
            dynamics::trace_row(cfg, &y, &mut row);
            trace.push_row(&row).map_err(|e| crate::sim::with_step(e, k))?;
        }
        if k >= window_start {
            if k == window_start {
                com_start = dynamics::centre_of_mass(cfg, &y);
            }
            if k < n {
                // left-rectangle averages over the window's steps
                heading_sum[0] = heading_sum[0] + y[2].cos();
                heading_sum[1] = heading_sum[1] + y[2].sin();
                power_sum = power_sum + dynamics::motor_power(cfg, profile, act, t, &y);
            }
        }
        if k == n {
            break;
        }
        stepper.step(&mut rhs, t, &mut y, dt).map_err(|e| crate::sim::with_step(e, k + 1))?;
        ensure_finite(k + 1, t + dt, &y)?;
    }

    let com_end = dynamics::centre_of_mass(cfg, &y);
    let span = dt * T::from_usize_lossy(n_window);
    let norm = heading_sum[0].hypot(heading_sum[1]);
    let mean_speed = if norm > T::zero() {
        ((com_end[0] - com_start[0]) * heading_sum[0] + (com_end[1] - com_start[1]) * heading_sum[1]) / (norm * span)
    } else {
        T::zero()
    };
    Ok(SwimResult {
        trace,
        metrics: GaitMetrics { mean_speed, thrust: mean_speed, input_power: power_sum / T::from_usize_lossy(n_window) },
    })
}

/// Kinetic and (linear-law) elastic energy over a run from `init`.
///
/// Channels `kinetic, elastic`; `icfg` sets the horizon.
pub fn energy_trace<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    profile: &StiffnessProfile<T>,
    act: &ActuationParams<T>,
    icfg: &IntegratorConfig<T>,
    init: &SwimmerState<T>,
) -> Result<TimeSeries<T>> {
    cfg.validate()?;
    profile.validate(cfg)?;
    act.validate()?;
    if cfg.law != JointLaw::Linear {
        return Err(Error::InvalidConfig("elastic energy is only defined for linear joint springs".into()));
    }
    integrate_observed(
        |t, s: &[T], ds: &mut [T]| dynamics::derivatives(cfg, profile, act, t, s, ds),
        &init.to_vec(),
        icfg,
        &["kinetic", "elastic"],
        |t, y, row| {
            row[0] = kinetic_energy(cfg, y);
            row[1] = elastic_energy(profile, act, t, y);
        },
    )
}

/// Default swimmer integration: 1 ms steps, 100 Hz recording.
pub fn default_integrator<T: Scalar>() -> IntegratorConfig<T> {
    IntegratorConfig { dt: T::lit(1e-3), t_end: T::lit(20.0), record_stride: 10 }
}
