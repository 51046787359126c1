//! Position tracking of a mass suspended on a spring with a discrete PID.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sim::{ensure_finite, with_step, IntegratorConfig, Rk4, TimeSeries};

use super::magnet::MagneticSpringModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains<T> {
    pub kp: T,
    pub ki: T,
    pub kd: T,
    /// Output force limit, N.
    pub saturation: T,
}

impl<T: Scalar> PidGains<T> {
    pub fn validate(&self) -> Result<()> {
        let gains_ok = [self.kp, self.ki, self.kd].iter().all(|g| *g >= T::zero() && g.is_finite());
        if gains_ok && self.saturation > T::zero() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("PID gains must be >= 0 with positive saturation: {self:?}")))
        }
    }
}

impl<T: Scalar> Default for PidGains<T> {
    fn default() -> Self {
        Self { kp: T::lit(2000.0), ki: T::lit(2e4), kd: T::lit(20.0), saturation: T::lit(100.0) }
    }
}

/// PID with trapezoidal integral, backward-difference derivative and
/// integrator clamping while the output is saturated.
#[derive(Debug, Clone)]
pub struct Pid<T> {
    gains: PidGains<T>,
    dt: T,
    integral: T,
    prev_error: Option<T>,
}

impl<T: Scalar> Pid<T> {
    pub fn new(gains: PidGains<T>, dt: T) -> Self {
        Self { gains, dt, integral: T::zero(), prev_error: None }
    }

    /// Control output for the current error sample.
    pub fn update(&mut self, error: T) -> T {
        let g = &self.gains;
        let prev = self.prev_error.unwrap_or(error);
        let candidate = self.integral + g.ki * self.dt * T::lit(0.5) * (error + prev);
        let derivative = g.kd * (error - prev) / self.dt;
        let raw = g.kp * error + candidate + derivative;
        let out = raw.max(-g.saturation).min(g.saturation);
        // keep integrating only when unsaturated or when it pulls out of saturation
        if raw == out || (raw > out) != (error > T::zero()) {
            self.integral = candidate;
        }
        self.prev_error = Some(error);
        out
    }
}

/// Restoring law of the suspension, measured about the equilibrium gap.
#[derive(Debug, Clone, PartialEq)]
pub enum SpringPlant<T> {
    Linear { stiffness: T },
    Magnetic(MagneticSpringModel<T>),
}

impl<T: Scalar> SpringPlant<T> {
    /// Linear plant with the magnet's local stiffness at `gap`.
    pub fn matched_linear(model: &MagneticSpringModel<T>, gap: T) -> Result<Self> {
        Ok(Self::Linear { stiffness: model.stiffness(gap)? })
    }

    /// Net spring force on the mass at `gap`, zero at `gap_eq`.
    fn force(&self, gap: T, gap_eq: T, preload: T) -> Result<T> {
        match self {
            Self::Linear { stiffness } => Ok(-*stiffness * (gap - gap_eq)),
            Self::Magnetic(m) => Ok(m.force(gap)? - preload),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid<T> {
    /// m
    pub amp: T,
    /// Hz
    pub freq: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingSetup<T> {
    /// kg
    pub mass: T,
    /// Viscous damping of the suspension, N·s/m.
    pub damping: T,
    /// Equilibrium gap, m; the reference oscillates around it.
    pub gap_eq: T,
    pub reference: Sinusoid<T>,
}

impl<T: Scalar> Default for TrackingSetup<T> {
    fn default() -> Self {
        Self {
            mass: T::lit(0.05),
            damping: T::lit(0.5),
            gap_eq: T::lit(0.01),
            reference: Sinusoid { amp: T::lit(0.004), freq: T::lit(2.0) },
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrackingReport<T> {
    /// RMS of `reference − gap` over the second half of the run, m.
    pub rms_error: T,
    /// Channels `gap`, `reference`, `error`, `u`.
    pub trace: TimeSeries<T>,
}

/// Closed-loop tracking of a sinusoidal gap reference.
///
/// The mass obeys `m·ẍ = F_spring(x) − c·ẋ + u`, with the PID output `u`
/// updated once per integrator step and held over it.
pub fn pid_tracking_experiment<T: Scalar>(
    plant: &SpringPlant<T>,
    setup: &TrackingSetup<T>,
    gains: &PidGains<T>,
    icfg: &IntegratorConfig<T>,
) -> Result<TrackingReport<T>> {
    gains.validate()?;
    icfg.validate()?;
    if !(setup.mass > T::zero()) || setup.damping < T::zero() || setup.reference.freq < T::zero() {
        return Err(Error::InvalidConfig(format!("invalid tracking setup {setup:?}")));
    }
    let preload = match plant {
        SpringPlant::Magnetic(m) => m.force(setup.gap_eq)?,
        SpringPlant::Linear { .. } => T::zero(),
    };
    let reference = |t: T| setup.gap_eq + setup.reference.amp * (T::two_pi() * setup.reference.freq * t).sin();

    let dt = icfg.dt;
    let n = icfg.n_steps();
    let mut pid = Pid::new(*gains, dt);
    let mut trace = TimeSeries::empty(T::zero(), icfg.sample_dt(), &["gap", "reference", "error", "u"])?;
    let mut stepper = Rk4::new(2);
    let mut y = vec![setup.gap_eq, T::zero()];
    let mut sq_sum = T::zero();
    let mut sq_count = 0usize;
    let mut spring_err: Option<Error> = None;

    for k in 0..=n {
        let t = dt * T::from_usize_lossy(k);
        let target = reference(t);
        let error = target - y[0];
        let u = pid.update(error);
        if 2 * k >= n {
            sq_sum = sq_sum + error * error;
            sq_count += 1;
        }
        if k % icfg.record_stride == 0 {
            trace.push_row(&[y[0], target, error, u]).map_err(|e| with_step(e, k))?;
        }
        if k == n {
            break;
        }
        let mut rhs = |_: T, s: &[T], ds: &mut [T]| {
            let spring = plant.force(s[0], setup.gap_eq, preload).unwrap_or_else(|e| {
                spring_err.get_or_insert(e);
                T::nan()
            });
            ds[0] = s[1];
            ds[1] = (spring - setup.damping * s[1] + u) / setup.mass;
        };
        let stepped = stepper.step(&mut rhs, t, &mut y, dt);
        if spring_err.take().is_some() {
            // gap left the magnet model's range: the magnets collided
            return Err(Error::Divergence {
                step: k + 1,
                t: (t + dt).as_f64(),
                state: vec![y[0].as_f64(), y[1].as_f64()],
            });
        }
        stepped.map_err(|e| with_step(e, k + 1))?;
        ensure_finite(k + 1, t + dt, &y)?;
    }

    Ok(TrackingReport { rms_error: (sq_sum / T::from_usize_lossy(sq_count)).sqrt(), trace })
}
