//! Tunable rotary joint: a linear spring stretched between an inner
//! attachment at radius `r` and an outer anchor at distance `d` from the axis.
//! Pretensioning the spring sets the joint's small-angle stiffness.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sim::{integrate_observed, IntegratorConfig, TimeSeries};

/// Construction geometry of the joint, in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointGeometry<T> {
    /// Inner attachment radius.
    pub r: T,
    /// Outer attachment distance.
    pub d: T,
}

impl<T: Scalar> JointGeometry<T> {
    pub fn new(r: T, d: T) -> Result<Self> {
        let g = Self { r, d };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r > T::zero() && self.d > self.r && self.d.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("joint geometry needs d > r > 0, got r = {}, d = {}", self.r, self.d)))
        }
    }
}

impl<T: Scalar> Default for JointGeometry<T> {
    fn default() -> Self {
        Self { r: T::lit(0.01), d: T::lit(0.03) }
    }
}

/// Linear spring stiffness `K` (N/m) and pretension `F` (N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringConfig<T> {
    pub stiffness: T,
    pub pretension: T,
}

impl<T: Scalar> SpringConfig<T> {
    pub fn new(stiffness: T, pretension: T) -> Result<Self> {
        let s = Self { stiffness, pretension };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stiffness >= T::zero()
            && self.pretension >= T::zero()
            && self.stiffness.is_finite()
            && self.pretension.is_finite()
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "spring needs K >= 0 and F >= 0, got K = {}, F = {}",
                self.stiffness, self.pretension
            )))
        }
    }
}

impl<T: Scalar> Default for SpringConfig<T> {
    fn default() -> Self {
        Self { stiffness: T::lit(200.0), pretension: T::one() }
    }
}

/// Restoring torque (N·m) of the joint deflected by `theta` radians.
///
/// The spring length is `L(θ) = sqrt(r² + d² − 2dr·cos θ)` and its rest
/// length is `d − r`, so the spring force is `K·(L − (d − r)) + F`; the
/// lever arm of that force about the axis is `d·r·sin θ / L`.
pub fn joint_torque<T: Scalar>(g: &JointGeometry<T>, s: &SpringConfig<T>, theta: T) -> T {
    let (r, d) = (g.r, g.d);
    let len = (r * r + d * d - T::lit(2.0) * theta.cos() * d * r).sqrt();
    ((len + r - d) * s.stiffness + s.pretension) / len * d * r * theta.sin()
}

/// Taylor coefficients of the torque law about the rest angle:
/// `τ(θ) = c1·θ + c3·θ³ + O(θ⁵)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCoeffs<T> {
    /// N·m/rad
    pub c1: T,
    /// N·m/rad³
    pub c3: T,
}

impl<T: Scalar> SeriesCoeffs<T> {
    pub fn eval(&self, theta: T) -> T {
        theta * (self.c1 + self.c3 * theta * theta)
    }
}

/// Step of the finite-difference expansion, in radians.
pub const SERIES_STEP: f64 = 1e-4;

/// Cubic expansion of [`joint_torque`] from Richardson-extrapolated secant slopes.
///
/// The torque is odd, so `g(h) = τ(h)/h = c1 + c3·h² + c5·h⁴ + …`. The
/// quadratic in `h²` through `g(h), g(2h), g(3h)` is evaluated (and
/// differentiated) at `h² = 0`.
pub fn joint_torque_series_coeffs<T: Scalar>(g: &JointGeometry<T>, s: &SpringConfig<T>) -> SeriesCoeffs<T> {
    let h = T::lit(SERIES_STEP);
    let u = h * h;
    let slope = |k: f64| {
        let theta = h * T::lit(k);
        joint_torque(g, s, theta) / theta
    };
    let (g1, g2, g3) = (slope(1.0), slope(2.0), slope(3.0));
    // Newton divided differences on nodes u, 4u, 9u
    let f12 = (g2 - g1) / (T::lit(3.0) * u);
    let f23 = (g3 - g2) / (T::lit(5.0) * u);
    let f123 = (f23 - f12) / (T::lit(8.0) * u);
    let c1 = g1 - f12 * u + f123 * u * (T::lit(4.0) * u);
    let c3 = f12 - f123 * (T::lit(5.0) * u);
    SeriesCoeffs { c1, c3 }
}

/// Small-angle stiffness `F·d·r/(d − r)`; independent of `K`.
pub fn linear_stiffness<T: Scalar>(g: &JointGeometry<T>, s: &SpringConfig<T>) -> T {
    s.pretension * g.d * g.r / (g.d - g.r)
}

/// Pretension as a function of time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PretensionSchedule<T> {
    Constant(T),
    /// `before` until `t_step`, `after` from then on.
    Step {
        before: T,
        after: T,
        t_step: T,
    },
    /// `mean + amplitude·sin(2π·freq·t)`, clipped at zero.
    Sine {
        mean: T,
        amplitude: T,
        freq: T,
    },
}

impl<T: Scalar> PretensionSchedule<T> {
    pub fn at(&self, t: T) -> T {
        match *self {
            Self::Constant(f) => f,
            Self::Step { before, after, t_step } => {
                if t < t_step {
                    before
                } else {
                    after
                }
            }
            Self::Sine { mean, amplitude, freq } => (mean + amplitude * (T::two_pi() * freq * t).sin()).max(T::zero()),
        }
    }

    fn validate(&self, t_end: T) -> Result<()> {
        let ok = match *self {
            Self::Constant(f) => f >= T::zero(),
            Self::Step { before, after, t_step } => {
                before >= T::zero() && after >= T::zero() && t_step > T::zero() && t_step < t_end
            }
            Self::Sine { mean, amplitude, freq } => mean >= T::zero() && amplitude >= T::zero() && freq > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid pretension schedule {self:?}")))
        }
    }
}

/// Rotor parameters for the free-oscillation experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOscillatorConfig<T> {
    /// kg·m²
    pub inertia: T,
    /// N·m·s/rad
    pub damping: T,
    /// rad
    pub theta0: T,
}

impl<T: Scalar> Default for JointOscillatorConfig<T> {
    fn default() -> Self {
        Self { inertia: T::lit(1e-4), damping: T::lit(1e-5), theta0: T::lit(0.05) }
    }
}

impl<T: Scalar> JointOscillatorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.inertia > T::zero() && self.damping >= T::zero() && self.theta0.abs() < T::PI() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid joint oscillator config {self:?}")))
        }
    }
}

/// Default pretension step: 0.1 N before, 2 N after `t = 5 s`.
pub fn default_step_schedule<T: Scalar>() -> PretensionSchedule<T> {
    PretensionSchedule::Step { before: T::lit(0.1), after: T::lit(2.0), t_step: T::lit(5.0) }
}

/// Integrates `J·θ̈ = −b·θ̇ − τ(θ; F(t))` from rest at `theta0`.
///
/// Channels: `theta`, `theta_dot`, `F`.
pub fn simulate_joint_oscillator<T: Scalar>(
    g: &JointGeometry<T>,
    stiffness: T,
    schedule: &PretensionSchedule<T>,
    cfg: &JointOscillatorConfig<T>,
    icfg: &IntegratorConfig<T>,
) -> Result<TimeSeries<T>> {
    g.validate()?;
    cfg.validate()?;
    icfg.validate()?;
    schedule.validate(icfg.t_end)?;
    SpringConfig::new(stiffness, T::zero())?;

    let spring_at = |t: T| SpringConfig { stiffness, pretension: schedule.at(t) };
    let rhs = |t: T, y: &[T], dy: &mut [T]| {
        dy[0] = y[1];
        dy[1] = (-cfg.damping * y[1] - joint_torque(g, &spring_at(t), y[0])) / cfg.inertia;
    };
    integrate_observed(rhs, &[cfg.theta0, T::zero()], icfg, &["theta", "theta_dot", "F"], |t, y, row| {
        row[0] = y[0];
        row[1] = y[1];
        row[2] = schedule.at(t);
    })
}
