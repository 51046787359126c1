//! Adaptive Hopf frequency oscillator driving a forced oscillator with cubic
//! stiffness.
//!
//! The oscillator state `(x, y, ω)` follows
//!
//! ```text
//! ẋ = (μ − x² − y²)·x − ω·y + ε·u
//! ẏ = (μ − x² − y²)·y + ω·x
//! ω̇ = −ε·u·y / √(x² + y²)
//! ```
//!
//! where `u` is the input signal. The plant is
//! `ẍ + d·ẋ + (2πf₀)²·x + a₃·x³ = forcing`. In the closed loop the plant is
//! forced with `A·cos φ`, `φ = atan2(y, x)`, and the oscillator listens to the
//! plant position.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sim::{integrate_observed, IntegratorConfig, TimeSeries};

/// Below this radius the oscillator phase is undefined.
pub const MIN_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfoState<T> {
    pub x: T,
    pub y: T,
    /// rad/s
    pub omega: T,
}

impl<T: Scalar> AfoState<T> {
    /// On the limit cycle at phase zero.
    pub fn on_cycle(p: &AfoParams<T>) -> Self {
        Self { x: p.mu.sqrt(), y: T::zero(), omega: p.omega_init }
    }

    pub fn radius(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn phase(&self) -> T {
        self.y.atan2(self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfoParams<T> {
    /// Squared limit-cycle radius.
    pub mu: T,
    /// Coupling strength.
    pub eps: T,
    /// rad/s
    pub omega_init: T,
}

impl<T: Scalar> Default for AfoParams<T> {
    fn default() -> Self {
        Self { mu: T::one(), eps: T::lit(300.0), omega_init: T::lit(0.9) * T::two_pi() * T::lit(3.0) }
    }
}

impl<T: Scalar> AfoParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.mu > T::zero() && self.eps >= T::zero() && self.omega_init > T::zero() && self.eps.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("oscillator needs mu > 0, eps >= 0, omega_init > 0: {self:?}")))
        }
    }
}

/// Forced damped oscillator with cubic stiffness, per unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingParams<T> {
    /// Damping, 1/s.
    pub damping: T,
    /// Linear natural frequency, Hz.
    pub f0: T,
    /// Cubic stiffness, 1/(m²·s²). Zero gives the linear plant.
    pub a3: T,
    /// Forcing amplitude, m/s².
    pub forcing: T,
}

impl<T: Scalar> Default for DuffingParams<T> {
    fn default() -> Self {
        Self { damping: T::lit(0.5), f0: T::lit(3.0), a3: T::lit(1.2e4), forcing: T::one() }
    }
}

impl<T: Scalar> DuffingParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.damping >= T::zero() && self.f0 > T::zero() && self.a3 >= T::zero() && self.forcing >= T::zero() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid plant parameters {self:?}")))
        }
    }

    pub fn linear(self) -> Self {
        Self { a3: T::zero(), ..self }
    }

    /// `(2πf₀)²`
    pub fn omega0_sq(&self) -> T {
        let w = T::two_pi() * self.f0;
        w * w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantState<T> {
    /// m
    pub x: T,
    /// m/s
    pub v: T,
}

/// Time derivatives of the oscillator state for input `input`.
pub fn afo_derivatives<T: Scalar>(s: &AfoState<T>, input: T, p: &AfoParams<T>) -> Result<AfoState<T>> {
    let r2 = s.x * s.x + s.y * s.y;
    let r = r2.sqrt();
    if !(r > T::lit(MIN_RADIUS)) {
        return Err(Error::DegenerateRadius { radius: r.as_f64() });
    }
    let growth = p.mu - r2;
    Ok(AfoState {
        x: growth * s.x - s.omega * s.y + p.eps * input,
        y: growth * s.y + s.omega * s.x,
        omega: -p.eps * input * s.y / r,
    })
}

/// `(ẋ, v̇)` of the plant under `forcing`.
pub fn duffing_derivatives<T: Scalar>(s: &PlantState<T>, forcing: T, p: &DuffingParams<T>) -> PlantState<T> {
    PlantState { x: s.v, v: -p.damping * s.v - p.omega0_sq() * s.x - p.a3 * s.x * s.x * s.x + forcing }
}

/// `½v² + ½(2πf₀)²x² + ¼a₃x⁴`, J/kg.
pub fn mechanical_energy<T: Scalar>(s: &PlantState<T>, p: &DuffingParams<T>) -> T {
    let half = T::lit(0.5);
    let x2 = s.x * s.x;
    half * s.v * s.v + half * p.omega0_sq() * x2 + T::lit(0.25) * p.a3 * x2 * x2
}

/// Channel names of coupled and reference traces.
pub const TRACE_CHANNELS: [&str; 5] = ["x", "v", "omega", "phi", "E"];

/// Integrates oscillator and plant together.
///
/// State order: oscillator `x, y, ω`, plant `x, v`. The trace holds the plant
/// position and velocity, the oscillator frequency and phase, and the plant
/// energy.
pub fn run_coupled_loop<T: Scalar>(
    ap: &AfoParams<T>,
    dp: &DuffingParams<T>,
    plant0: &PlantState<T>,
    icfg: &IntegratorConfig<T>,
) -> Result<TimeSeries<T>> {
    ap.validate()?;
    dp.validate()?;
    let osc0 = AfoState::on_cycle(ap);
    let y0 = [osc0.x, osc0.y, osc0.omega, plant0.x, plant0.v];
    let rhs = |_: T, s: &[T], ds: &mut [T]| {
        let osc = AfoState { x: s[0], y: s[1], omega: s[2] };
        let plant = PlantState { x: s[3], v: s[4] };
        match afo_derivatives(&osc, plant.x, ap) {
            Ok(d) => {
                let forcing = dp.forcing * osc.x / osc.radius();
                let dpl = duffing_derivatives(&plant, forcing, dp);
                ds.copy_from_slice(&[d.x, d.y, d.omega, dpl.x, dpl.v]);
            }
            // surfaces as a divergence at this step
            Err(_) => ds.fill(T::nan()),
        }
    };
    integrate_observed(rhs, &y0, icfg, &TRACE_CHANNELS, |_, s, row| {
        let plant = PlantState { x: s[3], v: s[4] };
        row.copy_from_slice(&[s[3], s[4], s[2], s[1].atan2(s[0]), mechanical_energy(&plant, dp)]);
    })
}

/// Plant forced with `A·cos(2π·f_drive·t)`, no oscillator in the loop.
pub fn run_forced_reference<T: Scalar>(
    dp: &DuffingParams<T>,
    f_drive: T,
    plant0: &PlantState<T>,
    icfg: &IntegratorConfig<T>,
) -> Result<TimeSeries<T>> {
    dp.validate()?;
    if !(f_drive > T::zero()) {
        return Err(Error::InvalidConfig(format!("drive frequency must be positive, got {f_drive}")));
    }
    let w = T::two_pi() * f_drive;
    let rhs = |t: T, s: &[T], ds: &mut [T]| {
        let d = duffing_derivatives(&PlantState { x: s[0], v: s[1] }, dp.forcing * (w * t).cos(), dp);
        ds[0] = d.x;
        ds[1] = d.v;
    };
    integrate_observed(rhs, &[plant0.x, plant0.v], icfg, &TRACE_CHANNELS, |t, s, row| {
        let phase = w * t;
        let plant = PlantState { x: s[0], v: s[1] };
        row.copy_from_slice(&[s[0], s[1], w, phase.sin().atan2(phase.cos()), mechanical_energy(&plant, dp)]);
    })
}

/// Oscillator alone, started from `s0` and listening to an external signal.
/// Channels `x, y, omega`.
pub fn run_afo_open_loop<T, U>(
    ap: &AfoParams<T>,
    s0: &AfoState<T>,
    input: U,
    icfg: &IntegratorConfig<T>,
) -> Result<TimeSeries<T>>
where
    T: Scalar,
    U: Fn(T) -> T,
{
    ap.validate()?;
    let rhs = |t: T, s: &[T], ds: &mut [T]| match afo_derivatives(
        &AfoState { x: s[0], y: s[1], omega: s[2] },
        input(t),
        ap,
    ) {
        Ok(d) => ds.copy_from_slice(&[d.x, d.y, d.omega]),
        Err(_) => ds.fill(T::nan()),
    };
    integrate_observed(rhs, &[s0.x, s0.y, s0.omega], icfg, &["x", "y", "omega"], |_, s, row| row.copy_from_slice(s))
}

/// Oscillator listening to the free (unforced) plant released from `plant0`.
/// Returns the trace with channels `x, y, omega, plant_x`.
pub fn run_listening<T: Scalar>(
    ap: &AfoParams<T>,
    dp: &DuffingParams<T>,
    plant0: &PlantState<T>,
    icfg: &IntegratorConfig<T>,
) -> Result<TimeSeries<T>> {
    ap.validate()?;
    dp.validate()?;
    let s0 = AfoState::on_cycle(ap);
    let rhs = |_: T, s: &[T], ds: &mut [T]| {
        let plant = PlantState { x: s[3], v: s[4] };
        match afo_derivatives(&AfoState { x: s[0], y: s[1], omega: s[2] }, plant.x, ap) {
            Ok(d) => {
                let dpl = duffing_derivatives(&plant, T::zero(), dp);
                ds.copy_from_slice(&[d.x, d.y, d.omega, dpl.x, dpl.v]);
            }
            Err(_) => ds.fill(T::nan()),
        }
    };
    let y0 = [s0.x, s0.y, s0.omega, plant0.x, plant0.v];
    integrate_observed(rhs, &y0, icfg, &["x", "y", "omega", "plant_x"], |_, s, row| {
        row.copy_from_slice(&s[..4]);
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinCell<T> {
    pub omega_init: T,
    pub converged: bool,
    /// `None` when the run diverged.
    pub omega_final: Option<T>,
    pub error: Option<Error>,
}

/// Entrainment map over initial oscillator frequencies.
///
/// Each cell releases the plant from `plant0` and lets the oscillator listen
/// to its free oscillation; a cell converges when the final frequency is
/// within relative `tol` of `2πf₀`. Cells run in parallel and are returned
/// in grid order.
pub fn basin_sweep<T: Scalar>(
    grid: &[T],
    ap: &AfoParams<T>,
    dp: &DuffingParams<T>,
    plant0: &PlantState<T>,
    icfg: &IntegratorConfig<T>,
    tol: T,
) -> Result<Vec<BasinCell<T>>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("basin grid is empty".into()));
    }
    dp.validate()?;
    icfg.validate()?;
    let target = T::two_pi() * dp.f0;
    Ok(grid
        .par_iter()
        .map(|&omega_init| {
            let p = AfoParams { omega_init, ..*ap };
            match run_listening(&p, dp, plant0, icfg).and_then(|ts| ts.column("omega")) {
                Ok(omega) => {
                    let last = omega[omega.len() - 1];
                    BasinCell {
                        omega_init,
                        converged: ((last - target) / target).abs() < tol,
                        omega_final: Some(last),
                        error: None,
                    }
                }
                Err(e) => BasinCell { omega_init, converged: false, omega_final: None, error: Some(e) },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn uncoupled_frequency_is_frozen() {
        let p = AfoParams { mu: 1.0, eps: 0.0, omega_init: 5.0 };
        let d = afo_derivatives(&AfoState { x: 0.3, y: -0.2, omega: 5.0 }, 7.0, &p).unwrap();
        assert_eq!(d.omega, 0.0);
    }

    #[test]
    fn radius_invariant_on_cycle() {
        let p = AfoParams { mu: 2.0, eps: 3.0, omega_init: 5.0 };
        let (x, y) = (2f64.sqrt() * 0.6, 2f64.sqrt() * 0.8);
        let d = afo_derivatives(&AfoState { x, y, omega: 5.0 }, 0.0, &p).unwrap();
        let dr2 = 2.0 * (x * d.x + y * d.y);
        assert!(dr2.abs() < 1e-12, "{dr2}");
    }

    #[test]
    fn degenerate_radius_rejected() {
        let p = AfoParams::<f64>::default();
        let r = afo_derivatives(&AfoState { x: 0.0, y: 0.0, omega: 1.0 }, 1.0, &p);
        assert!(matches!(r, Err(Error::DegenerateRadius { .. })));
    }

    #[test]
    fn uncoupled_approaches_limit_cycle() {
        let p = AfoParams::<f64> { mu: 4.0, eps: 0.0, omega_init: 10.0 };
        let icfg = IntegratorConfig::new(1e-3, 10.0, 10).unwrap();
        let s0 = AfoState { x: 0.1, y: 0.0, omega: 10.0 };
        let ts = run_afo_open_loop(&p, &s0, |_| 0.0, &icfg).unwrap();
        let last = ts.row(ts.len() - 1);
        assert!(((last[0].hypot(last[1])) - 2.0).abs() < 1e-6);
        assert!(ts.column("omega").unwrap().iter().all(|&w| w == 10.0));
    }

    #[test]
    fn duffing_values() {
        let p = DuffingParams::<f64>::default();
        assert_eq!(duffing_derivatives(&PlantState::default(), 0.0, &p), PlantState { x: 0.0, v: 0.0 });
        let d = duffing_derivatives(&PlantState { x: 0.01, v: 0.0 }, 0.0, &p);
        let expected = -(TAU * 3.0).powi(2) * 0.01 - 1.2e4 * 1e-6;
        assert!((d.v - expected).abs() < 1e-12);
        assert!((d.v + 3.56506).abs() < 1e-5);
    }

    #[test]
    fn energy_values() {
        let p = DuffingParams { a3: 0.0, ..DuffingParams::<f64>::default() };
        assert_eq!(mechanical_energy(&PlantState::default(), &p), 0.0);
        let e = mechanical_energy(&PlantState { x: 1.0, v: 0.0 }, &p);
        assert!((e - 0.5 * (6.0 * std::f64::consts::PI).powi(2)).abs() < 1e-9);
        assert!((e - 177.65).abs() < 0.01);
    }

    #[test]
    fn unforced_energy_never_increases() {
        let dp = DuffingParams { forcing: 0.0, ..DuffingParams::<f64>::default() };
        let icfg = IntegratorConfig::new(1e-4, 5.0, 10).unwrap();
        let ts = run_forced_reference(&dp, 3.0, &PlantState { x: 0.2, v: 0.0 }, &icfg).unwrap();
        let e = ts.column("E").unwrap();
        assert!(e.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        assert!(e[e.len() - 1] < 0.2 * e[0]);
    }

    #[test]
    fn zero_forcing_decays_to_rest() {
        let dp = DuffingParams { forcing: 0.0, a3: 0.0, ..DuffingParams::<f64>::default() };
        let icfg = IntegratorConfig::new(1e-4, 40.0, 100).unwrap();
        let ts = run_forced_reference(&dp, 3.0, &PlantState { x: 0.1, v: 0.0 }, &icfg).unwrap();
        let x = ts.column("x").unwrap();
        assert!(x[x.len() - 1].abs() < 1e-5);
    }

    #[test]
    fn ill_posed_inputs_rejected() {
        let icfg = IntegratorConfig::new(1e-3, 1.0, 1).unwrap();
        let dp = DuffingParams::<f64>::default();
        assert!(run_forced_reference(&dp, 0.0, &PlantState::default(), &icfg).is_err());
        assert!(basin_sweep(&[], &AfoParams::default(), &dp, &PlantState::default(), &icfg, 0.02).is_err());
        let bad = AfoParams { mu: 0.0, ..AfoParams::<f64>::default() };
        assert!(run_coupled_loop(&bad, &dp, &PlantState::default(), &icfg).is_err());
    }
}
