//! Fixed-step Runge-Kutta integration and uniformly sampled traces.
//!
//! Every experiment in the crate is a pure function of its configuration:
//! the integrator never adapts its step and never touches shared state, so two
//! runs with identical inputs produce bit-identical samples.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniformly sampled multi-channel signal.
///
/// Samples are stored row-major: one row per time step, one column per
/// channel. All samples are finite and there is always at least one row.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    t0: T,
    dt: T,
    channels: Vec<String>,
    data: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    /// Builds a series from explicit rows.
    pub fn from_rows<S: AsRef<str>>(t0: T, dt: T, channels: &[S], rows: &[Vec<T>]) -> Result<Self> {
        let mut ts = Self::empty(t0, dt, channels)?;
        if rows.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        for row in rows {
            ts.push_row(row)?;
        }
        Ok(ts)
    }

    pub(crate) fn empty<S: AsRef<str>>(t0: T, dt: T, channels: &[S]) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!("sample interval must be positive, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidConfig("start time must be finite".into()));
        }
        if channels.is_empty() {
            return Err(Error::InvalidConfig("a series needs at least one channel".into()));
        }
        let names: Vec<String> = channels.iter().map(|c| c.as_ref().to_string()).collect();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidConfig(format!("duplicate channel name `{name}`")));
            }
        }
        Ok(Self { t0, dt, channels: names, data: Vec::new() })
    }

    pub(crate) fn push_row(&mut self, row: &[T]) -> Result<()> {
        if row.len() != self.channels.len() {
            return Err(Error::InvalidConfig(format!(
                "row has {} values, series has {} channels",
                row.len(),
                self.channels.len()
            )));
        }
        if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                step: self.len(),
                t: self.time(self.len()).as_f64(),
                state: vec![row[bad].as_f64()],
            });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    /// Interval between consecutive rows.
    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Number of rows (time samples).
    pub fn len(&self) -> usize {
        self.data.len() / self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Time stamp of row `i`.
    pub fn time(&self, i: usize) -> T {
        self.t0 + self.dt * T::from_usize_lossy(i)
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        let w = self.channels.len();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.channels.len())
    }

    /// Row-major sample matrix.
    pub fn samples(&self) -> &[T] {
        &self.data
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channels.iter().position(|c| c == name).ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<T>> {
        let j = self.channel_index(name)?;
        Ok(self.rows().map(|r| r[j]).collect())
    }

    /// Rows whose time stamp lies in `[t_lo, t_hi)`.
    pub fn window(&self, t_lo: T, t_hi: T) -> Result<Self> {
        let mut out = Self::empty(T::zero(), self.dt, &self.channels)?;
        let mut first = None;
        for i in 0..self.len() {
            let t = self.time(i);
            if t >= t_lo && t < t_hi {
                first.get_or_insert(i);
                out.data.extend_from_slice(self.row(i));
            }
        }
        match first {
            Some(i) => {
                out.t0 = self.time(i);
                Ok(out)
            }
            None => Err(Error::TooShort { len: 0, min: 1 }),
        }
    }
}

/// Step size, horizon and recording stride of a fixed-step run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub dt: T,
    pub t_end: T,
    /// Record every `record_stride`-th step.
    pub record_stride: usize,
}

impl<T: Scalar> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self { dt: T::lit(1e-4), t_end: T::lit(10.0), record_stride: 10 }
    }
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn new(dt: T, t_end: T, record_stride: usize) -> Result<Self> {
        let cfg = Self { dt, t_end, record_stride };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.t_end.is_finite() || self.dt > self.t_end {
            return Err(Error::InvalidConfig(format!(
                "need 0 < dt <= t_end, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of integration steps covering `[0, t_end]`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap_or(0)
    }

    /// Interval between recorded rows.
    pub fn sample_dt(&self) -> T {
        self.dt * T::from_usize_lossy(self.record_stride)
    }

    pub fn with_t_end(self, t_end: T) -> Self {
        Self { t_end, ..self }
    }
}

/// Classical fourth-order Runge-Kutta stepper with reusable scratch buffers.
#[derive(Debug, Clone)]
pub struct Rk4<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Scalar> Rk4<T> {
    pub fn new(dim: usize) -> Self {
        let z = vec![T::zero(); dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// Advances `y` from `t` to `t + dt` in place.
    ///
    /// `rhs(t, y, dydt)` writes the vector field into `dydt`.
    pub fn step<F>(&mut self, rhs: &mut F, t: T, y: &mut [T], dt: T) -> Result<()>
    where
        F: FnMut(T, &[T], &mut [T]),
    {
        let n = y.len();
        debug_assert_eq!(n, self.k1.len());
        let half = T::lit(0.5) * dt;
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);

        rhs(t, y, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = y[i] + half * self.k1[i];
        }
        rhs(t + half, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = y[i] + half * self.k2[i];
        }
        rhs(t + half, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = y[i] + dt * self.k3[i];
        }
        rhs(t + dt, &self.tmp, &mut self.k4);
        for i in 0..n {
            y[i] = y[i] + sixth * (self.k1[i] + two * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
        ensure_finite(0, t + dt, y)
    }
}

pub(crate) fn ensure_finite<T: Scalar>(step: usize, t: T, y: &[T]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { step, t: t.as_f64(), state: y.iter().map(|v| v.as_f64()).collect() })
    }
}

/// Single RK4 step returning the new state.
pub fn step_rk4<T, F>(mut rhs: F, y: &[T], t: T, dt: T) -> Result<Vec<T>>
where
    T: Scalar,
    F: FnMut(T, &[T], &mut [T]),
{
    if !(dt > T::zero()) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    ensure_finite(0, t, y)?;
    let mut out = y.to_vec();
    Rk4::new(y.len()).step(&mut rhs, t, &mut out, dt)?;
    Ok(out)
}

/// Integrates from `t = 0` and records the raw state as channels `y0, y1, ...`.
pub fn integrate<T, F>(rhs: F, y0: &[T], cfg: &IntegratorConfig<T>) -> Result<TimeSeries<T>>
where
    T: Scalar,
    F: FnMut(T, &[T], &mut [T]),
{
    let names: Vec<String> = (0..y0.len()).map(|i| format!("y{i}")).collect();
    integrate_observed(rhs, y0, cfg, &names, |_, y, row| row.copy_from_slice(y))
}

/// Integrates from `t = 0`, recording `observe(t, y, row)` every `record_stride` steps.
///
/// The observer fills one row with as many values as there are `channels`.
pub fn integrate_observed<T, F, O, S>(
    mut rhs: F,
    y0: &[T],
    cfg: &IntegratorConfig<T>,
    channels: &[S],
    mut observe: O,
) -> Result<TimeSeries<T>>
where
    T: Scalar,
    F: FnMut(T, &[T], &mut [T]),
    O: FnMut(T, &[T], &mut [T]),
    S: AsRef<str>,
{
    cfg.validate()?;
    ensure_finite(0, T::zero(), y0)?;
    let mut ts = TimeSeries::empty(T::zero(), cfg.sample_dt(), channels)?;
    let n_steps = cfg.n_steps();
    ts.data.reserve((n_steps / cfg.record_stride + 1) * channels.len());

    let mut y = y0.to_vec();
    let mut row = vec![T::zero(); channels.len()];
    let mut stepper = Rk4::new(y.len());
    observe(T::zero(), &y, &mut row);
    ts.push_row(&row)?;
    for k in 0..n_steps {
        // time from the step index, not by accumulation
        let t = cfg.dt * T::from_usize_lossy(k);
        stepper.step(&mut rhs, t, &mut y, cfg.dt).map_err(|e| with_step(e, k + 1))?;
        if (k + 1) % cfg.record_stride == 0 {
            let t_next = cfg.dt * T::from_usize_lossy(k + 1);
            observe(t_next, &y, &mut row);
            ts.push_row(&row).map_err(|e| with_step(e, k + 1))?;
        }
    }
    Ok(ts)
}

pub(crate) fn with_step(e: Error, step: usize) -> Error {
    match e {
        Error::Divergence { t, state, .. } => Error::Divergence { step, t, state },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, TAU};

    fn harmonic(w: f64) -> impl FnMut(f64, &[f64], &mut [f64]) {
        move |_, y, d| {
            d[0] = y[1];
            d[1] = -w * w * y[0];
        }
    }

    #[test]
    fn zero_field_is_identity() {
        let y = step_rk4(|_, _, d: &mut [f64]| d.fill(0.0), &[3.5], 0.0, 0.1).unwrap();
        assert_eq!(y, vec![3.5]);
    }

    #[test]
    fn exponential_single_step() {
        let y = step_rk4(|_, y, d: &mut [f64]| d[0] = y[0], &[1.0], 0.0, 1e-3).unwrap();
        let exact = 1e-3f64.exp();
        assert!(((y[0] - exact) / exact).abs() < 1e-15);
    }

    #[test]
    fn harmonic_full_period() {
        let dt = 1e-3;
        let mut y = vec![1.0, 0.0];
        let mut rhs = harmonic(TAU);
        let mut rk = Rk4::new(2);
        for k in 0..1000 {
            rk.step(&mut rhs, k as f64 * dt, &mut y, dt).unwrap();
        }
        assert!((y[0] - 1.0).abs() < 1e-8 && y[1].abs() < 1e-8, "{y:?}");
    }

    #[test]
    fn constant_field_gives_constant_series() {
        let cfg = IntegratorConfig::new(0.01, 1.0, 3).unwrap();
        let ts = integrate(|_, _, d: &mut [f64]| d.fill(0.0), &[2.0], &cfg).unwrap();
        assert!(ts.column("y0").unwrap().iter().all(|&v| v == 2.0));
        assert_eq!(ts.len(), 100 / 3 + 1);
        assert!((ts.dt() - 0.03).abs() < 1e-15);
    }

    #[test]
    fn exponential_growth_to_e() {
        let cfg = IntegratorConfig::new(1e-3, 1.0, 1).unwrap();
        let ts = integrate(|_, y, d: &mut [f64]| d[0] = y[0], &[1.0], &cfg).unwrap();
        let last = ts.row(ts.len() - 1)[0];
        assert!((last - E).abs() < 1e-8, "{last}");
        assert!((ts.time(ts.len() - 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_amplitude_drift() {
        let cfg = IntegratorConfig::new(1e-3, 10.0, 1).unwrap();
        let ts = integrate(harmonic(TAU), &[1.0, 0.0], &cfg).unwrap();
        let drift = ts.rows().map(|r| ((r[0] * r[0] + (r[1] / TAU).powi(2)).sqrt() - 1.0).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-6, "{drift}");
    }

    #[test]
    fn divergence_reports_step() {
        let cfg = IntegratorConfig::new(0.1, 100.0, 1).unwrap();
        let err = integrate(|_, y, d: &mut [f64]| d[0] = y[0] * y[0], &[1.0], &cfg).unwrap_err();
        match err {
            Error::Divergence { step, t, .. } => {
                assert!(step > 0);
                assert!((t - step as f64 * 0.1).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(IntegratorConfig::new(0.0, 1.0, 1).is_err());
        assert!(IntegratorConfig::new(2.0, 1.0, 1).is_err());
        assert!(IntegratorConfig::new(0.1, 1.0, 0).is_err());
        assert!(step_rk4(|_, _, d: &mut [f64]| d.fill(0.0), &[f64::NAN], 0.0, 0.1).is_err());
    }

    #[test]
    fn rejects_duplicate_channels() {
        assert!(TimeSeries::<f64>::from_rows(0.0, 1.0, &["a", "a"], &[vec![0.0, 0.0]]).is_err());
        assert!(TimeSeries::<f64>::from_rows(0.0, 1.0, &["a"], &[]).is_err());
        assert!(TimeSeries::<f64>::from_rows(0.0, 1.0, &["a"], &[vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn window_selects_rows() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let ts = TimeSeries::from_rows(0.0, 0.5, &["a"], &rows).unwrap();
        let w = ts.window(1.0, 2.5).unwrap();
        assert_eq!(w.column("a").unwrap(), vec![2.0, 3.0, 4.0]);
        assert_eq!(w.t0(), 1.0);
    }

    #[test]
    fn works_in_single_precision() {
        let y = step_rk4(|_, y, d: &mut [f32]| d[0] = y[0], &[1.0f32], 0.0, 1e-2).unwrap();
        assert!((y[0] - 1e-2f32.exp()).abs() < 1e-6);
    }
}
