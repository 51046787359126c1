//! Spectra, dominant frequencies, oscillation envelopes and harmonic content.

use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sim::TimeSeries;

/// Minimum series length accepted by [`spectrum`].
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Rectangular.
    None,
    Hann,
}

/// Single-sided amplitude spectrum on a uniform grid from 0 Hz to Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub freqs: Vec<T>,
    pub mags: Vec<T>,
    /// Length of the analysed signal before zero padding.
    pub n_samples: usize,
    /// Transform length (next power of two).
    pub n_fft: usize,
    pub window: Window,
}

impl<T: Scalar> Spectrum<T> {
    pub fn bin_width(&self) -> T {
        self.freqs[1] - self.freqs[0]
    }

    pub fn nyquist(&self) -> T {
        self.freqs[self.freqs.len() - 1]
    }

    /// Signal variance implied by the spectrum (Parseval), exact for the
    /// rectangular window.
    pub fn variance(&self) -> T {
        let last = self.mags.len() - 1;
        let half = T::lit(0.5);
        let sum = self.mags.iter().enumerate().fold(T::zero(), |acc, (k, &a)| {
            // DC and Nyquist bins are stored single-sided
            let w = if k == 0 || k == last { T::one() } else { half };
            acc + w * a * a
        });
        sum * T::from_usize_lossy(self.n_samples) / T::from_usize_lossy(self.n_fft)
    }
}

/// Amplitude spectrum of `channel`, mean removed, zero padded to a power of two.
///
/// Magnitudes are normalised by the window's coherent gain so a sinusoid of
/// amplitude `a` on a bin reads `a`.
pub fn spectrum<T: Scalar + FftNum>(ts: &TimeSeries<T>, channel: &str, window: Window) -> Result<Spectrum<T>> {
    let x = ts.column(channel)?;
    spectrum_of(&x, ts.dt(), window)
}

/// [`spectrum`] of a raw sample vector with sample interval `dt`.
pub fn spectrum_of<T: Scalar + FftNum>(x: &[T], dt: T, window: Window) -> Result<Spectrum<T>> {
    let n = x.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooShort { len: n, min: MIN_SAMPLES });
    }
    let mean = x.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(n);
    let weights: Vec<T> = match window {
        Window::None => vec![T::one(); n],
        // periodic Hann
        Window::Hann => (0..n)
            .map(|i| {
                let ph = T::two_pi() * T::from_usize_lossy(i) / T::from_usize_lossy(n);
                T::lit(0.5) * (T::one() - ph.cos())
            })
            .collect(),
    };
    let gain = weights.iter().fold(T::zero(), |a, &w| a + w);

    let n_fft = n.next_power_of_two();
    let mut buf: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n_fft];
    for (i, (&v, &w)) in x.iter().zip(&weights).enumerate() {
        buf[i] = Complex::new((v - mean) * w, T::zero());
    }
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    let n_half = n_fft / 2;
    let df = T::one() / (dt * T::from_usize_lossy(n_fft));
    let two = T::lit(2.0);
    let freqs = (0..=n_half).map(|k| df * T::from_usize_lossy(k)).collect();
    let mags = (0..=n_half)
        .map(|k| {
            let a = buf[k].norm() / gain;
            if k == 0 || k == n_half {
                a
            } else {
                two * a
            }
        })
        .collect();
    Ok(Spectrum { freqs, mags, n_samples: n, n_fft, window })
}

/// Vertex of the parabola through three log-magnitudes, as a bin offset in
/// `[-0.5, 0.5]` and the peak magnitude.
fn parabolic_peak<T: Scalar>(m0: T, m1: T, m2: T) -> (T, T) {
    let tiny = T::min_positive_value();
    let (a, b, c) = (m0.max(tiny).ln(), m1.max(tiny).ln(), m2.max(tiny).ln());
    let denom = a - T::lit(2.0) * b + c;
    if denom.abs() <= T::epsilon() * b.abs().max(T::one()) {
        return (T::zero(), m1);
    }
    let off = (T::lit(0.5) * (a - c) / denom).max(T::lit(-0.5)).min(T::lit(0.5));
    let peak = b - T::lit(0.25) * (a - c) * off;
    (off, peak.exp())
}

/// Frequency of the largest peak with `f_lo <= f <= f_hi`, refined by
/// parabolic interpolation of the log-magnitude around the maximum bin.
pub fn dominant_frequency<T: Scalar>(sp: &Spectrum<T>, band: (T, T)) -> Result<T> {
    let (lo, hi) = band;
    let best = sp.freqs.iter().zip(&sp.mags).enumerate().filter(|(_, (f, _))| **f >= lo && **f <= hi).fold(
        None,
        |best: Option<(usize, T)>, (k, (_, &m))| match best {
            Some((_, bm)) if bm >= m => best,
            _ => Some((k, m)),
        },
    );
    let (k, _) = best.ok_or(Error::EmptyBand { lo: lo.as_f64(), hi: hi.as_f64() })?;
    if k == 0 || k + 1 >= sp.mags.len() {
        return Ok(sp.freqs[k]);
    }
    let (off, _) = parabolic_peak(sp.mags[k - 1], sp.mags[k], sp.mags[k + 1]);
    Ok(sp.freqs[k] + off * sp.bin_width())
}

/// Peak amplitudes of an oscillation, in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<T> {
    pub times: Vec<T>,
    pub amplitudes: Vec<T>,
}

impl<T: Scalar> Envelope<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest peak with `t − window < time ≤ t`, or `None` if there is none.
    pub fn max_before(&self, t: T, window: T) -> Option<T> {
        self.times
            .iter()
            .zip(&self.amplitudes)
            .filter(|(tt, _)| **tt <= t && **tt > t - window)
            .map(|(_, a)| *a)
            .fold(None, |m: Option<T>, a| Some(m.map_or(a, |m| m.max(a))))
    }
}

/// `|value|` at every local extremum of the mean-removed `channel`.
pub fn amplitude_envelope<T: Scalar>(ts: &TimeSeries<T>, channel: &str) -> Result<Envelope<T>> {
    let x = ts.column(channel)?;
    let times = ts.times();
    envelope_of(&times, &x)
}

/// [`amplitude_envelope`] of raw samples.
pub fn envelope_of<T: Scalar>(times: &[T], x: &[T]) -> Result<Envelope<T>> {
    if x.len() < 3 {
        return Err(Error::NoOscillation);
    }
    let mean = x.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(x.len());
    let s: Vec<T> = x.iter().map(|&v| v - mean).collect();

    let crossings = s.windows(2).filter(|w| (w[0] < T::zero()) != (w[1] < T::zero())).count();
    if crossings < 2 {
        return Err(Error::NoOscillation);
    }

    let mut env = Envelope { times: Vec::new(), amplitudes: Vec::new() };
    for i in 1..s.len() - 1 {
        let is_max = s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] > T::zero();
        let is_min = s[i] < s[i - 1] && s[i] <= s[i + 1] && s[i] < T::zero();
        if is_max || is_min {
            env.times.push(times[i]);
            env.amplitudes.push(s[i].abs());
        }
    }
    if env.is_empty() {
        return Err(Error::NoOscillation);
    }
    Ok(env)
}

/// `mag(k·f1)/mag(f1)` for `k = 2..=n`.
///
/// Each magnitude is the interpolated peak of the bins around the nominal
/// harmonic location, which tolerates a slightly off-grid fundamental.
pub fn harmonic_ratios<T: Scalar>(sp: &Spectrum<T>, f1: T, n: usize) -> Result<Vec<T>> {
    if !(f1 > T::zero()) {
        return Err(Error::InvalidConfig(format!("fundamental must be positive, got {f1}")));
    }
    let nyquist = sp.nyquist();
    let top = f1 * T::from_usize_lossy(n.max(1));
    if top >= nyquist {
        return Err(Error::HarmonicAboveNyquist { order: n, freq: top.as_f64(), nyquist: nyquist.as_f64() });
    }
    let fundamental = magnitude_near(sp, f1);
    Ok((2..=n).map(|k| magnitude_near(sp, f1 * T::from_usize_lossy(k)) / fundamental).collect())
}

/// Interpolated peak magnitude within one bin of `f`.
fn magnitude_near<T: Scalar>(sp: &Spectrum<T>, f: T) -> T {
    let pos = (f / sp.bin_width()).round().to_usize().unwrap_or(0);
    let last = sp.mags.len() - 1;
    let lo = pos.saturating_sub(1);
    let hi = (pos + 1).min(last);
    let k = (lo..=hi).fold(lo, |b, i| if sp.mags[i] > sp.mags[b] { i } else { b });
    if k == 0 || k == last {
        return sp.mags[k];
    }
    parabolic_peak(sp.mags[k - 1], sp.mags[k], sp.mags[k + 1]).1
}
