use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A state component became NaN or infinite.
    #[error("integration diverged at step {step} (t = {t}): state {state:?}")]
    Divergence { step: usize, t: f64, state: Vec<f64> },

    #[error("oscillator radius {radius} is too small to define a phase")]
    DegenerateRadius { radius: f64 },

    #[error("value {value} outside valid range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("series too short: {len} samples, at least {min} required")]
    TooShort { len: usize, min: usize },

    #[error("frequency band [{lo}, {hi}] Hz contains no spectrum bins")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("signal does not oscillate (fewer than two zero crossings)")]
    NoOscillation,

    #[error("harmonic {order} at {freq} Hz is above the Nyquist frequency {nyquist} Hz")]
    HarmonicAboveNyquist { order: usize, freq: f64, nyquist: f64 },

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("every optimizer restart diverged")]
    AllRestartsDiverged,

    #[error("malformed table at line {line}: {msg}")]
    Table { line: usize, msg: String },
}
