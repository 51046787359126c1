//! Phenomenological magnetic spring: repulsion between two permanent magnets
//! as a function of their gap, in a "stiff" and a "soft" configuration.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MagnetMode {
    Stiff,
    Soft,
}

/// Repulsive force versus gap.
#[derive(Debug, Clone, PartialEq)]
pub enum ForceCurve<T> {
    /// Point-dipole ansatz `A/(gap + z_off)⁴`, `A` in N·m⁴.
    Parametric { strength: T, z_off: T },
    /// Samples with strictly increasing gap and strictly decreasing force.
    Tabulated { gaps: Vec<T>, forces: Vec<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagneticSpringModel<T> {
    pub mode: MagnetMode,
    pub curve: ForceCurve<T>,
}

/// Dipole strength of the soft preset; the stiff preset is 1.6× stronger.
pub const SOFT_STRENGTH: f64 = 1e-6;
pub const STIFF_STRENGTH: f64 = 1.6e-6;
pub const PRESET_Z_OFF: f64 = 0.01;

impl<T: Scalar> MagneticSpringModel<T> {
    pub fn parametric(mode: MagnetMode, strength: T, z_off: T) -> Result<Self> {
        if !(strength > T::zero()) || !(z_off > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "parametric magnet needs A > 0 and z_off > 0, got A = {strength}, z_off = {z_off}"
            )));
        }
        Ok(Self { mode, curve: ForceCurve::Parametric { strength, z_off } })
    }

    /// Default parametric curve for a configuration.
    pub fn preset(mode: MagnetMode) -> Self {
        let strength = match mode {
            MagnetMode::Stiff => STIFF_STRENGTH,
            MagnetMode::Soft => SOFT_STRENGTH,
        };
        Self { mode, curve: ForceCurve::Parametric { strength: T::lit(strength), z_off: T::lit(PRESET_Z_OFF) } }
    }

    pub fn tabulated(mode: MagnetMode, gaps: Vec<T>, forces: Vec<T>) -> Result<Self> {
        if gaps.len() != forces.len() || gaps.len() < 2 {
            return Err(Error::Table { line: 0, msg: "need at least two (gap, force) samples".into() });
        }
        for i in 0..gaps.len() {
            let line = i + 2;
            if !gaps[i].is_finite() || !forces[i].is_finite() || forces[i] < T::zero() {
                return Err(Error::Table { line, msg: "force must be finite and non-negative".into() });
            }
            if i > 0 && gaps[i] <= gaps[i - 1] {
                return Err(Error::Table { line, msg: "gap must be strictly increasing".into() });
            }
            if i > 0 && forces[i] >= forces[i - 1] {
                return Err(Error::Table { line, msg: "force must be strictly decreasing in gap".into() });
            }
        }
        Ok(Self { mode, curve: ForceCurve::Tabulated { gaps, forces } })
    }

    /// Reads a two-column `gap_m,force_N` table with a header line.
    pub fn from_csv<R: Read>(mode: MagnetMode, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::Table { line: 1, msg: e.to_string() })?;
        if header.len() != 2 || header.iter().any(|h| h.parse::<f64>().is_ok()) {
            return Err(Error::Table { line: 1, msg: "expected a `gap_m,force_N` header".into() });
        }
        let (mut gaps, mut forces) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Table { line, msg: e.to_string() })?;
            if rec.len() != 2 {
                return Err(Error::Table { line, msg: format!("expected 2 columns, found {}", rec.len()) });
            }
            let parse =
                |s: &str| s.parse::<f64>().map(T::lit).map_err(|e| Error::Table { line, msg: format!("`{s}`: {e}") });
            gaps.push(parse(&rec[0])?);
            forces.push(parse(&rec[1])?);
        }
        Self::tabulated(mode, gaps, forces)
    }

    pub fn load_csv<P: AsRef<Path>>(mode: MagnetMode, path: P) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Table { line: 0, msg: format!("{}: {e}", path.as_ref().display()) })?;
        Self::from_csv(mode, file)
    }

    /// Gap interval on which the model is defined.
    pub fn range(&self) -> (T, T) {
        match &self.curve {
            ForceCurve::Parametric { z_off, .. } => (-*z_off, T::infinity()),
            ForceCurve::Tabulated { gaps, .. } => (gaps[0], gaps[gaps.len() - 1]),
        }
    }

    fn check_range(&self, gap: T) -> Result<()> {
        let (lo, hi) = self.range();
        let inside = match self.curve {
            ForceCurve::Parametric { .. } => gap > lo && gap.is_finite(),
            ForceCurve::Tabulated { .. } => gap >= lo && gap <= hi,
        };
        if inside {
            Ok(())
        } else {
            Err(Error::OutOfRange { value: gap.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() })
        }
    }

    /// Index of the table segment containing `gap`.
    fn segment(gaps: &[T], gap: T) -> usize {
        let i = gaps.partition_point(|&g| g <= gap);
        i.clamp(1, gaps.len() - 1) - 1
    }

    /// Repulsive force (N) at `gap` (m).
    pub fn force(&self, gap: T) -> Result<T> {
        self.check_range(gap)?;
        Ok(match &self.curve {
            ForceCurve::Parametric { strength, z_off } => *strength / (gap + *z_off).powi(4),
            ForceCurve::Tabulated { gaps, forces } => {
                let i = Self::segment(gaps, gap);
                let w = (gap - gaps[i]) / (gaps[i + 1] - gaps[i]);
                forces[i] + w * (forces[i + 1] - forces[i])
            }
        })
    }

    /// Local stiffness `−dF/dgap` (N/m).
    pub fn stiffness(&self, gap: T) -> Result<T> {
        self.check_range(gap)?;
        Ok(match &self.curve {
            ForceCurve::Parametric { strength, z_off } => T::lit(4.0) * *strength / (gap + *z_off).powi(5),
            ForceCurve::Tabulated { gaps, forces } => {
                let i = Self::segment(gaps, gap);
                -(forces[i + 1] - forces[i]) / (gaps[i + 1] - gaps[i])
            }
        })
    }
}

/// Repulsive force of `model` at `gap`.
pub fn magnetic_force<T: Scalar>(model: &MagneticSpringModel<T>, gap: T) -> Result<T> {
    model.force(gap)
}
