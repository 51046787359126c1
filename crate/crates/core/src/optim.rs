//! Box-constrained Nelder-Mead minimisation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions<T> {
    /// Objective evaluation budget.
    pub max_evals: usize,
    /// Stop once every vertex lies within this distance (per coordinate) of the best one...
    pub xtol: T,
    /// ...and their objective values are within this of the best value.
    pub ftol: T,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: T,
}

impl<T: Scalar> Default for NelderMeadOptions<T> {
    fn default() -> Self {
        Self { max_evals: 400, xtol: T::lit(1e-8), ftol: T::lit(1e-12), initial_step: T::lit(0.1) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> Bounds<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidConfig("bounds need lo < hi in every coordinate".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn uniform(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn project(&self, x: &mut [T]) {
        for ((v, &l), &h) in x.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.max(l).min(h);
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| v >= l && v <= h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult<T> {
    pub x: Vec<T>,
    pub f: T,
    pub evals: usize,
    /// Best value after each iteration.
    pub history: Vec<T>,
}

/// Minimises `objective` over `bounds` starting from `x0`.
///
/// Trial points are projected onto the box before evaluation. An objective
/// error counts as `+∞`, except at the starting point where it is returned.
pub fn nelder_mead<T, F>(
    mut objective: F,
    x0: &[T],
    bounds: &Bounds<T>,
    opts: &NelderMeadOptions<T>,
) -> Result<OptimResult<T>>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<T>,
{
    let n = bounds.dim();
    if x0.len() != n {
        return Err(Error::InvalidConfig(format!("start point has {} coordinates, bounds have {n}", x0.len())));
    }
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: &mut Vec<T>, allow_err: bool| -> Result<T> {
        bounds.project(x);
        evals.set(evals.get() + 1);
        match objective(x) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) if allow_err => Ok(T::infinity()),
            Err(_) if allow_err => Ok(T::infinity()),
            Ok(v) => Err(Error::Divergence { step: 0, t: 0.0, state: vec![v.as_f64()] }),
            Err(e) => Err(e),
        }
    };

    let mut start = x0.to_vec();
    let f0 = eval(&mut start, false)?;
    let mut simplex: Vec<(Vec<T>, T)> = vec![(start.clone(), f0)];
    for i in 0..n {
        let mut v = start.clone();
        let step = opts.initial_step * (bounds.hi[i] - bounds.lo[i]);
        v[i] = if v[i] + step <= bounds.hi[i] { v[i] + step } else { v[i] - step };
        let fv = eval(&mut v, true)?;
        simplex.push((v, fv));
    }

    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let mut history = Vec::new();
    let along = |c: &[T], w: &[T], t: T| -> Vec<T> { c.iter().zip(w).map(|(&ci, &wi)| ci + t * (wi - ci)).collect() };

    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        history.push(simplex[0].1);
        if converged(&simplex, opts) || evals.get() >= opts.max_evals {
            break;
        }

        let worst = simplex[n].clone();
        let centroid: Vec<T> =
            (0..n).map(|j| simplex[..n].iter().fold(T::zero(), |a, v| a + v.0[j]) / T::from_usize_lossy(n)).collect();

        let mut xr = along(&centroid, &worst.0, -alpha);
        let fr = eval(&mut xr, true)?;
        if fr < simplex[0].1 {
            let mut xe = along(&centroid, &worst.0, -gamma);
            let fe = eval(&mut xe, true)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            // contract towards the better of reflected and worst
            let (mut xc, outside) = if fr < worst.1 {
                (along(&centroid, &worst.0, -rho), true)
            } else {
                (along(&centroid, &worst.0, rho), false)
            };
            let fc = eval(&mut xc, true)?;
            if (outside && fc <= fr) || (!outside && fc < worst.1) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vtx in simplex.iter_mut().skip(1) {
                    let mut xs = along(&best, &vtx.0, sigma);
                    let fs = eval(&mut xs, true)?;
                    *vtx = (xs, fs);
                }
            }
        }
    }

    let (x, f) = simplex.swap_remove(0);
    Ok(OptimResult { x, f, evals: evals.get(), history })
}

fn converged<T: Scalar>(simplex: &[(Vec<T>, T)], opts: &NelderMeadOptions<T>) -> bool {
    let (best, fbest) = (&simplex[0].0, simplex[0].1);
    simplex
        .iter()
        .skip(1)
        .all(|(v, f)| (*f - fbest).abs() <= opts.ftol && v.iter().zip(best).all(|(a, b)| (*a - *b).abs() <= opts.xtol))
}
