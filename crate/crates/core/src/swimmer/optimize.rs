use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, Bounds, NelderMeadOptions};
use crate::scalar::Scalar;
use crate::sim::IntegratorConfig;

use super::{simulate_swimmer, ActuationParams, StiffnessProfile, SwimmerConfig, N_JOINTS};

/// `n` log-spaced values from `lo` to `hi`, both ends exact.
pub fn log_grid<T: Scalar>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi >= lo) || n == 0 || (n == 1 && hi != lo) {
        return Err(Error::InvalidConfig(format!(
            "log grid needs 0 < lo ≤ hi and n ≥ 1 (n = 1 only for lo = hi): {lo}, {hi}, {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_usize_lossy(n - 1);
    let mut g: Vec<T> = (0..n).map(|i| (a + (b - a) * T::from_usize_lossy(i) / last).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCell<T> {
    pub k: T,
    /// `None` when the simulation failed; see `error`.
    pub thrust: Option<T>,
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport<T> {
    pub k_best: T,
    pub metric_best: T,
    /// One cell per grid value, in grid order.
    pub table: Vec<OracleCell<T>>,
}

impl<T: Scalar> OracleReport<T> {
    /// True when the best cell is not at either end of the grid.
    pub fn is_interior(&self) -> bool {
        let i = self.table.iter().position(|c| c.k == self.k_best);
        matches!(i, Some(i) if i > 0 && i + 1 < self.table.len())
    }
}

/// Thrust of every homogeneous profile on `k_grid`.
pub fn homogeneous_oracle<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    act: &ActuationParams<T>,
    k_grid: &[T],
    duration: T,
    icfg: &IntegratorConfig<T>,
) -> Result<OracleReport<T>> {
    cfg.validate()?;
    if k_grid.is_empty() {
        return Err(Error::InvalidConfig("oracle grid is empty".into()));
    }
    for &k in k_grid {
        StiffnessProfile::homogeneous(k).validate(cfg)?;
    }
    let table: Vec<OracleCell<T>> = k_grid
        .par_iter()
        .map(|&k| match simulate_swimmer(cfg, &StiffnessProfile::homogeneous(k), act, duration, icfg) {
            Ok(r) => OracleCell { k, thrust: Some(r.metrics.thrust), error: None },
            Err(e) => OracleCell { k, thrust: None, error: Some(e) },
        })
        .collect();
    let best =
        table.iter().filter_map(|c| c.thrust.map(|v| (c.k, v))).fold(None, |acc: Option<(T, T)>, (k, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((k, v)),
        });
    match best {
        Some((k_best, metric_best)) => Ok(OracleReport { k_best, metric_best, table }),
        None => Err(table[0].error.clone().unwrap_or(Error::AllRestartsDiverged)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions<T> {
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations per restart.
    pub max_evals: usize,
    /// Size of the homogeneous grid that seeds restart 0.
    pub grid_size: usize,
    /// Convergence tolerance on `ln k`.
    pub xtol: T,
    /// Convergence tolerance on the thrust proxy, m/s.
    pub ftol: T,
}

impl<T: Scalar> Default for OptimizeOptions<T> {
    fn default() -> Self {
        Self { restarts: 5, seed: 0, max_evals: 80, grid_size: 12, xtol: T::lit(1e-3), ftol: T::lit(1e-7) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartReport<T> {
    pub start: [T; N_JOINTS],
    /// Best profile and metric of this restart, or the error that stopped it.
    pub outcome: std::result::Result<([T; N_JOINTS], T), Error>,
    pub evals: usize,
    /// Best metric after each simplex iteration.
    pub history: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport<T> {
    pub profile_best: StiffnessProfile<T>,
    pub metric_best: T,
    /// Restarts in id order; restart 0 starts at the homogeneous best.
    pub restarts: Vec<RestartReport<T>>,
    /// Running best metric over all restarts, in restart then iteration order.
    pub history: Vec<T>,
}

/// Maximises `objective` over `[k_min, k_max]⁴` with Nelder–Mead in `ln k`.
///
/// Restart 0 starts at `anchor` (whose metric is `anchor_metric`), the
/// rest at seeded uniform draws in `ln k`. The anchor is kept when no restart
/// beats it, so the result is never worse than the anchor.
pub fn optimize_with<T, F>(
    objective: F,
    k_min: T,
    k_max: T,
    anchor: ([T; N_JOINTS], T),
    opts: &OptimizeOptions<T>,
) -> Result<OptimizeReport<T>>
where
    T: Scalar,
    F: Fn(&[T; N_JOINTS]) -> Result<T> + Sync,
{
    if opts.restarts == 0 || opts.max_evals < N_JOINTS + 2 {
        return Err(Error::InvalidConfig("optimizer needs ≥ 1 restart and a budget above the simplex size".into()));
    }
    let (lo, hi) = (k_min.ln(), k_max.ln());
    let bounds = Bounds::uniform(N_JOINTS, lo, hi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<[T; N_JOINTS]> =
        (0..opts.restarts)
            .map(|r| {
                if r == 0 {
                    anchor.0
                } else {
                    std::array::from_fn(|_| (lo + (hi - lo) * T::lit(rng.gen::<f64>())).exp())
                }
            })
            .collect();
    let nm =
        NelderMeadOptions { max_evals: opts.max_evals, xtol: opts.xtol, ftol: opts.ftol, initial_step: T::lit(0.1) };
    let to_k = |x: &[T]| -> [T; N_JOINTS] { std::array::from_fn(|i| x[i].exp().max(k_min).min(k_max)) };

    let restarts: Vec<RestartReport<T>> = starts
        .par_iter()
        .map(|start| {
            let x0: Vec<T> = start.iter().map(|k| k.ln()).collect();
            match nelder_mead(|x: &[T]| objective(&to_k(x)).map(|v| -v), &x0, &bounds, &nm) {
                Ok(r) => RestartReport {
                    start: *start,
                    outcome: Ok((to_k(&r.x), -r.f)),
                    evals: r.evals,
                    history: r.history.iter().map(|&f| -f).collect(),
                },
                Err(e) => RestartReport { start: *start, outcome: Err(e), evals: 1, history: Vec::new() },
            }
        })
        .collect();

    let mut best: Option<([T; N_JOINTS], T)> = None;
    let mut history = Vec::new();
    for r in &restarts {
        if let Ok((k, v)) = r.outcome {
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((k, v));
            }
        }
        for &h in &r.history {
            let run = history.last().map_or(h, |&prev: &T| prev.max(h));
            history.push(run);
        }
    }
    let (k, v) = best.ok_or(Error::AllRestartsDiverged)?;
    let (k, v) = if anchor.1 >= v { anchor } else { (k, v) };
    Ok(OptimizeReport { profile_best: StiffnessProfile { k }, metric_best: v, restarts, history })
}

/// Searches for the per-joint stiffness profile with the highest thrust.
///
/// Returns the oracle on a `grid_size` log grid over the stiffness box next
/// to the optimizer report.
pub fn optimize_stiffness<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    act: &ActuationParams<T>,
    opts: &OptimizeOptions<T>,
    duration: T,
    icfg: &IntegratorConfig<T>,
) -> Result<(OracleReport<T>, OptimizeReport<T>)> {
    let grid = log_grid(cfg.k_min, cfg.k_max, opts.grid_size)?;
    let oracle = homogeneous_oracle(cfg, act, &grid, duration, icfg)?;
    let objective = |k: &[T; N_JOINTS]| {
        simulate_swimmer(cfg, &StiffnessProfile { k: *k }, act, duration, icfg).map(|r| r.metrics.thrust)
    };
    let report = optimize_with(objective, cfg.k_min, cfg.k_max, ([oracle.k_best; N_JOINTS], oracle.metric_best), opts)?;
    Ok((oracle, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_ends_are_exact() {
        let g = log_grid(0.005f64, 0.5, 12).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!((g[0], g[11]), (0.005, 0.5));
        let ratio = g[1] / g[0];
        assert!(g.windows(2).all(|w| (w[1] / w[0] - ratio).abs() < 1e-12));
        assert_eq!(log_grid(0.1, 0.1, 1).unwrap(), vec![0.1]);
        assert!(log_grid(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn recovers_stubbed_quadratic() {
        let target = [0.12, 0.03, 0.3, 0.07];
        let objective = |k: &[f64; 4]| Ok(-k.iter().zip(&target).map(|(a, t)| (a - t).powi(2)).sum::<f64>());
        let anchor = [0.05; 4];
        let opts = OptimizeOptions { max_evals: 1500, xtol: 1e-9, ftol: 1e-14, ..Default::default() };
        let r = optimize_with(objective, 0.005, 0.5, (anchor, objective(&anchor).unwrap()), &opts).unwrap();
        for (k, t) in r.profile_best.k.iter().zip(&target) {
            assert!((k - t).abs() < 1e-3, "{:?}", r.profile_best);
        }
        assert_eq!(r.restarts.len(), 5);
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn anchor_is_never_beaten_downwards() {
        // objective whose maximum sits exactly at the anchor
        let objective = |k: &[f64; 4]| Ok(-k.iter().map(|v| (v.ln() - 0.05f64.ln()).abs()).sum::<f64>());
        let r = optimize_with(objective, 0.005, 0.5, ([0.05; 4], 0.0), &OptimizeOptions::default()).unwrap();
        assert!(r.metric_best >= 0.0);
    }

    #[test]
    fn all_failures_reported() {
        let objective = |_: &[f64; 4]| -> Result<f64> { Err(Error::NoOscillation) };
        let r = optimize_with(objective, 0.005, 0.5, ([0.05; 4], 0.0), &OptimizeOptions::default());
        assert_eq!(r.unwrap_err(), Error::AllRestartsDiverged);
    }

    #[test]
    fn seed_fixes_starts() {
        let objective = |k: &[f64; 4]| Ok(k.iter().sum::<f64>());
        let opts = OptimizeOptions { max_evals: 10, seed: 7, ..Default::default() };
        let a = optimize_with(objective, 0.005, 0.5, ([0.05; 4], 0.2), &opts).unwrap();
        let b = optimize_with(objective, 0.005, 0.5, ([0.05; 4], 0.2), &opts).unwrap();
        assert_eq!(a, b);
        let c = optimize_with(objective, 0.005, 0.5, ([0.05; 4], 0.2), &OptimizeOptions { seed: 8, ..opts }).unwrap();
        assert_ne!(a.restarts[1].start, c.restarts[1].start);
        for r in &a.restarts {
            assert!(r.start.iter().all(|k| (0.005..=0.5).contains(k)));
        }
    }
}
