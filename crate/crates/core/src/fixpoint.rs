//! Picard iteration `x_{n+1} = T(x_n)` on a cone metric space, measured with the
//! metrized distance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{apply_within, PointMap};
use crate::metrics::{ConeMetric, Point};
use crate::metrize::equivalent_metric;

/// A run is flagged divergent once a step exceeds this multiple of the first step.
pub const DIVERGENCE_FACTOR: f64 = 1e6;
const RATE_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub iterates: Vec<Point>,
    /// `d(x_{n+1}, x_n)`.
    pub distances: Vec<f64>,
    /// `d(x_n, x_N)` against the final iterate.
    pub distances_to_final: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    /// Median of `d(x_{n+1}, x_n)/d(x_n, x_{n−1})` over the last ten steps.
    pub estimated_rate: Option<f64>,
    /// Last step length; the final iterate is a fixed-point estimate, not an exact one.
    pub residual: f64,
    pub iterations: usize,
}

impl IterationTrace {
    pub fn final_point(&self) -> &Point {
        self.iterates.last().expect("a trace holds at least the start point")
    }
}

enum Stop<'a> {
    Metrized(f64),
    Dominated { c: &'a [f64], margin: f64 },
}

fn run(cm: &ConeMetric, t: &dyn PointMap, x0: &Point, stop: Stop<'_>, max_iter: usize) -> Result<IterationTrace> {
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be positive".into()));
    }
    cm.check_point(x0)?;
    let d = equivalent_metric(cm);
    let mut iterates = vec![x0.clone()];
    let mut distances: Vec<f64> = Vec::new();
    let (mut converged, mut diverged) = (false, false);
    for _ in 0..max_iter {
        let x = iterates.last().unwrap();
        let next = apply_within(cm, t, x)?;
        let step = d.distance(&next, x)?;
        let done = match &stop {
            Stop::Metrized(tol) => step <= *tol,
            Stop::Dominated { c, margin } => cm.space().strictly_less(&cm.eval(&next, x)?, c, *margin)?,
        };
        iterates.push(next);
        distances.push(step);
        if done {
            converged = true;
            break;
        }
        if !step.is_finite() || step > DIVERGENCE_FACTOR * distances[0] {
            diverged = true;
            break;
        }
    }
    let last = iterates.last().unwrap().clone();
    let distances_to_final = iterates
        .iter()
        .map(|p| d.distance(p, &last))
        .collect::<Result<Vec<_>>>()?;
    Ok(IterationTrace {
        iterations: distances.len(),
        residual: *distances.last().unwrap(),
        estimated_rate: estimate_rate(&distances),
        iterates,
        distances,
        distances_to_final,
        converged,
        diverged,
    })
}

fn estimate_rate(distances: &[f64]) -> Option<f64> {
    let start = distances.len().saturating_sub(RATE_WINDOW + 1);
    let mut ratios: Vec<f64> = distances[start..]
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        return None;
    }
    ratios.sort_by(f64::total_cmp);
    let k = ratios.len();
    Some(if k % 2 == 1 {
        ratios[k / 2]
    } else {
        (ratios[k / 2 - 1] + ratios[k / 2]) / 2.0
    })
}

/// Iterates until `d(x_{n+1}, x_n) ≤ tol` or `max_iter` steps. Divergence
/// (a step above [`DIVERGENCE_FACTOR`] times the first) ends the run and is flagged.
pub fn banach_iterate(cm: &ConeMetric, t: &dyn PointMap, x0: &Point, tol: f64, max_iter: usize) -> Result<IterationTrace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    run(cm, t, x0, Stop::Metrized(tol), max_iter)
}

/// Iterates until `D(x_{n+1}, x_n) ≪ c` with the given margin.
pub fn cone_iterate(
    cm: &ConeMetric,
    t: &dyn PointMap,
    x0: &Point,
    c: &[f64],
    margin: f64,
    max_iter: usize,
) -> Result<IterationTrace> {
    if !crate::cone::interior_contains(cm.space().cone(), c, margin)? {
        return Err(Error::InvalidArgument("stopping vector is not interior".into()));
    }
    run(cm, t, x0, Stop::Dominated { c, margin }, max_iter)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub alpha: f64,
    /// `d(x_{n+1}, x_n) ≤ α·d(x_n, x_{n−1}) + τ` for all `n`.
    pub stepwise_ok: bool,
    pub first_stepwise_failure: Option<usize>,
    pub stepwise_max_excess: f64,
    /// `d(x_n, x_N) ≤ αⁿ/(1 − α)·d(x_1, x_0) + τ` for all `n`.
    pub apriori_ok: bool,
    pub apriori_max_excess: f64,
}

impl RateReport {
    pub fn passed(&self) -> bool {
        self.stepwise_ok && self.apriori_ok
    }
}

/// Checks a trace against the contraction rate `alpha`.
pub fn verify_rate_bounds(trace: &IterationTrace, alpha: f64, tau: f64) -> Result<RateReport> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::CoefficientOutOfRange(format!("alpha = {alpha} not in [0, 1)")));
    }
    if trace.iterates.len() < 3 {
        return Err(Error::InvalidArgument("rate checks need at least three iterates".into()));
    }
    let ds = &trace.distances;
    let mut first = None;
    let mut step_excess = f64::NEG_INFINITY;
    for n in 1..ds.len() {
        let excess = ds[n] - alpha * ds[n - 1];
        step_excess = step_excess.max(excess);
        if excess > tau && first.is_none() {
            first = Some(n);
        }
    }
    let d0 = ds[0];
    let mut prior_excess = f64::NEG_INFINITY;
    for (n, dn) in trace.distances_to_final.iter().enumerate() {
        let bound = alpha.powi(n as i32) / (1.0 - alpha) * d0;
        prior_excess = prior_excess.max(dn - bound);
    }
    Ok(RateReport {
        alpha,
        stepwise_ok: first.is_none(),
        first_stepwise_failure: first,
        stepwise_max_excess: step_excess,
        apriori_ok: prior_excess <= tau,
        apriori_max_excess: prior_excess,
    })
}
