//! The scalar metric `d(x, y) = inf{‖u‖ : D(x, y) ≤ u}` equivalent to a cone metric.
//!
//! For `c = D(x, y)` the infimum is the norm-distance from the origin to the
//! translated cone `c + P`. Every result carries a certified gap: a lower bound
//! comes from the dual problem `max{⟨y, c⟩ : y ∈ P*, ‖y‖_* ≤ 1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{self, ConeSpec, OrderedVectorSpace};
use crate::error::{Error, Result};
use crate::linalg;
use crate::metrics::{ConeMetric, Point};

const SEARCH_PHASES: [(f64, usize); 3] = [(0.5, 250), (0.02, 250), (0.001, 250)];
const DUAL_ASCENT_TRIGGER: f64 = 1e-9;
const DUAL_ASCENT_STEPS: usize = 200;
const DUAL_ASCENT_INNER: usize = 30;
const ADMM_STEPS: usize = 2000;
const ADMM_PENALTY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetrizationMethod {
    /// Orthant with a monotone norm: `d = ‖c‖`.
    MonotoneFastPath,
    /// Euclidean norm and `c ∈ P*`: `d = ‖c‖`.
    DualFastPath,
    /// Euclidean norm: minimizer `c + proj_P(−c)`.
    EuclideanProjection,
    /// Projected subgradient descent seeded from the Euclidean minimizer.
    LocalSearch,
}

impl MetrizationMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetrizationMethod::MonotoneFastPath => "monotone-fast-path",
            MetrizationMethod::DualFastPath => "dual-fast-path",
            MetrizationMethod::EuclideanProjection => "euclidean-projection",
            MetrizationMethod::LocalSearch => "local-search",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetrizationResult {
    pub value: f64,
    /// A feasible `u` (that is, `c ≤ u`) with `‖u‖ = value`.
    pub minimizer: Vec<f64>,
    pub method: MetrizationMethod,
    /// `value − d ≤ error_bound`, certified by a dual feasible point.
    pub error_bound: f64,
}

/// `dist(0, c + P)` in the space's norm, dispatching to the cheapest exact method.
pub fn metrize_vector(space: &OrderedVectorSpace, c: &[f64]) -> Result<MetrizationResult> {
    check_member(space, c)?;
    let method = select_method(space, c)?;
    run(space, c, method)
}

/// Like [`metrize_vector`] with the method forced; errors when it does not apply.
pub fn metrize_vector_via(
    space: &OrderedVectorSpace,
    c: &[f64],
    method: MetrizationMethod,
) -> Result<MetrizationResult> {
    check_member(space, c)?;
    let not_applicable = |reason: &str| Error::MethodNotApplicable {
        method: method.as_str(),
        reason: reason.to_string(),
    };
    let euclidean = space.norm_spec().euclidean_scale().is_some();
    match method {
        MetrizationMethod::MonotoneFastPath => {
            if !matches!(space.cone(), ConeSpec::Orthant { .. }) {
                return Err(not_applicable("cone is not the orthant"));
            }
        }
        MetrizationMethod::DualFastPath => {
            if !euclidean {
                return Err(not_applicable("norm is not Euclidean"));
            }
            if !cone::dual_contains(space.cone(), c, space.tolerance())? {
                return Err(not_applicable("vector is not in the dual cone"));
            }
        }
        MetrizationMethod::EuclideanProjection => {
            if !euclidean {
                return Err(not_applicable("norm is not Euclidean"));
            }
        }
        MetrizationMethod::LocalSearch => {
            if space.norm_spec().is_quasi() {
                return Err(not_applicable("quasi-norms have no dual certificate"));
            }
        }
    }
    run(space, c, method)
}

/// The method [`metrize_vector`] would use for `c`.
pub fn select_method(space: &OrderedVectorSpace, c: &[f64]) -> Result<MetrizationMethod> {
    if matches!(space.cone(), ConeSpec::Orthant { .. }) {
        return Ok(MetrizationMethod::MonotoneFastPath);
    }
    if space.norm_spec().euclidean_scale().is_some() {
        return Ok(if cone::dual_contains(space.cone(), c, 0.0)? {
            MetrizationMethod::DualFastPath
        } else {
            MetrizationMethod::EuclideanProjection
        });
    }
    Ok(MetrizationMethod::LocalSearch)
}

fn check_member(space: &OrderedVectorSpace, c: &[f64]) -> Result<()> {
    linalg::check_dim(space.dim(), c)?;
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("vector has non-finite components".into()));
    }
    if !space.contains(c)? {
        return Err(Error::NotInCone {
            violation: cone::membership_violation(space.cone(), c)?,
        });
    }
    Ok(())
}

fn run(space: &OrderedVectorSpace, c: &[f64], method: MetrizationMethod) -> Result<MetrizationResult> {
    match method {
        MetrizationMethod::MonotoneFastPath | MetrizationMethod::DualFastPath => Ok(MetrizationResult {
            value: space.norm(c),
            minimizer: c.to_vec(),
            method,
            error_bound: 0.0,
        }),
        MetrizationMethod::EuclideanProjection => {
            let (u, infeasibility) = euclidean_minimizer(space, c)?;
            let value = space.norm(&u);
            let lower = dual_lower_bound(space, c, &u)?;
            Ok(MetrizationResult {
                value,
                minimizer: u,
                method,
                error_bound: (value - lower).max(0.0) + infeasibility,
            })
        }
        MetrizationMethod::LocalSearch => local_search(space, c),
    }
}

/// `c + proj_P(−c)` and a bound on how much feasibility repair could cost in norm.
fn euclidean_minimizer(space: &OrderedVectorSpace, c: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (p, residual) = match cone::project(space.cone(), &linalg::neg(c)) {
        Ok(p) => (p.point, p.residual),
        Err(Error::NotConverged { best, residual, .. }) => (best, residual),
        Err(e) => return Err(e),
    };
    let u = linalg::add(c, &p);
    // p + residual·w is feasible for a witness w of unit slack
    let repair = if residual > 0.0 {
        residual * space.norm(&space.interior_witness())
    } else {
        0.0
    };
    Ok((u, repair))
}

/// `⟨y, c⟩/‖y‖_*` for the dual-cone projection of `y`: a valid lower bound on `d`.
fn certificate(space: &OrderedVectorSpace, c: &[f64], y: &[f64]) -> Result<f64> {
    let y = cone::project_onto_dual(space.cone(), y)?;
    let dn = space.norm_spec().dual_norm(&y);
    if dn > 0.0 && dn.is_finite() {
        Ok(linalg::dot(&y, c) / dn)
    } else {
        Ok(0.0)
    }
}

fn dual_lower_bound(space: &OrderedVectorSpace, c: &[f64], u: &[f64]) -> Result<f64> {
    let mut lb: f64 = 0.0;
    for y in [u.to_vec(), space.norm_spec().subgradient(u)] {
        if linalg::norm2(&y) > 0.0 {
            lb = lb.max(certificate(space, c, &y)?);
        }
    }
    Ok(lb)
}

/// ADMM on `min ‖u‖ + ι_{c+P}(v)` subject to `u = v`, for norms whose proximal
/// map is cheap (`x − t·proj_{B*}(x/t)` with `B*` the dual unit ball). Returns the
/// best feasible `v` and the best certificate from the scaled dual iterate.
fn admm_refine(space: &OrderedVectorSpace, c: &[f64], start: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
    let norm = space.norm_spec();
    let scale = linalg::norm2(c);
    if scale == 0.0 || norm.project_dual_ball(start).is_none() {
        return Ok(None);
    }
    let rho = ADMM_PENALTY / scale;
    let prox = |x: &[f64]| -> Vec<f64> {
        let t = 1.0 / rho;
        let inner = norm.project_dual_ball(&linalg::scale(1.0 / t, x)).expect("polyhedral dual ball");
        linalg::axpy(x, -t, &inner)
    };
    let mut v = start.to_vec();
    let mut w = vec![0.0; c.len()];
    let mut best = (space.norm(&v), v.clone());
    let mut lower: f64 = 0.0;
    for k in 0..ADMM_STEPS {
        let u = prox(&linalg::sub(&v, &w));
        let p = project_or_best(space.cone(), &linalg::sub(&linalg::add(&u, &w), c))?;
        v = linalg::add(c, &p);
        w = linalg::add(&w, &linalg::sub(&u, &v));
        let val = space.norm(&v);
        if val < best.0 {
            best = (val, v.clone());
        }
        if (k + 1) % 25 == 0 {
            // at a fixed point −ρ·w lies in P* and is a subgradient at the minimizer
            lower = lower.max(certificate(space, c, &linalg::scale(-rho, &w))?);
            if best.0 - lower <= DUAL_ASCENT_TRIGGER * best.0.max(1.0) {
                break;
            }
        }
    }
    Ok(Some((best.1, lower)))
}

/// Projected ascent on `max{⟨y, c⟩ : y ∈ P*, ‖y‖_* ≤ 1}` for norms whose dual
/// ball has a cheap projection; the intersection is handled by Dykstra's method.
/// Returns the best certificate seen, which is a lower bound on `d` regardless
/// of how far the ascent got.
fn dual_ascent(space: &OrderedVectorSpace, c: &[f64], y0: &[f64]) -> Result<f64> {
    let norm = space.norm_spec();
    if norm.project_dual_ball(y0).is_none() {
        return Ok(0.0);
    }
    let scale = linalg::norm2(c);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let project = |v: &[f64]| -> Result<Vec<f64>> {
        let mut x = v.to_vec();
        let (mut p, mut q) = (vec![0.0; v.len()], vec![0.0; v.len()]);
        for _ in 0..DUAL_ASCENT_INNER {
            let a = norm.project_dual_ball(&linalg::add(&x, &p)).expect("polyhedral dual ball");
            p = linalg::sub(&linalg::add(&x, &p), &a);
            let b = cone::project_onto_dual(space.cone(), &linalg::add(&a, &q))?;
            q = linalg::sub(&linalg::add(&a, &q), &b);
            x = b;
        }
        Ok(x)
    };
    let mut y = project(y0)?;
    let mut best = certificate(space, c, &y)?;
    for k in 0..DUAL_ASCENT_STEPS {
        let step = 1.0 / (scale * ((k + 1) as f64).sqrt());
        y = project(&linalg::axpy(&y, step, c))?;
        best = best.max(certificate(space, c, &y)?);
    }
    Ok(best)
}

fn project_or_best(cone: &ConeSpec, v: &[f64]) -> Result<Vec<f64>> {
    match cone::project(cone, v) {
        Ok(p) => Ok(p.point),
        Err(Error::NotConverged { best, .. }) => Ok(best),
        Err(e) => Err(e),
    }
}

fn local_search(space: &OrderedVectorSpace, c: &[f64]) -> Result<MetrizationResult> {
    let norm = space.norm_spec();
    let cone = space.cone();
    let (u2, repair) = euclidean_minimizer(space, c)?;
    let d2 = linalg::norm2(&u2);

    let mut best_p = vec![0.0; c.len()];
    let mut best = space.norm(c);
    let p2 = linalg::sub(&u2, c);
    if space.norm(&u2) < best {
        best = space.norm(&u2);
        best_p = p2;
    }
    let scale = linalg::norm2(c);
    if scale > 0.0 {
        for (rel_step, iters) in SEARCH_PHASES {
            let mut p = best_p.clone();
            for k in 0..iters {
                let g = norm.subgradient(&linalg::add(c, &p));
                let gn = linalg::norm2(&g);
                if gn == 0.0 {
                    break;
                }
                let step = rel_step * scale / ((k + 1) as f64).sqrt();
                p = project_or_best(cone, &linalg::axpy(&p, -step / gn, &g))?;
                let val = space.norm(&linalg::add(c, &p));
                if val < best {
                    best = val;
                    best_p = p.clone();
                }
            }
        }
    }
    let mut u = linalg::add(c, &best_p);
    let mut lower = norm.euclidean_lower_constant(space.dim()) * d2;
    if let Some((v, lb)) = admm_refine(space, c, &u)? {
        if space.norm(&v) < best {
            best = space.norm(&v);
            u = v;
        }
        lower = lower.max(lb);
    }
    lower = lower.max(dual_lower_bound(space, c, &u)?);
    lower = lower.max(dual_lower_bound(space, c, &u2)?);
    if best - lower > DUAL_ASCENT_TRIGGER * best.max(1.0) {
        lower = lower.max(dual_ascent(space, c, &norm.subgradient(&u))?);
    }
    Ok(MetrizationResult {
        value: best,
        minimizer: u,
        method: MetrizationMethod::LocalSearch,
        error_bound: (best - lower).max(0.0) + repair,
    })
}

/// The scalar metric induced by a cone metric.
#[derive(Debug, Clone, Copy)]
pub struct EquivalentMetric<'a> {
    cm: &'a ConeMetric,
}

pub fn equivalent_metric(cm: &ConeMetric) -> EquivalentMetric<'_> {
    EquivalentMetric { cm }
}

impl EquivalentMetric<'_> {
    pub fn metrize(&self, x: &Point, y: &Point) -> Result<MetrizationResult> {
        metrize_vector(self.cm.space(), &self.cm.eval(x, y)?)
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.metrize(x, y).map(|r| r.value)
    }

    pub fn cone_metric(&self) -> &ConeMetric {
        self.cm
    }
}

/// Pairwise metrized distances with per-entry method tags and error bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub methods: Vec<Vec<MetrizationMethod>>,
    pub error_bounds: Vec<Vec<f64>>,
}

/// Evaluates all pairs `i ≤ j` in parallel and mirrors them; each entry is
/// computed independently, so the result does not depend on scheduling.
pub fn distance_matrix(cm: &ConeMetric, points: &[Point]) -> Result<DistanceMatrix> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("distance matrix needs at least one point".into()));
    }
    let n = points.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let metric = equivalent_metric(cm);
    let results: Vec<MetrizationResult> = pairs
        .par_iter()
        .map(|&(i, j)| metric.metrize(&points[i], &points[j]))
        .collect::<Result<_>>()?;
    let mut values = vec![vec![0.0; n]; n];
    let mut methods = vec![vec![MetrizationMethod::MonotoneFastPath; n]; n];
    let mut error_bounds = vec![vec![0.0; n]; n];
    for (&(i, j), r) in pairs.iter().zip(results) {
        for (a, b) in [(i, j), (j, i)] {
            values[a][b] = r.value;
            methods[a][b] = r.method;
            error_bounds[a][b] = r.error_bound;
        }
    }
    Ok(DistanceMatrix {
        labels: points.iter().map(|p| p.to_string()).collect(),
        values,
        methods,
        error_bounds,
    })
}

impl DistanceMatrix {
    pub fn max_error_bound(&self) -> f64 {
        self.error_bounds.iter().flatten().cloned().fold(0.0, f64::max)
    }

    /// Header row and column of labels, values to 12 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            out.push(',');
            out.push_str(&csv_field(l));
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.values) {
            out.push_str(&csv_field(l));
            for v in row {
                out.push(',');
                out.push_str(&format_significant(*v));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `v` rounded to 12 significant digits, printed in plain decimal notation.
pub fn format_significant(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&rounded.abs()) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// Interior directions for convergence checks: the witness scaled to slack
/// `2·margin`, plus `count` seeded random vectors `t·(w + p)` with `p ∈ P`
/// and `t` log-uniform in `[10⁻³, 1]`.
pub fn default_directions(space: &OrderedVectorSpace, margin: f64, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !(margin > 0.0) {
        return Err(Error::NonPositiveMargin(margin));
    }
    let w = space.interior_witness();
    let mut out = vec![linalg::scale(2.0 * margin, &w)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let p = cone::sample_cone_point(space.cone(), &mut rng)?;
        let t = 10f64.powf(-3.0 * rng.random::<f64>()).max(2.0 * margin);
        out.push(linalg::scale(t, &linalg::add(&w, &p)));
    }
    Ok(out)
}

/// Per-direction comparison of the two notions of convergence. Indices are
/// 1-based: the first `N` such that the property holds for every `n ≥ N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionReport {
    pub direction: Vec<f64>,
    /// First `N` with `D(xₙ, x) ≪ c` for all `n ≥ N`.
    pub domination_index: Option<usize>,
    /// Radius `ε(c)` such that `d(xₙ, x) ≤ ε(c)` forces `D(xₙ, x) ≪ c`.
    pub d_radius: f64,
    /// First `N` with `d(xₙ, x) ≤ ε(c)` for all `n ≥ N`.
    pub d_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub distances: Vec<f64>,
    /// `sup_{n ≥ N} d(xₙ, x)` for each `N`.
    pub d_tail: Vec<f64>,
    pub directions: Vec<DirectionReport>,
    /// Every sampled direction eventually dominates `D(xₙ, x)`.
    pub cone_converges: bool,
    /// The `d`-tail eventually falls inside every radius `ε(c)`.
    pub d_converges: bool,
    pub agree: bool,
}

/// Compares `xₙ → x` in `(X, d)` with eventual domination `D(xₙ, x) ≪ c` for
/// each sampled interior `c`.
///
/// The radius `ε(c)` is `m·(s(c) − margin)/L`, where `s` is the interior slack,
/// `L` its Lipschitz constant in `‖·‖₂` and `m‖·‖₂ ≤ ‖·‖`: if `D ≤ u` with
/// `‖u‖ ≤ ε(c)` then `s(c − D) ≥ s(c − u) ≥ margin`.
pub fn check_convergence_equivalence(
    cm: &ConeMetric,
    sequence: &[Point],
    limit: &Point,
    directions: &[Vec<f64>],
    margin: f64,
) -> Result<ConvergenceReport> {
    if sequence.is_empty() {
        return Err(Error::InvalidArgument("sequence is empty".into()));
    }
    if !(margin > 0.0) {
        return Err(Error::NonPositiveMargin(margin));
    }
    let space = cm.space();
    for c in directions {
        if !cone::interior_contains(space.cone(), c, margin)? {
            return Err(Error::InvalidArgument(format!(
                "direction {c:?} is not interior with margin {margin}"
            )));
        }
    }
    let cone_values: Vec<Vec<f64>> = sequence
        .iter()
        .map(|x| cm.eval(x, limit))
        .collect::<Result<_>>()?;
    let distances: Vec<f64> = cone_values
        .iter()
        .map(|v| metrize_vector(space, v).map(|r| r.value))
        .collect::<Result<_>>()?;
    let mut d_tail = distances.clone();
    for i in (0..d_tail.len().saturating_sub(1)).rev() {
        d_tail[i] = d_tail[i].max(d_tail[i + 1]);
    }
    let lipschitz = match space.cone() {
        ConeSpec::SecondOrder { .. } => std::f64::consts::SQRT_2,
        _ => 1.0,
    };
    let m = space.norm_spec().euclidean_lower_constant(space.dim());

    let mut reports = Vec::with_capacity(directions.len());
    for c in directions {
        let mut flags = Vec::with_capacity(sequence.len());
        for v in &cone_values {
            flags.push(space.strictly_less(v, c, margin)?);
        }
        let slack = cone::interior_slack(space.cone(), c)?;
        let radius = m * (slack - margin) / lipschitz;
        reports.push(DirectionReport {
            direction: c.clone(),
            domination_index: eventual_index(&flags),
            d_radius: radius,
            d_index: eventual_index(&distances.iter().map(|d| *d <= radius).collect::<Vec<_>>()),
        });
    }
    let cone_converges = reports.iter().all(|r| r.domination_index.is_some());
    let d_converges = reports.iter().all(|r| r.d_index.is_some());
    Ok(ConvergenceReport {
        distances,
        d_tail,
        directions: reports,
        cone_converges,
        d_converges,
        agree: cone_converges == d_converges,
    })
}

fn eventual_index(flags: &[bool]) -> Option<usize> {
    let trailing = flags.iter().rev().take_while(|f| **f).count();
    (trailing > 0).then(|| flags.len() - trailing + 1)
}
