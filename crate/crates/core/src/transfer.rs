//! Transfer of contractive conditions from the cone metric `D` to its metrization `d`.
//!
//! Three results are checked sample by sample: dominance
//! (`D(Tx, Ty) ≤ D*(x, y) ⇒ d(Tx, Ty) ≤ d*(x, y)`), the bounded-map bound with
//! `ψ(t) = sup_{0≠x∈P} ‖φ(t·x/‖x‖)‖`, and twelve contractive conditions whose
//! cone-order premise implies the same-shaped real inequality.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{self, ConeSpec, OrderedVectorSpace};
use crate::error::{Error, Result};
use crate::linalg;
use crate::maps::{apply_within, PointMap};
use crate::metrics::{ConeMetric, Point};
use crate::metrize::{equivalent_metric, metrize_vector};

/// Default number of random cone directions used to approximate suprema over `P`.
pub const DEFAULT_SAMPLES: usize = 256;

/// A real function on `R⁺`, named for reports.
#[derive(Clone)]
pub struct ScalarFn {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ScalarFn {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn call(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFn({})", self.name)
    }
}

/// A map `φ : P → P` with finite `‖φ‖ = sup ‖φ(x)‖/‖x‖`.
#[derive(Debug, Clone)]
pub enum BoundedConeMap {
    /// `x ↦ Mx`; maps `P` into `P` iff it is increasing for the cone order.
    LinearMatrix(Vec<Vec<f64>>),
    /// `f` on `P = R⁺` (one-dimensional orthant codomain).
    ScalarOnRplus(ScalarFn),
    /// Positively homogeneous map known on finitely many rays: `φ(s·rᵢ) = s·mᵢ`.
    /// Points off the listed rays are outside its domain.
    Sampled { rays: Vec<Vec<f64>>, images: Vec<Vec<f64>> },
}

impl BoundedConeMap {
    pub fn x_over_one_plus_x() -> Self {
        BoundedConeMap::ScalarOnRplus(ScalarFn::new("x/(1+x)", |x| x / (1.0 + x)))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        BoundedConeMap::LinearMatrix(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            BoundedConeMap::LinearMatrix(m) => {
                if m.len() != x.len() || m.iter().any(|r| r.len() != x.len()) {
                    return Err(Error::DimensionMismatch {
                        expected: m.len(),
                        found: x.len(),
                    });
                }
                Ok(linalg::mat_vec(m, x))
            }
            BoundedConeMap::ScalarOnRplus(f) => {
                linalg::check_dim(1, x)?;
                Ok(vec![f.call(x[0])])
            }
            BoundedConeMap::Sampled { rays, images } => {
                if linalg::norm2(x) == 0.0 {
                    return Ok(vec![0.0; images.first().map_or(x.len(), |m| m.len())]);
                }
                for (r, m) in rays.iter().zip(images) {
                    linalg::check_dim(r.len(), x)?;
                    let s = linalg::dot(x, r) / linalg::dot(r, r);
                    let off = linalg::norm2(&linalg::axpy(x, -s, r));
                    if s >= 0.0 && off <= 1e-12 * (1.0 + linalg::norm2(x)) {
                        return Ok(linalg::scale(s, m));
                    }
                }
                Err(Error::InvalidArgument(format!("{x:?} is not on a tabulated ray")))
            }
        }
    }

    fn is_linear(&self) -> bool {
        matches!(self, BoundedConeMap::LinearMatrix(_))
    }
}

/// Cone points probing `φ`: canonical rays, structural extras, then `count`
/// seeded random draws. The draws for `count` are a prefix of those for any
/// larger count, so suprema over them are monotone in `count`.
fn probe_points(phi: &BoundedConeMap, space: &OrderedVectorSpace, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    let cone = space.cone();
    let mut pts = cone::canonical_rays(cone);
    match phi {
        BoundedConeMap::Sampled { rays, .. } => {
            // the tabulated rays are the whole domain
            return Ok(rays.clone());
        }
        BoundedConeMap::LinearMatrix(m)
            if matches!(cone, ConeSpec::Orthant { .. }) && space.norm_spec().euclidean_scale().is_some() =>
        {
            // a nonnegative matrix has a nonnegative top right singular vector,
            // so the orthant attains the full operator norm there
            if let Some(v) = top_right_singular_vector(m) {
                pts.push(v.iter().map(|x| x.abs()).collect());
            }
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let mut x = cone::sample_cone_point(cone, &mut rng)?;
        // spread radii over several decades for nonlinear maps
        let s = 10f64.powf(rng.random_range(-2.0..2.0));
        if !phi.is_linear() {
            x = linalg::scale(s, &x);
        }
        pts.push(x);
    }
    Ok(pts)
}

fn top_right_singular_vector(m: &[Vec<f64>]) -> Option<Vec<f64>> {
    let rows = m.len();
    let cols = m.first()?.len();
    let a = DMatrix::from_fn(rows, cols, |i, j| m[i][j]);
    let svd = a.svd(false, true);
    let vt = svd.v_t?;
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if *s > acc.1 { (i, *s) } else { acc });
    Some(vt.row(k).iter().cloned().collect())
}

fn checked_image(phi: &BoundedConeMap, space: &OrderedVectorSpace, x: &[f64]) -> Result<Vec<f64>> {
    let y = phi.apply(x)?;
    linalg::check_dim(space.dim(), &y)?;
    if !space.contains(&y)? {
        return Err(Error::NotInCone {
            violation: cone::membership_violation(space.cone(), &y)?,
        });
    }
    Ok(y)
}

fn check_scalar_domain(phi: &BoundedConeMap, space: &OrderedVectorSpace) -> Result<()> {
    if matches!(phi, BoundedConeMap::ScalarOnRplus(_)) && !matches!(space.cone(), ConeSpec::Orthant { dim: 1 }) {
        return Err(Error::InvalidArgument("a map on R⁺ needs the one-dimensional orthant".into()));
    }
    Ok(())
}

/// Sampled lower bound on `‖φ‖`; errors if `φ` leaves the cone on a probe.
pub fn phi_operator_norm(phi: &BoundedConeMap, space: &OrderedVectorSpace, sample_count: usize, seed: u64) -> Result<f64> {
    check_scalar_domain(phi, space)?;
    let mut best: f64 = 0.0;
    for x in probe_points(phi, space, sample_count, seed)? {
        let nx = space.norm(&x);
        if nx > 0.0 {
            best = best.max(space.norm(&checked_image(phi, space, &x)?) / nx);
        }
    }
    Ok(best)
}

/// `ψ` as a function, precomputed once for repeated evaluation.
#[derive(Debug, Clone)]
pub enum Psi {
    /// `ψ(t) = t·‖φ‖`.
    Linear { operator_norm: f64 },
    /// `ψ(t) = ‖f(t·e)‖` with `e` the unit vector of `R⁺`.
    Scalar { f: ScalarFn, unit: f64, weight: f64 },
}

impl Psi {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Psi::Linear { operator_norm } => t * operator_norm,
            Psi::Scalar { f, unit, weight } => weight * f.call(t * unit).abs(),
        }
    }

    /// Whether the value is a sampled lower bound rather than exact.
    pub fn is_sampled(&self) -> bool {
        matches!(self, Psi::Linear { .. })
    }
}

/// Builds `ψ`. Linear and ray-tabulated maps are positively homogeneous, so
/// `ψ(t) = t·‖φ‖`; on `R⁺` the only unit direction is `1` and `ψ = f`.
pub fn psi_function(phi: &BoundedConeMap, space: &OrderedVectorSpace, sample_count: usize, seed: u64) -> Result<Psi> {
    check_scalar_domain(phi, space)?;
    match phi {
        BoundedConeMap::ScalarOnRplus(f) => {
            let weight = space.norm(&[1.0]);
            // ψ is the sup over the single unit ray; make sure f maps into R⁺ there
            for x in probe_points(phi, space, sample_count, seed)? {
                checked_image(phi, space, &x)?;
            }
            Ok(Psi::Scalar {
                f: f.clone(),
                unit: 1.0 / weight,
                weight,
            })
        }
        _ => Ok(Psi::Linear {
            operator_norm: phi_operator_norm(phi, space, sample_count, seed)?,
        }),
    }
}

/// `ψ(t)`.
pub fn psi_from_phi(phi: &BoundedConeMap, space: &OrderedVectorSpace, t: f64, sample_count: usize, seed: u64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("ψ needs t ≥ 0, got {t}")));
    }
    Ok(psi_function(phi, space, sample_count, seed)?.eval(t))
}

/// Which hypothesis licenses `d(Tx, Ty) ≤ ψ(d(x, y))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    PsiDecreasing,
    PhiLinearIncreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub x: Point,
    pub y: Point,
    pub check: String,
    pub cone_lhs: Vec<f64>,
    pub cone_rhs: Vec<f64>,
    pub scalar_lhs: f64,
    pub scalar_rhs: f64,
    /// `scalar_lhs − scalar_rhs`.
    pub slack: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TransferReport {
    pub samples_checked: usize,
    pub cone_holds: usize,
    pub scalar_holds_given_cone: usize,
    pub violations: Vec<Violation>,
    /// True when a right-hand side relies on a sampled supremum (a lower bound).
    pub sampled_bounds: bool,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All ordered pairs of distinct positions.
pub fn all_pairs(points: &[Point]) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            if i != j {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}

/// `count` ordered pairs drawn with replacement from distinct positions
/// (all pairs when `count` reaches their number).
pub fn sample_pairs(points: &[Point], count: usize, seed: u64) -> Vec<(Point, Point)> {
    let all = all_pairs(points);
    if count >= all.len() || all.is_empty() {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| all[rng.random_range(0..all.len())].clone()).collect()
}

fn same_domain(d: &ConeMetric, dstar: &ConeMetric, p: &Point) -> Result<()> {
    d.check_point(p)
        .and_then(|_| dstar.check_point(p))
        .map_err(|e| Error::DomainMismatch(format!("{p}: {e}")))
}

/// Dominance lemma: wherever `D(Tx, Ty) ≤ D*(x, y)`, check `d(Tx, Ty) ≤ d*(x, y) + τ`.
pub fn check_dominance_transfer(
    d: &ConeMetric,
    dstar: &ConeMetric,
    t: &dyn PointMap,
    pairs: &[(Point, Point)],
    tau: f64,
) -> Result<TransferReport> {
    if d.space() != dstar.space() {
        return Err(Error::DomainMismatch("cone metrics have different codomains".into()));
    }
    let space = d.space();
    let mut report = TransferReport::default();
    for (x, y) in pairs {
        same_domain(d, dstar, x)?;
        same_domain(d, dstar, y)?;
        let (tx, ty) = (apply_within(d, t, x)?, apply_within(d, t, y)?);
        let lhs = d.eval(&tx, &ty)?;
        let rhs = dstar.eval(x, y)?;
        report.samples_checked += 1;
        if !space.leq(&lhs, &rhs)? {
            continue;
        }
        report.cone_holds += 1;
        let sl = metrize_vector(space, &lhs)?.value;
        let sr = metrize_vector(space, &rhs)?.value;
        record(&mut report, x, y, "dominance", &lhs, &rhs, sl, sr, tau, true);
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn record(
    report: &mut TransferReport,
    x: &Point,
    y: &Point,
    check: &str,
    lhs: &[f64],
    rhs: &[f64],
    sl: f64,
    sr: f64,
    tau: f64,
    count: bool,
) -> bool {
    let ok = sl <= sr + tau;
    if ok && count {
        report.scalar_holds_given_cone += 1;
    }
    if !ok {
        report.violations.push(Violation {
            x: x.clone(),
            y: y.clone(),
            check: check.to_string(),
            cone_lhs: lhs.to_vec(),
            cone_rhs: rhs.to_vec(),
            scalar_lhs: sl,
            scalar_rhs: sr,
            slack: sl - sr,
        });
    }
    ok
}

/// Bounded-map transfer. Wherever `D(Tx, Ty) ≤ φ(D(x, y))`, checks
/// `d(Tx, Ty) ≤ ψ(‖D(x, y)‖) + τ` and, when a branch is declared,
/// `d(Tx, Ty) ≤ ψ(d(x, y)) + τ`. Declared branches are spot-checked first:
/// `ψ` non-increasing on a geometric grid, or `φ` linear and cone-preserving.
#[allow(clippy::too_many_arguments)]
pub fn check_phi_transfer(
    d: &ConeMetric,
    t: &dyn PointMap,
    phi: &BoundedConeMap,
    branch: Option<Branch>,
    pairs: &[(Point, Point)],
    tau: f64,
    sample_count: usize,
    seed: u64,
) -> Result<TransferReport> {
    let space = d.space();
    let psi = psi_function(phi, space, sample_count, seed)?;
    match branch {
        Some(Branch::PsiDecreasing) => {
            let grid: Vec<f64> = std::iter::once(0.0)
                .chain((-10..=10).map(|k| 2f64.powi(k)))
                .collect();
            for w in grid.windows(2) {
                if psi.eval(w[1]) > psi.eval(w[0]) + tau {
                    return Err(Error::HypothesisFailed(format!(
                        "ψ increases between t = {} and t = {}",
                        w[0], w[1]
                    )));
                }
            }
        }
        Some(Branch::PhiLinearIncreasing) => {
            if !phi.is_linear() {
                return Err(Error::HypothesisFailed("φ is not linear".into()));
            }
            // a linear map is increasing iff it maps P into P
            phi_operator_norm(phi, space, sample_count, seed).map_err(|e| {
                Error::HypothesisFailed(format!("φ is not increasing: {e}"))
            })?;
        }
        None => {}
    }
    let mut report = TransferReport {
        sampled_bounds: psi.is_sampled(),
        ..Default::default()
    };
    for (x, y) in pairs {
        let (tx, ty) = (apply_within(d, t, x)?, apply_within(d, t, y)?);
        let lhs = d.eval(&tx, &ty)?;
        let dxy = d.eval(x, y)?;
        let rhs = checked_image(phi, space, &dxy)?;
        report.samples_checked += 1;
        if !space.leq(&lhs, &rhs)? {
            continue;
        }
        report.cone_holds += 1;
        let sl = metrize_vector(space, &lhs)?.value;
        let unconditional = psi.eval(space.norm(&dxy));
        let mut ok = record(&mut report, x, y, "psi-of-norm", &lhs, &rhs, sl, unconditional, tau, false);
        if let Some(b) = branch {
            let name = match b {
                Branch::PsiDecreasing => "psi-decreasing",
                Branch::PhiLinearIncreasing => "phi-linear-increasing",
            };
            let sr = psi.eval(metrize_vector(space, &dxy)?.value);
            ok &= record(&mut report, x, y, name, &lhs, &rhs, sl, sr, tau, false);
        }
        if ok {
            report.scalar_holds_given_cone += 1;
        }
    }
    Ok(report)
}

/// The twelve contractive conditions. JSON: `{"kind": "banach", "alpha": 0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContractiveCondition {
    /// `D(Tx,Ty) ≤ αD(x,y)`.
    Banach { alpha: f64 },
    /// `D(Tx,Ty) ≤ λ(D(Tx,x) + D(Ty,y))`.
    Kannan { lambda: f64 },
    /// `D(Tx,Ty) ≤ λ(D(Tx,y) + D(Ty,x))`.
    Chatterjea { lambda: f64 },
    /// `D(Tx,Ty) ≤ αD(x,y) + βD(Tx,y)`.
    TwoTerm { alpha: f64, beta: f64 },
    /// `D(Tx,Ty) ≤ αu` for some `u ∈ {D(x,y), D(x,Tx), D(y,Ty), ½[D(x,Ty) + D(y,Tx)]}`.
    QuasiMax5 { alpha: f64 },
    /// `D(Tx,Ty) ≤ βu` for some `u ∈ {D(x,y), D(x,Tx), D(y,Ty), ½D(x,Ty), ½D(y,Tx)}`.
    QuasiMax5Half { beta: f64 },
    /// `D(Tx,Ty) ≤ βu` for some `u ∈ {D(x,y), ½[D(x,Tx) + D(y,Ty)], ½[D(x,Ty) + D(y,Tx)]}`.
    ZamfirescuMax3 { beta: f64 },
    /// `D(Tx,Ty) ≤ a₁D(x,y) + a₂D(x,Tx) + a₃D(y,Ty) + a₄D(x,Ty) + a₅D(y,Tx)`, `Σaᵢ < 1`.
    FiveCoefficient { a1: f64, a2: f64, a3: f64, a4: f64, a5: f64 },
    /// `D(Tx,Ty) ≤ (β/2)u` for some `u ∈ {D(x,y), D(x,Tx), D(y,Ty), D(x,Ty), D(y,Tx)}`.
    HalfBetaMax5 { beta: f64 },
    /// `D(Tx,Ty) ≤ a₁D(x,y) + a₂D(x,Tx) + a₃D(y,Ty) + a₄[D(x,Ty) + D(y,Tx)]`,
    /// `a₁ + a₂ + a₃ + 2a₄ < 1`.
    HardyRogersSym { a1: f64, a2: f64, a3: f64, a4: f64 },
    /// `D(Tᵐx, Tⁿy) ≤ kD(z,t)` for every `z ≠ t` in `{x, y, Tᵖx, T^q y}`,
    /// `1 ≤ p ≤ m`, `1 ≤ q ≤ n`; with `existential` set, for some such pair.
    IteratedPower {
        m: usize,
        n: usize,
        k: f64,
        #[serde(default)]
        existential: bool,
    },
    /// `D(Tx,Ty) ≤ D*(x,y)`; `D*` is supplied programmatically.
    Dominance {
        #[serde(skip)]
        dstar: Option<Box<ConeMetric>>,
    },
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64, lo_open: bool) -> Result<()> {
    let ok = v.is_finite() && (if lo_open { v > lo } else { v >= lo }) && v < hi;
    if ok {
        Ok(())
    } else {
        let open = if lo_open { "(" } else { "[" };
        Err(Error::CoefficientOutOfRange(format!("{name} = {v} not in {open}{lo}, {hi})")))
    }
}

impl ContractiveCondition {
    pub fn name(&self) -> &'static str {
        match self {
            ContractiveCondition::Banach { .. } => "banach",
            ContractiveCondition::Kannan { .. } => "kannan",
            ContractiveCondition::Chatterjea { .. } => "chatterjea",
            ContractiveCondition::TwoTerm { .. } => "two-term",
            ContractiveCondition::QuasiMax5 { .. } => "quasi-max5",
            ContractiveCondition::QuasiMax5Half { .. } => "quasi-max5-half",
            ContractiveCondition::ZamfirescuMax3 { .. } => "zamfirescu-max3",
            ContractiveCondition::FiveCoefficient { .. } => "five-coefficient",
            ContractiveCondition::HalfBetaMax5 { .. } => "half-beta-max5",
            ContractiveCondition::HardyRogersSym { .. } => "hardy-rogers-sym",
            ContractiveCondition::IteratedPower { .. } => "iterated-power",
            ContractiveCondition::Dominance { .. } => "dominance",
        }
    }

    /// Coefficient ranges: `α, β ∈ [0, 1)`, `λ ∈ [0, ½)`, max-type coefficients
    /// in `(0, 1)`, nonnegative weighted sums below `1`, `k ∈ [0, 1)`, `m, n ≥ 1`.
    pub fn validate(&self) -> Result<()> {
        use ContractiveCondition::*;
        match self {
            Banach { alpha } => in_range("alpha", *alpha, 0.0, 1.0, false),
            Kannan { lambda } | Chatterjea { lambda } => in_range("lambda", *lambda, 0.0, 0.5, false),
            TwoTerm { alpha, beta } => {
                in_range("alpha", *alpha, 0.0, 1.0, false)?;
                in_range("beta", *beta, 0.0, 1.0, false)
            }
            QuasiMax5 { alpha } => in_range("alpha", *alpha, 0.0, 1.0, true),
            QuasiMax5Half { beta } | ZamfirescuMax3 { beta } | HalfBetaMax5 { beta } => {
                in_range("beta", *beta, 0.0, 1.0, true)
            }
            FiveCoefficient { a1, a2, a3, a4, a5 } => {
                for (i, a) in [a1, a2, a3, a4, a5].iter().enumerate() {
                    in_range(&format!("a{}", i + 1), **a, 0.0, 1.0, false)?;
                }
                in_range("a1 + a2 + a3 + a4 + a5", a1 + a2 + a3 + a4 + a5, 0.0, 1.0, false)
            }
            HardyRogersSym { a1, a2, a3, a4 } => {
                for (i, a) in [a1, a2, a3, a4].iter().enumerate() {
                    in_range(&format!("a{}", i + 1), **a, 0.0, 1.0, false)?;
                }
                in_range("a1 + a2 + a3 + 2·a4", a1 + a2 + a3 + 2.0 * a4, 0.0, 1.0, false)
            }
            IteratedPower { m, n, k, .. } => {
                if *m < 1 || *n < 1 {
                    return Err(Error::CoefficientOutOfRange(format!("need m, n ≥ 1, got m = {m}, n = {n}")));
                }
                in_range("k", *k, 0.0, 1.0, false)
            }
            Dominance { .. } => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Single,
    Exists,
    ForAll,
}

/// `D(lhs.0, lhs.1)` against candidates `Σ coeff·D(p, q)`.
struct Instance {
    lhs: (Point, Point),
    candidates: Vec<Vec<(f64, Point, Point)>>,
    mode: Mode,
}

fn build_instance(
    cond: &ContractiveCondition,
    t: &dyn PointMap,
    domain: Option<&ConeMetric>,
    x: &Point,
    y: &Point,
) -> Result<Instance> {
    use ContractiveCondition::*;
    let ap = |p: &Point| match domain {
        Some(cm) => apply_within(cm, t, p),
        None => t.apply(p),
    };
    let (tx, ty) = (ap(x)?, ap(y)?);
    let pair = |c: f64, p: &Point, q: &Point| (c, p.clone(), q.clone());
    let single = |terms: Vec<(f64, Point, Point)>| (vec![terms], Mode::Single);
    let (candidates, mode) = match cond {
        Banach { alpha } => single(vec![pair(*alpha, x, y)]),
        Kannan { lambda } => single(vec![pair(*lambda, &tx, x), pair(*lambda, &ty, y)]),
        Chatterjea { lambda } => single(vec![pair(*lambda, &tx, y), pair(*lambda, &ty, x)]),
        TwoTerm { alpha, beta } => single(vec![pair(*alpha, x, y), pair(*beta, &tx, y)]),
        QuasiMax5 { alpha } => (
            vec![
                vec![pair(*alpha, x, y)],
                vec![pair(*alpha, x, &tx)],
                vec![pair(*alpha, y, &ty)],
                vec![pair(alpha / 2.0, x, &ty), pair(alpha / 2.0, y, &tx)],
            ],
            Mode::Exists,
        ),
        QuasiMax5Half { beta } => (
            vec![
                vec![pair(*beta, x, y)],
                vec![pair(*beta, x, &tx)],
                vec![pair(*beta, y, &ty)],
                vec![pair(beta / 2.0, x, &ty)],
                vec![pair(beta / 2.0, y, &tx)],
            ],
            Mode::Exists,
        ),
        ZamfirescuMax3 { beta } => (
            vec![
                vec![pair(*beta, x, y)],
                vec![pair(beta / 2.0, x, &tx), pair(beta / 2.0, y, &ty)],
                vec![pair(beta / 2.0, x, &ty), pair(beta / 2.0, y, &tx)],
            ],
            Mode::Exists,
        ),
        FiveCoefficient { a1, a2, a3, a4, a5 } => single(vec![
            pair(*a1, x, y),
            pair(*a2, x, &tx),
            pair(*a3, y, &ty),
            pair(*a4, x, &ty),
            pair(*a5, y, &tx),
        ]),
        HalfBetaMax5 { beta } => {
            let h = beta / 2.0;
            (
                vec![
                    vec![pair(h, x, y)],
                    vec![pair(h, x, &tx)],
                    vec![pair(h, y, &ty)],
                    vec![pair(h, x, &ty)],
                    vec![pair(h, y, &tx)],
                ],
                Mode::Exists,
            )
        }
        HardyRogersSym { a1, a2, a3, a4 } => single(vec![
            pair(*a1, x, y),
            pair(*a2, x, &tx),
            pair(*a3, y, &ty),
            pair(*a4, x, &ty),
            pair(*a4, y, &tx),
        ]),
        IteratedPower { m, n, k, existential } => {
            let mut set = vec![x.clone(), y.clone()];
            let mut orbit_x = Vec::with_capacity(*m);
            let mut cur = x.clone();
            for _ in 0..*m {
                cur = ap(&cur)?;
                orbit_x.push(cur.clone());
            }
            let mut orbit_y = Vec::with_capacity(*n);
            let mut cur = y.clone();
            for _ in 0..*n {
                cur = ap(&cur)?;
                orbit_y.push(cur.clone());
            }
            set.extend(orbit_x.iter().cloned());
            set.extend(orbit_y.iter().cloned());
            let mut distinct: Vec<Point> = Vec::new();
            for p in set {
                if !distinct.contains(&p) {
                    distinct.push(p);
                }
            }
            let mut cands = Vec::new();
            for i in 0..distinct.len() {
                for j in i + 1..distinct.len() {
                    cands.push(vec![pair(*k, &distinct[i], &distinct[j])]);
                }
            }
            let lhs = (orbit_x[m - 1].clone(), orbit_y[n - 1].clone());
            let mode = if *existential { Mode::Exists } else { Mode::ForAll };
            return Ok(Instance {
                lhs,
                candidates: cands,
                mode,
            });
        }
        Dominance { .. } => {
            return Err(Error::InvalidArgument(
                "the dominance condition compares two cone metrics; use check_dominance_transfer".into(),
            ))
        }
    };
    Ok(Instance {
        lhs: (tx, ty),
        candidates,
        mode,
    })
}

fn combine_cone(cm: &ConeMetric, terms: &[(f64, Point, Point)]) -> Result<Vec<f64>> {
    let mut v = vec![0.0; cm.space().dim()];
    for (c, p, q) in terms {
        v = linalg::axpy(&v, *c, &cm.eval(p, q)?);
    }
    Ok(v)
}

fn combine_scalar(d: &dyn Fn(&Point, &Point) -> Result<f64>, terms: &[(f64, Point, Point)]) -> Result<f64> {
    let mut s = 0.0;
    for (c, p, q) in terms {
        s += c * d(p, q)?;
    }
    Ok(s)
}

/// Evaluates the cone-side premise; returns the witnessing right-hand side.
fn cone_side(inst: &Instance, cm: &ConeMetric, tau: f64) -> Result<(bool, Vec<f64>, Vec<f64>)> {
    let space = cm.space();
    let lhs = cm.eval(&inst.lhs.0, &inst.lhs.1)?;
    let holds = |rhs: &[f64]| cone::cone_contains(space.cone(), &linalg::sub(rhs, &lhs), tau);
    let mut witness = vec![0.0; space.dim()];
    let ok = match inst.mode {
        Mode::Single => {
            witness = combine_cone(cm, &inst.candidates[0])?;
            holds(&witness)?
        }
        Mode::Exists => {
            let mut found = false;
            for c in &inst.candidates {
                let rhs = combine_cone(cm, c)?;
                if holds(&rhs)? {
                    witness = rhs;
                    found = true;
                    break;
                }
            }
            found
        }
        Mode::ForAll => {
            let mut all = true;
            for c in &inst.candidates {
                let rhs = combine_cone(cm, c)?;
                if !holds(&rhs)? {
                    witness = rhs;
                    all = false;
                    break;
                }
            }
            all
        }
    };
    Ok((ok, lhs, witness))
}

/// Scalar right-hand side: the single sum, the max over an existential set, or
/// the min over a universal one.
fn scalar_side(inst: &Instance, d: &dyn Fn(&Point, &Point) -> Result<f64>) -> Result<(f64, f64)> {
    let lhs = d(&inst.lhs.0, &inst.lhs.1)?;
    let vals: Vec<f64> = inst
        .candidates
        .iter()
        .map(|c| combine_scalar(d, c))
        .collect::<Result<_>>()?;
    let rhs = match inst.mode {
        Mode::Single => vals[0],
        Mode::Exists => vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        Mode::ForAll => vals.iter().cloned().fold(f64::INFINITY, f64::min),
    };
    Ok((lhs, rhs))
}

/// Truth of the cone-order premise of `cond` at `(x, y)`, up to membership slack `τ`.
pub fn eval_condition_cone(
    cond: &ContractiveCondition,
    cm: &ConeMetric,
    t: &dyn PointMap,
    x: &Point,
    y: &Point,
    tau: f64,
) -> Result<bool> {
    cond.validate()?;
    if let ContractiveCondition::Dominance { dstar } = cond {
        let dstar = dstar
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("dominance needs D*".into()))?;
        let lhs = cm.eval(&apply_within(cm, t, x)?, &apply_within(cm, t, y)?)?;
        let rhs = dstar.eval(x, y)?;
        return cone::cone_contains(cm.space().cone(), &linalg::sub(&rhs, &lhs), tau);
    }
    let inst = build_instance(cond, t, Some(cm), x, y)?;
    Ok(cone_side(&inst, cm, tau)?.0)
}

/// Truth of the real-valued conclusion of `cond` at `(x, y)` for the metric `d`,
/// with slack `τ`. For dominance, `d` compares against itself.
pub fn eval_condition_scalar(
    cond: &ContractiveCondition,
    d: &dyn Fn(&Point, &Point) -> Result<f64>,
    t: &dyn PointMap,
    x: &Point,
    y: &Point,
    tau: f64,
) -> Result<bool> {
    cond.validate()?;
    if let ContractiveCondition::Dominance { .. } = cond {
        return Ok(d(&t.apply(x)?, &t.apply(y)?)? <= d(x, y)? + tau);
    }
    let inst = build_instance(cond, t, None, x, y)?;
    let (l, r) = scalar_side(&inst, d)?;
    Ok(l <= r + tau)
}

/// Over all pairs where the cone premise holds (membership slack from the
/// space), checks the scalar conclusion for the metrized `d` with slack `τ`.
pub fn check_corollary(
    cond: &ContractiveCondition,
    cm: &ConeMetric,
    t: &dyn PointMap,
    pairs: &[(Point, Point)],
    tau: f64,
) -> Result<TransferReport> {
    cond.validate()?;
    if let ContractiveCondition::Dominance { dstar } = cond {
        let dstar = dstar
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("dominance needs D*".into()))?;
        return check_dominance_transfer(cm, dstar, t, pairs, tau);
    }
    let metric = equivalent_metric(cm);
    let d = |p: &Point, q: &Point| metric.distance(p, q);
    let mut report = TransferReport::default();
    for (x, y) in pairs {
        let inst = build_instance(cond, t, Some(cm), x, y)?;
        report.samples_checked += 1;
        let (holds, lhs, rhs) = cone_side(&inst, cm, cm.space().tolerance())?;
        if !holds {
            continue;
        }
        report.cone_holds += 1;
        let (sl, sr) = scalar_side(&inst, &d)?;
        record(&mut report, x, y, cond.name(), &lhs, &rhs, sl, sr, tau, true);
    }
    Ok(report)
}
