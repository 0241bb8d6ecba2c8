//! Cones in `R^n`, the partial orders they induce, and the projection machinery
//! used by the metrization solver.

mod nnls;
mod norm;
mod projection;
mod sample;

pub use nnls::{nnls, NnlsSolution};
pub use norm::NormSpec;
pub use projection::{project, project_onto_cone, project_onto_dual, Projection};
pub use sample::{canonical_rays, sample_cone_point};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, check_dim};

/// Default relative membership tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default absolute slack used for the strict order `≪`.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// A closed convex cone in `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    /// The nonnegative orthant.
    Orthant { dim: usize },
    /// `{(x, t) : t ≥ ‖x‖₂}` with `t` stored last.
    SecondOrder { dim: usize },
    /// Nonnegative combinations of the listed generators.
    Generators { dim: usize, generators: Vec<Vec<f64>> },
    /// `{v : A v ≥ 0}` for the listed rows of `A`.
    Halfspaces { dim: usize, rows: Vec<Vec<f64>> },
}

impl ConeSpec {
    pub fn orthant(dim: usize) -> Self {
        ConeSpec::Orthant { dim }
    }

    pub fn second_order(dim: usize) -> Self {
        ConeSpec::SecondOrder { dim }
    }

    pub fn generators(generators: Vec<Vec<f64>>) -> Result<Self> {
        let dim = common_dim(&generators, "generator")?;
        Ok(ConeSpec::Generators { dim, generators })
    }

    pub fn halfspaces(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = common_dim(&rows, "halfspace row")?;
        Ok(ConeSpec::Halfspaces { dim, rows })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Orthant { dim }
            | ConeSpec::SecondOrder { dim }
            | ConeSpec::Generators { dim, .. }
            | ConeSpec::Halfspaces { dim, .. } => *dim,
        }
    }

    /// Orthant and second-order cones coincide with their duals.
    pub fn is_self_dual(&self) -> bool {
        matches!(self, ConeSpec::Orthant { .. } | ConeSpec::SecondOrder { .. })
    }

    fn nnls_cap(&self) -> usize {
        100 * self.dim().max(1)
    }
}

fn common_dim(vs: &[Vec<f64>], what: &str) -> Result<usize> {
    let first = vs
        .first()
        .ok_or_else(|| Error::InvalidCone(format!("at least one {what} is required")))?;
    if first.is_empty() {
        return Err(Error::InvalidCone(format!("{what}s must be nonempty vectors")));
    }
    for v in vs {
        check_dim(first.len(), v)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCone(format!("{what} has a non-finite entry")));
        }
    }
    Ok(first.len())
}

fn rel_tol(tau: f64, v: &[f64]) -> f64 {
    tau * (1.0 + linalg::norm2(v))
}

/// How far `v` lies outside the cone; zero for members.
///
/// Orthant: `max(0, −min vᵢ)`; second-order: `max(0, ‖x‖ − t)`; halfspaces:
/// `max(0, −min (Av)ᵢ)`; generators: the nonnegative least-squares residual.
pub fn membership_violation(cone: &ConeSpec, v: &[f64]) -> Result<f64> {
    check_dim(cone.dim(), v)?;
    let viol = match cone {
        ConeSpec::Orthant { .. } => -v.iter().cloned().fold(0.0, f64::min),
        ConeSpec::SecondOrder { .. } => {
            let (x, t) = v.split_at(v.len() - 1);
            (linalg::norm2(x) - t[0]).max(0.0)
        }
        ConeSpec::Halfspaces { rows, .. } => -rows
            .iter()
            .map(|a| linalg::dot(a, v))
            .fold(0.0, f64::min),
        ConeSpec::Generators { generators, .. } => {
            match nnls(generators, v, cone.nnls_cap()) {
                Ok(sol) => sol.residual,
                Err(Error::NotConverged { residual, .. }) => residual,
                Err(e) => return Err(e),
            }
        }
    };
    Ok(viol.max(0.0))
}

/// `v ∈ P` up to the relative slack `τ·(1 + ‖v‖₂)`.
pub fn cone_contains(cone: &ConeSpec, v: &[f64], tau: f64) -> Result<bool> {
    Ok(membership_violation(cone, v)? <= rel_tol(tau, v))
}

/// Smallest slack over the cone's defining inequalities, with halfspace rows and
/// facet normals scaled to unit length. Negative outside the cone and
/// `-∞` for generator cones that are not full-dimensional.
pub fn interior_slack(cone: &ConeSpec, v: &[f64]) -> Result<f64> {
    check_dim(cone.dim(), v)?;
    Ok(match cone {
        ConeSpec::Orthant { .. } => v.iter().cloned().fold(f64::INFINITY, f64::min),
        ConeSpec::SecondOrder { .. } => {
            let (x, t) = v.split_at(v.len() - 1);
            t[0] - linalg::norm2(x)
        }
        ConeSpec::Halfspaces { rows, .. } => rows
            .iter()
            .filter(|a| linalg::norm2(a) > 0.0)
            .map(|a| linalg::dot(a, v) / linalg::norm2(a))
            .fold(f64::INFINITY, f64::min),
        ConeSpec::Generators { .. } => {
            let normals = facets(cone)?;
            if normals.is_empty() {
                f64::NEG_INFINITY
            } else {
                normals
                    .iter()
                    .map(|n| linalg::dot(n, v))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    })
}

/// Euclidean distance from `v` to the boundary of the cone (nonpositive outside).
pub fn inradius(cone: &ConeSpec, v: &[f64]) -> Result<f64> {
    let slack = interior_slack(cone, v)?;
    Ok(match cone {
        ConeSpec::SecondOrder { dim } if *dim >= 2 => slack / std::f64::consts::SQRT_2,
        _ => slack,
    })
}

/// Membership in the interior with slack at least `margin` in every defining inequality.
pub fn interior_contains(cone: &ConeSpec, v: &[f64], margin: f64) -> Result<bool> {
    if margin.is_nan() || margin <= 0.0 {
        return Err(Error::NonPositiveMargin(margin));
    }
    Ok(interior_slack(cone, v)? >= margin)
}

/// `⟨v, p⟩ ≥ −τ·(1+‖v‖₂)` for every unit `p ∈ P`.
pub fn dual_contains(cone: &ConeSpec, v: &[f64], tau: f64) -> Result<bool> {
    check_dim(cone.dim(), v)?;
    match cone {
        ConeSpec::Orthant { .. } | ConeSpec::SecondOrder { .. } => cone_contains(cone, v, tau),
        ConeSpec::Generators { generators, .. } => {
            let tol = rel_tol(tau, v);
            Ok(generators.iter().all(|g| {
                let n = linalg::norm2(g);
                n == 0.0 || linalg::dot(g, v) / n >= -tol
            }))
        }
        ConeSpec::Halfspaces { dim, rows } => {
            // P* is generated by the rows of A
            let dual = ConeSpec::Generators {
                dim: *dim,
                generators: rows.clone(),
            };
            cone_contains(&dual, v, tau)
        }
    }
}

/// Unit inward facet normals of a full-dimensional generator cone, found by
/// enumerating `(dim−1)`-subsets of generators. Empty when the generators do not
/// span `R^dim`. Other cone kinds return their defining normals.
pub fn facets(cone: &ConeSpec) -> Result<Vec<Vec<f64>>> {
    match cone {
        ConeSpec::Orthant { dim } => Ok((0..*dim).map(|i| unit(*dim, i)).collect()),
        ConeSpec::Halfspaces { rows, .. } => Ok(rows
            .iter()
            .filter(|a| linalg::norm2(a) > 0.0)
            .map(|a| linalg::scale(1.0 / linalg::norm2(a), a))
            .collect()),
        ConeSpec::SecondOrder { .. } => Err(Error::InvalidArgument(
            "the second-order cone is not polyhedral".into(),
        )),
        ConeSpec::Generators { dim, generators } => generator_facets(*dim, generators),
    }
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

fn rank(vs: &[Vec<f64>], dim: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(dim, vs.len(), |i, j| vs[j][i]);
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > 1e-10 * smax.max(1e-300)).count()
}

const MAX_FACET_SUBSETS: usize = 200_000;

fn generator_facets(dim: usize, generators: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let gens: Vec<Vec<f64>> = generators
        .iter()
        .filter(|g| linalg::norm2(g) > 0.0)
        .map(|g| linalg::scale(1.0 / linalg::norm2(g), g))
        .collect();
    if rank(&gens, dim) < dim {
        return Ok(vec![]);
    }
    if dim == 1 {
        return Ok(vec![vec![gens[0][0].signum()]]);
    }
    if binomial(gens.len(), dim - 1) > MAX_FACET_SUBSETS {
        return Err(Error::InvalidCone(format!(
            "too many generators ({}) for facet enumeration in dimension {dim}",
            gens.len()
        )));
    }
    let eps = 1e-10;
    let mut normals: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(gens.len(), dim - 1) {
        let rows: Vec<&Vec<f64>> = subset.iter().map(|&i| &gens[i]).collect();
        let Some(n) = cofactor_normal(&rows, dim) else { continue };
        let dots: Vec<f64> = gens.iter().map(|g| linalg::dot(&n, g)).collect();
        let n = if dots.iter().all(|d| *d >= -eps) {
            n
        } else if dots.iter().all(|d| *d <= eps) {
            linalg::neg(&n)
        } else {
            continue;
        };
        if !normals.iter().any(|m| linalg::dot(m, &n) > 1.0 - 1e-9) {
            normals.push(n);
        }
    }
    Ok(normals)
}

/// Generalized cross product of `dim − 1` vectors, normalized; `None` when they are dependent.
fn cofactor_normal(rows: &[&Vec<f64>], dim: usize) -> Option<Vec<f64>> {
    let k = dim - 1;
    let mut n = vec![0.0; dim];
    for (i, ni) in n.iter_mut().enumerate() {
        let minor = DMatrix::from_fn(k, k, |r, c| rows[r][if c < i { c } else { c + 1 }]);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        *ni = sign * minor.determinant();
    }
    let len = linalg::norm2(&n);
    (len > 1e-10).then(|| linalg::scale(1.0 / len, &n))
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Outcome of [`validate_cone`]. Failures are collected, never raised.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeValidation {
    pub pointed: bool,
    /// A vector with unit interior slack, when one exists.
    pub interior_witness: Option<Vec<f64>>,
    pub nonzero_generators: bool,
    pub failures: Vec<String>,
}

impl ConeValidation {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Minimum-norm point of the convex hull of the normalized vectors, via a
/// penalized nonnegative least-squares fit of the simplex constraint.
fn min_norm_hull_point(vs: &[Vec<f64>], dim: usize) -> Vec<f64> {
    const WEIGHT: f64 = 1e4;
    let cols: Vec<Vec<f64>> = vs
        .iter()
        .map(|v| {
            let mut c = linalg::scale(1.0 / linalg::norm2(v), v);
            c.push(WEIGHT);
            c
        })
        .collect();
    let mut b = vec![0.0; dim];
    b.push(WEIGHT);
    let lambda = match nnls(&cols, &b, 100 * (dim + vs.len())) {
        Ok(s) => s.x,
        Err(Error::NotConverged { best, .. }) => best,
        Err(_) => return vec![0.0; dim],
    };
    let total: f64 = lambda.iter().sum();
    if total <= 0.0 {
        return vec![0.0; dim];
    }
    let normalized: Vec<Vec<f64>> = vs.iter().map(|v| linalg::scale(1.0 / linalg::norm2(v), v)).collect();
    linalg::scale(1.0 / total, &linalg::combine(&normalized, &lambda, dim))
}

/// Check closedness-compatible structure, pointedness (`P ∩ −P = {0}`) and a
/// nonempty interior.
pub fn validate_cone(cone: &ConeSpec, tau: f64) -> ConeValidation {
    let mut failures = Vec::new();
    let dim = cone.dim();
    if dim == 0 {
        failures.push("cone dimension must be positive".to_string());
        return ConeValidation {
            pointed: false,
            interior_witness: None,
            nonzero_generators: false,
            failures,
        };
    }
    let tol = tau.max(1e-12);
    let (pointed, nonzero_generators, witness) = match cone {
        ConeSpec::Orthant { .. } => (true, true, Some(vec![1.0; dim])),
        ConeSpec::SecondOrder { .. } => (true, true, Some(unit(dim, dim - 1))),
        ConeSpec::Generators { generators, .. } => {
            let nonzero = generators.iter().all(|g| linalg::norm2(g) > 0.0);
            if !nonzero {
                failures.push("generators must be nonzero".to_string());
            }
            let live: Vec<Vec<f64>> = generators.iter().filter(|g| linalg::norm2(g) > 0.0).cloned().collect();
            let pointed = if live.is_empty() {
                false
            } else {
                // z separates every generator from the origin iff no nontrivial
                // nonnegative combination of generators vanishes
                let z = min_norm_hull_point(&live, dim);
                live.iter()
                    .all(|g| linalg::dot(g, &z) / linalg::norm2(g) > tol)
            };
            let witness = if !live.is_empty() && rank(&live, dim) == dim {
                Some(live.iter().fold(vec![0.0; dim], |acc, g| {
                    linalg::axpy(&acc, 1.0 / linalg::norm2(g), g)
                }))
            } else {
                None
            };
            (pointed, nonzero, witness)
        }
        ConeSpec::Halfspaces { rows, .. } => {
            if rows.iter().any(|a| linalg::norm2(a) == 0.0) {
                failures.push("halfspace rows must be nonzero".to_string());
            }
            let live: Vec<Vec<f64>> = rows.iter().filter(|a| linalg::norm2(a) > 0.0).cloned().collect();
            let pointed = rank(&live, dim) == dim;
            let witness = if live.is_empty() {
                Some(vec![1.0; dim])
            } else {
                let z = min_norm_hull_point(&live, dim);
                live.iter()
                    .all(|a| linalg::dot(a, &z) / linalg::norm2(a) > tol)
                    .then_some(z)
            };
            (pointed, true, witness)
        }
    };
    if !pointed {
        failures.push("cone is not pointed: it contains a line".to_string());
    }
    let witness = witness.and_then(|w| {
        let s = interior_slack(cone, &w).ok()?;
        (s > tol).then(|| linalg::scale(1.0 / s, &w))
    });
    if witness.is_none() {
        failures.push("cone has empty interior".to_string());
    }
    ConeValidation {
        pointed,
        interior_witness: witness,
        nonzero_generators,
        failures,
    }
}

/// The ordered vector space `(R^dim, ‖·‖, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedVectorSpace {
    dim: usize,
    norm: NormSpec,
    cone: ConeSpec,
    tolerance: f64,
}

impl OrderedVectorSpace {
    /// Builds a space, rejecting quasi-norms and cones that fail [`validate_cone`].
    pub fn new(norm: NormSpec, cone: ConeSpec) -> Result<Self> {
        Self::build(norm, cone, DEFAULT_TOLERANCE, false)
    }

    /// Like [`OrderedVectorSpace::new`] but admits an `ℓq` quasi-norm with `q < 1`.
    /// Only the orthant is accepted as the cone in that case.
    pub fn with_quasi_norm(norm: NormSpec, cone: ConeSpec) -> Result<Self> {
        if norm.is_quasi() && !matches!(cone, ConeSpec::Orthant { .. }) {
            return Err(Error::InvalidNorm(
                "quasi-norms are only supported on the orthant".into(),
            ));
        }
        Self::build(norm, cone, DEFAULT_TOLERANCE, true)
    }

    pub fn euclidean_orthant(dim: usize) -> Self {
        Self::new(NormSpec::euclidean(), ConeSpec::orthant(dim)).expect("orthant is a valid cone")
    }

    fn build(norm: NormSpec, cone: ConeSpec, tolerance: f64, allow_quasi: bool) -> Result<Self> {
        let dim = cone.dim();
        norm.validate(dim, allow_quasi)?;
        let report = validate_cone(&cone, tolerance);
        if !report.passed() {
            return Err(Error::InvalidCone(report.failures.join("; ")));
        }
        Ok(OrderedVectorSpace {
            dim,
            norm,
            cone,
            tolerance,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be nonnegative, got {tolerance}"
            )));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_spec(&self) -> &NormSpec {
        &self.norm
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.norm.norm(v)
    }

    pub fn contains(&self, v: &[f64]) -> Result<bool> {
        cone_contains(&self.cone, v, self.tolerance)
    }

    /// `x ≤ y`, i.e. `y − x ∈ P`.
    pub fn leq(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        check_dim(self.dim, x)?;
        check_dim(self.dim, y)?;
        cone_contains(&self.cone, &linalg::sub(y, x), self.tolerance)
    }

    /// `x ≪ y`, i.e. `y − x` lies in the interior with slack `margin`.
    pub fn strictly_less(&self, x: &[f64], y: &[f64], margin: f64) -> Result<bool> {
        check_dim(self.dim, x)?;
        check_dim(self.dim, y)?;
        interior_contains(&self.cone, &linalg::sub(y, x), margin)
    }

    /// A vector with unit interior slack.
    pub fn interior_witness(&self) -> Vec<f64> {
        validate_cone(&self.cone, self.tolerance)
            .interior_witness
            .expect("validated at construction")
    }
}

/// Lower bound on the normality constant `K` (`0 ≤ x ≤ y ⇒ ‖x‖ ≤ K‖y‖`):
/// the largest ratio `‖x‖/‖y‖` over sampled ordered pairs plus pairs built from
/// the cone's canonical rays.
pub fn estimate_normality_constant(
    space: &OrderedVectorSpace,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    let cone = space.cone();
    let mut best: f64 = 0.0;
    let mut consider = |x: &[f64], y: &[f64]| {
        let ny = space.norm(y);
        if ny > 0.0 && ny.is_finite() {
            best = best.max(space.norm(x) / ny);
        }
    };
    let rays = canonical_rays(cone);
    for r in &rays {
        for s in &rays {
            for w in [0.25, 0.5, 1.0, 2.0] {
                consider(r, &linalg::axpy(r, w, s));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        let x = sample_cone_point(cone, &mut rng)?;
        let step = sample_cone_point(cone, &mut rng)?;
        consider(&x, &linalg::add(&x, &step));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obtuse() -> ConeSpec {
        ConeSpec::generators(vec![vec![1.0, 0.0], vec![-0.8, 0.6]]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let o = ConeSpec::orthant(2);
        assert!(cone_contains(&o, &[1.0, 0.0], 1e-9).unwrap());
        assert!(!cone_contains(&o, &[-1.0, 2.0], 1e-9).unwrap());
        assert!(cone_contains(&obtuse(), &[0.2, 0.6], 1e-9).unwrap());
        assert!(!cone_contains(&obtuse(), &[1.0, -0.1], 1e-9).unwrap());
        assert!(matches!(
            cone_contains(&o, &[1.0], 1e-9),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn interior_examples() {
        let o = ConeSpec::orthant(2);
        assert!(interior_contains(&o, &[1.0, 1.0], 0.5).unwrap());
        assert!(!interior_contains(&o, &[1.0, 0.0], 1e-6).unwrap());
        assert!(interior_contains(&ConeSpec::second_order(2), &[0.0, 1.0], 0.5).unwrap());
        assert!(matches!(
            interior_contains(&o, &[1.0, 1.0], 0.0),
            Err(Error::NonPositiveMargin(_))
        ));
    }

    #[test]
    fn order_examples() {
        let s = OrderedVectorSpace::euclidean_orthant(2);
        assert!(s.leq(&[0.0, 0.0], &[1.0, 2.0]).unwrap());
        assert!(!s.leq(&[1.0, 0.0], &[0.0, 1.0]).unwrap());
        assert!(s.leq(&[0.3, -7.0], &[0.3, -7.0]).unwrap());
        assert!(s.strictly_less(&[0.0, 0.0], &[1.0, 1.0], 0.1).unwrap());
        assert!(!s.strictly_less(&[0.0, 0.0], &[1.0, 0.0], 1e-6).unwrap());
        let soc = OrderedVectorSpace::new(NormSpec::euclidean(), ConeSpec::second_order(2)).unwrap();
        assert!(soc.strictly_less(&[0.0, 0.0], &[0.0, 2.0], 1.0).unwrap());
    }

    #[test]
    fn dual_examples() {
        assert!(dual_contains(&ConeSpec::orthant(2), &[1.0, 1.0], 1e-9).unwrap());
        assert!(!dual_contains(&obtuse(), &[1.0, 0.0], 1e-9).unwrap());
        assert!(dual_contains(&obtuse(), &[0.2, 0.6], 1e-9).unwrap());
        // P = {Av ≥ 0} with A = I is the orthant; its dual is itself
        let h = ConeSpec::halfspaces(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(dual_contains(&h, &[0.5, 2.0], 1e-9).unwrap());
        assert!(!dual_contains(&h, &[0.5, -2.0], 1e-9).unwrap());
    }

    #[test]
    fn validation_examples() {
        assert!(validate_cone(&ConeSpec::orthant(2), 1e-9).passed());

        let line = ConeSpec::generators(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let r = validate_cone(&line, 1e-9);
        assert!(!r.pointed);
        assert!(!r.passed());

        let h = ConeSpec::halfspaces(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = validate_cone(&h, 1e-9);
        assert!(r.passed(), "{:?}", r.failures);
        let w = r.interior_witness.unwrap();
        assert!((w[0] - 1.0).abs() < 1e-6 && (w[1] - 1.0).abs() < 1e-6, "{w:?}");

        let zero = ConeSpec::generators(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(!validate_cone(&zero, 1e-9).nonzero_generators);

        let flat = ConeSpec::generators(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let r = validate_cone(&flat, 1e-9);
        assert!(r.pointed);
        assert!(r.interior_witness.is_none());

        let slab = ConeSpec::halfspaces(vec![vec![1.0, 0.0]]).unwrap();
        assert!(!validate_cone(&slab, 1e-9).pointed);
        assert!(OrderedVectorSpace::new(NormSpec::euclidean(), slab).is_err());
    }

    #[test]
    fn facets_of_obtuse_cone() {
        let f = facets(&obtuse()).unwrap();
        assert_eq!(f.len(), 2);
        // (0.2, 0.6) = g1 + g2 sits inside; each normal sees both generators nonnegatively
        for n in &f {
            assert!(linalg::dot(n, &[1.0, 0.0]) >= -1e-12);
            assert!(linalg::dot(n, &[-0.8, 0.6]) >= -1e-12);
        }
        let cube = ConeSpec::generators(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(facets(&cube).unwrap().len(), 3);
    }

    #[test]
    fn normality_examples() {
        let s = OrderedVectorSpace::euclidean_orthant(3);
        let k = estimate_normality_constant(&s, 500, 1).unwrap();
        assert!(k <= 1.0 + 1e-9 && k > 0.5);

        let l1 = OrderedVectorSpace::new(NormSpec::lp(1.0).unwrap(), ConeSpec::orthant(2)).unwrap();
        assert!(estimate_normality_constant(&l1, 500, 2).unwrap() <= 1.0 + 1e-9);

        // x = (1,0) ≤ y = (0.2,0.6) gives the ratio 1/‖(0.2,0.6)‖ ≈ 1.58
        let ob = OrderedVectorSpace::new(NormSpec::euclidean(), obtuse()).unwrap();
        let k = estimate_normality_constant(&ob, 500, 3).unwrap();
        assert!(k >= 1.0 / (0.2f64.hypot(0.6)) - 1e-9, "{k}");
        assert_eq!(k, estimate_normality_constant(&ob, 500, 3).unwrap());
        assert!(estimate_normality_constant(&ob, 0, 3).is_err());
    }
}
