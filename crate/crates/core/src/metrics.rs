//! Concrete cone metrics: the discrete, product and geometric `ℓq` constructions,
//! finite tables, coordinatewise absolute differences and linear images.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::axioms::{self, AxiomReport};
use crate::cone::{self, ConeSpec, NormSpec, OrderedVectorSpace};
use crate::error::{Error, Result};
use crate::linalg;

/// Default number of retained coordinates for the geometric `ℓq` metric.
pub const DEFAULT_TRUNCATION: usize = 32;

/// A point of the underlying set `X`: either a label of a finite space or a
/// coordinate vector. In JSON a bare number is read as a one-dimensional point.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Label(String),
    Coords(Vec<f64>),
}

impl Point {
    pub fn label(s: impl Into<String>) -> Self {
        Point::Label(s.into())
    }

    pub fn scalar(x: f64) -> Self {
        Point::Coords(vec![x])
    }

    pub fn coords(&self) -> Result<&[f64]> {
        match self {
            Point::Coords(c) => Ok(c),
            Point::Label(l) => Err(Error::InvalidPoint(format!(
                "expected coordinates, got label `{l}`"
            ))),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Point::Label(_) => true,
            Point::Coords(c) => c.iter().all(|x| x.is_finite()),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Label(l) => f.write_str(l),
            Point::Coords(c) if c.len() == 1 => write!(f, "{}", c[0]),
            Point::Coords(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(" "))
            }
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

impl From<&str> for Point {
    fn from(s: &str) -> Self {
        Point::label(s)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Label(l) => s.serialize_str(l),
            Point::Coords(c) => c.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Label(String),
            Scalar(f64),
            Coords(Vec<f64>),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Label(l) => Point::Label(l),
            Raw::Scalar(x) => Point::Coords(vec![x]),
            Raw::Coords(c) => Point::Coords(c),
        })
    }
}

/// Real-valued metrics on coordinate points (and, for `Discrete`, on labels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarMetric {
    Euclidean,
    Manhattan,
    Chebyshev,
    Discrete,
}

impl ScalarMetric {
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        if let ScalarMetric::Discrete = self {
            return Ok(if x == y { 0.0 } else { 1.0 });
        }
        let (a, b) = (x.coords()?, y.coords()?);
        linalg::check_dim(a.len(), b)?;
        let diffs = a.iter().zip(b).map(|(p, q)| (p - q).abs());
        Ok(match self {
            ScalarMetric::Euclidean => diffs.map(|t| t * t).sum::<f64>().sqrt(),
            ScalarMetric::Manhattan => diffs.sum(),
            ScalarMetric::Chebyshev => diffs.fold(0.0, f64::max),
            ScalarMetric::Discrete => unreachable!(),
        })
    }
}

/// Cone metric on a finite labelled set, stored as the strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTable {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    /// Row-major strict upper triangle: entry `(i, j)`, `i < j`.
    upper: Vec<Vec<f64>>,
}

/// JSON form of a finite table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteTableSpec {
    pub points: Vec<String>,
    pub entries: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub x: String,
    pub y: String,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl FiniteTable {
    /// Builds a table from a function of label indices, evaluated on `i < j` only.
    pub fn from_fn<F>(labels: Vec<String>, dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Vec<f64>,
    {
        let n = labels.len();
        let index = Self::index_labels(&labels)?;
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                linalg::check_dim(dim, &v)?;
                upper.push(v);
            }
        }
        Ok(FiniteTable {
            labels,
            index,
            dim,
            upper,
        })
    }

    fn index_labels(labels: &[String]) -> Result<HashMap<String, usize>> {
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidConeMetric(format!("duplicate point label `{l}`")));
            }
        }
        Ok(index)
    }

    /// Loads the JSON form. Every distinct pair needs an entry; an entry given in
    /// both orders must agree exactly, and diagonal entries must be zero.
    pub fn from_spec(spec: &FiniteTableSpec, dim: usize) -> Result<Self> {
        let n = spec.points.len();
        let index = Self::index_labels(&spec.points)?;
        let mut upper: Vec<Option<Vec<f64>>> = vec![None; n * n.saturating_sub(1) / 2];
        for e in &spec.entries {
            let i = *index.get(&e.x).ok_or_else(|| Error::UnknownPoint(e.x.clone()))?;
            let j = *index.get(&e.y).ok_or_else(|| Error::UnknownPoint(e.y.clone()))?;
            linalg::check_dim(dim, &e.d)?;
            if e.d.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidConeMetric(format!(
                    "entry ({}, {}) has a non-finite component",
                    e.x, e.y
                )));
            }
            if i == j {
                if e.d.iter().any(|x| *x != 0.0) {
                    return Err(Error::InvalidConeMetric(format!(
                        "diagonal entry ({}, {}) must be zero",
                        e.x, e.y
                    )));
                }
                continue;
            }
            let k = tri_index(n, i.min(j), i.max(j));
            match &upper[k] {
                Some(prev) if prev != &e.d => {
                    return Err(Error::InvalidConeMetric(format!(
                        "asymmetric entries for ({}, {})",
                        e.x, e.y
                    )))
                }
                _ => upper[k] = Some(e.d.clone()),
            }
        }
        let mut filled = Vec::with_capacity(upper.len());
        for i in 0..n {
            for j in i + 1..n {
                let v = upper[tri_index(n, i, j)].take().ok_or_else(|| {
                    Error::InvalidConeMetric(format!(
                        "missing entry for ({}, {})",
                        spec.points[i], spec.points[j]
                    ))
                })?;
                filled.push(v);
            }
        }
        Ok(FiniteTable {
            labels: spec.points.clone(),
            index,
            dim,
            upper: filled,
        })
    }

    pub fn to_spec(&self) -> FiniteTableSpec {
        let n = self.labels.len();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                entries.push(TableEntry {
                    x: self.labels[i].clone(),
                    y: self.labels[j].clone(),
                    d: self.upper[tri_index(n, i, j)].clone(),
                });
            }
        }
        FiniteTableSpec {
            points: self.labels.clone(),
            entries,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn points(&self) -> Vec<Point> {
        self.labels.iter().map(|l| Point::Label(l.clone())).collect()
    }

    fn position(&self, p: &Point) -> Result<usize> {
        match p {
            Point::Label(l) => self
                .index
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownPoint(l.clone())),
            Point::Coords(_) => Err(Error::UnknownPoint(p.to_string())),
        }
    }

    pub fn get(&self, x: &Point, y: &Point) -> Result<Vec<f64>> {
        let (i, j) = (self.position(x)?, self.position(y)?);
        if i == j {
            return Ok(vec![0.0; self.dim]);
        }
        Ok(self.upper[tri_index(self.labels.len(), i.min(j), i.max(j))].clone())
    }

    /// Overwrites one entry (both orders).
    pub fn set(&mut self, x: &Point, y: &Point, value: Vec<f64>) -> Result<()> {
        let (i, j) = (self.position(x)?, self.position(y)?);
        linalg::check_dim(self.dim, &value)?;
        if i == j {
            return Err(Error::InvalidArgument("diagonal entries are fixed at zero".into()));
        }
        let k = tri_index(self.labels.len(), i.min(j), i.max(j));
        self.upper[k] = value;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeMetricKind {
    /// `D(x, y) = a` for `x ≠ y`, with `a ∈ P` of unit norm.
    Discrete { a: Vec<f64> },
    /// `D(x, y) = (a·d1(x, y), b·d2(x, y))` into the orthant of `R²`.
    Product {
        a: f64,
        b: f64,
        d1: ScalarMetric,
        d2: ScalarMetric,
    },
    /// `D(x, y)ₙ = (ρ(x, y)/bⁿ)^{1/q}` for `n = 1..=truncation`, in `ℓq`.
    GeometricLq {
        rho: ScalarMetric,
        b: f64,
        q: f64,
        truncation: usize,
    },
    FiniteTable(FiniteTable),
    /// `D(x, y)ᵢ = wᵢ·|xᵢ − yᵢ|` on `R^k` into the orthant of `R^k`; the
    /// `k`-component version of the product metric.
    Coordinatewise { weights: Vec<f64> },
    /// `D(x, y) = L·D_inner(x, y)` for a linear `L` mapping the inner cone into the outer one.
    LinearImage {
        inner: Box<ConeMetric>,
        map: Vec<Vec<f64>>,
    },
}

/// A cone metric `D : X × X → E` together with its codomain `(E, ‖·‖, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMetric {
    kind: ConeMetricKind,
    space: OrderedVectorSpace,
}

impl ConeMetric {
    pub fn discrete(a: Vec<f64>, space: OrderedVectorSpace) -> Result<Self> {
        linalg::check_dim(space.dim(), &a)?;
        let n = space.norm(&a);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConeMetric(format!(
                "discrete metric vector must have unit norm, got {n}"
            )));
        }
        if !space.contains(&a)? {
            return Err(Error::InvalidConeMetric(
                "discrete metric vector must lie in the cone".into(),
            ));
        }
        Ok(ConeMetric {
            kind: ConeMetricKind::Discrete { a },
            space,
        })
    }

    pub fn product(
        a: f64,
        b: f64,
        d1: ScalarMetric,
        d2: ScalarMetric,
        space: OrderedVectorSpace,
    ) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidConeMetric(format!(
                "product coefficients must be nonnegative, got a = {a}, b = {b}"
            )));
        }
        if !matches!(space.cone(), ConeSpec::Orthant { dim: 2 }) {
            return Err(Error::InvalidConeMetric(
                "product metric needs the orthant of R² as codomain".into(),
            ));
        }
        Ok(ConeMetric {
            kind: ConeMetricKind::Product { a, b, d1, d2 },
            space,
        })
    }

    /// `D(x, y) = (|x − y|, α|x − y|)` on `R` with the Euclidean norm on `R²`.
    pub fn product_example(alpha: f64) -> Result<Self> {
        Self::product(
            1.0,
            alpha,
            ScalarMetric::Euclidean,
            ScalarMetric::Euclidean,
            OrderedVectorSpace::euclidean_orthant(2),
        )
    }

    /// Builds its own codomain: the orthant of `R^truncation` with the `ℓq` (quasi-)norm.
    pub fn geometric_lq(rho: ScalarMetric, b: f64, q: f64, truncation: usize) -> Result<Self> {
        if !(b > 1.0 && b.is_finite()) {
            return Err(Error::InvalidConeMetric(format!("need b > 1, got {b}")));
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidConeMetric(format!("need q > 0, got {q}")));
        }
        if truncation == 0 {
            return Err(Error::InvalidConeMetric("truncation must be positive".into()));
        }
        let space = OrderedVectorSpace::with_quasi_norm(
            NormSpec::quasi_lp(q)?,
            ConeSpec::orthant(truncation),
        )?;
        Ok(ConeMetric {
            kind: ConeMetricKind::GeometricLq {
                rho,
                b,
                q,
                truncation,
            },
            space,
        })
    }

    pub fn finite_table(table: FiniteTable, space: OrderedVectorSpace) -> Result<Self> {
        if table.dim != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: table.dim,
            });
        }
        Ok(ConeMetric {
            kind: ConeMetricKind::FiniteTable(table),
            space,
        })
    }

    pub fn coordinatewise(weights: Vec<f64>, space: OrderedVectorSpace) -> Result<Self> {
        if !matches!(space.cone(), ConeSpec::Orthant { .. }) {
            return Err(Error::InvalidConeMetric(
                "coordinatewise metric needs an orthant codomain".into(),
            ));
        }
        linalg::check_dim(space.dim(), &weights)?;
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidConeMetric("weights must be positive".into()));
        }
        Ok(ConeMetric {
            kind: ConeMetricKind::Coordinatewise { weights },
            space,
        })
    }

    /// `D = L ∘ D_inner`. `map` has one row per coordinate of `space` and must send
    /// the inner cone into the outer one (checked on the inner cone's canonical rays)
    /// and be injective on it.
    pub fn linear_image(inner: ConeMetric, map: Vec<Vec<f64>>, space: OrderedVectorSpace) -> Result<Self> {
        if map.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: map.len(),
            });
        }
        for row in &map {
            linalg::check_dim(inner.space.dim(), row)?;
        }
        for r in cone::canonical_rays(inner.space.cone()) {
            let image = linalg::mat_vec(&map, &r);
            if !space.contains(&image)? {
                return Err(Error::InvalidConeMetric(
                    "linear map does not send the inner cone into the codomain cone".into(),
                ));
            }
            if linalg::norm2(&image) <= 1e-12 * linalg::norm2(&r) {
                return Err(Error::InvalidConeMetric("linear map annihilates a cone ray".into()));
            }
        }
        Ok(ConeMetric {
            kind: ConeMetricKind::LinearImage {
                inner: Box::new(inner),
                map,
            },
            space,
        })
    }

    pub fn kind(&self) -> &ConeMetricKind {
        &self.kind
    }

    pub fn space(&self) -> &OrderedVectorSpace {
        &self.space
    }

    /// Same metric with a different cone membership tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.space = self.space.with_tolerance(tolerance)?;
        Ok(self)
    }

    /// The labelled points of a finite table; `None` for continuous domains.
    pub fn table_points(&self) -> Option<Vec<Point>> {
        match &self.kind {
            ConeMetricKind::FiniteTable(t) => Some(t.points()),
            ConeMetricKind::LinearImage { inner, .. } => inner.table_points(),
            _ => None,
        }
    }

    /// Errors unless `p` belongs to the metric's underlying set.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match &self.kind {
            ConeMetricKind::Discrete { .. } => Ok(()),
            ConeMetricKind::Product { d1, d2, .. } => {
                if *d1 != ScalarMetric::Discrete || *d2 != ScalarMetric::Discrete {
                    p.coords()?;
                }
                Ok(())
            }
            ConeMetricKind::GeometricLq { rho, .. } => {
                if *rho != ScalarMetric::Discrete {
                    p.coords()?;
                }
                Ok(())
            }
            ConeMetricKind::FiniteTable(t) => t.position(p).map(|_| ()),
            ConeMetricKind::Coordinatewise { weights } => {
                linalg::check_dim(weights.len(), p.coords()?)
            }
            ConeMetricKind::LinearImage { inner, .. } => inner.check_point(p),
        }
    }

    /// `D(x, y)`.
    pub fn eval(&self, x: &Point, y: &Point) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        match &self.kind {
            ConeMetricKind::Discrete { a } => Ok(if x == y {
                vec![0.0; a.len()]
            } else {
                a.clone()
            }),
            ConeMetricKind::Product { a, b, d1, d2 } => {
                Ok(vec![a * d1.distance(x, y)?, b * d2.distance(x, y)?])
            }
            ConeMetricKind::GeometricLq {
                rho,
                b,
                q,
                truncation,
            } => {
                let r = rho.distance(x, y)?;
                Ok((1..=*truncation)
                    .map(|n| (r / b.powi(n as i32)).powf(1.0 / q))
                    .collect())
            }
            ConeMetricKind::FiniteTable(t) => t.get(x, y),
            ConeMetricKind::Coordinatewise { weights } => {
                let (a, b) = (x.coords()?, y.coords()?);
                Ok(weights
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(w, (p, q))| w * (p - q).abs())
                    .collect())
            }
            ConeMetricKind::LinearImage { inner, map } => Ok(linalg::mat_vec(map, &inner.eval(x, y)?)),
        }
    }

    /// The equivalent scalar metric in closed form where one is known.
    ///
    /// Discrete: `1` for distinct points (exact whenever `‖a‖` is attained, e.g.
    /// orthant codomains); product: the codomain norm of `(a·d1, b·d2)`;
    /// geometric `ℓq`: `(ρ/(b − 1))^{1/q}` for the untruncated sequence.
    pub fn closed_form_d(&self, x: &Point, y: &Point) -> Result<Option<f64>> {
        match &self.kind {
            ConeMetricKind::Discrete { .. } => {
                self.check_point(x)?;
                self.check_point(y)?;
                Ok(Some(if x == y { 0.0 } else { 1.0 }))
            }
            ConeMetricKind::Product { .. } => Ok(Some(self.space.norm(&self.eval(x, y)?))),
            ConeMetricKind::GeometricLq { rho, b, q, .. } => {
                self.check_point(x)?;
                self.check_point(y)?;
                Ok(Some((rho.distance(x, y)? / (b - 1.0)).powf(1.0 / q)))
            }
            _ => Ok(None),
        }
    }

    /// For the geometric `ℓq` metric: `ρ ↦ (ρ/((b − 1)·b^N))^{1/q}`, the `ℓq` size of
    /// the coordinates discarded by truncating at `N`.
    pub fn truncation_tail_bound(&self) -> Result<impl Fn(f64) -> f64> {
        match &self.kind {
            ConeMetricKind::GeometricLq { b, q, truncation, .. } => {
                let (b, q, n) = (*b, *q, *truncation);
                Ok(move |rho: f64| tail_bound(b, q, n, rho))
            }
            _ => Err(Error::InvalidArgument(
                "truncation tail bound is only defined for the geometric ℓq metric".into(),
            )),
        }
    }
}

/// `(ρ/((b − 1)·b^N))^{1/q}`.
pub fn tail_bound(b: f64, q: f64, truncation: usize, rho: f64) -> f64 {
    let bn = b.powf(truncation as f64);
    (rho / ((b - 1.0) * bn)).powf(1.0 / q)
}

/// Checks the cone metric axioms on `points`: `D(x, y) ∈ P`, `D(x, y) = 0` iff
/// `x = y`, symmetry, and `D(x, y) ≤ D(x, z) + D(z, y)` in the cone order
/// (all triples up to 10⁵, sampled beyond).
pub fn validate_cone_metric(cm: &ConeMetric, points: &[Point], tau: f64) -> Result<AxiomReport> {
    axioms::check_cone_metric_axioms(cm, points, tau)
}

/// Random valid finite cone metric on `n` labels `p0..p{n−1}` over an orthant codomain.
///
/// Each coordinate is the shortest-path closure of random positive edge weights,
/// hence a metric; stacking them satisfies the componentwise triangle inequality.
pub fn random_cone_metric_table(n: usize, space: &OrderedVectorSpace, seed: u64) -> Result<ConeMetric> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    if !matches!(space.cone(), ConeSpec::Orthant { .. }) {
        return Err(Error::InvalidArgument(
            "random tables are generated over orthant codomains only".into(),
        ));
    }
    let k = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // dist[c][i][j]
    let mut dist = vec![vec![vec![0.0; n]; n]; k];
    for i in 0..n {
        for j in i + 1..n {
            for layer in dist.iter_mut() {
                let w = 0.1 + rng.random::<f64>() * 0.9;
                layer[i][j] = w;
                layer[j][i] = w;
            }
        }
    }
    for layer in dist.iter_mut() {
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = layer[i][m] + layer[m][j];
                    if via < layer[i][j] {
                        layer[i][j] = via;
                    }
                }
            }
        }
    }
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let table = FiniteTable::from_fn(labels, k, |i, j| dist.iter().map(|l| l[i][j]).collect())?;
    ConeMetric::finite_table(table, space.clone())
}

/// Tabulates any cone metric on a finite list of points, labelling them `p0, p1, …`.
/// Returns the table and the label assigned to each input point.
pub fn tabulate(cm: &ConeMetric, points: &[Point]) -> Result<(ConeMetric, BTreeMap<String, Point>)> {
    let labels: Vec<String> = (0..points.len()).map(|i| format!("p{i}")).collect();
    let mut cache = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            cache.push(cm.eval(&points[i], &points[j])?);
        }
    }
    let mut it = cache.into_iter();
    let table = FiniteTable::from_fn(labels.clone(), cm.space.dim(), |_, _| it.next().unwrap())?;
    let names = labels.into_iter().zip(points.iter().cloned()).collect();
    Ok((ConeMetric::finite_table(table, cm.space.clone())?, names))
}
