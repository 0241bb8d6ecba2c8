//! JSON input schemas. Every file carries `"schema": 1` (a missing field is read as 1).

use std::fs;
use std::path::Path;

use conemetric::cone::{validate_cone, ConeValidation};
use conemetric::metrics::{random_cone_metric_table, FiniteTable, FiniteTableSpec, TableEntry, DEFAULT_TRUNCATION};
use conemetric::{ConeMetric, ConeSpec, NormSpec, OrderedVectorSpace, Point, ScalarMetric};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: u64 = 1;

/// Reads a JSON file, checks and strips its `schema` field, and decodes the rest.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e.to_string()))?;
    parse(&text).map_err(|msg| CliError::input(path, msg))
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let mut value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column()))?;
    if let Some(obj) = value.as_object_mut() {
        match obj.remove("schema") {
            None => {}
            Some(v) if v.as_u64() == Some(SCHEMA) => {}
            Some(v) => return Err(format!("unsupported schema version {v}, expected {SCHEMA}")),
        }
    }
    serde_json::from_value(value).map_err(|e| e.to_string())
}

/// An `Lp` exponent: a number or `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Number(f64),
    Named(String),
}

impl Exponent {
    fn value(&self) -> Result<f64, String> {
        match self {
            Exponent::Number(p) => Ok(*p),
            Exponent::Named(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Exponent::Named(s) => Err(format!("invalid exponent `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NormConfig {
    Lp {
        p: Exponent,
        /// Admit `p < 1` (orthant cones only).
        #[serde(default)]
        quasi: bool,
    },
    WeightedLp { p: Exponent, weights: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConeConfig {
    Orthant,
    SecondOrder,
    /// One generator per inner array.
    Generators {
        #[serde(rename = "G")]
        g: Vec<Vec<f64>>,
    },
    /// Membership `Av ≥ 0`, one row per inner array.
    Halfspaces {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    pub norm: NormConfig,
    pub cone: ConeConfig,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

/// A space description whose cone failed validation.
pub struct InvalidCone(pub ConeValidation);

impl SpaceConfig {
    pub fn cone_spec(&self) -> Result<ConeSpec, String> {
        let cone = match &self.cone {
            ConeConfig::Orthant => ConeSpec::orthant(self.dim),
            ConeConfig::SecondOrder => ConeSpec::second_order(self.dim),
            ConeConfig::Generators { g } => ConeSpec::generators(g.clone()).map_err(|e| e.to_string())?,
            ConeConfig::Halfspaces { a } => ConeSpec::halfspaces(a.clone()).map_err(|e| e.to_string())?,
        };
        if cone.dim() != self.dim || self.dim == 0 {
            return Err(format!("cone dimension {} does not match dim {}", cone.dim(), self.dim));
        }
        Ok(cone)
    }

    pub fn norm_spec(&self) -> Result<(NormSpec, bool), String> {
        match &self.norm {
            NormConfig::Lp { p, quasi } => {
                let p = p.value()?;
                if *quasi {
                    Ok((NormSpec::quasi_lp(p).map_err(|e| e.to_string())?, true))
                } else {
                    Ok((NormSpec::lp(p).map_err(|e| e.to_string())?, false))
                }
            }
            NormConfig::WeightedLp { p, weights } => Ok((
                NormSpec::weighted_lp(p.value()?, weights.clone()).map_err(|e| e.to_string())?,
                false,
            )),
        }
    }

    /// Validates the cone first so callers can report its failures separately.
    pub fn build(&self, tolerance: Option<f64>) -> Result<Result<OrderedVectorSpace, String>, InvalidCone> {
        let cone = match self.cone_spec() {
            Ok(c) => c,
            Err(e) => return Ok(Err(e)),
        };
        let tol = tolerance.or(self.tolerance).unwrap_or(conemetric::cone::DEFAULT_TOLERANCE);
        let report = validate_cone(&cone, tol);
        if !report.passed() {
            return Err(InvalidCone(report));
        }
        Ok((|| {
            let (norm, quasi) = self.norm_spec()?;
            let space = if quasi {
                OrderedVectorSpace::with_quasi_norm(norm, cone)
            } else {
                OrderedVectorSpace::new(norm, cone)
            };
            space.and_then(|s| s.with_tolerance(tol)).map_err(|e| e.to_string())
        })())
    }
}

fn euclidean() -> ScalarMetric {
    ScalarMetric::Euclidean
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetricConfig {
    Discrete {
        a: Vec<f64>,
    },
    Product {
        a: f64,
        b: f64,
        #[serde(default = "euclidean")]
        d1: ScalarMetric,
        #[serde(default = "euclidean")]
        d2: ScalarMetric,
    },
    /// Carries its own codomain: the orthant of `R^truncation` under `ℓq`.
    GeometricLq {
        #[serde(default = "euclidean")]
        rho: ScalarMetric,
        b: f64,
        q: f64,
        #[serde(default = "default_truncation")]
        truncation: usize,
    },
    Table {
        points: Vec<String>,
        entries: Vec<TableEntry>,
    },
    Coordinatewise {
        weights: Vec<f64>,
    },
    /// Generated table on labels `p0..p{n−1}`; the seed defaults to the global `--seed`.
    RandomTable {
        n: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl MetricConfig {
    pub fn build(&self, space: Option<&OrderedVectorSpace>, seed: u64) -> Result<ConeMetric, String> {
        let need = || space.cloned().ok_or_else(|| "this cone metric needs a space file".to_string());
        let r = match self {
            MetricConfig::Discrete { a } => ConeMetric::discrete(a.clone(), need()?),
            MetricConfig::Product { a, b, d1, d2 } => ConeMetric::product(*a, *b, *d1, *d2, need()?),
            MetricConfig::GeometricLq { rho, b, q, truncation } => {
                let cm = ConeMetric::geometric_lq(*rho, *b, *q, *truncation).map_err(|e| e.to_string())?;
                if let Some(s) = space {
                    if s.dim() != cm.space().dim()
                        || s.cone() != cm.space().cone()
                        || s.norm_spec().exponent() != *q
                    {
                        return Err(format!(
                            "the geometric ℓq metric needs the orthant of R^{truncation} with the ℓ{q} norm"
                        ));
                    }
                }
                Ok(cm)
            }
            MetricConfig::Table { points, entries } => {
                let s = need()?;
                let spec = FiniteTableSpec {
                    points: points.clone(),
                    entries: entries.clone(),
                };
                FiniteTable::from_spec(&spec, s.dim()).and_then(|t| ConeMetric::finite_table(t, s))
            }
            MetricConfig::Coordinatewise { weights } => ConeMetric::coordinatewise(weights.clone(), need()?),
            MetricConfig::RandomTable { n, seed: own } => random_cone_metric_table(*n, &need()?, own.unwrap_or(seed)),
        };
        r.map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsFile {
    pub points: Vec<Point>,
}

/// A point given on the command line: JSON (`1.5`, `[1, 2]`, `"p0"`) or a bare label.
pub fn parse_point(s: &str) -> Point {
    serde_json::from_str(s).unwrap_or_else(|_| Point::Label(s.to_string()))
}
