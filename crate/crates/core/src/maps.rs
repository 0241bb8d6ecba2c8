//! Self maps `T : X → X` on the point sets of cone metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::metrics::{ConeMetric, Point};

pub trait PointMap: Sync {
    fn apply(&self, p: &Point) -> Result<Point>;
}

/// Built-in self maps: label tables for finite spaces, affine maps on coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SelfMap {
    Identity,
    Constant { value: Point },
    /// Label assignment; every label of the domain must appear as a key.
    Labels { table: BTreeMap<String, String> },
    /// `x ↦ A·x + b`.
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
}

impl SelfMap {
    /// `x ↦ s·x` on `R^dim`.
    pub fn scaling(s: f64, dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { s } else { 0.0 }).collect())
            .collect();
        SelfMap::Affine {
            matrix,
            offset: vec![0.0; dim],
        }
    }

    pub fn diagonal(diag: &[f64], offset: Vec<f64>) -> Self {
        let n = diag.len();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0.0 }).collect())
            .collect();
        SelfMap::Affine { matrix, offset }
    }
}

impl PointMap for SelfMap {
    fn apply(&self, p: &Point) -> Result<Point> {
        match self {
            SelfMap::Identity => Ok(p.clone()),
            SelfMap::Constant { value } => Ok(value.clone()),
            SelfMap::Labels { table } => match p {
                Point::Label(l) => table
                    .get(l)
                    .map(|t| Point::Label(t.clone()))
                    .ok_or_else(|| Error::NotSelfMap(format!("no image for `{l}`"))),
                Point::Coords(_) => Err(Error::NotSelfMap(format!("label map applied to {p}"))),
            },
            SelfMap::Affine { matrix, offset } => {
                let x = p
                    .coords()
                    .map_err(|_| Error::NotSelfMap(format!("affine map applied to `{p}`")))?;
                if matrix.len() != offset.len() || matrix.iter().any(|r| r.len() != x.len()) {
                    return Err(Error::DimensionMismatch {
                        expected: matrix.first().map_or(0, |r| r.len()),
                        found: x.len(),
                    });
                }
                Ok(Point::Coords(linalg::add(&linalg::mat_vec(matrix, x), offset)))
            }
        }
    }
}

/// Adapts a closure into a [`PointMap`].
pub struct FnMap<F>(pub F);

impl<F> PointMap for FnMap<F>
where
    F: Fn(&Point) -> Result<Point> + Sync,
{
    fn apply(&self, p: &Point) -> Result<Point> {
        (self.0)(p)
    }
}

/// `T(p)`, failing with [`Error::NotSelfMap`] when the image leaves the domain of `cm`.
pub fn apply_within(cm: &ConeMetric, t: &dyn PointMap, p: &Point) -> Result<Point> {
    let image = t.apply(p)?;
    if !image.is_finite() {
        return Err(Error::NotSelfMap(format!("image of {p} is not finite")));
    }
    cm.check_point(&image)
        .map_err(|e| Error::NotSelfMap(format!("image of {p} is outside the domain: {e}")))?;
    Ok(image)
}

/// `Tᵏ(p)`.
pub fn iterate(cm: &ConeMetric, t: &dyn PointMap, p: &Point, k: usize) -> Result<Point> {
    let mut x = p.clone();
    for _ in 0..k {
        x = apply_within(cm, t, &x)?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::OrderedVectorSpace;
    use crate::metrics::random_cone_metric_table;

    #[test]
    fn built_in_maps() {
        let half = SelfMap::scaling(0.5, 1);
        assert_eq!(half.apply(&Point::scalar(3.0)).unwrap(), Point::scalar(1.5));
        let shift = SelfMap::diagonal(&[1.0, 2.0], vec![0.0, 1.0]);
        assert_eq!(
            shift.apply(&Point::Coords(vec![1.0, 1.0])).unwrap(),
            Point::Coords(vec![1.0, 3.0])
        );
        assert!(shift.apply(&Point::scalar(1.0)).is_err());
        assert!(matches!(half.apply(&"a".into()), Err(Error::NotSelfMap(_))));
    }

    #[test]
    fn label_maps_stay_in_the_table() {
        let cm = random_cone_metric_table(3, &OrderedVectorSpace::euclidean_orthant(2), 1).unwrap();
        let t = SelfMap::Labels {
            table: [("p0", "p1"), ("p1", "p2"), ("p2", "p2")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        };
        assert_eq!(iterate(&cm, &t, &"p0".into(), 5).unwrap(), Point::label("p2"));
        let escape = SelfMap::Constant { value: "q".into() };
        assert!(matches!(apply_within(&cm, &escape, &"p0".into()), Err(Error::NotSelfMap(_))));
    }

    #[test]
    fn json_forms() {
        let m: SelfMap = serde_json::from_str(r#"{"type":"affine","matrix":[[0.5]],"offset":[0]}"#).unwrap();
        assert_eq!(m, SelfMap::scaling(0.5, 1));
        let c: SelfMap = serde_json::from_str(r#"{"type":"constant","value":"p"}"#).unwrap();
        assert_eq!(c, SelfMap::Constant { value: "p".into() });
    }
}
