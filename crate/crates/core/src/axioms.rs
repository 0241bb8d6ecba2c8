//! Metric axiom checks for scalar metrics and cone metrics on finite point sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone;
use crate::error::Result;
use crate::linalg;
use crate::metrics::{ConeMetric, Point};

/// Triples beyond this count are sampled instead of enumerated.
pub const TRIPLE_CAP: usize = 100_000;
const SAMPLE_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomStat {
    pub checked: usize,
    pub violations: usize,
    pub max_violation: f64,
}

impl AxiomStat {
    fn record(&mut self, magnitude: f64, violated: bool) {
        self.checked += 1;
        if violated {
            self.violations += 1;
            self.max_violation = self.max_violation.max(magnitude);
        }
    }
}

/// Outcome of an axiom check. Triangle triples are reported as `[x, y, z]`
/// meaning `d(x, y) ≤ d(x, z) + d(z, y)` failed.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    pub points: usize,
    pub nonnegativity: AxiomStat,
    pub identity: AxiomStat,
    pub symmetry: AxiomStat,
    pub triangle: AxiomStat,
    pub triples_sampled: bool,
    pub first_triangle_violation: Option<[usize; 3]>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.nonnegativity.violations == 0
            && self.identity.violations == 0
            && self.symmetry.violations == 0
            && self.triangle.violations == 0
    }

    pub fn total_violations(&self) -> usize {
        self.nonnegativity.violations + self.identity.violations + self.symmetry.violations + self.triangle.violations
    }
}

/// The triples to check: all of them up to [`TRIPLE_CAP`], else a seeded sample.
fn triples(n: usize) -> (Vec<[usize; 3]>, bool) {
    let total = n.checked_pow(3).unwrap_or(usize::MAX);
    if total <= TRIPLE_CAP {
        let mut out = Vec::with_capacity(total);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    out.push([x, y, z]);
                }
            }
        }
        (out, false)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let out = (0..TRIPLE_CAP)
            .map(|_| [rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)])
            .collect();
        (out, true)
    }
}

/// Checks a precomputed distance matrix. Points `i ≠ j` are declared distinct
/// unless `same(i, j)`; violations count only when they exceed `tau`.
#[allow(clippy::needless_range_loop)]
pub fn check_matrix_axioms(m: &[Vec<f64>], same: &dyn Fn(usize, usize) -> bool, tau: f64) -> AxiomReport {
    let n = m.len();
    let mut r = AxiomReport {
        points: n,
        ..Default::default()
    };
    for i in 0..n {
        for j in 0..n {
            let v = m[i][j];
            r.nonnegativity.record(-v, !(v >= -tau));
            if i == j || same(i, j) {
                r.identity.record(v.abs(), !(v.abs() <= tau));
            } else {
                r.identity.record(tau - v, !(v > tau));
            }
            if i < j {
                let s = (v - m[j][i]).abs();
                r.symmetry.record(s, !(s <= tau));
            }
        }
    }
    let (ts, sampled) = triples(n);
    r.triples_sampled = sampled;
    for [x, y, z] in ts {
        let excess = m[x][y] - (m[x][z] + m[z][y]);
        let bad = !(excess <= tau);
        r.triangle.record(excess, bad);
        if bad && r.first_triangle_violation.is_none() {
            r.first_triangle_violation = Some([x, y, z]);
        }
    }
    r
}

/// Checks nonnegativity, identity of indiscernibles, symmetry and the triangle
/// inequality for a scalar metric on `points` (equal entries count as the same point).
pub fn check_metric_axioms<F>(metric: F, points: &[Point], tau: f64) -> Result<AxiomReport>
where
    F: Fn(&Point, &Point) -> Result<f64>,
{
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = metric(&points[i], &points[j])?;
        }
    }
    Ok(check_matrix_axioms(&m, &|i, j| points[i] == points[j], tau))
}

/// Cone-side counterpart: membership of every `D(x, y)` in `P`, `D(x, y) = 0` iff
/// `x = y`, symmetry, and `D(x, y) ≤ D(x, z) + D(z, y)` in the cone order.
/// Magnitudes are Euclidean distances to the cone or between vectors.
pub fn check_cone_metric_axioms(cm: &ConeMetric, points: &[Point], tau: f64) -> Result<AxiomReport> {
    let n = points.len();
    let space = cm.space();
    let cone = space.cone();
    let mut m = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = cm.eval(&points[i], &points[j])?;
        }
    }
    let mut r = AxiomReport {
        points: n,
        ..Default::default()
    };
    let rel = |v: &[f64]| tau * (1.0 + linalg::norm2(v));
    for i in 0..n {
        for j in 0..n {
            let v = &m[i][j];
            let viol = cone::membership_violation(cone, v)?;
            r.nonnegativity.record(viol, !cone::cone_contains(cone, v, tau)?);
            let size = linalg::norm2(v);
            if points[i] == points[j] {
                r.identity.record(size, !(size <= tau));
            } else {
                r.identity.record(tau - size, !(size > tau));
            }
            if i < j {
                let s = linalg::norm2(&linalg::sub(v, &m[j][i]));
                r.symmetry.record(s, !(s <= rel(v)));
            }
        }
    }
    let (ts, sampled) = triples(n);
    r.triples_sampled = sampled;
    for [x, y, z] in ts {
        let slack = linalg::sub(&linalg::add(&m[x][z], &m[z][y]), &m[x][y]);
        let bad = !cone::cone_contains(cone, &slack, tau)?;
        let magnitude = if bad { cone::membership_violation(cone, &slack)? } else { 0.0 };
        r.triangle.record(magnitude, bad);
        if bad && r.first_triangle_violation.is_none() {
            r.first_triangle_violation = Some([x, y, z]);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ScalarMetric;

    fn labels(n: usize) -> Vec<Point> {
        (0..n).map(|i| Point::label(format!("p{i}"))).collect()
    }

    #[test]
    fn discrete_metric_has_no_violations() {
        let r = check_metric_axioms(|x, y| ScalarMetric::Discrete.distance(x, y), &labels(4), 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.triangle.checked, 64);
        assert!(!r.triples_sampled);
    }

    #[test]
    fn halved_entry_breaks_triangle() {
        // path metric on a line: d(0,2) = 2 = d(0,1) + d(1,2)
        let mut m = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        assert!(check_matrix_axioms(&m, &|_, _| false, 1e-9).passed());
        m[0][1] = 0.5;
        m[1][0] = 0.5;
        let r = check_matrix_axioms(&m, &|_, _| false, 1e-9);
        assert!(r.triangle.violations > 0);
        assert!((r.triangle.max_violation - 0.5).abs() < 1e-12);
        assert!(r.first_triangle_violation.is_some());
    }

    #[test]
    fn asymmetry_and_zero_distance_reported() {
        let m = vec![vec![0.0, 1.0, 0.0], vec![2.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
        let r = check_matrix_axioms(&m, &|_, _| false, 1e-9);
        assert_eq!(r.symmetry.violations, 1);
        assert_eq!(r.identity.violations, 2);
        let r = check_matrix_axioms(&m, &|i, j| i + j == 2 && i != j, 1e-9);
        assert_eq!(r.identity.violations, 0);
    }

    #[test]
    fn large_sets_are_sampled() {
        let pts: Vec<Point> = (0..50).map(|i| Point::scalar(i as f64)).collect();
        let r = check_metric_axioms(|x, y| ScalarMetric::Euclidean.distance(x, y), &pts, 1e-9).unwrap();
        assert!(r.triples_sampled);
        assert_eq!(r.triangle.checked, TRIPLE_CAP);
        assert!(r.passed());
    }
}
