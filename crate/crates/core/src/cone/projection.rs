use super::{nnls, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, check_dim};

const DYKSTRA_MAX_SWEEPS: usize = 10_000;

/// Euclidean projection onto a cone.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Vec<f64>,
    /// Largest violation of the cone's defining inequalities at `point`
    /// (zero for the closed-form and generator-based projections).
    pub residual: f64,
    pub iterations: usize,
}

/// `argmin_{p ∈ P} ‖p − v‖₂`.
///
/// Generator cones go through nonnegative least squares (iteration cap
/// `100·dim`); halfspace cones through Dykstra's alternating projections (cap
/// `10⁴` sweeps). Hitting a cap yields [`Error::NotConverged`] carrying the best
/// iterate and its residual.
pub fn project(cone: &ConeSpec, v: &[f64]) -> Result<Projection> {
    check_dim(cone.dim(), v)?;
    match cone {
        ConeSpec::Orthant { .. } => Ok(exact(v.iter().map(|x| x.max(0.0)).collect())),
        ConeSpec::SecondOrder { .. } => Ok(exact(project_soc(v))),
        ConeSpec::Generators { dim, generators } => {
            let sol = nnls(generators, v, cone.nnls_cap())?;
            Ok(Projection {
                point: linalg::combine(generators, &sol.x, *dim),
                residual: 0.0,
                iterations: sol.iterations,
            })
        }
        ConeSpec::Halfspaces { rows, .. } => dykstra(rows, v),
    }
}

/// Convenience returning only the projected point.
pub fn project_onto_cone(cone: &ConeSpec, v: &[f64]) -> Result<Vec<f64>> {
    project(cone, v).map(|p| p.point)
}

/// Euclidean projection onto the dual cone, `y + proj_P(−y)` by Moreau's decomposition.
pub fn project_onto_dual(cone: &ConeSpec, y: &[f64]) -> Result<Vec<f64>> {
    if cone.is_self_dual() {
        return project_onto_cone(cone, y);
    }
    let p = match project(cone, &linalg::neg(y)) {
        Ok(p) => p.point,
        Err(Error::NotConverged { best, .. }) => best,
        Err(e) => return Err(e),
    };
    Ok(linalg::add(y, &p))
}

fn exact(point: Vec<f64>) -> Projection {
    Projection {
        point,
        residual: 0.0,
        iterations: 0,
    }
}

fn project_soc(v: &[f64]) -> Vec<f64> {
    let (x, t) = v.split_at(v.len() - 1);
    let t = t[0];
    let nx = linalg::norm2(x);
    if nx <= t {
        v.to_vec()
    } else if nx <= -t {
        vec![0.0; v.len()]
    } else {
        let s = (nx + t) / 2.0;
        let mut out: Vec<f64> = x.iter().map(|xi| s * xi / nx).collect();
        out.push(s);
        out
    }
}

fn dykstra(rows: &[Vec<f64>], v: &[f64]) -> Result<Projection> {
    let normals: Vec<Vec<f64>> = rows
        .iter()
        .filter(|a| linalg::norm2(a) > 0.0)
        .map(|a| linalg::scale(1.0 / linalg::norm2(a), a))
        .collect();
    let violation = |x: &[f64]| {
        normals
            .iter()
            .map(|a| -linalg::dot(a, x))
            .fold(0.0, f64::max)
    };
    let scale = 1.0 + linalg::norm2(v);
    if violation(v) == 0.0 {
        return Ok(exact(v.to_vec()));
    }
    let mut x = v.to_vec();
    let mut increments = vec![vec![0.0; v.len()]; normals.len()];
    for sweep in 1..=DYKSTRA_MAX_SWEEPS {
        let prev = x.clone();
        for (a, inc) in normals.iter().zip(increments.iter_mut()) {
            let y = linalg::add(&x, inc);
            let ay = linalg::dot(a, &y);
            let next = if ay >= 0.0 { y.clone() } else { linalg::axpy(&y, -ay, a) };
            *inc = linalg::sub(&y, &next);
            x = next;
        }
        let change = linalg::norm2(&linalg::sub(&x, &prev));
        if change <= 1e-15 * scale && violation(&x) <= 1e-14 * scale {
            return Ok(Projection {
                residual: violation(&x),
                point: x,
                iterations: sweep,
            });
        }
    }
    Err(Error::NotConverged {
        residual: violation(&x),
        best: x,
        iterations: DYKSTRA_MAX_SWEEPS,
    })
}
