use rand::Rng;
use rand_distr::StandardNormal;

use super::{project, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg;

/// Deterministic directions that probe the cone's extreme structure: the axes
/// of the orthant, the generators of a generator cone, a ring of boundary rays
/// plus the axis of the second-order cone, and the projected coordinate axes of
/// a halfspace cone.
pub fn canonical_rays(cone: &ConeSpec) -> Vec<Vec<f64>> {
    let dim = cone.dim();
    let axis = |i: usize, s: f64| {
        let mut e = vec![0.0; dim];
        e[i] = s;
        e
    };
    let mut rays = match cone {
        ConeSpec::Orthant { .. } => {
            let mut r: Vec<Vec<f64>> = (0..dim).map(|i| axis(i, 1.0)).collect();
            r.push(vec![1.0; dim]);
            r
        }
        ConeSpec::SecondOrder { .. } => {
            let mut r = vec![axis(dim - 1, 1.0)];
            for i in 0..dim - 1 {
                for s in [1.0, -1.0] {
                    let mut e = axis(i, s);
                    e[dim - 1] = 1.0;
                    r.push(e);
                }
            }
            r
        }
        ConeSpec::Generators { generators, .. } => {
            let mut r = generators.clone();
            r.push(generators.iter().fold(vec![0.0; dim], |acc, g| linalg::add(&acc, g)));
            r
        }
        ConeSpec::Halfspaces { .. } => (0..dim)
            .flat_map(|i| [axis(i, 1.0), axis(i, -1.0)])
            .filter_map(|e| project(cone, &e).ok().map(|p| p.point))
            .collect(),
    };
    rays.retain(|r| linalg::norm2(r) > 1e-12);
    rays
}

/// A random nonzero cone element. Roughly half the draws land on a face of the
/// cone (some generator weights or orthant coordinates zeroed).
pub fn sample_cone_point<R: Rng + ?Sized>(cone: &ConeSpec, rng: &mut R) -> Result<Vec<f64>> {
    let dim = cone.dim();
    for _ in 0..64 {
        let sparse = rng.random_bool(0.5);
        let v = match cone {
            ConeSpec::Orthant { .. } => (0..dim)
                .map(|_| {
                    if sparse && rng.random_bool(0.5) {
                        0.0
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect(),
            ConeSpec::SecondOrder { .. } => {
                let x: Vec<f64> = (0..dim - 1).map(|_| rng.sample(StandardNormal)).collect();
                let lift = if sparse { 0.0 } else { rng.random::<f64>() * 2.0 };
                let mut v = x.clone();
                v.push(linalg::norm2(&x) + lift);
                v
            }
            ConeSpec::Generators { generators, .. } => {
                let w: Vec<f64> = generators
                    .iter()
                    .map(|_| {
                        if sparse && rng.random_bool(0.5) {
                            0.0
                        } else {
                            rng.random::<f64>()
                        }
                    })
                    .collect();
                linalg::combine(generators, &w, dim)
            }
            ConeSpec::Halfspaces { .. } => {
                let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                match project(cone, &g) {
                    Ok(p) => p.point,
                    Err(Error::NotConverged { best, .. }) => best,
                    Err(e) => return Err(e),
                }
            }
        };
        if linalg::norm2(&v) > 1e-9 {
            return Ok(v);
        }
    }
    Err(Error::InvalidCone("could not draw a nonzero cone element".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::cone_contains;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_members() {
        let cones = [
            ConeSpec::orthant(3),
            ConeSpec::second_order(3),
            ConeSpec::generators(vec![vec![1.0, 0.0], vec![-0.8, 0.6]]).unwrap(),
            ConeSpec::halfspaces(vec![vec![1.0, 0.5], vec![-0.2, 1.0]]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for c in &cones {
            for _ in 0..200 {
                let v = sample_cone_point(c, &mut rng).unwrap();
                assert!(cone_contains(c, &v, 1e-9).unwrap(), "{c:?} {v:?}");
            }
            for r in canonical_rays(c) {
                assert!(cone_contains(c, &r, 1e-9).unwrap());
            }
        }
    }
}
