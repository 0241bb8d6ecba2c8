//! Lawson–Hanson active-set solver for `min ‖A x − b‖₂  s.t.  x ≥ 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    /// `‖A x − b‖₂`
    pub residual: f64,
    pub iterations: usize,
}

/// Solve the nonnegative least-squares problem whose matrix has the given columns.
///
/// `max_iter` caps the total number of least-squares subproblem solves. On hitting
/// the cap the last iterate is returned inside [`Error::NotConverged`].
pub fn nnls(cols: &[Vec<f64>], b: &[f64], max_iter: usize) -> Result<NnlsSolution> {
    let m = b.len();
    let n = cols.len();
    for c in cols {
        if c.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: c.len(),
            });
        }
    }
    let bv = DVector::from_column_slice(b);
    if n == 0 {
        return Ok(NnlsSolution {
            x: vec![],
            residual: bv.norm(),
            iterations: 0,
        });
    }
    let a = DMatrix::from_fn(m, n, |i, j| cols[j][i]);
    let tol = 1e-13 * (1.0 + a.norm() * bv.norm());

    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let mut blocked = vec![false; n];
    let mut iterations = 0;

    loop {
        let w = a.transpose() * (&bv - &a * &x);
        let entering = (0..n)
            .filter(|&j| !passive[j] && !blocked[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = entering else { break };
        passive[j] = true;

        let mut first = true;
        loop {
            iterations += 1;
            if iterations > max_iter {
                let residual = (&a * &x - &bv).norm();
                return Err(Error::NotConverged {
                    best: x.iter().cloned().collect(),
                    residual,
                    iterations: max_iter,
                });
            }
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let s = least_squares(&a.select_columns(&idx), &bv);

            if s.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = s[k];
                }
                blocked.iter_mut().for_each(|b| *b = false);
                break;
            }
            if first && s[idx.iter().position(|&i| i == j).unwrap()] <= 0.0 {
                // the entering column makes no progress; park it until x moves
                passive[j] = false;
                blocked[j] = true;
                break;
            }
            first = false;

            let mut alpha = f64::INFINITY;
            let mut leaving = idx[0];
            for (k, &i) in idx.iter().enumerate() {
                if s[k] <= 0.0 {
                    let t = x[i] / (x[i] - s[k]);
                    if t < alpha {
                        alpha = t;
                        leaving = i;
                    }
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (s[k] - x[i]);
            }
            x[leaving] = 0.0;
            for &i in &idx {
                if x[i] <= 0.0 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            blocked.iter_mut().for_each(|b| *b = false);
        }
    }

    let residual = (&a * &x - &bv).norm();
    Ok(NnlsSolution {
        x: x.iter().cloned().collect(),
        residual,
        iterations,
    })
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.solve(b, 1e-12 * smax.max(f64::MIN_POSITIVE))
        .expect("both singular-vector sets were requested")
}
