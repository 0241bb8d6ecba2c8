use crate::error::{Error, Result};

/// Norm on `R^n`.
///
/// `WeightedLp` is `‖(w₁v₁, …, wₙvₙ)‖_p`; the weights scale coordinates, so the
/// same definition covers `p = ∞`. Exponents in `(0, 1)` describe quasi-norms and
/// are only accepted through [`NormSpec::quasi_lp`].
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    Lp { p: f64 },
    WeightedLp { p: f64, weights: Vec<f64> },
}

impl NormSpec {
    pub fn euclidean() -> Self {
        NormSpec::Lp { p: 2.0 }
    }

    pub fn lp(p: f64) -> Result<Self> {
        let n = NormSpec::Lp { p };
        n.check_exponent(false)?;
        Ok(n)
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<Self> {
        let n = NormSpec::WeightedLp { p, weights };
        n.check_exponent(false)?;
        n.check_weights()?;
        Ok(n)
    }

    /// The `ℓq` quasi-norm `(Σ|vᵢ|^q)^{1/q}` for `0 < q`. Values `q ≥ 1` give the ordinary norm.
    pub fn quasi_lp(q: f64) -> Result<Self> {
        let n = NormSpec::Lp { p: q };
        n.check_exponent(true)?;
        Ok(n)
    }

    pub fn exponent(&self) -> f64 {
        match self {
            NormSpec::Lp { p } | NormSpec::WeightedLp { p, .. } => *p,
        }
    }

    fn weights(&self) -> Option<&[f64]> {
        match self {
            NormSpec::Lp { .. } => None,
            NormSpec::WeightedLp { weights, .. } => Some(weights),
        }
    }

    /// True when the exponent is below one, i.e. the triangle inequality may fail.
    pub fn is_quasi(&self) -> bool {
        self.exponent() < 1.0
    }

    fn check_exponent(&self, allow_quasi: bool) -> Result<()> {
        let p = self.exponent();
        if p.is_nan() || p <= 0.0 {
            return Err(Error::InvalidNorm(format!("exponent must be positive, got {p}")));
        }
        if p < 1.0 && !allow_quasi {
            return Err(Error::InvalidNorm(format!(
                "exponent must be at least 1, got {p}"
            )));
        }
        Ok(())
    }

    fn check_weights(&self) -> Result<()> {
        if let Some(w) = self.weights() {
            if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidNorm(format!("weights must be positive, got {bad}")));
            }
        }
        Ok(())
    }

    pub(crate) fn validate(&self, dim: usize, allow_quasi: bool) -> Result<()> {
        self.check_exponent(allow_quasi)?;
        self.check_weights()?;
        if let Some(w) = self.weights() {
            if w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: w.len(),
                });
            }
        }
        Ok(())
    }

    fn weighted(&self, v: &[f64]) -> Vec<f64> {
        match self.weights() {
            None => v.to_vec(),
            Some(w) => v.iter().zip(w).map(|(x, w)| x * w).collect(),
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        raw_lp(&self.weighted(v), self.exponent())
    }

    /// Dual norm `sup{⟨y, v⟩ : ‖v‖ ≤ 1}`. Undefined (NaN) for quasi-norms.
    pub fn dual_norm(&self, y: &[f64]) -> f64 {
        let p = self.exponent();
        if p < 1.0 {
            return f64::NAN;
        }
        let z: Vec<f64> = match self.weights() {
            None => y.to_vec(),
            Some(w) => y.iter().zip(w).map(|(x, w)| x / w).collect(),
        };
        raw_lp(&z, conjugate(p))
    }

    /// A subgradient `g` of the norm at `v`: `⟨g, v⟩ = ‖v‖` and `‖g‖_* ≤ 1`.
    pub fn subgradient(&self, v: &[f64]) -> Vec<f64> {
        let p = self.exponent();
        let z = self.weighted(v);
        let w = |i: usize| self.weights().map_or(1.0, |w| w[i]);
        let n = raw_lp(&z, p);
        let mut g = vec![0.0; v.len()];
        if n == 0.0 {
            return g;
        }
        if p == 1.0 {
            for (i, gi) in g.iter_mut().enumerate() {
                *gi = w(i) * sign(z[i]);
            }
        } else if p.is_infinite() {
            let (imax, _) = z
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
            g[imax] = w(imax) * sign(z[imax]);
        } else {
            for (i, gi) in g.iter_mut().enumerate() {
                *gi = w(i) * sign(z[i]) * (z[i].abs() / n).powf(p - 1.0);
            }
        }
        g
    }

    /// Euclidean projection onto the dual unit ball `{y : ‖y‖_* ≤ 1}` for the
    /// polyhedral cases `p = 1` (a box) and `p = ∞` (a weighted cross-polytope).
    pub(crate) fn project_dual_ball(&self, y: &[f64]) -> Option<Vec<f64>> {
        let p = self.exponent();
        let w = |i: usize| self.weights().map_or(1.0, |w| w[i]);
        if p == 1.0 {
            return Some(y.iter().enumerate().map(|(i, x)| x.clamp(-w(i), w(i))).collect());
        }
        if !p.is_infinite() {
            return None;
        }
        if self.dual_norm(y) <= 1.0 {
            return Some(y.to_vec());
        }
        // y_i = sign(y_i)·max(|y_i| − θ/w_i, 0) with θ chosen so Σ|y_i|/w_i = 1
        let shrink = |theta: f64| -> Vec<f64> {
            y.iter()
                .enumerate()
                .map(|(i, x)| sign(*x) * (x.abs() - theta / w(i)).max(0.0))
                .collect()
        };
        let mass = |v: &[f64]| v.iter().enumerate().map(|(i, x)| x.abs() / w(i)).sum::<f64>();
        let (mut lo, mut hi) = (0.0, y.iter().enumerate().map(|(i, x)| x.abs() * w(i)).fold(0.0, f64::max));
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mass(&shrink(mid)) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(shrink(hi))
    }

    /// `Some(k)` when `‖v‖ = k·‖v‖₂` for every `v`.
    pub fn euclidean_scale(&self) -> Option<f64> {
        if self.exponent() != 2.0 {
            return None;
        }
        match self.weights() {
            None => Some(1.0),
            Some(w) if w.iter().all(|x| *x == w[0]) => Some(w[0]),
            Some(_) => None,
        }
    }

    /// Largest `m` with `m·‖v‖₂ ≤ ‖v‖` on `R^dim`.
    pub fn euclidean_lower_constant(&self, dim: usize) -> f64 {
        let p = self.exponent();
        let n = dim.max(1) as f64;
        let base = if p >= 2.0 { n.powf(1.0 / p - 0.5) } else { 1.0 };
        let wmin = self
            .weights()
            .map_or(1.0, |w| w.iter().cloned().fold(f64::INFINITY, f64::min));
        base * wmin
    }

    /// Smallest `M` with `‖v‖ ≤ M·‖v‖₂` on `R^dim`.
    pub fn euclidean_upper_constant(&self, dim: usize) -> f64 {
        let p = self.exponent();
        let n = dim.max(1) as f64;
        let base = if p >= 2.0 { 1.0 } else { n.powf(1.0 / p - 0.5) };
        let wmax = self.weights().map_or(1.0, |w| w.iter().cloned().fold(0.0, f64::max));
        base * wmax
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn raw_lp(z: &[f64], p: f64) -> f64 {
    let max = z.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    if p == 1.0 {
        return z.iter().map(|x| x.abs()).sum();
    }
    if p == 2.0 {
        return z.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    // rescale by the largest entry to keep the powers finite
    let s: f64 = z.iter().map(|x| (x.abs() / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}
