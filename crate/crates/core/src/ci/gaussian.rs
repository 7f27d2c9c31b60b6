use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use super::IndependenceTest;
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Partial correlations are clamped to `[-1 + CLAMP, 1 - CLAMP]` before the
/// Fisher transform.
pub const CLAMP: f64 = 1e-12;

const RCOND_MIN: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix(DMatrix<f64>);

impl CorrelationMatrix {
    /// Validates symmetry, unit diagonal and entries in `[-1, 1]`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidData("correlation matrix is not square".into()));
        }
        let p = m.nrows();
        for i in 0..p {
            if (m[(i, i)] - 1.0).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidData(format!("diagonal entry {i} is {}", m[(i, i)])));
            }
            for j in 0..i {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if !a.is_finite() || (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidData(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
                if a.abs() > 1.0 + SYMMETRY_TOL {
                    return Err(Error::InvalidData(format!("entry ({i}, {j}) = {a} outside [-1, 1]")));
                }
            }
        }
        Ok(CorrelationMatrix(m))
    }

    /// Rescales a covariance matrix to unit diagonal.
    pub fn from_covariance(cov: &DMatrix<f64>) -> Result<Self> {
        let d: Vec<f64> = cov.diagonal().iter().map(|v| v.sqrt()).collect();
        if d.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidData("covariance has a nonpositive diagonal".into()));
        }
        let p = cov.nrows();
        let m = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { cov[(i, j)] / (d[i] * d[j]) });
        CorrelationMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Pearson correlation of the columns of an `n x p` data matrix.
pub fn correlation_from_data(data: &DMatrix<f64>) -> Result<CorrelationMatrix> {
    let (n, p) = data.shape();
    if n < 2 {
        return Err(Error::InvalidData(format!("need at least 2 observations, got {n}")));
    }
    let mut centered = data.clone();
    let mut sd = vec![0.0; p];
    for j in 0..p {
        let mut col = centered.column_mut(j);
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let ss = col.norm_squared();
        let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !ss.is_finite() {
            return Err(Error::InvalidData(format!("column {j} has non-finite values")));
        }
        // relative test so that large-magnitude constants also count as constant
        if ss == 0.0 || scale <= f64::EPSILON * mean.abs() * 16.0 {
            return Err(Error::ConstantColumn(j));
        }
        sd[j] = ss.sqrt();
    }
    let gram = centered.tr_mul(&centered);
    let m = DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else {
            (gram[(i, j)] / (sd[i] * sd[j])).clamp(-1.0, 1.0)
        }
    });
    CorrelationMatrix::new(m)
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Partial correlation of `i` and `j` given `cond`, from the inverse of the
/// correlation submatrix over `{i, j} ∪ cond`.
pub fn partial_correlation(
    corr: &CorrelationMatrix,
    i: NodeId,
    j: NodeId,
    cond: &[NodeId],
) -> Result<f64> {
    let p = corr.dim();
    if i == j || cond.contains(&i) || cond.contains(&j) {
        return Err(Error::InvalidQuery {
            x: i,
            y: j,
            cond: cond.to_vec(),
            reason: "endpoints must be distinct and outside the conditioning set",
        });
    }
    if i >= p || j >= p || cond.iter().any(|&v| v >= p) {
        return Err(Error::InvalidQuery {
            x: i,
            y: j,
            cond: cond.to_vec(),
            reason: "node out of range",
        });
    }
    if cond.is_empty() {
        return Ok(corr.get(i, j));
    }
    let nodes: Vec<NodeId> = [i, j].into_iter().chain(cond.iter().copied()).collect();
    let k = nodes.len();
    let sub = DMatrix::from_fn(k, k, |a, b| corr.get(nodes[a], nodes[b]));
    let singular = |rcond| Error::SingularSubmatrix {
        nodes: nodes.clone(),
        rcond,
    };
    let inv = sub.clone().try_inverse().ok_or_else(|| singular(0.0))?;
    let rcond = 1.0 / (one_norm(&sub) * one_norm(&inv));
    if !(rcond >= RCOND_MIN) {
        return Err(singular(rcond));
    }
    let r = -inv[(0, 1)] / (inv[(0, 0)] * inv[(1, 1)]).sqrt();
    if !r.is_finite() {
        return Err(singular(rcond));
    }
    Ok(r.clamp(-1.0, 1.0))
}

/// `sqrt(n - s - 3) * |atanh(r)|`, or `None` when `n - s - 3 <= 0`.
pub fn fisher_z_statistic(r: f64, n: usize, s: usize) -> Option<f64> {
    let dof = n as f64 - s as f64 - 3.0;
    if dof <= 0.0 {
        return None;
    }
    let r = r.clamp(-1.0 + CLAMP, 1.0 - CLAMP);
    Some(dof.sqrt() * (0.5 * ((1.0 + r) / (1.0 - r)).ln()).abs())
}

fn two_sided_cutoff(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

/// Fisher z test of zero partial correlation; `true` means independent.
/// Untestable sample sizes (`n - s - 3 <= 0`) are judged dependent.
pub fn fisher_z_decision(r: f64, n: usize, s: usize, alpha: f64) -> bool {
    match fisher_z_statistic(r, n, s) {
        Some(z) => z <= two_sided_cutoff(alpha),
        None => false,
    }
}

/// Gaussian CI test at level `alpha` on a correlation matrix from `n` samples.
#[derive(Debug)]
pub struct GaussianCiTest {
    corr: Arc<CorrelationMatrix>,
    n: usize,
    alpha: f64,
    cutoff: f64,
    degenerate: AtomicU64,
}

impl GaussianCiTest {
    pub fn new(corr: Arc<CorrelationMatrix>, n: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("sample size must be positive".into()));
        }
        Ok(GaussianCiTest {
            corr,
            n,
            alpha,
            cutoff: two_sided_cutoff(alpha),
            degenerate: AtomicU64::new(0),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn correlation(&self) -> &CorrelationMatrix {
        &self.corr
    }

    /// Number of evaluations where `n - |S| - 3 <= 0` forced a dependent verdict.
    pub fn degenerate_queries(&self) -> u64 {
        self.degenerate.load(Ordering::Relaxed)
    }
}

impl IndependenceTest for GaussianCiTest {
    fn n_vars(&self) -> usize {
        self.corr.dim()
    }

    fn evaluate(&self, x: NodeId, y: NodeId, cond: &[NodeId]) -> Result<bool> {
        let r = partial_correlation(&self.corr, x, y, cond)?;
        match fisher_z_statistic(r, self.n, cond.len()) {
            Some(z) => Ok(z <= self.cutoff),
            None => {
                self.degenerate.fetch_add(1, Ordering::Relaxed);
                Ok(false)
            }
        }
    }
}
