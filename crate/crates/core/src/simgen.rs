//! Random linear Gaussian SEMs: weighted DAGs, their covariance, samples and
//! latent-variable removal.

use nalgebra::DMatrix;
use rand::distr::{Bernoulli, Distribution, Uniform};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dag::WeightedDag;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::rng::{self, Purpose};

pub const WEIGHT_MIN: f64 = 0.1;
pub const WEIGHT_MAX: f64 = 1.0;

/// Each lower-triangular entry is an edge with probability `expected_neighbors / (p - 1)`,
/// weighted uniformly in `[0.1, 1]`.
pub fn random_weighted_dag<R: Rng + ?Sized>(p: usize, expected_neighbors: f64, rng: &mut R) -> Result<WeightedDag> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    let max_en = (p - 1) as f64;
    if !(expected_neighbors >= 0.0 && expected_neighbors <= max_en) {
        return Err(Error::InvalidParameter(format!(
            "expected neighborhood size {expected_neighbors} outside [0, {max_en}]"
        )));
    }
    let prob = if p > 1 { expected_neighbors / max_en } else { 0.0 };
    let edge = Bernoulli::new(prob).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let weight = Uniform::new_inclusive(WEIGHT_MIN, WEIGHT_MAX).expect("valid weight range");
    let mut w = vec![0.0; p * p];
    for i in 1..p {
        for r in 0..i {
            if edge.sample(rng) {
                w[i * p + r] = weight.sample(rng);
            }
        }
    }
    WeightedDag::new(p, w)
}

/// `(I - A)^{-1}` by forward substitution; `I - A` is unit lower triangular.
fn unit_lower_inverse(d: &WeightedDag) -> DMatrix<f64> {
    let p = d.n_nodes();
    let mut b = DMatrix::<f64>::zeros(p, p);
    for col in 0..p {
        b[(col, col)] = 1.0;
        for i in col + 1..p {
            let s: f64 = (col..i).map(|r| d.weight(i, r) * b[(r, col)]).sum();
            b[(i, col)] = s;
        }
    }
    b
}

/// `Σ = (I - A)^{-1} (I - A)^{-T}` of the SEM with unit-variance noise.
pub fn implied_covariance(d: &WeightedDag) -> DMatrix<f64> {
    let b = unit_lower_inverse(d);
    let s = &b * b.transpose();
    // exact symmetry for downstream consumers
    DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| if i <= j { s[(i, j)] } else { s[(j, i)] })
}

/// `n` i.i.d. rows by forward substitution through the structural equations.
pub fn sample_gaussian<R: Rng + ?Sized>(d: &WeightedDag, n: usize, rng: &mut R) -> DMatrix<f64> {
    let p = d.n_nodes();
    let parents: Vec<Vec<(NodeId, f64)>> = (0..p)
        .map(|i| (0..i).map(|r| (r, d.weight(i, r))).filter(|&(_, w)| w != 0.0).collect())
        .collect();
    let mut x = DMatrix::<f64>::zeros(n, p);
    let mut row = vec![0.0; p];
    for k in 0..n {
        for i in 0..p {
            let eps: f64 = StandardNormal.sample(rng);
            row[i] = parents[i].iter().map(|&(r, w)| w * row[r]).sum::<f64>() + eps;
        }
        for i in 0..p {
            x[(k, i)] = row[i];
        }
    }
    x
}

#[derive(Clone, Debug, PartialEq)]
pub struct Marginalized {
    /// Original indices of the surviving columns, increasing.
    pub kept: Vec<NodeId>,
    pub removed: Vec<NodeId>,
    pub data: DMatrix<f64>,
}

/// Nodes with no parents and at least two children.
pub fn latent_candidates(d: &WeightedDag) -> Vec<NodeId> {
    let dag = d.dag();
    (0..d.n_nodes())
        .filter(|&v| dag.parents(v).is_empty() && dag.children(v).len() >= 2)
        .collect()
}

/// Drops `floor(k / 2)` of the `k` latent candidates, chosen uniformly at
/// random, from the data columns.
pub fn remove_latents<R: Rng + ?Sized>(d: &WeightedDag, data: &DMatrix<f64>, rng: &mut R) -> Result<Marginalized> {
    let p = d.n_nodes();
    if data.ncols() != p {
        return Err(Error::InvalidData(format!("data has {} columns for p={p}", data.ncols())));
    }
    let candidates = latent_candidates(d);
    let mut removed: Vec<NodeId> = index::sample(rng, candidates.len(), candidates.len() / 2)
        .into_iter()
        .map(|k| candidates[k])
        .collect();
    removed.sort_unstable();
    let kept: Vec<NodeId> = (0..p).filter(|v| removed.binary_search(v).is_err()).collect();
    let data = data.select_columns(kept.iter());
    Ok(Marginalized { kept, removed, data })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub p: usize,
    #[serde(alias = "en")]
    pub expected_neighbors: f64,
    pub n: usize,
    pub graphs: usize,
    #[serde(alias = "orderings")]
    pub orderings_per_graph: usize,
    #[serde(default)]
    pub latent: bool,
    pub seed: u64,
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n == 0 || self.graphs == 0 || self.orderings_per_graph == 0 {
            return Err(Error::InvalidParameter("all counts must be at least 1".into()));
        }
        if !(self.expected_neighbors > 0.0 && self.expected_neighbors <= (self.p.max(2) - 1) as f64) {
            return Err(Error::InvalidParameter(format!(
                "expected_neighbors must lie in (0, p-1], got {}",
                self.expected_neighbors
            )));
        }
        Ok(())
    }

    /// Generates replicate `index` from its own random streams.
    pub fn replicate(&self, index: usize) -> Result<Replicate> {
        let g = index as u64;
        let dag = random_weighted_dag(self.p, self.expected_neighbors, &mut rng::stream(self.seed, Purpose::Graph, g))?;
        let full = sample_gaussian(&dag, self.n, &mut rng::stream(self.seed, Purpose::Data, g));
        let (kept, data) = if self.latent {
            let m = remove_latents(&dag, &full, &mut rng::stream(self.seed, Purpose::Latent, g))?;
            (m.kept, m.data)
        } else {
            ((0..self.p).collect(), full)
        };
        Ok(Replicate { index, dag, kept, data })
    }
}

#[derive(Clone, Debug)]
pub struct Replicate {
    pub index: usize,
    pub dag: WeightedDag,
    /// Observed variables (original indices); all of them without latents.
    pub kept: Vec<NodeId>,
    pub data: DMatrix<f64>,
}
