//! Statistical checks of the random DAG generator and the Gaussian sampler.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stablepc::rng::{stream, Purpose};
use stablepc::simgen::{
    implied_covariance, latent_candidates, random_weighted_dag, remove_latents, sample_gaussian, SimSpec,
};
use stablepc::{learn_from_data, Variant, WeightedDag};

fn sample_covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let means: Vec<f64> = (0..x.ncols()).map(|j| x.column(j).sum() / n).collect();
    DMatrix::from_fn(x.ncols(), x.ncols(), |a, b| {
        (0..x.nrows()).map(|k| (x[(k, a)] - means[a]) * (x[(k, b)] - means[b])).sum::<f64>() / n
    })
}

#[test]
fn edge_count_matches_its_binomial_law() {
    let (p, en, reps) = (1000usize, 2.0, 50);
    let pairs = (p * (p - 1) / 2) as f64;
    let q = en / (p - 1) as f64;
    let total: usize = (0..reps)
        .map(|r| {
            let d = random_weighted_dag(p, en, &mut stream(11, Purpose::Graph, r)).unwrap();
            d.weighted_edges().len()
        })
        .sum();
    let mean = total as f64 / reps as f64;
    let sd_of_mean = (pairs * q * (1.0 - q) / reps as f64).sqrt();
    assert!((mean - pairs * q).abs() <= 3.0 * sd_of_mean, "mean {mean}, expected {}", pairs * q);
}

#[test]
fn weights_stay_in_range_and_are_lower_triangular() {
    let d = random_weighted_dag(60, 5.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    for (from, to, w) in d.weighted_edges() {
        assert!(from < to);
        assert!((0.1..=1.0).contains(&w));
    }
}

#[test]
fn sample_moments_match_the_model() {
    let d = random_weighted_dag(6, 2.0, &mut ChaCha8Rng::seed_from_u64(21)).unwrap();
    let sigma = implied_covariance(&d);
    let n = 10_000;
    let x = sample_gaussian(&d, n, &mut ChaCha8Rng::seed_from_u64(22));
    let s = sample_covariance(&x);
    let nf = n as f64;
    for a in 0..6 {
        let mean = x.column(a).sum() / nf;
        assert!(mean.abs() <= 5.0 * (sigma[(a, a)] / nf).sqrt(), "mean of column {a}: {mean}");
        for b in 0..6 {
            // standard error of a sample covariance under normality
            let se = ((sigma[(a, a)] * sigma[(b, b)] + sigma[(a, b)].powi(2)) / nf).sqrt();
            assert!((s[(a, b)] - sigma[(a, b)]).abs() <= 5.0 * se, "cov({a},{b})");
        }
    }
}

#[test]
fn large_sample_correlation_of_a_single_edge() {
    let a = 0.6;
    let d = WeightedDag::from_edges(2, &[(0, 1, a)]).unwrap();
    let x = sample_gaussian(&d, 100_000, &mut ChaCha8Rng::seed_from_u64(5));
    let s = sample_covariance(&x);
    let r = s[(0, 1)] / (s[(0, 0)] * s[(1, 1)]).sqrt();
    let truth = a / (1.0 + a * a).sqrt();
    assert!((r - truth).abs() < 0.02, "r = {r}");
    assert!((s[(1, 1)] - (1.0 + a * a)).abs() < 0.05);
}

#[test]
fn unconnected_columns_are_uncorrelated() {
    let d = random_weighted_dag(4, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let x = sample_gaussian(&d, 10_000, &mut ChaCha8Rng::seed_from_u64(2));
    let s = sample_covariance(&x);
    for a in 0..4 {
        for b in a + 1..4 {
            assert!((s[(a, b)] / (s[(a, a)] * s[(b, b)]).sqrt()).abs() < 0.05);
        }
    }
}

#[test]
fn latent_removal_drops_half_the_candidates_rounded_down() {
    for seed in 0..40 {
        let d = random_weighted_dag(30, 3.0, &mut stream(seed, Purpose::Graph, 0)).unwrap();
        let x = sample_gaussian(&d, 5, &mut stream(seed, Purpose::Data, 0));
        let q = latent_candidates(&d).len();
        let m = remove_latents(&d, &x, &mut stream(seed, Purpose::Latent, 0)).unwrap();
        assert_eq!(m.removed.len(), q / 2);
        assert_eq!(m.kept.len() + m.removed.len(), 30);
        let dag = d.dag();
        for &v in &m.removed {
            assert!(dag.parents(v).is_empty() && dag.children(v).len() >= 2);
        }
    }
}

#[test]
fn replicates_are_reproducible_and_independent_of_request_order() {
    let spec = SimSpec {
        p: 15,
        expected_neighbors: 2.0,
        n: 40,
        graphs: 3,
        orderings_per_graph: 2,
        latent: true,
        seed: 77,
    };
    let late_first = spec.replicate(2).unwrap();
    let early = spec.replicate(0).unwrap();
    let again = spec.replicate(2).unwrap();
    assert_eq!(late_first.data, again.data);
    assert_eq!(late_first.dag, again.dag);
    assert_ne!(early.data, late_first.data);
}

#[test]
fn learns_a_single_edge_from_data() {
    let d = WeightedDag::from_edges(2, &[(0, 1, 0.8)]).unwrap();
    let x = sample_gaussian(&d, 200, &mut ChaCha8Rng::seed_from_u64(8));
    let r = learn_from_data(&x, &Variant::PcStable.config(0.01)).unwrap();
    assert_eq!(r.graph.edge_count(), 1);
    assert!(r.graph.is_undirected(0, 1));
}
