//! Fixtures and independent reference implementations shared by the
//! integration tests. Nothing here calls into the code under test except to
//! construct inputs.
#![allow(dead_code)]

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use proptest::prelude::*;
use stablepc::ci::d_separated;
use stablepc::graph::Mark;
use stablepc::{Dag, IndependenceTest, MixedGraph, MockOracle, NodeId, Result, VariableOrder};

// ---------- labelled fixtures (1-based labels X1..Xp) ----------

fn ix(v: usize) -> NodeId {
    v - 1
}

/// Order given by 1-based labels.
pub fn order(labels: &[usize]) -> VariableOrder {
    VariableOrder::from_perm(labels.iter().map(|&v| ix(v)).collect()).unwrap()
}

pub fn dag(p: usize, edges: &[(usize, usize)]) -> Dag {
    let e: Vec<_> = edges.iter().map(|&(a, b)| (ix(a), ix(b))).collect();
    Dag::from_edges(p, &e).unwrap()
}

/// Graph from 1-based undirected, directed and bidirected edge lists.
pub fn graph(p: usize, und: &[(usize, usize)], dir: &[(usize, usize)], bi: &[(usize, usize)]) -> MixedGraph {
    let mut g = MixedGraph::empty(p);
    for &(a, b) in und {
        g.add_undirected(ix(a), ix(b)).unwrap();
    }
    for &(a, b) in dir {
        g.add_directed(ix(a), ix(b)).unwrap();
    }
    for &(a, b) in bi {
        g.add_bidirected(ix(a), ix(b)).unwrap();
    }
    g
}

/// True DAG of the skeleton order-dependence example.
pub fn five_node_dag_a() -> Dag {
    dag(5, &[(1, 4), (1, 5), (1, 3), (2, 5), (2, 3), (4, 5), (3, 5), (3, 4)])
}

/// Sample judgments for the skeleton example: two correct, one spurious.
pub fn skeleton_example_oracle() -> MockOracle {
    MockOracle::new(5)
        .independent(ix(1), ix(2), &[])
        .unwrap()
        .independent(ix(2), ix(4), &[ix(1), ix(3)])
        .unwrap()
        .independent(ix(3), ix(4), &[ix(1), ix(5)])
        .unwrap()
}

/// True DAG of the separating-set example.
pub fn five_node_dag_b() -> Dag {
    dag(5, &[(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)])
}

/// All d-separations of [`five_node_dag_b`] plus a spurious `X1 ⊥ X3 | X4`.
pub fn sepset_example_oracle() -> MockOracle {
    MockOracle::with_base(five_node_dag_b())
        .independent(ix(1), ix(3), &[ix(4)])
        .unwrap()
}

// ---------- independent reference implementations ----------

/// d-separation by enumerating every simple path of the skeleton.
pub fn dsep_by_paths(d: &Dag, x: NodeId, y: NodeId, z: &[NodeId]) -> bool {
    let p = d.n_nodes();
    let in_z = |v: NodeId| z.contains(&v);
    // descendants-or-self of each node, by repeated expansion
    let desc: Vec<Vec<bool>> = (0..p)
        .map(|v| {
            let mut seen = vec![false; p];
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                if !seen[u] {
                    seen[u] = true;
                    stack.extend(d.children(u).iter().copied());
                }
            }
            seen
        })
        .collect();
    let collider_open = |c: NodeId| (0..p).any(|w| desc[c][w] && in_z(w));

    fn walk(
        d: &Dag,
        path: &mut Vec<NodeId>,
        y: NodeId,
        active: &dyn Fn(&[NodeId]) -> bool,
    ) -> bool {
        let last = *path.last().unwrap();
        if last == y {
            return active(path);
        }
        let nbrs: Vec<NodeId> = d.parents(last).iter().chain(d.children(last)).copied().collect();
        for n in nbrs {
            if path.contains(&n) {
                continue;
            }
            path.push(n);
            if walk(d, path, y, active) {
                return true;
            }
            path.pop();
        }
        false
    }

    let active = |path: &[NodeId]| {
        path.windows(3).all(|w| {
            let (a, m, b) = (w[0], w[1], w[2]);
            let collider = d.has_edge(a, m) && d.has_edge(b, m);
            if collider {
                collider_open(m)
            } else {
                !in_z(m)
            }
        })
    };
    !walk(d, &mut vec![x], y, &active)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Partial correlation as the correlation of the population residuals of
/// `i` and `j` after linear regression on `s`.
pub fn residual_partial_corr(sigma: &[Vec<f64>], i: usize, j: usize, s: &[usize]) -> f64 {
    let sub: Vec<Vec<f64>> = s.iter().map(|&a| s.iter().map(|&b| sigma[a][b]).collect()).collect();
    let beta = |t: usize| -> Vec<f64> {
        if s.is_empty() {
            vec![]
        } else {
            solve(sub.clone(), s.iter().map(|&a| sigma[a][t]).collect())
        }
    };
    let (bi, bj) = (beta(i), beta(j));
    let explained = |t: usize, b: &[f64]| -> f64 { s.iter().zip(b).map(|(&a, w)| sigma[t][a] * w).sum() };
    let cij = sigma[i][j] - explained(i, &bj);
    let cii = sigma[i][i] - explained(i, &bi);
    let cjj = sigma[j][j] - explained(j, &bj);
    cij / (cii * cjj).sqrt()
}

/// SHD by looking at every unordered pair.
pub fn shd_pairwise(a: &MixedGraph, b: &MixedGraph) -> usize {
    let p = a.n_nodes();
    let mut d = 0;
    for i in 0..p {
        for j in i + 1..p {
            let ea = (a.mark(j, i), a.mark(i, j));
            let eb = (b.mark(j, i), b.mark(i, j));
            if ea != eb {
                d += 1;
            }
        }
    }
    d
}

// ---------- noisy oracle ----------

/// d-separation in `dag` with a deterministic pseudo-random fraction of the
/// answers flipped, imitating test errors that depend only on the query.
#[derive(Clone, Debug)]
pub struct NoisyOracle {
    pub dag: Dag,
    pub salt: u64,
    /// Percent of queries whose answer is flipped.
    pub flip_percent: u64,
}

impl IndependenceTest for NoisyOracle {
    fn n_vars(&self) -> usize {
        self.dag.n_nodes()
    }

    fn evaluate(&self, x: NodeId, y: NodeId, cond: &[NodeId]) -> Result<bool> {
        let mut h = DefaultHasher::new();
        (self.salt, x.min(y), x.max(y), cond).hash(&mut h);
        let flip = h.finish() % 100 < self.flip_percent;
        Ok(d_separated(&self.dag, x, y, cond) != flip)
    }
}

// ---------- strategies ----------

/// Random DAG on `p` nodes with edge probability `prob`, relabeled by a
/// random permutation so the natural order is not always topological.
pub fn arb_dag(p_range: std::ops::RangeInclusive<usize>, prob: f64) -> impl Strategy<Value = Dag> {
    p_range.prop_flat_map(move |p| {
        let pairs = p * (p - 1) / 2;
        (
            proptest::collection::vec(proptest::bool::weighted(prob), pairs),
            Just((0..p).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(move |(bits, perm)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for to in 1..p {
                    for from in 0..to {
                        if bits[k] {
                            edges.push((perm[from], perm[to]));
                        }
                        k += 1;
                    }
                }
                Dag::from_edges(p, &edges).unwrap()
            })
    })
}

pub fn arb_perm(p: usize) -> impl Strategy<Value = Vec<NodeId>> {
    Just((0..p).collect::<Vec<_>>()).prop_shuffle()
}

/// Arbitrary mixed graph on `p` nodes: each pair is absent, undirected,
/// directed either way or bidirected.
pub fn arb_mixed_graph(p: usize) -> impl Strategy<Value = MixedGraph> {
    proptest::collection::vec(0u8..5, p * (p - 1) / 2).prop_map(move |codes| {
        let mut g = MixedGraph::empty(p);
        let mut k = 0;
        for i in 0..p {
            for j in i + 1..p {
                let (mi, mj) = match codes[k] {
                    0 => {
                        k += 1;
                        continue;
                    }
                    1 => (Mark::Tail, Mark::Tail),
                    2 => (Mark::Tail, Mark::Arrow),
                    3 => (Mark::Arrow, Mark::Tail),
                    _ => (Mark::Arrow, Mark::Arrow),
                };
                g.set_edge(i, j, mi, mj).unwrap();
                k += 1;
            }
        }
        g
    })
}
