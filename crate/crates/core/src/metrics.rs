//! Structural comparison of estimated and true graphs, and order-stability
//! diagnostics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeKind, MixedGraph, NodeId};

fn assert_same_size(a: &MixedGraph, b: &MixedGraph) {
    assert_eq!(a.n_nodes(), b.n_nodes(), "graphs must have the same node count");
}

/// Structural Hamming distance: per unordered pair, 1 if exactly one graph
/// has an edge or both have an edge with different marks, else 0.
pub fn shd(g1: &MixedGraph, g2: &MixedGraph) -> usize {
    assert_same_size(g1, g2);
    let mut d = 0;
    for (i, j, mi, mj) in g1.edges() {
        match (g2.mark(j, i), g2.mark(i, j)) {
            (Some(ni), Some(nj)) if (ni, nj) == (mi, mj) => {}
            _ => d += 1,
        }
    }
    // edges only in g2
    d + g2.edges().filter(|&(i, j, _, _)| !g1.is_adjacent(i, j)).count()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SkeletonScore {
    pub edges_estimated: usize,
    pub edges_true: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    /// `true_positives / edges_estimated`, 0 when nothing was estimated.
    pub tdr: f64,
}

impl SkeletonScore {
    pub fn errors(&self) -> usize {
        self.false_positives + self.false_negatives
    }
}

pub fn skeleton_score(est: &MixedGraph, truth: &MixedGraph) -> SkeletonScore {
    assert_same_size(est, truth);
    let edges_estimated = est.edge_count();
    let edges_true = truth.edge_count();
    let true_positives = est.edges().filter(|&(i, j, _, _)| truth.is_adjacent(i, j)).count();
    SkeletonScore {
        edges_estimated,
        edges_true,
        true_positives,
        false_positives: edges_estimated - true_positives,
        false_negatives: edges_true - true_positives,
        tdr: if edges_estimated == 0 {
            0.0
        } else {
            true_positives as f64 / edges_estimated as f64
        },
    }
}

fn directed_pairs(g: &MixedGraph) -> Vec<(NodeId, NodeId)> {
    g.edges()
        .filter_map(|(i, j, _, _)| match g.edge_kind(i, j) {
            Some(EdgeKind::Directed { from, to }) => Some((from, to)),
            _ => None,
        })
        .collect()
}

/// True and false positive rates of directed edges. An estimated directed
/// edge is a true positive if the truth has the same edge in the same
/// direction. FPR divides by the number of unordered pairs that are not
/// directed in the truth. Zero denominators give 0.
pub fn directed_rates(est: &MixedGraph, truth: &MixedGraph) -> (f64, f64) {
    assert_same_size(est, truth);
    let p = est.n_nodes();
    let est_dir = directed_pairs(est);
    let true_dir = directed_pairs(truth).len();
    let tp = est_dir.iter().filter(|&&(f, t)| truth.is_directed(f, t)).count();
    let fp = est_dir.len() - tp;
    let negatives = p * p.saturating_sub(1) / 2 - true_dir;
    let tpr = if true_dir == 0 { 0.0 } else { tp as f64 / true_dir as f64 };
    let fpr = if negatives == 0 { 0.0 } else { fp as f64 / negatives as f64 };
    (tpr, fpr)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityGroup {
    /// Present in every skeleton.
    Always,
    /// Present in at least half.
    Majority,
    /// Present in fewer than half.
    Unstable,
}

impl StabilityGroup {
    pub fn name(self) -> &'static str {
        match self {
            StabilityGroup::Always => "always",
            StabilityGroup::Majority => "majority",
            StabilityGroup::Unstable => "unstable",
        }
    }
}

/// Occurrence counts of each edge across `runs` skeletons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityTable {
    pub runs: usize,
    counts: BTreeMap<(NodeId, NodeId), usize>,
}

impl StabilityTable {
    pub fn count(&self, i: NodeId, j: NodeId) -> usize {
        self.counts.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    pub fn group_of(&self, count: usize) -> StabilityGroup {
        if count == self.runs {
            StabilityGroup::Always
        } else if 2 * count >= self.runs {
            StabilityGroup::Majority
        } else {
            StabilityGroup::Unstable
        }
    }

    /// `(pair, count)` by descending count, ties by pair.
    pub fn sorted(&self) -> Vec<((NodeId, NodeId), usize)> {
        let mut v: Vec<_> = self.counts.iter().map(|(&k, &c)| (k, c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    pub fn group_sizes(&self) -> BTreeMap<StabilityGroup, usize> {
        let mut m = BTreeMap::new();
        for &c in self.counts.values() {
            *m.entry(self.group_of(c)).or_insert(0) += 1;
        }
        m
    }

    /// Distinct occurrence counts present in the table.
    pub fn levels(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.counts.values().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `i,j,count,frequency,group` rows in [`StabilityTable::sorted`] order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,count,frequency,group\n");
        for ((i, j), c) in self.sorted() {
            let _ = writeln!(
                s,
                "{i},{j},{c},{},{}",
                c as f64 / self.runs as f64,
                self.group_of(c).name()
            );
        }
        s
    }
}

pub fn stability_table<'a, I>(skeletons: I) -> StabilityTable
where
    I: IntoIterator<Item = &'a MixedGraph>,
{
    let mut counts = BTreeMap::new();
    let mut runs = 0;
    let mut p = None;
    for g in skeletons {
        assert!(p.is_none_or(|p| p == g.n_nodes()), "graphs must have the same node count");
        p = Some(g.n_nodes());
        runs += 1;
        for pair in g.edge_pairs() {
            *counts.entry(pair).or_insert(0) += 1;
        }
    }
    StabilityTable { runs, counts }
}

/// Population variance (divides by the number of values).
pub fn variance_across_orderings(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "variance of an empty list");
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shd_examples() {
        let mut a = MixedGraph::empty(3);
        a.add_directed(0, 1).unwrap();
        assert_eq!(shd(&a, &a), 0);
        let mut b = MixedGraph::empty(3);
        b.add_undirected(0, 1).unwrap();
        assert_eq!(shd(&a, &b), 1);
        assert_eq!(shd(&a, &MixedGraph::empty(3)), 1);
        let mut c = MixedGraph::empty(3);
        c.add_directed(1, 0).unwrap();
        assert_eq!(shd(&a, &c), 1);
        let mut d = MixedGraph::empty(3);
        d.add_bidirected(0, 1).unwrap();
        d.add_undirected(1, 2).unwrap();
        assert_eq!(shd(&a, &d), 2);
        assert_eq!(shd(&d, &a), 2);
    }

    #[test]
    fn skeleton_score_examples() {
        let mut t = MixedGraph::empty(4);
        t.add_directed(0, 1).unwrap();
        t.add_undirected(1, 2).unwrap();
        let s = skeleton_score(&t, &t);
        assert_eq!((s.tdr, s.errors()), (1.0, 0));
        let e = skeleton_score(&MixedGraph::empty(4), &t);
        assert_eq!((e.tdr, e.false_negatives, e.edges_estimated), (0.0, 2, 0));
        let mut est = MixedGraph::empty(4);
        est.add_undirected(1, 0).unwrap();
        est.add_undirected(2, 3).unwrap();
        let s = skeleton_score(&est, &t);
        assert_eq!((s.true_positives, s.false_positives, s.false_negatives), (1, 1, 1));
        assert_eq!(s.tdr, 0.5);
    }

    #[test]
    fn directed_rate_examples() {
        let mut t = MixedGraph::empty(3);
        t.add_directed(0, 1).unwrap();
        t.add_directed(2, 1).unwrap();
        assert_eq!(directed_rates(&t, &t), (1.0, 0.0));
        assert_eq!(directed_rates(&t.skeleton(), &t), (0.0, 0.0));
        let mut e = MixedGraph::empty(3);
        e.add_directed(1, 0).unwrap();
        e.add_directed(2, 1).unwrap();
        // one correct of two; one wrong among 3 - 2 = 1 negative pairs
        assert_eq!(directed_rates(&e, &t), (0.5, 1.0));
    }

    #[test]
    fn stability_counts() {
        let mut a = MixedGraph::empty(3);
        a.add_undirected(0, 1).unwrap();
        let mut b = a.clone();
        b.add_undirected(1, 2).unwrap();
        let graphs = vec![a.clone(), a.clone(), b];
        let t = stability_table(&graphs);
        assert_eq!(t.count(1, 0), 3);
        assert_eq!(t.count(1, 2), 1);
        assert_eq!(t.group_of(3), StabilityGroup::Always);
        assert_eq!(t.group_of(2), StabilityGroup::Majority);
        assert_eq!(t.group_of(1), StabilityGroup::Unstable);
        assert_eq!(t.to_csv(), "i,j,count,frequency,group\n0,1,3,1,always\n1,2,1,0.3333333333333333,unstable\n");
        let one = stability_table(std::iter::once(&a));
        assert_eq!(one.levels(), vec![1]);
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance_across_orderings(&[3.0, 3.0, 3.0]), 0.0);
        assert_eq!(variance_across_orderings(&[0.0, 2.0]), 1.0);
        assert_eq!(variance_across_orderings(&[5.0]), 0.0);
    }
}
