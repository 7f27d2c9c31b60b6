//! Step 1: level-wise adjacency search.
//!
//! Both variants start from the complete graph and, for conditioning-set
//! size `ℓ = 0, 1, 2, ...`, test every adjacent ordered pair `(i, j)` against
//! the size-`ℓ` subsets of `i`'s candidate set. Pairs and subsets are visited
//! lexicographically in the ranks of the [`VariableOrder`]; the first
//! independence deletes the edge and records its separating set.
//!
//! The original search reads candidate sets from the working graph, so a
//! deletion changes what later pairs at the same level may condition on. The
//! stable search freezes the candidate sets at the start of each level, which
//! makes the edge set independent of the order and lets a level be evaluated
//! in parallel.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ci::{CiTester, IndependenceTest};
use crate::error::{Error, Result};
use crate::graph::{MixedGraph, NodeId};
use crate::order::VariableOrder;

/// Separating sets of deleted pairs, stored once per unordered pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SepsetMap {
    sets: BTreeMap<(NodeId, NodeId), Vec<NodeId>>,
}

impl SepsetMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, i: NodeId, j: NodeId, set: &[NodeId]) {
        let mut s = set.to_vec();
        s.sort_unstable();
        self.sets.insert((i.min(j), i.max(j)), s);
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> Option<&[NodeId]> {
        self.sets.get(&(i.min(j), i.max(j))).map(Vec::as_slice)
    }

    pub fn contains(&self, i: NodeId, j: NodeId) -> bool {
        self.sets.contains_key(&(i.min(j), i.max(j)))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `((i, j), set)` with `i < j`, sorted by pair.
    pub fn iter(&self) -> impl Iterator<Item = ((NodeId, NodeId), &[NodeId])> {
        self.sets.iter().map(|(&k, v)| (k, v.as_slice()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    /// Distinct CI evaluations issued at this level.
    pub tests: u64,
    pub deletions: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonResult {
    /// Undirected graph.
    pub graph: MixedGraph,
    pub sepsets: SepsetMap,
    pub levels: Vec<LevelStats>,
}

impl SkeletonResult {
    pub fn total_tests(&self) -> u64 {
        self.levels.iter().map(|l| l.tests).sum()
    }

    pub fn tests_at(&self, level: usize) -> u64 {
        self.levels.get(level).map_or(0, |l| l.tests)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SkeletonOptions {
    /// Stop after this conditioning-set size.
    pub max_level: Option<usize>,
    /// Evaluate the pairs of each level concurrently (stable search only).
    pub parallel: bool,
}

fn check_inputs<T: IndependenceTest>(ci: &CiTester<T>, p: usize, order: &VariableOrder) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidParameter("need at least one variable".into()));
    }
    if ci.n_vars() != p || order.len() != p {
        return Err(Error::InvalidParameter(format!(
            "p={p} but the tester covers {} variables and the order {}",
            ci.n_vars(),
            order.len()
        )));
    }
    Ok(())
}

fn has_eligible_pair(g: &MixedGraph, level: usize) -> bool {
    // |adj(i) \ {j}| >= level for some adjacent (i, j)
    (0..g.n_nodes()).any(|i| g.degree(i) > level)
}

/// First subset of `candidates \ {j}` of size `level` (rank-lexicographic)
/// that separates `i` and `j`. `candidates` must be sorted by rank.
fn find_sepset<T: IndependenceTest>(
    ci: &CiTester<T>,
    i: NodeId,
    j: NodeId,
    candidates: &[NodeId],
    level: usize,
) -> Result<Option<Vec<NodeId>>> {
    let rest: Vec<NodeId> = candidates.iter().copied().filter(|&v| v != j).collect();
    if rest.len() < level {
        return Ok(None);
    }
    for s in rest.into_iter().combinations(level) {
        if ci.is_independent(i, j, &s)? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

fn ranked_adjacency(g: &MixedGraph, i: NodeId, order: &VariableOrder) -> Vec<NodeId> {
    let mut a = g.adjacent_vec(i);
    order.sort_by_rank(&mut a);
    a
}

/// Original, order-dependent adjacency search.
pub fn pc_skeleton<T: IndependenceTest>(
    ci: &CiTester<T>,
    p: usize,
    order: &VariableOrder,
) -> Result<SkeletonResult> {
    pc_skeleton_with(ci, p, order, &SkeletonOptions::default())
}

/// As [`pc_skeleton`]; `opts.parallel` is ignored since the result depends on
/// the interleaving of deletions.
pub fn pc_skeleton_with<T: IndependenceTest>(
    ci: &CiTester<T>,
    p: usize,
    order: &VariableOrder,
    opts: &SkeletonOptions,
) -> Result<SkeletonResult> {
    check_inputs(ci, p, order)?;
    let mut g = MixedGraph::complete(p);
    let mut sepsets = SepsetMap::new();
    let mut levels = Vec::new();
    let mut level = 0;
    while has_eligible_pair(&g, level) && opts.max_level.is_none_or(|m| level <= m) {
        let before = ci.evaluations();
        let mut deletions = 0;
        for &i in order.nodes() {
            // only edges at i can disappear while i is the first element
            for j in ranked_adjacency(&g, i, order) {
                if !g.is_adjacent(i, j) {
                    continue;
                }
                let current = ranked_adjacency(&g, i, order);
                if let Some(s) = find_sepset(ci, i, j, &current, level)? {
                    g.remove_edge(i, j);
                    sepsets.insert(i, j, &s);
                    deletions += 1;
                }
            }
        }
        levels.push(LevelStats {
            level,
            tests: ci.evaluations() - before,
            deletions,
        });
        level += 1;
    }
    Ok(SkeletonResult {
        graph: g,
        sepsets,
        levels,
    })
}

/// Order-independent adjacency search with per-level frozen candidate sets.
pub fn pc_stable_skeleton<T: IndependenceTest>(
    ci: &CiTester<T>,
    p: usize,
    order: &VariableOrder,
) -> Result<SkeletonResult> {
    pc_stable_skeleton_with(ci, p, order, &SkeletonOptions::default())
}

pub fn pc_stable_skeleton_with<T: IndependenceTest>(
    ci: &CiTester<T>,
    p: usize,
    order: &VariableOrder,
    opts: &SkeletonOptions,
) -> Result<SkeletonResult> {
    check_inputs(ci, p, order)?;
    let mut g = MixedGraph::complete(p);
    let mut sepsets = SepsetMap::new();
    let mut levels = Vec::new();
    let mut level = 0;
    while has_eligible_pair(&g, level) && opts.max_level.is_none_or(|m| level <= m) {
        let before = ci.evaluations();
        let frozen: Vec<Vec<NodeId>> = (0..p).map(|i| ranked_adjacency(&g, i, order)).collect();

        // Deleting {u, v} at this level can only come from (u, v) or (v, u),
        // both of which read the frozen sets, so each unordered pair is an
        // independent task. Tasks are listed in the sequential visiting order
        // of their first ordered pair.
        let tasks: Vec<(NodeId, NodeId)> = order
            .nodes()
            .iter()
            .flat_map(|&u| {
                frozen[u]
                    .iter()
                    .copied()
                    .filter(move |&v| order.rank(u) < order.rank(v))
                    .map(move |v| (u, v))
            })
            .collect();
        let search = |&(u, v): &(NodeId, NodeId)| -> Result<Option<Vec<NodeId>>> {
            if let Some(s) = find_sepset(ci, u, v, &frozen[u], level)? {
                return Ok(Some(s));
            }
            find_sepset(ci, v, u, &frozen[v], level)
        };
        let found: Vec<Result<Option<Vec<NodeId>>>> = if opts.parallel {
            tasks.par_iter().map(search).collect()
        } else {
            tasks.iter().map(search).collect()
        };

        let mut deletions = 0;
        for (&(u, v), res) in tasks.iter().zip(found) {
            if let Some(s) = res? {
                g.remove_edge(u, v);
                sepsets.insert(u, v, &s);
                deletions += 1;
            }
        }
        levels.push(LevelStats {
            level,
            tests: ci.evaluations() - before,
            deletions,
        });
        level += 1;
    }
    Ok(SkeletonResult {
        graph: g,
        sepsets,
        levels,
    })
}
