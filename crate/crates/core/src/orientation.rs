//! Steps 2 and 3: v-structures and the orientation rules R1-R3.
//!
//! Sequential application walks candidate sites in the rank order of a
//! [`VariableOrder`] and applies each orientation immediately, overwriting
//! conflicting marks. List application collects every candidate from a
//! snapshot first and applies them together; an edge receiving arrowheads
//! from both sides becomes bidirected. Bidirected edges are frozen: they are
//! neither premises nor targets of R1-R3.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::ci::{CiTester, IndependenceTest};
use crate::error::{Error, Result};
use crate::graph::{MixedGraph, NodeId, UnshieldedTriple};
use crate::order::VariableOrder;
use crate::skeleton::SepsetMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VStructureRule {
    /// Read the decision off the separating set found in Step 1.
    Standard,
    /// Unambiguous only if the midpoint is in all or none of the separating sets.
    Conservative,
    /// Unambiguous unless the midpoint is in exactly half of them.
    Majority,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleApplication {
    Sequential,
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientationMode {
    pub vstructures: VStructureRule,
    pub rules: RuleApplication,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleLabel {
    UnambiguousVStructure,
    UnambiguousNonVStructure,
    Ambiguous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleClassification {
    pub triple: UnshieldedTriple,
    pub label: TripleLabel,
    /// Separating sets that contain the midpoint.
    pub sepset_hits: usize,
    pub sepset_total: usize,
}

fn label_for(rule: VStructureRule, hits: usize, total: usize) -> TripleLabel {
    if total == 0 {
        return TripleLabel::Ambiguous;
    }
    match rule {
        VStructureRule::Conservative | VStructureRule::Standard => {
            if hits == 0 {
                TripleLabel::UnambiguousVStructure
            } else if hits == total {
                TripleLabel::UnambiguousNonVStructure
            } else {
                TripleLabel::Ambiguous
            }
        }
        VStructureRule::Majority => match (2 * hits).cmp(&total) {
            std::cmp::Ordering::Less => TripleLabel::UnambiguousVStructure,
            std::cmp::Ordering::Greater => TripleLabel::UnambiguousNonVStructure,
            std::cmp::Ordering::Equal => TripleLabel::Ambiguous,
        },
    }
}

/// Subsets of `pool`, each sorted by node index.
fn power_set(pool: &[NodeId]) -> impl Iterator<Item = Vec<NodeId>> + '_ {
    assert!(pool.len() < 64, "adjacency set too large to enumerate");
    (0u64..(1u64 << pool.len())).map(move |mask| {
        pool.iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Labels every unshielded triple of `skeleton` by querying all subsets of
/// the endpoints' adjacency sets. The result depends only on the skeleton's
/// edge set and the tester, never on a variable order.
pub fn classify_triples<T: IndependenceTest>(
    skeleton: &MixedGraph,
    ci: &CiTester<T>,
    rule: VStructureRule,
) -> Result<Vec<TripleClassification>> {
    if rule == VStructureRule::Standard {
        return Err(Error::InvalidParameter(
            "triple classification needs the conservative or majority rule".into(),
        ));
    }
    let mut out = Vec::new();
    for triple in skeleton.unshielded_triples() {
        let UnshieldedTriple { left, mid, right } = triple;
        let pool_l: Vec<NodeId> = skeleton.adjacency(left).filter(|&v| v != right).collect();
        let pool_r: Vec<NodeId> = skeleton.adjacency(right).filter(|&v| v != left).collect();
        let family: BTreeSet<Vec<NodeId>> = power_set(&pool_l).chain(power_set(&pool_r)).collect();
        let (mut hits, mut total) = (0, 0);
        for y in &family {
            if ci.is_independent(left, right, y)? {
                total += 1;
                if y.binary_search(&mid).is_ok() {
                    hits += 1;
                }
            }
        }
        out.push(TripleClassification {
            triple,
            label: label_for(rule, hits, total),
            sepset_hits: hits,
            sepset_total: total,
        });
    }
    Ok(out)
}

/// Which unshielded triples are v-structures and which are ambiguous.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VStructureDecisions {
    pub vstructures: BTreeSet<UnshieldedTriple>,
    pub ambiguous: HashSet<UnshieldedTriple>,
}

impl VStructureDecisions {
    /// Standard rule: `(i, j, k)` is a v-structure iff `j ∉ sepset(i, k)`.
    pub fn from_sepsets(skeleton: &MixedGraph, sepsets: &SepsetMap) -> Result<Self> {
        let mut vstructures = BTreeSet::new();
        for t in skeleton.unshielded_triples() {
            let s = sepsets
                .get(t.left, t.right)
                .ok_or(Error::MissingSepset(t.left, t.right))?;
            if !s.contains(&t.mid) {
                vstructures.insert(t);
            }
        }
        Ok(VStructureDecisions {
            vstructures,
            ambiguous: HashSet::new(),
        })
    }

    pub fn from_classifications(cls: &[TripleClassification]) -> Self {
        let mut d = VStructureDecisions::default();
        for c in cls {
            match c.label {
                TripleLabel::UnambiguousVStructure => {
                    d.vstructures.insert(c.triple);
                }
                TripleLabel::Ambiguous => {
                    d.ambiguous.insert(c.triple);
                }
                TripleLabel::UnambiguousNonVStructure => {}
            }
        }
        d
    }

    /// Ambiguous triples for rule gating, `None` when there are none.
    pub fn gate(&self) -> Option<&HashSet<UnshieldedTriple>> {
        (!self.ambiguous.is_empty()).then_some(&self.ambiguous)
    }
}

/// Orients v-structures one at a time in rank order; later ones overwrite.
pub fn orient_vstructures_sequential(
    skeleton: &MixedGraph,
    decisions: &VStructureDecisions,
    order: &VariableOrder,
) -> MixedGraph {
    let mut g = skeleton.clone();
    let mut triples: Vec<UnshieldedTriple> = decisions.vstructures.iter().copied().collect();
    triples.sort_by_key(|t| t.order_key(order));
    for t in triples {
        g.orient(t.left, t.mid);
        g.orient(t.right, t.mid);
    }
    g
}

/// Standard Step 2 from Step-1 separating sets.
pub fn orient_vstructures_standard(
    skeleton: &MixedGraph,
    sepsets: &SepsetMap,
    order: &VariableOrder,
) -> Result<MixedGraph> {
    let d = VStructureDecisions::from_sepsets(skeleton, sepsets)?;
    Ok(orient_vstructures_sequential(skeleton, &d, order))
}

/// Orients all v-structures at once; conflicts become bidirected.
pub fn orient_vstructures_list(skeleton: &MixedGraph, decisions: &VStructureDecisions) -> MixedGraph {
    let mut g = skeleton.clone();
    let arrows: Vec<(NodeId, NodeId)> = decisions
        .vstructures
        .iter()
        .flat_map(|t| [(t.left, t.mid), (t.right, t.mid)])
        .collect();
    add_arrowheads(&mut g, &arrows);
    g
}

/// Puts an arrowhead at `to` on each `(from, to)`; both directions on the
/// same edge leave it bidirected.
fn add_arrowheads(g: &mut MixedGraph, arrows: &[(NodeId, NodeId)]) {
    for &(from, to) in arrows {
        g.set_mark(from, to, crate::graph::Mark::Arrow);
    }
}

fn is_gated(gate: Option<&HashSet<UnshieldedTriple>>, a: NodeId, mid: NodeId, b: NodeId) -> bool {
    gate.is_some_and(|amb| amb.contains(&UnshieldedTriple::new(a, mid, b)))
}

/// R1 at `a -> b - c`, `a` and `c` nonadjacent: orient `b -> c`.
fn r1_targets(g: &MixedGraph, a: NodeId, b: NodeId, gate: Option<&HashSet<UnshieldedTriple>>) -> Vec<NodeId> {
    if !g.is_directed(a, b) {
        return Vec::new();
    }
    g.adjacency(b)
        .filter(|&c| c != a && g.is_undirected(b, c) && !g.is_adjacent(a, c) && !is_gated(gate, a, b, c))
        .collect()
}

/// R2: `a - b` with `a -> k -> b`.
fn r2_applies(g: &MixedGraph, a: NodeId, b: NodeId) -> bool {
    g.is_undirected(a, b) && g.adjacency(a).any(|k| g.is_directed(a, k) && g.is_directed(k, b))
}

/// R3: `a - b` with `a - k -> b`, `a - l -> b`, `k` and `l` nonadjacent.
fn r3_applies(g: &MixedGraph, a: NodeId, b: NodeId, gate: Option<&HashSet<UnshieldedTriple>>) -> bool {
    if !g.is_undirected(a, b) {
        return false;
    }
    let ks: Vec<NodeId> = g
        .adjacency(a)
        .filter(|&k| k != b && g.is_undirected(a, k) && g.is_directed(k, b))
        .collect();
    ks.iter().enumerate().any(|(x, &k)| {
        ks[x + 1..]
            .iter()
            .any(|&l| !g.is_adjacent(k, l) && !is_gated(gate, k, a, l))
    })
}

fn ranked(g: &MixedGraph, v: NodeId, order: &VariableOrder) -> Vec<NodeId> {
    let mut n = g.adjacent_vec(v);
    order.sort_by_rank(&mut n);
    n
}

/// R1, R2, R3 passes in round-robin to a fixpoint. Sites are scanned in rank
/// order and orientations take effect immediately. With `ambiguous`, R1 and
/// the nonadjacency premise of R3 skip ambiguous triples.
pub fn apply_rules_sequential(
    g: &MixedGraph,
    order: &VariableOrder,
    ambiguous: Option<&HashSet<UnshieldedTriple>>,
) -> MixedGraph {
    let mut g = g.clone();
    loop {
        let mut changed = false;
        for &a in order.nodes() {
            for b in ranked(&g, a, order) {
                let mut targets = r1_targets(&g, a, b, ambiguous);
                order.sort_by_rank(&mut targets);
                for c in targets {
                    // an earlier orientation in this pass may have used the edge
                    if g.is_undirected(b, c) {
                        g.orient(b, c);
                        changed = true;
                    }
                }
            }
        }
        for &a in order.nodes() {
            for b in ranked(&g, a, order) {
                if r2_applies(&g, a, b) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
        for &a in order.nodes() {
            for b in ranked(&g, a, order) {
                if r3_applies(&g, a, b, ambiguous) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
        if !changed {
            return g;
        }
    }
}

fn arrow_marks(g: &MixedGraph) -> usize {
    g.edges()
        .map(|(_, _, mi, mj)| {
            usize::from(mi == crate::graph::Mark::Arrow) + usize::from(mj == crate::graph::Mark::Arrow)
        })
        .sum()
}

/// List-based R1-R3: each rule's candidates are collected from a snapshot and
/// applied together, conflicts yielding bidirected edges; the R1, R2, R3
/// cycle repeats until nothing changes. The result does not depend on any
/// variable order.
pub fn apply_rules_list(g: &MixedGraph, ambiguous: Option<&HashSet<UnshieldedTriple>>) -> MixedGraph {
    let mut g = g.clone();
    let p = g.n_nodes();
    loop {
        let marks_before = arrow_marks(&g);
        let rules: [&dyn Fn(&MixedGraph) -> Vec<(NodeId, NodeId)>; 3] = [
            &|s| {
                (0..p)
                    .flat_map(|a| s.adjacency(a).map(move |b| (a, b)))
                    .flat_map(|(a, b)| r1_targets(s, a, b, ambiguous).into_iter().map(move |c| (b, c)))
                    .collect()
            },
            &|s| {
                (0..p)
                    .flat_map(|a| s.adjacency(a).map(move |b| (a, b)))
                    .filter(|&(a, b)| r2_applies(s, a, b))
                    .collect()
            },
            &|s| {
                (0..p)
                    .flat_map(|a| s.adjacency(a).map(move |b| (a, b)))
                    .filter(|&(a, b)| r3_applies(s, a, b, ambiguous))
                    .collect()
            },
        ];
        for rule in rules {
            let arrows = rule(&g);
            add_arrowheads(&mut g, &arrows);
        }
        let marks_after = arrow_marks(&g);
        debug_assert!(marks_after >= marks_before);
        if marks_after == marks_before {
            return g;
        }
    }
}
