//! Mixed graphs with per-endpoint marks.
//!
//! A single simple graph type covers skeletons, partially directed graphs,
//! CPDAGs and graphs carrying bidirected conflict edges. Every edge is an
//! unordered pair with one [`Mark`] at each endpoint:
//!
//! | mark at `i` | mark at `j` | edge      |
//! |-------------|-------------|-----------|
//! | tail        | tail        | `i - j`   |
//! | tail        | arrow       | `i -> j`  |
//! | arrow       | arrow       | `i <-> j` |

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::VariableOrder;

/// Index of a variable in `[0, p)`. Independent of any [`VariableOrder`].
pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mark {
    Tail,
    Arrow,
}

impl Mark {
    fn symbol(self) -> char {
        match self {
            Mark::Tail => 't',
            Mark::Arrow => 'a',
        }
    }

    fn from_symbol(s: &str) -> Option<Mark> {
        match s {
            "t" => Some(Mark::Tail),
            "a" => Some(Mark::Arrow),
            _ => None,
        }
    }
}

/// Derived view of an edge between `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Undirected,
    Directed { from: NodeId, to: NodeId },
    Bidirected,
}

/// Unshielded triple `left - mid - right` with `left` and `right`
/// nonadjacent, stored with `left < right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnshieldedTriple {
    pub left: NodeId,
    pub mid: NodeId,
    pub right: NodeId,
}

impl UnshieldedTriple {
    /// Canonicalizes the endpoint order.
    pub fn new(a: NodeId, mid: NodeId, b: NodeId) -> Self {
        let (left, right) = if a < b { (a, b) } else { (b, a) };
        UnshieldedTriple { left, mid, right }
    }

    /// Position of this triple in the order-lexicographic scan: endpoints
    /// arranged by rank, then `(rank(first), rank(mid), rank(second))`.
    pub fn order_key(&self, order: &VariableOrder) -> (usize, usize, usize) {
        let (rl, rr) = (order.rank(self.left), order.rank(self.right));
        let rm = order.rank(self.mid);
        if rl < rr {
            (rl, rm, rr)
        } else {
            (rr, rm, rl)
        }
    }
}

impl fmt::Display for UnshieldedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.left, self.mid, self.right)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MixedGraph {
    /// `ends[i][j]` is the mark at `j`'s end of edge `{i, j}`.
    ends: Vec<BTreeMap<NodeId, Mark>>,
}

impl MixedGraph {
    pub fn empty(p: usize) -> Self {
        MixedGraph {
            ends: vec![BTreeMap::new(); p],
        }
    }

    /// Complete undirected graph on `p` nodes.
    pub fn complete(p: usize) -> Self {
        let ends = (0..p)
            .map(|i| (0..p).filter(|&j| j != i).map(|j| (j, Mark::Tail)).collect())
            .collect();
        MixedGraph { ends }
    }

    pub fn n_nodes(&self) -> usize {
        self.ends.len()
    }

    fn check_pair(&self, i: NodeId, j: NodeId) -> Result<()> {
        let p = self.n_nodes();
        if i >= p || j >= p {
            return Err(Error::InvalidGraph(format!(
                "edge ({i}, {j}) out of range for p={p}"
            )));
        }
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop at {i}")));
        }
        Ok(())
    }

    /// Inserts or replaces edge `{i, j}` with `mark_i` at `i` and `mark_j` at `j`.
    pub fn set_edge(&mut self, i: NodeId, j: NodeId, mark_i: Mark, mark_j: Mark) -> Result<()> {
        self.check_pair(i, j)?;
        self.ends[j].insert(i, mark_i);
        self.ends[i].insert(j, mark_j);
        Ok(())
    }

    pub fn add_undirected(&mut self, i: NodeId, j: NodeId) -> Result<()> {
        self.set_edge(i, j, Mark::Tail, Mark::Tail)
    }

    pub fn add_directed(&mut self, from: NodeId, to: NodeId) -> Result<()> {
        self.set_edge(from, to, Mark::Tail, Mark::Arrow)
    }

    pub fn add_bidirected(&mut self, i: NodeId, j: NodeId) -> Result<()> {
        self.set_edge(i, j, Mark::Arrow, Mark::Arrow)
    }

    /// Returns true if an edge was removed.
    pub fn remove_edge(&mut self, i: NodeId, j: NodeId) -> bool {
        if i >= self.n_nodes() || j >= self.n_nodes() {
            return false;
        }
        let had = self.ends[i].remove(&j).is_some();
        self.ends[j].remove(&i);
        had
    }

    /// Mark at `at`'s end of edge `{other, at}`.
    pub fn mark(&self, other: NodeId, at: NodeId) -> Option<Mark> {
        self.ends.get(other)?.get(&at).copied()
    }

    /// Overwrites the mark at `at`'s end of an existing edge. Returns false if
    /// there is no edge.
    pub fn set_mark(&mut self, other: NodeId, at: NodeId, mark: Mark) -> bool {
        match self.ends.get_mut(other).and_then(|m| m.get_mut(&at)) {
            Some(slot) => {
                *slot = mark;
                true
            }
            None => false,
        }
    }

    /// Orients an existing edge as `from -> to`, overwriting previous marks.
    pub fn orient(&mut self, from: NodeId, to: NodeId) -> bool {
        self.set_mark(from, to, Mark::Arrow) && self.set_mark(to, from, Mark::Tail)
    }

    pub fn is_adjacent(&self, i: NodeId, j: NodeId) -> bool {
        self.ends.get(i).is_some_and(|m| m.contains_key(&j))
    }

    /// Neighbors of `i` in increasing index order, regardless of marks.
    pub fn adjacency(&self, i: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.ends[i].keys().copied()
    }

    pub fn adjacent_vec(&self, i: NodeId) -> Vec<NodeId> {
        self.adjacency(i).collect()
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.ends[i].len()
    }

    pub fn edge_kind(&self, i: NodeId, j: NodeId) -> Option<EdgeKind> {
        let at_j = self.mark(i, j)?;
        let at_i = self.mark(j, i)?;
        Some(match (at_i, at_j) {
            (Mark::Tail, Mark::Tail) => EdgeKind::Undirected,
            (Mark::Tail, Mark::Arrow) => EdgeKind::Directed { from: i, to: j },
            (Mark::Arrow, Mark::Tail) => EdgeKind::Directed { from: j, to: i },
            (Mark::Arrow, Mark::Arrow) => EdgeKind::Bidirected,
        })
    }

    /// `from -> to` (strictly directed, not bidirected).
    pub fn is_directed(&self, from: NodeId, to: NodeId) -> bool {
        self.mark(from, to) == Some(Mark::Arrow) && self.mark(to, from) == Some(Mark::Tail)
    }

    pub fn is_undirected(&self, i: NodeId, j: NodeId) -> bool {
        self.mark(i, j) == Some(Mark::Tail) && self.mark(j, i) == Some(Mark::Tail)
    }

    pub fn is_bidirected(&self, i: NodeId, j: NodeId) -> bool {
        self.mark(i, j) == Some(Mark::Arrow) && self.mark(j, i) == Some(Mark::Arrow)
    }

    /// All edges as `(i, j, mark_at_i, mark_at_j)` with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Mark, Mark)> + '_ {
        self.ends.iter().enumerate().flat_map(move |(i, m)| {
            m.range(i + 1..)
                .map(move |(&j, &at_j)| (i, j, self.ends[j][&i], at_j))
        })
    }

    /// Unordered pairs `(i, j)`, `i < j`, sorted.
    pub fn edge_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.edges().map(|(i, j, _, _)| (i, j)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn count_kinds(&self) -> EdgeCounts {
        let mut c = EdgeCounts::default();
        for (i, j, _, _) in self.edges() {
            match self.edge_kind(i, j) {
                Some(EdgeKind::Undirected) => c.undirected += 1,
                Some(EdgeKind::Directed { .. }) => c.directed += 1,
                Some(EdgeKind::Bidirected) => c.bidirected += 1,
                None => unreachable!(),
            }
        }
        c
    }

    /// Same adjacencies, every edge tail-tail.
    pub fn skeleton(&self) -> MixedGraph {
        MixedGraph {
            ends: self
                .ends
                .iter()
                .map(|m| m.keys().map(|&j| (j, Mark::Tail)).collect())
                .collect(),
        }
    }

    /// Renames node `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[NodeId]) -> MixedGraph {
        let mut out = MixedGraph::empty(self.n_nodes());
        for (i, j, mi, mj) in self.edges() {
            out.set_edge(perm[i], perm[j], mi, mj)
                .expect("relabel with a permutation keeps the graph simple");
        }
        out
    }

    /// Unshielded triples of the adjacency structure, sorted by `(left, mid, right)`.
    pub fn unshielded_triples(&self) -> Vec<UnshieldedTriple> {
        let mut out = Vec::new();
        for mid in 0..self.n_nodes() {
            let nbrs = self.adjacent_vec(mid);
            for (a, &left) in nbrs.iter().enumerate() {
                for &right in &nbrs[a + 1..] {
                    if !self.is_adjacent(left, right) {
                        out.push(UnshieldedTriple { left, mid, right });
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Text edge list: a `p=<n>` header, then `i j mark_i mark_j` per edge in
    /// sorted pair order with marks in `{t, a}`.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("p={}\n", self.n_nodes());
        for (i, j, mi, mj) in self.edges() {
            let _ = writeln!(s, "{i} {j} {} {}", mi.symbol(), mj.symbol());
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<MixedGraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `p=<n>` header".into(),
        })?;
        let p: usize = header
            .trim()
            .strip_prefix("p=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: hline + 1,
                msg: format!("expected `p=<n>`, found `{header}`"),
            })?;
        let mut g = MixedGraph::empty(p);
        for (ln, line) in lines {
            let err = |msg: String| Error::Parse { line: ln + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", fields.len())));
            }
            let i: NodeId = fields[0].parse().map_err(|_| err("bad node index".into()))?;
            let j: NodeId = fields[1].parse().map_err(|_| err("bad node index".into()))?;
            let mi = Mark::from_symbol(fields[2]).ok_or_else(|| err("bad mark".into()))?;
            let mj = Mark::from_symbol(fields[3]).ok_or_else(|| err("bad mark".into()))?;
            if g.is_adjacent(i, j) {
                return Err(err(format!("duplicate edge ({i}, {j})")));
            }
            g.set_edge(i, j, mi, mj).map_err(|e| err(e.to_string()))?;
        }
        Ok(g)
    }
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedGraph(p={}; ", self.n_nodes())?;
        let mut first = true;
        for (i, j, _, _) in self.edges() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            match self.edge_kind(i, j).unwrap() {
                EdgeKind::Undirected => write!(f, "{i}-{j}")?,
                EdgeKind::Directed { from, to } => write!(f, "{from}->{to}")?,
                EdgeKind::Bidirected => write!(f, "{i}<->{j}")?,
            }
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    pub undirected: usize,
    pub directed: usize,
    pub bidirected: usize,
}
