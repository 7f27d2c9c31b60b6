//! Directed acyclic graphs and their Markov equivalence classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MixedGraph, NodeId};
use crate::order::VariableOrder;
use crate::orientation;

/// An unweighted DAG with sorted parent and child lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
}

impl Dag {
    pub fn from_edges(p: usize, edges: &[(NodeId, NodeId)]) -> Result<Dag> {
        let mut parents = vec![Vec::new(); p];
        let mut children = vec![Vec::new(); p];
        for &(from, to) in edges {
            if from >= p || to >= p || from == to {
                return Err(Error::InvalidGraph(format!("bad edge {from} -> {to} for p={p}")));
            }
            if parents[to].contains(&from) || parents[from].contains(&to) {
                return Err(Error::InvalidGraph(format!("duplicate edge between {from} and {to}")));
            }
            parents[to].push(from);
            children[from].push(to);
        }
        parents.iter_mut().for_each(|v| v.sort_unstable());
        children.iter_mut().for_each(|v| v.sort_unstable());
        let dag = Dag { parents, children };
        if dag.topological_order().is_none() {
            return Err(Error::InvalidGraph("edges contain a directed cycle".into()));
        }
        Ok(dag)
    }

    pub fn n_nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.children[from].binary_search(&to).is_ok()
    }

    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Edges `(from, to)` sorted by `from` then `to`.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(f, ch)| ch.iter().map(move |&t| (f, t)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm; `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let p = self.n_nodes();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut stack: Vec<NodeId> = (0..p).rev().filter(|&v| indeg[v] == 0).collect();
        let mut out = Vec::with_capacity(p);
        while let Some(v) = stack.pop() {
            out.push(v);
            for &c in self.children[v].iter().rev() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    stack.push(c);
                }
            }
        }
        (out.len() == p).then_some(out)
    }

    /// Renames node `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Dag {
        let edges: Vec<_> = self.edges().into_iter().map(|(f, t)| (perm[f], perm[t])).collect();
        Dag::from_edges(self.n_nodes(), &edges).expect("relabeling preserves acyclicity")
    }

    /// All edges directed as in the DAG.
    pub fn to_mixed_graph(&self) -> MixedGraph {
        let mut g = MixedGraph::empty(self.n_nodes());
        for (f, t) in self.edges() {
            g.add_directed(f, t).expect("valid DAG edge");
        }
        g
    }

    pub fn skeleton(&self) -> MixedGraph {
        self.to_mixed_graph().skeleton()
    }

    /// `v` together with all of its ancestors, as a membership mask.
    pub fn ancestors_of_set(&self, set: &[NodeId]) -> Vec<bool> {
        let mut mark = vec![false; self.n_nodes()];
        let mut stack: Vec<NodeId> = set.to_vec();
        while let Some(v) = stack.pop() {
            if !mark[v] {
                mark[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        mark
    }

    /// The CPDAG of this DAG's Markov equivalence class: skeleton, v-structures
    /// as in the DAG, then rules R1-R3 to closure.
    pub fn to_cpdag(&self) -> MixedGraph {
        let mut g = self.skeleton();
        for t in g.unshielded_triples() {
            if self.has_edge(t.left, t.mid) && self.has_edge(t.right, t.mid) {
                g.orient(t.left, t.mid);
                g.orient(t.right, t.mid);
            }
        }
        orientation::apply_rules_sequential(&g, &VariableOrder::natural(self.n_nodes()), None)
    }
}

/// Convenience free function form of [`Dag::to_cpdag`].
pub fn dag_to_cpdag(d: &Dag) -> MixedGraph {
    d.to_cpdag()
}

/// Strictly lower-triangular weighted adjacency: `weight(i, r) != 0` is the
/// edge `r -> i` of a linear Gaussian SEM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedDag {
    p: usize,
    /// Row-major `p x p`.
    weights: Vec<f64>,
}

impl WeightedDag {
    pub fn new(p: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != p * p {
            return Err(Error::InvalidGraph(format!(
                "expected {} weights, got {}",
                p * p,
                weights.len()
            )));
        }
        for i in 0..p {
            for r in i..p {
                if weights[i * p + r] != 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "weight ({i}, {r}) is not strictly lower triangular"
                    )));
                }
            }
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidGraph("non-finite weight".into()));
        }
        Ok(WeightedDag { p, weights })
    }

    /// Builds from `(from, to, weight)` with `from < to`.
    pub fn from_edges(p: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let mut w = vec![0.0; p * p];
        for &(from, to, weight) in edges {
            if from >= to || to >= p {
                return Err(Error::InvalidGraph(format!(
                    "edge {from} -> {to} must satisfy from < to < p={p}"
                )));
            }
            if weight == 0.0 {
                return Err(Error::InvalidGraph(format!("zero weight on {from} -> {to}")));
            }
            w[to * p + from] = weight;
        }
        WeightedDag::new(p, w)
    }

    pub fn n_nodes(&self) -> usize {
        self.p
    }

    /// Coefficient of `from` in the structural equation of `to`.
    pub fn weight(&self, to: NodeId, from: NodeId) -> f64 {
        self.weights[to * self.p + from]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nonzero entries as `(from, to, weight)` sorted by `(to, from)`.
    pub fn weighted_edges(&self) -> Vec<(NodeId, NodeId, f64)> {
        let p = self.p;
        (0..p)
            .flat_map(|i| (0..i).map(move |r| (r, i)))
            .filter_map(|(r, i)| {
                let w = self.weights[i * p + r];
                (w != 0.0).then_some((r, i, w))
            })
            .collect()
    }

    pub fn dag(&self) -> Dag {
        let edges: Vec<_> = self.weighted_edges().into_iter().map(|(f, t, _)| (f, t)).collect();
        Dag::from_edges(self.p, &edges).expect("lower-triangular weights are acyclic")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_cpdag_is_undirected() {
        let d = Dag::from_edges(2, &[(0, 1)]).unwrap();
        let c = d.to_cpdag();
        assert!(c.is_undirected(0, 1));
    }

    #[test]
    fn collider_stays_directed() {
        let d = Dag::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(d.to_cpdag(), d.to_mixed_graph());
    }

    #[test]
    fn figure_3a_cpdag() {
        // X1->X2, X1->X5, X2->X3, X3->X4, X4->X5, 0-indexed
        let d = Dag::from_edges(5, &[(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]).unwrap();
        let c = d.to_cpdag();
        assert!(c.is_directed(0, 4) && c.is_directed(3, 4));
        assert!(c.is_undirected(0, 1) && c.is_undirected(1, 2) && c.is_undirected(2, 3));
        assert_eq!(c.edge_count(), 5);
    }

    #[test]
    fn r1_propagates_below_collider() {
        // 0 -> 2 <- 1, 2 -> 3 must be compelled
        let d = Dag::from_edges(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        let c = d.to_cpdag();
        assert!(c.is_directed(2, 3));
    }

    #[test]
    fn rejects_cycles() {
        assert!(Dag::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
    }

    #[test]
    fn weighted_dag_requires_lower_triangular() {
        assert!(WeightedDag::new(2, vec![0.0, 0.5, 0.0, 0.0]).is_err());
        let w = WeightedDag::new(2, vec![0.0, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(w.weighted_edges(), vec![(0, 1, 0.5)]);
        assert!(w.dag().has_edge(0, 1));
        assert!(WeightedDag::from_edges(3, &[(2, 1, 0.3)]).is_err());
    }

    #[test]
    fn ancestors_include_the_set() {
        let d = Dag::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(d.ancestors_of_set(&[2]), vec![true, true, true, false]);
    }
}
