use std::collections::VecDeque;

use super::IndependenceTest;
use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// True iff every path between `x` and `y` is blocked by `cond`.
///
/// Reachability search over `(node, direction)` states: a trail may pass a
/// non-collider outside `cond`, or a collider that is `cond` or an ancestor
/// of `cond`.
pub fn d_separated(dag: &Dag, x: NodeId, y: NodeId, cond: &[NodeId]) -> bool {
    let p = dag.n_nodes();
    let mut in_cond = vec![false; p];
    for &c in cond {
        in_cond[c] = true;
    }
    let anc = dag.ancestors_of_set(cond);

    // visited[v][0]: reached travelling up (from a child)
    // visited[v][1]: reached travelling down (from a parent)
    let mut visited = vec![[false; 2]; p];
    let mut queue = VecDeque::from([(x, 0usize)]);
    while let Some((v, dir)) = queue.pop_front() {
        if visited[v][dir] {
            continue;
        }
        visited[v][dir] = true;
        if v == y && !in_cond[v] {
            return false;
        }
        if dir == 0 {
            if !in_cond[v] {
                queue.extend(dag.parents(v).iter().map(|&u| (u, 0)));
                queue.extend(dag.children(v).iter().map(|&c| (c, 1)));
            }
        } else {
            if !in_cond[v] {
                queue.extend(dag.children(v).iter().map(|&c| (c, 1)));
            }
            if anc[v] {
                queue.extend(dag.parents(v).iter().map(|&u| (u, 0)));
            }
        }
    }
    true
}

/// Perfect conditional independence information from a DAG, optionally
/// restricted to a subset of observed nodes.
#[derive(Clone, Debug)]
pub struct DSepOracle {
    dag: Dag,
    /// Query index `k` refers to DAG node `observed[k]`.
    observed: Option<Vec<NodeId>>,
}

impl DSepOracle {
    pub fn new(dag: Dag) -> Self {
        DSepOracle { dag, observed: None }
    }

    /// Oracle over the marginal of `observed` (increasing DAG node ids);
    /// the remaining nodes are latent and never conditioned on.
    pub fn marginal(dag: Dag, observed: Vec<NodeId>) -> Result<Self> {
        if observed.windows(2).any(|w| w[0] >= w[1]) || observed.last().is_some_and(|&v| v >= dag.n_nodes()) {
            return Err(Error::InvalidParameter(
                "observed nodes must be increasing DAG node ids".into(),
            ));
        }
        Ok(DSepOracle {
            dag,
            observed: Some(observed),
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }
}

impl IndependenceTest for DSepOracle {
    fn n_vars(&self) -> usize {
        self.observed.as_ref().map_or(self.dag.n_nodes(), Vec::len)
    }

    fn evaluate(&self, x: NodeId, y: NodeId, cond: &[NodeId]) -> Result<bool> {
        Ok(match &self.observed {
            None => d_separated(&self.dag, x, y, cond),
            Some(obs) => {
                let c: Vec<NodeId> = cond.iter().map(|&v| obs[v]).collect();
                d_separated(&self.dag, obs[x], obs[y], &c)
            }
        })
    }
}
