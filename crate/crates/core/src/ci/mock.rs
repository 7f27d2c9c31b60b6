use std::collections::HashSet;

use super::{d_separated, IndependenceTest};
use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Scripted independence judgments: exactly the listed `(x, y, S)` triples
/// hold, plus every d-separation of an optional base DAG.
#[derive(Clone, Debug)]
pub struct MockOracle {
    p: usize,
    base: Option<Dag>,
    independent: HashSet<(NodeId, NodeId, Vec<NodeId>)>,
}

impl MockOracle {
    pub fn new(p: usize) -> Self {
        MockOracle {
            p,
            base: None,
            independent: HashSet::new(),
        }
    }

    pub fn with_base(base: Dag) -> Self {
        MockOracle {
            p: base.n_nodes(),
            base: Some(base),
            independent: HashSet::new(),
        }
    }

    /// Declares `x ⊥ y | cond` (symmetric in `x` and `y`).
    pub fn independent(mut self, x: NodeId, y: NodeId, cond: &[NodeId]) -> Result<Self> {
        if x == y || x >= self.p || y >= self.p || cond.iter().any(|&v| v >= self.p || v == x || v == y) {
            return Err(Error::InvalidQuery {
                x,
                y,
                cond: cond.to_vec(),
                reason: "scripted independence is not a valid query",
            });
        }
        let mut s = cond.to_vec();
        s.sort_unstable();
        s.dedup();
        self.independent.insert((x.min(y), x.max(y), s));
        Ok(self)
    }
}

impl IndependenceTest for MockOracle {
    fn n_vars(&self) -> usize {
        self.p
    }

    fn evaluate(&self, x: NodeId, y: NodeId, cond: &[NodeId]) -> Result<bool> {
        let mut s = cond.to_vec();
        s.sort_unstable();
        if self.independent.contains(&(x.min(y), x.max(y), s)) {
            return Ok(true);
        }
        Ok(self.base.as_ref().is_some_and(|d| d_separated(d, x, y, cond)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_triples_only() {
        let m = MockOracle::new(5).independent(0, 1, &[]).unwrap().independent(3, 1, &[2, 0]).unwrap();
        assert!(m.evaluate(0, 1, &[]).unwrap());
        assert!(m.evaluate(1, 3, &[0, 2]).unwrap());
        assert!(!m.evaluate(1, 3, &[0]).unwrap());
        assert!(!m.evaluate(0, 1, &[2]).unwrap());
    }

    #[test]
    fn base_dag_adds_d_separations() {
        let d = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let m = MockOracle::with_base(d).independent(0, 1, &[2]).unwrap();
        assert!(m.evaluate(0, 2, &[1]).unwrap());
        assert!(m.evaluate(0, 1, &[2]).unwrap());
        assert!(!m.evaluate(0, 2, &[]).unwrap());
    }

    #[test]
    fn rejects_invalid_scripts() {
        assert!(MockOracle::new(3).independent(0, 0, &[]).is_err());
        assert!(MockOracle::new(3).independent(0, 1, &[1]).is_err());
    }
}
