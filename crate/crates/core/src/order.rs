use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// A permutation of the variables. Pairs of nodes and conditioning subsets
/// are enumerated lexicographically in the ranks this order assigns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<NodeId>", into = "Vec<NodeId>")]
pub struct VariableOrder {
    perm: Vec<NodeId>,
    rank: Vec<usize>,
}

impl VariableOrder {
    pub fn natural(p: usize) -> Self {
        VariableOrder {
            perm: (0..p).collect(),
            rank: (0..p).collect(),
        }
    }

    /// `perm[r]` is the node at rank `r`.
    pub fn from_perm(perm: Vec<NodeId>) -> Result<Self> {
        let p = perm.len();
        let mut rank = vec![usize::MAX; p];
        for (r, &v) in perm.iter().enumerate() {
            if v >= p {
                return Err(Error::InvalidOrder(format!("node {v} out of range for p={p}")));
            }
            if rank[v] != usize::MAX {
                return Err(Error::InvalidOrder(format!("node {v} listed twice")));
            }
            rank[v] = r;
        }
        Ok(VariableOrder { perm, rank })
    }

    pub fn random<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let mut perm: Vec<NodeId> = (0..p).collect();
        perm.shuffle(rng);
        Self::from_perm(perm).expect("shuffle yields a permutation")
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn rank(&self, v: NodeId) -> usize {
        self.rank[v]
    }

    /// Nodes from first to last.
    pub fn nodes(&self) -> &[NodeId] {
        &self.perm
    }

    /// Sorts `nodes` by rank in place.
    pub fn sort_by_rank(&self, nodes: &mut [NodeId]) {
        nodes.sort_unstable_by_key(|&v| self.rank[v]);
    }
}

impl TryFrom<Vec<NodeId>> for VariableOrder {
    type Error = Error;

    fn try_from(perm: Vec<NodeId>) -> Result<Self> {
        Self::from_perm(perm)
    }
}

impl From<VariableOrder> for Vec<NodeId> {
    fn from(o: VariableOrder) -> Self {
        o.perm
    }
}
