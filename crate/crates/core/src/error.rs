use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid conditional independence query ({x}, {y} | {cond:?}): {reason}")]
    InvalidQuery {
        x: NodeId,
        y: NodeId,
        cond: Vec<NodeId>,
        reason: &'static str,
    },
    #[error("correlation submatrix over {nodes:?} is numerically singular (rcond {rcond:.3e})")]
    SingularSubmatrix { nodes: Vec<NodeId>, rcond: f64 },
    #[error("column {0} is constant")]
    ConstantColumn(usize),
    #[error("no separating set recorded for nonadjacent pair ({0}, {1})")]
    MissingSepset(NodeId, NodeId),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid variable order: {0}")]
    InvalidOrder(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input data: {0}")]
    InvalidData(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::SingularSubmatrix { .. } | Error::ConstantColumn(_))
    }
}
