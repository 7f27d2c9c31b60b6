//! Constraint-based causal structure learning with the PC algorithm and its
//! order-independent modifications.
//!
//! The pipeline has three steps, each with an order-dependent and an
//! order-independent implementation:
//!
//! | step | order-dependent | order-independent |
//! |------|-----------------|-------------------|
//! | adjacency search | [`skeleton::pc_skeleton`] | [`skeleton::pc_stable_skeleton`] |
//! | v-structures | separating sets from the search | [`orientation::classify_triples`] (conservative / majority) |
//! | R1-R3 | [`orientation::apply_rules_sequential`] | [`orientation::apply_rules_list`] |
//!
//! [`learner::learn`] wires them together; [`learner::Variant`] names the
//! usual combinations.

pub mod ci;
pub mod dag;
pub mod error;
pub mod graph;
pub mod io;
pub mod learner;
pub mod metrics;
pub mod order;
pub mod orientation;
pub mod rng;
pub mod simgen;
pub mod skeleton;

pub use ci::{CiTester, DSepOracle, GaussianCiTest, IndependenceTest, MockOracle};
pub use dag::{dag_to_cpdag, Dag, WeightedDag};
pub use error::{Error, Result};
pub use graph::{EdgeKind, Mark, MixedGraph, NodeId, UnshieldedTriple};
pub use learner::{learn, learn_from_data, LearnConfig, LearnReport, Variant};
pub use order::VariableOrder;
pub use skeleton::{pc_skeleton, pc_stable_skeleton, SepsetMap, SkeletonResult};
