//! Conditional independence queries.
//!
//! An [`IndependenceTest`] is a pure decision procedure. [`CiTester`] wraps one
//! with query validation, symmetric canonicalization, a decision cache and
//! counters, and is what the learning algorithms consume.

mod dsep;
mod gaussian;
mod mock;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

pub use dsep::{d_separated, DSepOracle};
pub use gaussian::{
    correlation_from_data, fisher_z_decision, fisher_z_statistic, partial_correlation,
    CorrelationMatrix, GaussianCiTest, CLAMP,
};
pub use mock::MockOracle;

use crate::error::{Error, Result};
use crate::graph::NodeId;

pub trait IndependenceTest: Send + Sync {
    fn n_vars(&self) -> usize;

    /// Decides `x ⊥ y | cond`. Callers guarantee `x < y`, a sorted `cond`
    /// not containing either endpoint, and in-range indices.
    fn evaluate(&self, x: NodeId, y: NodeId, cond: &[NodeId]) -> Result<bool>;
}

type Key = (NodeId, NodeId, Vec<NodeId>);

pub struct CiTester<T> {
    test: T,
    cache: Option<Mutex<HashMap<Key, bool>>>,
    evaluations: AtomicU64,
    queries: AtomicU64,
}

impl<T: IndependenceTest> CiTester<T> {
    pub fn new(test: T) -> Self {
        CiTester {
            test,
            cache: Some(Mutex::new(HashMap::new())),
            evaluations: AtomicU64::new(0),
            queries: AtomicU64::new(0),
        }
    }

    /// Every query reaches the underlying test and is counted.
    pub fn uncached(test: T) -> Self {
        CiTester {
            cache: None,
            ..CiTester::new(test)
        }
    }

    pub fn inner(&self) -> &T {
        &self.test
    }

    pub fn n_vars(&self) -> usize {
        self.test.n_vars()
    }

    /// Distinct evaluations so far (every query when uncached).
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// All queries, including cache hits.
    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    fn canonical(&self, i: NodeId, j: NodeId, cond: &[NodeId]) -> Result<Key> {
        let invalid = |reason| Error::InvalidQuery {
            x: i,
            y: j,
            cond: cond.to_vec(),
            reason,
        };
        let p = self.test.n_vars();
        if i == j {
            return Err(invalid("endpoints coincide"));
        }
        if i >= p || j >= p || cond.iter().any(|&v| v >= p) {
            return Err(invalid("node out of range"));
        }
        if cond.contains(&i) || cond.contains(&j) {
            return Err(invalid("conditioning set contains an endpoint"));
        }
        let mut s = cond.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("conditioning set has duplicates"));
        }
        Ok((i.min(j), i.max(j), s))
    }

    pub fn is_independent(&self, i: NodeId, j: NodeId, cond: &[NodeId]) -> Result<bool> {
        let key = self.canonical(i, j, cond)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        let Some(cache) = &self.cache else {
            self.evaluations.fetch_add(1, Ordering::Relaxed);
            return self.test.evaluate(key.0, key.1, &key.2);
        };
        if let Some(&hit) = cache.lock().unwrap().get(&key) {
            return Ok(hit);
        }
        let decision = self.test.evaluate(key.0, key.1, &key.2)?;
        // a concurrent miss on the same key yields the same decision; count once
        if cache.lock().unwrap().insert(key, decision).is_none() {
            self.evaluations.fetch_add(1, Ordering::Relaxed);
        }
        Ok(decision)
    }
}
