//! End-to-end pipeline: skeleton, v-structures, orientation rules.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ci::{correlation_from_data, CiTester, CorrelationMatrix, GaussianCiTest, IndependenceTest};
use crate::error::{Error, Result};
use crate::graph::MixedGraph;
use crate::order::VariableOrder;
use crate::orientation::{
    apply_rules_list, apply_rules_sequential, classify_triples, orient_vstructures_list,
    orient_vstructures_sequential, RuleApplication, TripleClassification, TripleLabel, VStructureDecisions,
    VStructureRule,
};
use crate::skeleton::{pc_skeleton_with, pc_stable_skeleton_with, SepsetMap, SkeletonOptions, SkeletonResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkeletonMethod {
    Original,
    Stable,
}

/// Named configurations: `[l]{pc,cpc,mpc}[-stable]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Pc,
    PcStable,
    Cpc,
    CpcStable,
    Mpc,
    MpcStable,
    Lpc,
    LpcStable,
    Lcpc,
    LcpcStable,
    Lmpc,
    LmpcStable,
}

impl Variant {
    pub const ALL: [Variant; 12] = [
        Variant::Pc,
        Variant::PcStable,
        Variant::Cpc,
        Variant::CpcStable,
        Variant::Mpc,
        Variant::MpcStable,
        Variant::Lpc,
        Variant::LpcStable,
        Variant::Lcpc,
        Variant::LcpcStable,
        Variant::Lmpc,
        Variant::LmpcStable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Pc => "pc",
            Variant::PcStable => "pc-stable",
            Variant::Cpc => "cpc",
            Variant::CpcStable => "cpc-stable",
            Variant::Mpc => "mpc",
            Variant::MpcStable => "mpc-stable",
            Variant::Lpc => "lpc",
            Variant::LpcStable => "lpc-stable",
            Variant::Lcpc => "lcpc",
            Variant::LcpcStable => "lcpc-stable",
            Variant::Lmpc => "lmpc",
            Variant::LmpcStable => "lmpc-stable",
        }
    }

    pub fn skeleton(self) -> SkeletonMethod {
        use Variant::*;
        match self {
            Pc | Cpc | Mpc | Lpc | Lcpc | Lmpc => SkeletonMethod::Original,
            _ => SkeletonMethod::Stable,
        }
    }

    pub fn vstructures(self) -> VStructureRule {
        use Variant::*;
        match self {
            Pc | PcStable | Lpc | LpcStable => VStructureRule::Standard,
            Cpc | CpcStable | Lcpc | LcpcStable => VStructureRule::Conservative,
            Mpc | MpcStable | Lmpc | LmpcStable => VStructureRule::Majority,
        }
    }

    pub fn rules(self) -> RuleApplication {
        use Variant::*;
        match self {
            Lpc | LpcStable | Lcpc | LcpcStable | Lmpc | LmpcStable => RuleApplication::List,
            _ => RuleApplication::Sequential,
        }
    }

    pub fn config(self, alpha: f64) -> LearnConfig {
        LearnConfig {
            skeleton: self.skeleton(),
            vstructures: self.vstructures(),
            rules: self.rules(),
            alpha,
            order: None,
            parallel: false,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown variant `{s}`")))
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub skeleton: SkeletonMethod,
    pub vstructures: VStructureRule,
    pub rules: RuleApplication,
    /// Significance level; used only when learning from data.
    pub alpha: f64,
    /// `None` means the natural order `0, 1, ..., p-1`.
    pub order: Option<VariableOrder>,
    pub parallel: bool,
}

impl LearnConfig {
    pub fn with_order(mut self, order: VariableOrder) -> Self {
        self.order = Some(order);
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LearnStats {
    /// Distinct CI evaluations per conditioning-set size in Step 1.
    pub tests_per_level: Vec<u64>,
    pub skeleton_tests: u64,
    /// Distinct CI evaluations over the whole run, including triple classification.
    pub total_tests: u64,
    pub wall_time_secs: f64,
    pub edges: usize,
    pub directed_edges: usize,
    pub undirected_edges: usize,
    pub bidirected_edges: usize,
    pub unshielded_triples: usize,
    pub ambiguous_triples: usize,
}

#[derive(Clone, Debug)]
pub struct LearnReport {
    pub graph: MixedGraph,
    pub skeleton: SkeletonResult,
    pub classifications: Option<Vec<TripleClassification>>,
    pub stats: LearnStats,
}

impl LearnReport {
    pub fn sepsets(&self) -> &SepsetMap {
        &self.skeleton.sepsets
    }
}

/// Runs the configured Step 1, Step 2 and Step 3 against `ci`.
pub fn learn<T: IndependenceTest>(ci: &CiTester<T>, p: usize, cfg: &LearnConfig) -> Result<LearnReport> {
    let started = Instant::now();
    let evals_before = ci.evaluations();
    let order = match &cfg.order {
        Some(o) => o.clone(),
        None => VariableOrder::natural(p),
    };
    let opts = SkeletonOptions {
        max_level: None,
        parallel: cfg.parallel,
    };
    let skeleton = match cfg.skeleton {
        SkeletonMethod::Original => pc_skeleton_with(ci, p, &order, &opts)?,
        SkeletonMethod::Stable => pc_stable_skeleton_with(ci, p, &order, &opts)?,
    };

    let (decisions, classifications) = match cfg.vstructures {
        VStructureRule::Standard => (
            VStructureDecisions::from_sepsets(&skeleton.graph, &skeleton.sepsets)?,
            None,
        ),
        rule => {
            let cls = classify_triples(&skeleton.graph, ci, rule)?;
            (VStructureDecisions::from_classifications(&cls), Some(cls))
        }
    };
    let gate = decisions.gate();
    let graph = match cfg.rules {
        RuleApplication::Sequential => {
            let g = orient_vstructures_sequential(&skeleton.graph, &decisions, &order);
            apply_rules_sequential(&g, &order, gate)
        }
        RuleApplication::List => {
            let g = orient_vstructures_list(&skeleton.graph, &decisions);
            apply_rules_list(&g, gate)
        }
    };

    let counts = graph.count_kinds();
    let stats = LearnStats {
        tests_per_level: skeleton.levels.iter().map(|l| l.tests).collect(),
        skeleton_tests: skeleton.total_tests(),
        total_tests: ci.evaluations() - evals_before,
        wall_time_secs: started.elapsed().as_secs_f64(),
        edges: graph.edge_count(),
        directed_edges: counts.directed,
        undirected_edges: counts.undirected,
        bidirected_edges: counts.bidirected,
        unshielded_triples: skeleton.graph.unshielded_triples().len(),
        ambiguous_triples: classifications.as_ref().map_or(0, |c| {
            c.iter().filter(|c| c.label == TripleLabel::Ambiguous).count()
        }),
    };
    Ok(LearnReport {
        graph,
        skeleton,
        classifications,
        stats,
    })
}

/// Builds a Gaussian tester for a correlation matrix from `n` samples.
pub fn gaussian_tester(corr: Arc<CorrelationMatrix>, n: usize, alpha: f64) -> Result<CiTester<GaussianCiTest>> {
    Ok(CiTester::new(GaussianCiTest::new(corr, n, alpha)?))
}

/// Learns from a precomputed correlation matrix of `n` samples.
pub fn learn_from_correlation(corr: Arc<CorrelationMatrix>, n: usize, cfg: &LearnConfig) -> Result<LearnReport> {
    let p = corr.dim();
    let ci = gaussian_tester(corr, n, cfg.alpha)?;
    learn(&ci, p, cfg)
}

/// Learns from an `n x p` data matrix with Gaussian partial-correlation tests.
pub fn learn_from_data(data: &DMatrix<f64>, cfg: &LearnConfig) -> Result<LearnReport> {
    let (n, p) = data.shape();
    if p == 0 {
        return Err(Error::InvalidData("data has no columns".into()));
    }
    let corr = Arc::new(correlation_from_data(data)?);
    learn_from_correlation(corr, n, cfg)
}
