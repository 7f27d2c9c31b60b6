//! Simulation sweeps over graphs x orderings x variants x alpha.
//!
//! Cells run on the rayon pool and are written afterwards in grid order,
//! so every output file is a pure function of the spec. Wall-clock timings
//! go to stderr only.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stablepc::ci::{correlation_from_data, CorrelationMatrix};
use stablepc::learner::gaussian_tester;
use stablepc::metrics::{directed_rates, shd, skeleton_score, stability_table};
use stablepc::rng::ordering_index;
use stablepc::simgen::SimSpec;
use stablepc::{learn, CiTester, DSepOracle, MixedGraph, Variant};

use crate::common::{edge_list_file, schema_line, seeded_order, write, write_json, CliError, CliResult, VERSION};
use crate::simgen::load_spec;

#[derive(Args, Debug)]
pub struct BenchmarkArgs {
    /// Benchmark spec JSON, or the manifest of an earlier run.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory; defaults to $STABLEPC_OUT, then to the directory
    /// recorded in a manifest, then to `stablepc-out`.
    #[arg(long, env = "STABLEPC_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    #[serde(flatten)]
    pub sim: SimSpec,
    pub variants: Vec<Variant>,
    pub alphas: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub seed: u64,
    pub spec: BenchmarkSpec,
    pub variants: Vec<Variant>,
    pub alphas: Vec<f64>,
    pub orderings: usize,
    /// Orderings are `seed:<stream>` permutations; see the file-format notes.
    pub ordering_streams: String,
    pub output_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecFile {
    Manifest(RunManifest),
    Spec(BenchmarkSpec),
}

struct Replicate {
    p: usize,
    n: usize,
    corr: Arc<CorrelationMatrix>,
    truth: MixedGraph,
}

#[derive(Clone, Copy)]
struct CellKey {
    graph: usize,
    ordering: usize,
    variant: Variant,
    alpha: f64,
}

struct CellOutput {
    metrics: Vec<(&'static str, f64)>,
    tests_per_level: Vec<u64>,
    skeleton: MixedGraph,
}

fn validate(spec: &BenchmarkSpec) -> CliResult<()> {
    spec.sim.validate()?;
    if spec.variants.is_empty() || spec.alphas.is_empty() {
        return Err(CliError::input("variants and alphas must be non-empty"));
    }
    if let Some(a) = spec.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(CliError::input(format!("alpha {a} outside (0, 1)")));
    }
    Ok(())
}

/// The reference graph: the CPDAG of the DAG, or with latent variables the
/// oracle PC-stable output over the observed margin.
fn truth_of(spec: &SimSpec, rep: &stablepc::simgen::Replicate) -> CliResult<MixedGraph> {
    let dag = rep.dag.dag();
    if !spec.latent {
        return Ok(dag.to_cpdag());
    }
    let q = rep.kept.len();
    let ci = CiTester::new(DSepOracle::marginal(dag, rep.kept.clone())?);
    Ok(learn(&ci, q, &Variant::PcStable.config(0.5))?.graph)
}

fn run_cell(rep: &Replicate, key: CellKey, seed: u64, per_graph: usize) -> stablepc::Result<CellOutput> {
    let order = seeded_order(seed, ordering_index(key.graph as u64, key.ordering as u64, per_graph as u64), rep.p);
    let ci = gaussian_tester(rep.corr.clone(), rep.n, key.alpha)?;
    let r = learn(&ci, rep.p, &key.variant.config(key.alpha).with_order(order))?;
    let sk = skeleton_score(&r.graph, &rep.truth);
    let (tpr, fpr) = directed_rates(&r.graph, &rep.truth);
    let s = &r.stats;
    let metrics = vec![
        ("edges", s.edges as f64),
        ("true_positives", sk.true_positives as f64),
        ("false_positives", sk.false_positives as f64),
        ("false_negatives", sk.false_negatives as f64),
        ("skeleton_errors", sk.errors() as f64),
        ("tdr", sk.tdr),
        ("shd", shd(&r.graph, &rep.truth) as f64),
        ("directed_edges", s.directed_edges as f64),
        ("bidirected_edges", s.bidirected_edges as f64),
        ("directed_tpr", tpr),
        ("directed_fpr", fpr),
        ("ambiguous_triples", s.ambiguous_triples as f64),
        ("skeleton_tests", s.skeleton_tests as f64),
        ("total_tests", s.total_tests as f64),
    ];
    Ok(CellOutput {
        metrics,
        tests_per_level: s.tests_per_level.clone(),
        skeleton: r.graph.skeleton(),
    })
}

fn error_tag(e: &stablepc::Error) -> String {
    let kind = if e.is_numerical() { "numeric" } else { "input" };
    format!("{kind}: {e}")
}

fn csv_row(w: &mut csv::Writer<Vec<u8>>, key: &CellKey, metric: &str, value: &str) -> CliResult<()> {
    w.write_record([
        key.graph.to_string(),
        key.ordering.to_string(),
        key.variant.to_string(),
        key.alpha.to_string(),
        metric.to_string(),
        value.to_string(),
    ])?;
    Ok(())
}

fn finish(w: csv::Writer<Vec<u8>>, kind: &str) -> CliResult<Vec<u8>> {
    let body = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    let mut out = schema_line(kind).into_bytes();
    out.extend(body);
    Ok(out)
}

pub fn run(args: &BenchmarkArgs) -> CliResult<()> {
    let (spec, recorded_out) = match load_spec::<SpecFile>(&args.spec)? {
        SpecFile::Manifest(m) => (m.spec, Some(m.output_dir)),
        SpecFile::Spec(s) => (s, None),
    };
    validate(&spec)?;
    let out = args
        .out
        .clone()
        .or(recorded_out)
        .unwrap_or_else(|| PathBuf::from("stablepc-out"));
    execute(&spec, &out)
}

pub fn execute(spec: &BenchmarkSpec, out: &Path) -> CliResult<()> {
    let started = Instant::now();
    let sim = &spec.sim;
    let manifest = RunManifest {
        schema: "stablepc.manifest/1".into(),
        tool_version: VERSION.into(),
        seed: sim.seed,
        spec: spec.clone(),
        variants: spec.variants.clone(),
        alphas: spec.alphas.clone(),
        orderings: sim.orderings_per_graph,
        ordering_streams: "graph * orderings + ordering".into(),
        output_dir: out.to_path_buf(),
    };
    write_json(out, "manifest.json", &manifest)?;

    let reps: Vec<Replicate> = (0..sim.graphs)
        .into_par_iter()
        .map(|g| -> CliResult<Replicate> {
            let rep = sim.replicate(g)?;
            let truth = truth_of(sim, &rep)?;
            Ok(Replicate {
                p: rep.kept.len(),
                n: sim.n,
                corr: Arc::new(correlation_from_data(&rep.data)?),
                truth,
            })
        })
        .collect::<CliResult<_>>()?;
    for (g, rep) in reps.iter().enumerate() {
        write(out, &format!("truth/graph_{g:03}.edges"), edge_list_file(&rep.truth))?;
    }
    eprintln!("benchmark: {} replicate(s) ready in {:.1}s", reps.len(), started.elapsed().as_secs_f64());

    let mut keys = Vec::new();
    for graph in 0..sim.graphs {
        for ordering in 0..sim.orderings_per_graph {
            for &variant in &spec.variants {
                for &alpha in &spec.alphas {
                    keys.push(CellKey {
                        graph,
                        ordering,
                        variant,
                        alpha,
                    });
                }
            }
        }
    }
    let results: Vec<stablepc::Result<CellOutput>> = keys
        .par_iter()
        .map(|&k| run_cell(&reps[k.graph], k, sim.seed, sim.orderings_per_graph))
        .collect();

    let header = ["graph_id", "ordering_id", "variant", "alpha"];
    let mut metrics = csv::Writer::from_writer(Vec::new());
    metrics.write_record(header.iter().chain(&["metric", "value"]))?;
    let mut levels = csv::Writer::from_writer(Vec::new());
    levels.write_record(header.iter().chain(&["level", "tests"]))?;
    // (variant, alpha) -> per-level sums, and (graph, variant, alpha) -> skeletons
    let mut level_sums: BTreeMap<(usize, usize), (usize, Vec<u64>)> = BTreeMap::new();
    let mut skeletons: BTreeMap<(usize, usize, usize), Vec<MixedGraph>> = BTreeMap::new();
    let mut failed = 0;
    for (key, res) in keys.iter().zip(results) {
        let vi = spec.variants.iter().position(|v| *v == key.variant).unwrap();
        let ai = spec.alphas.iter().position(|a| *a == key.alpha).unwrap();
        match res {
            Ok(cell) => {
                for (name, value) in &cell.metrics {
                    csv_row(&mut metrics, key, name, &value.to_string())?;
                }
                for (level, tests) in cell.tests_per_level.iter().enumerate() {
                    levels.write_record([
                        key.graph.to_string(),
                        key.ordering.to_string(),
                        key.variant.to_string(),
                        key.alpha.to_string(),
                        level.to_string(),
                        tests.to_string(),
                    ])?;
                }
                let entry = level_sums.entry((vi, ai)).or_default();
                entry.0 += 1;
                if entry.1.len() < cell.tests_per_level.len() {
                    entry.1.resize(cell.tests_per_level.len(), 0);
                }
                for (acc, t) in entry.1.iter_mut().zip(&cell.tests_per_level) {
                    *acc += t;
                }
                skeletons.entry((key.graph, vi, ai)).or_default().push(cell.skeleton);
            }
            Err(e) => {
                failed += 1;
                csv_row(&mut metrics, key, "error", &error_tag(&e))?;
            }
        }
    }
    write(out, "metrics.csv", finish(metrics, "metrics")?)?;
    write(out, "tests_per_level.csv", finish(levels, "tests_per_level")?)?;

    // mean distinct tests per level, averaged over successful runs
    let mut summary = schema_line("tests_per_level_summary") + "variant,alpha,level,runs,mean_tests\n";
    for ((vi, ai), (runs, sums)) in &level_sums {
        for (level, total) in sums.iter().enumerate() {
            let _ = writeln!(
                summary,
                "{},{},{level},{runs},{}",
                spec.variants[*vi],
                spec.alphas[*ai],
                *total as f64 / *runs as f64
            );
        }
    }
    write(out, "tests_per_level_summary.csv", summary)?;

    let mut stab = schema_line("stability") + "graph_id,variant,alpha,i,j,count,frequency,group\n";
    for ((g, vi, ai), graphs) in &skeletons {
        let table = stability_table(graphs);
        for ((i, j), c) in table.sorted() {
            let _ = writeln!(
                stab,
                "{g},{},{},{i},{j},{c},{},{}",
                spec.variants[*vi],
                spec.alphas[*ai],
                c as f64 / table.runs as f64,
                table.group_of(c).name()
            );
        }
    }
    write(out, "stability.csv", stab)?;

    eprintln!(
        "benchmark: {} cell(s), {failed} failed, {:.1}s total",
        keys.len(),
        started.elapsed().as_secs_f64()
    );
    println!("wrote benchmark results to {}", out.display());
    Ok(())
}
