use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::Serialize;
use stablepc::io::sepsets_to_text;
use stablepc::learner::{learn_from_correlation, LearnStats};
use stablepc::Variant;

use crate::common::{edge_list_file, schema_line, write, write_json, CliResult, Input, OrderSpec, VERSION};

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// CSV with a header row of variable names and one observation per row.
    pub data: PathBuf,
    /// Treat the input as a correlation matrix (requires --n).
    #[arg(long)]
    pub corr: bool,
    /// Sample size behind a correlation matrix.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = Variant::PcStable)]
    pub variant: Variant,
    /// natural, seed:<k> or file:<path>.
    #[arg(long, default_value = "natural")]
    pub order: OrderSpec,
    /// Evaluate each skeleton level in parallel (stable variants).
    #[arg(long)]
    pub parallel: bool,
    #[arg(long, env = "STABLEPC_OUT", default_value = "stablepc-out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct StatsFile<'a> {
    schema: &'static str,
    tool_version: &'static str,
    variant: Variant,
    alpha: f64,
    order: String,
    n: usize,
    p: usize,
    variables: &'a [String],
    stats: &'a LearnStats,
}

pub fn run(args: &LearnArgs) -> CliResult<()> {
    let input = Input::load(&args.data, args.corr, args.n)?;
    let names = input.names().to_vec();
    let order = args.order.resolve(&names)?;
    let (corr, n) = input.into_correlation()?;
    let cfg = args.variant.config(args.alpha).with_order(order).with_parallel(args.parallel);
    let report = learn_from_correlation(Arc::new(corr), n, &cfg)?;
    let p = names.len();

    let out = &args.out;
    write(out, "graph.edges", edge_list_file(&report.graph))?;
    write(out, "sepsets.txt", schema_line("sepsets") + &sepsets_to_text(p, report.sepsets()))?;
    write_json(
        out,
        "stats.json",
        &StatsFile {
            schema: "stablepc.stats/1",
            tool_version: VERSION,
            variant: args.variant,
            alpha: args.alpha,
            order: args.order.to_string(),
            n,
            p,
            variables: &names,
            stats: &report.stats,
        },
    )?;
    let s = &report.stats;
    let summary = format!(
        "variant {} alpha {} on {p} variables, n = {n}\n\
         edges: {}\ndirected: {}\nundirected: {}\nbidirected: {}\n\
         unshielded triples: {}\nambiguous triples: {}\nCI tests: {}\n",
        args.variant,
        args.alpha,
        s.edges,
        s.directed_edges,
        s.undirected_edges,
        s.bidirected_edges,
        s.unshielded_triples,
        s.ambiguous_triples,
        s.total_tests,
    );
    write(out, "summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}
