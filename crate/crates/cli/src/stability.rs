use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use rayon::prelude::*;
use stablepc::learner::gaussian_tester;
use stablepc::metrics::stability_table;
use stablepc::{learn, MixedGraph, Variant};

use crate::common::{schema_line, seeded_order, write, CliError, CliResult, Input};

#[derive(Args, Debug)]
pub struct StabilityArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub corr: bool,
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of seeded random orderings.
    #[arg(long, default_value_t = 20)]
    pub orderings: usize,
    #[arg(long, default_value_t = Variant::Pc)]
    pub variant: Variant,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Ordering `k` is the permutation drawn from stream `k` of this seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = "STABLEPC_OUT", default_value = "stablepc-out")]
    pub out: PathBuf,
}

pub fn run(args: &StabilityArgs) -> CliResult<()> {
    if args.orderings == 0 {
        return Err(CliError::input("--orderings must be at least 1"));
    }
    let input = Input::load(&args.data, args.corr, args.n)?;
    let names = input.names().to_vec();
    let p = names.len();
    let (corr, n) = input.into_correlation()?;
    // one shared tester: answers are a function of the query alone
    let ci = gaussian_tester(Arc::new(corr), n, args.alpha)?;
    let skeletons: Vec<MixedGraph> = (0..args.orderings as u64)
        .into_par_iter()
        .map(|k| {
            let cfg = args.variant.config(args.alpha).with_order(seeded_order(args.seed, k, p));
            learn(&ci, p, &cfg).map(|r| r.graph.skeleton())
        })
        .collect::<stablepc::Result<_>>()?;
    let table = stability_table(&skeletons);

    let mut w = csv::Writer::from_writer(schema_line("stability").into_bytes());
    w.write_record(["i", "j", "name_i", "name_j", "count", "frequency", "group"])?;
    for ((i, j), c) in table.sorted() {
        w.write_record([
            i.to_string(),
            j.to_string(),
            names[i].clone(),
            names[j].clone(),
            c.to_string(),
            (c as f64 / table.runs as f64).to_string(),
            table.group_of(c).name().to_string(),
        ])?;
    }
    let csv = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    let path = write(&args.out, "stability.csv", csv)?;
    let groups: Vec<String> = table
        .group_sizes()
        .iter()
        .map(|(g, k)| format!("{} {k}", g.name()))
        .collect();
    println!(
        "{} distinct edges over {} orderings ({}); wrote {}",
        table.len(),
        table.runs,
        if groups.is_empty() { "none".into() } else { groups.join(", ") },
        path.display()
    );
    Ok(())
}
