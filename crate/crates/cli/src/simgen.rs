use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use stablepc::io::{default_names, write_data_csv};
use stablepc::simgen::SimSpec;

use crate::common::{edge_list_file, open, schema_line, write, write_json, CliError, CliResult, VERSION};

#[derive(Args, Debug)]
pub struct SimgenArgs {
    /// JSON simulation spec; replaces the individual flags.
    #[arg(long, conflicts_with_all = ["p", "en", "n", "graphs", "seed", "latent"])]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    /// Expected neighbourhood size.
    #[arg(long, default_value_t = 2.0)]
    pub en: f64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of replicates.
    #[arg(long, default_value_t = 1)]
    pub graphs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Drop half of the parentless nodes with two or more children.
    #[arg(long)]
    pub latent: bool,
    #[arg(long, env = "STABLEPC_OUT", default_value = "stablepc-out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct SimManifest<'a> {
    schema: &'static str,
    tool_version: &'static str,
    spec: &'a SimSpec,
}

pub fn load_spec<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> CliResult<T> {
    serde_json::from_reader(open(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn run(args: &SimgenArgs) -> CliResult<()> {
    let spec: SimSpec = match &args.spec {
        Some(path) => load_spec(path)?,
        None => SimSpec {
            p: args.p,
            expected_neighbors: args.en,
            n: args.n,
            graphs: args.graphs,
            orderings_per_graph: 1,
            latent: args.latent,
            seed: args.seed,
        },
    };
    spec.validate()?;
    let out = &args.out;
    write_json(
        out,
        "manifest.json",
        &SimManifest {
            schema: "stablepc.simgen/1",
            tool_version: VERSION,
            spec: &spec,
        },
    )?;
    (0..spec.graphs).into_par_iter().try_for_each(|g| -> CliResult<()> {
        let rep = spec.replicate(g)?;
        let dir = out.join(format!("rep_{g:03}"));
        let all = default_names(spec.p);
        let names: Vec<String> = rep.kept.iter().map(|&v| all[v].clone()).collect();
        let mut csv = schema_line("data").into_bytes();
        write_data_csv(&mut csv, &names, &rep.data)?;
        write(&dir, "data.csv", csv)?;

        let dag = rep.dag.dag();
        write(&dir, "dag.edges", edge_list_file(&dag.to_mixed_graph()))?;
        write(&dir, "cpdag.edges", edge_list_file(&dag.to_cpdag()))?;
        let mut w = schema_line("weights") + "from,to,weight\n";
        for (f, t, wt) in rep.dag.weighted_edges() {
            w.push_str(&format!("{f},{t},{wt:?}\n"));
        }
        write(&dir, "weights.csv", w)?;
        if spec.latent {
            let kept: Vec<String> = rep.kept.iter().map(|v| v.to_string()).collect();
            write(&dir, "observed.txt", kept.join("\n") + "\n")?;
        }
        Ok(())
    })?;
    println!("wrote {} replicate(s) to {}", spec.graphs, out.display());
    Ok(())
}
