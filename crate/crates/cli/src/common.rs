use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use stablepc::io::{read_correlation_csv, read_data_csv};
use stablepc::rng::{stream, Purpose};
use stablepc::{MixedGraph, VariableOrder};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status 2: the input could not be used.
pub const EXIT_INPUT: u8 = 2;
/// Exit status 3: the numerical machinery failed on valid input.
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<stablepc::Error> for CliError {
    fn from(e: stablepc::Error) -> Self {
        CliError {
            code: if e.is_numerical() { EXIT_NUMERIC } else { EXIT_INPUT },
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("invalid JSON: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// First line of every CSV and edge-list file we write.
pub fn schema_line(kind: &str) -> String {
    format!("# schema=stablepc.{kind}/1\n")
}

pub fn edge_list_file(g: &MixedGraph) -> String {
    schema_line("edges") + &g.to_edge_list()
}

pub fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> CliResult<PathBuf> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, contents).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write(dir, name, s)
}

pub fn open(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))
}

/// Observations, or a correlation matrix when `n` comes from the caller.
pub enum Input {
    Data(stablepc::io::Dataset),
    Correlation {
        names: Vec<String>,
        corr: stablepc::ci::CorrelationMatrix,
        n: usize,
    },
}

impl Input {
    pub fn load(path: &Path, corr: bool, n: Option<usize>) -> CliResult<Input> {
        if corr {
            let n = n.ok_or_else(|| CliError::input("--corr needs --n <samples>"))?;
            let (names, corr) = read_correlation_csv(open(path)?)?;
            Ok(Input::Correlation { names, corr, n })
        } else {
            Ok(Input::Data(read_data_csv(open(path)?)?))
        }
    }

    pub fn names(&self) -> &[String] {
        match self {
            Input::Data(d) => &d.names,
            Input::Correlation { names, .. } => names,
        }
    }

    pub fn into_correlation(self) -> CliResult<(stablepc::ci::CorrelationMatrix, usize)> {
        match self {
            Input::Data(d) => {
                if d.data.ncols() == 0 {
                    return Err(CliError::input("data has no columns"));
                }
                let n = d.data.nrows();
                Ok((stablepc::ci::correlation_from_data(&d.data)?, n))
            }
            Input::Correlation { corr, n, .. } => Ok((corr, n)),
        }
    }
}

/// `natural`, `seed:<k>` or `file:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum OrderSpec {
    Natural,
    Seed(u64),
    File(PathBuf),
}

impl std::str::FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "natural" {
            Ok(OrderSpec::Natural)
        } else if let Some(k) = s.strip_prefix("seed:") {
            k.parse().map(OrderSpec::Seed).map_err(|_| format!("bad seed in `{s}`"))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(OrderSpec::File(PathBuf::from(p)))
        } else {
            Err(format!("expected natural, seed:<k> or file:<path>, got `{s}`"))
        }
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::Natural => f.write_str("natural"),
            OrderSpec::Seed(k) => write!(f, "seed:{k}"),
            OrderSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// The `k`-th seeded permutation of `p` variables.
pub fn seeded_order(seed: u64, k: u64, p: usize) -> VariableOrder {
    VariableOrder::random(p, &mut stream(seed, Purpose::Ordering, k))
}

impl OrderSpec {
    /// File entries are variable names or 0-based indices, separated by
    /// commas or whitespace.
    pub fn resolve(&self, names: &[String]) -> CliResult<VariableOrder> {
        let p = names.len();
        match self {
            OrderSpec::Natural => Ok(VariableOrder::natural(p)),
            OrderSpec::Seed(k) => Ok(seeded_order(*k, 0, p)),
            OrderSpec::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
                let perm = text
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        names
                            .iter()
                            .position(|n| n == t)
                            .or_else(|| t.parse().ok())
                            .ok_or_else(|| CliError::input(format!("unknown variable `{t}` in order file")))
                    })
                    .collect::<CliResult<Vec<usize>>>()?;
                Ok(VariableOrder::from_perm(perm)?)
            }
        }
    }
}
