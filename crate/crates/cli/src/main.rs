//! `hdgraph` command-line tool.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 validation. Failures print one
//! stderr line `error[<kind>] <message>`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "hdgraph",
    version,
    about = "Hypervector graph embeddings: encode, decode, probe"
)]
pub struct Cli {
    /// Append the resolved config, with a timestamp, to this JSON-lines file.
    #[arg(long, global = true, value_name = "PATH")]
    pub log_file: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Create, import into, or inspect a codebook.
    #[command(subcommand)]
    Codebook(CodebookCmd),
    /// Encode a structure into an embedding file.
    #[command(subcommand)]
    Encode(EncodeCmd),
    /// Decode an embedding back into a graph or hypergraph.
    Reconstruct(ReconstructArgs),
    /// Key/value capacity sweep as CSV.
    Capacity(CapacityArgs),
    /// Fit a readout on embeddings of synthetic graphs; metrics CSV.
    Probe(ProbeArgs),
    /// Check the Dirac operator of a graph against its Laplacian.
    DiracCheck(DiracArgs),
    /// Run one probe task across several dimensions; relative-metric CSV.
    DimSweep(DimSweepArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodebookCmd {
    Gen(CodebookGenArgs),
    /// Register externally computed concept vectors as attributes.
    Import(CodebookImportArgs),
    Inspect {
        path: PathBuf,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct CodebookGenArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, env = "HDGRAPH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 512)]
    pub nodes: usize,
    #[arg(long, default_value_t = 64)]
    pub edge_ids: usize,
    /// Attribute keys to generate vectors for.
    #[arg(long, value_delimiter = ',')]
    pub attrs: Vec<String>,
    /// Plain N(0, 1/d) vectors instead of unit-spectrum ones.
    #[arg(long)]
    pub gaussian: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CodebookImportArgs {
    /// Concept file: header "<key>,dim=<d>", then "key,x_1,...,x_d" rows.
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long, default_value = "key")]
    pub key_column: String,
    /// Extend this codebook; otherwise a fresh one is built at the file's dimension.
    #[arg(long)]
    pub into: Option<PathBuf>,
    #[arg(long, env = "HDGRAPH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 512)]
    pub nodes: usize,
    #[arg(long, default_value_t = 64)]
    pub edge_ids: usize,
    #[arg(long)]
    pub gaussian: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodeCmd {
    /// Edge list (`n=<int>` header) or graph JSON.
    Graph(EncodeArgs),
    /// Graph JSON with an `attrs` list.
    Attributed(EncodeArgs),
    /// Hypergraph JSON.
    Hypergraph {
        #[command(flatten)]
        io: EncodeArgs,
        /// Bind all members of each hyperedge instead of keying by edge id.
        #[arg(long)]
        product: bool,
    },
    /// The subgraph induced by one vertex and its neighbors.
    Neighborhood {
        #[command(flatten)]
        io: EncodeArgs,
        #[arg(long)]
        vertex: usize,
        /// Number the members 1..k instead of keeping global labels.
        #[arg(long)]
        relabel: bool,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct EncodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub cb: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReconstructArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub cb: PathBuf,
    /// Edge threshold, or "auto" for the largest-gap split.
    #[arg(long, default_value = "0.5")]
    pub threshold: String,
    /// Score every pair the codebook can express, not just those inside the
    /// recovered vertex set.
    #[arg(long)]
    pub no_safeguard: bool,
    /// Write per-pair scores (`i,j,score,accepted`) here.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Print the full decoding report as JSON instead of an edge list.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CapacityArgs {
    #[arg(long, default_value_t = 4096)]
    pub d: usize,
    #[arg(long = "n", value_delimiter = ',', default_value = "10,50,100,200,300")]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, env = "HDGRAPH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub gaussian: bool,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskArg {
    NumNodes,
    NumEdges,
    HasCycle,
    NumTriangles,
    NodeDegree,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelArg {
    Ridge,
    Mlp,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    /// The task's default Erdős–Rényi family.
    Er,
    /// Equal mix of ER, BA, SBM, star, path and complete graphs.
    Mixed,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeSetup {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    #[arg(long, default_value_t = 2000)]
    pub graphs: usize,
    #[arg(long, env = "HDGRAPH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "ridge")]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "er")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 5)]
    pub n_min: usize,
    #[arg(long, default_value_t = 15)]
    pub n_max: usize,
    /// Fixed ridge penalty; by default it is chosen on a validation slice.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 16)]
    pub hidden: usize,
    #[arg(long, default_value_t = 150)]
    pub epochs: usize,
    #[arg(long, default_value_t = 3e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long, default_value_t = 1024)]
    pub d: usize,
    /// Use this codebook instead of generating one (its dimension wins).
    #[arg(long)]
    pub cb: Option<PathBuf>,
    #[command(flatten)]
    pub setup: ProbeSetup,
}

#[derive(Debug, Args, Serialize)]
pub struct DimSweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024,2048")]
    pub dims: Vec<usize>,
    #[command(flatten)]
    pub setup: ProbeSetup,
}

#[derive(Debug, Args, Serialize)]
pub struct DiracArgs {
    /// Edge list or graph JSON.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Also print the eigenvalues.
    #[arg(long)]
    pub eigenvalues: bool,
}

/// Failure categories, each with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    fn tag(&self) -> (&'static str, &str) {
        match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Io(m) => ("io", m),
            Failure::Validation(m) => ("validation", m),
        }
    }
}

impl From<hdgraph::Error> for Failure {
    fn from(e: hdgraph::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // clap's message up to its usage block, on one line.
            let msg = e.to_string();
            let head: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .collect();
            let f = Failure::Usage(head.join(" ").trim_start_matches("error: ").to_string());
            eprintln!("error[usage] {}", one_line(f.tag().1));
            return ExitCode::from(f.code());
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, msg) = f.tag();
            eprintln!("error[{kind}] {}", one_line(msg));
            ExitCode::from(f.code())
        }
    }
}
