mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

pub const CACHE_ENV: &str = "FLAGCERT_CACHE_DIR";
pub const SOLVER_ENV: &str = "FLAGCERT_SOLVER";

#[derive(Parser, Serialize)]
#[command(name = "flagcert", version, about = "Exact flag-algebra bounds for graph inducibility problems")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    #[serde(skip)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Cmd {
    /// Count (and list) graphs of order n up to isomorphism.
    Enumerate(EnumerateArgs),
    /// Induced and embedding densities of a small graph in a host graph.
    Density(DensityArgs),
    /// Λ and λ of an objective on a host graph.
    ObjectiveEval(ObjectiveEvalArgs),
    /// Exact objective value of a pattern blowup.
    BlowupEval(BlowupEvalArgs),
    /// Numerical maximization over the part ratios of a pattern.
    BlowupOpt(BlowupOptArgs),
    /// Product of two flags expanded over graphs of order n.
    Expand(ExpandArgs),
    /// Write the semidefinite program in SDPA sparse format.
    SdpExport(SdpExportArgs),
    /// Round a solver solution to an exact certificate.
    Round(RoundArgs),
    /// Verify a certificate exactly.
    Verify(VerifyArgs),
    /// Check the finite stability conditions for a construction.
    Stability(StabilityArgs),
    /// Minimum slack over basis graphs matching a predicate.
    SlackQuery(SlackQueryArgs),
    /// Exhaustive maximum of Λ over graphs of order n.
    Brute(BruteArgs),
    /// Random edge subgraph of a host graph.
    Sample(SampleArgs),
    /// Edit distance from a graph to the blowups of a pattern.
    Editdist(EditdistArgs),
    /// Rooted embeddings where a certificate block is far from its kernel.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Serialize)]
pub struct FamilyArg {
    /// Forbidden induced subgraphs (graph6), restricting to a hereditary family.
    #[arg(long, value_delimiter = ',')]
    pub forbid: Vec<String>,
}

#[derive(Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArg,
    /// Print every graph in graph6.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Serialize)]
pub struct DensityArgs {
    /// The small graph (graph6).
    #[arg(long)]
    pub f: String,
    /// Host graph: graph6, file:<path>, K:<n>, K:<a>,<b> or blowup:<pattern>/<sizes>.
    #[arg(long)]
    pub graph: String,
}

#[derive(Args, Serialize)]
pub struct ObjectiveEvalArgs {
    /// Objective: edge:K,L | graph:<g6> | semi:<red>/<blue> | custom:<file>.
    #[arg(long)]
    pub obj: String,
    #[arg(long)]
    pub graph: String,
}

#[derive(Args, Serialize)]
pub struct BlowupEvalArgs {
    #[arg(long)]
    pub obj: String,
    /// Pattern: Kn, m:ij,... (ii is a loop) or pattern JSON.
    #[arg(long)]
    pub pattern: String,
    /// Part ratios summing to 1 (rationals or expressions in one square root).
    #[arg(long)]
    pub ratios: Option<String>,
    /// Part sizes of a finite blowup instead of ratios.
    #[arg(long, conflicts_with = "ratios")]
    pub sizes: Option<String>,
}

#[derive(Args, Serialize)]
pub struct BlowupOptArgs {
    #[arg(long)]
    pub obj: String,
    #[arg(long)]
    pub pattern: String,
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also report the best value with each vertex of the pattern deleted.
    #[arg(long)]
    pub probe: bool,
    /// Evaluate the rounded finite blowup on this many vertices.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Serialize)]
pub struct ExpandArgs {
    /// Type (graph6).
    #[arg(long)]
    pub tau: String,
    /// First flag as graph6:roots.
    #[arg(long)]
    pub f1: String,
    /// Second flag as graph6:roots.
    #[arg(long)]
    pub f2: String,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArg,
}

#[derive(Args, Serialize)]
pub struct SdpExportArgs {
    #[arg(long)]
    pub obj: String,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArg,
    /// Output .dat-s file; the job description goes to <out>.job.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct RoundArgs {
    #[arg(long)]
    pub obj: String,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArg,
    /// Solver solution file; without it the solver is run.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Solver command with {in} and {out} placeholders (default: $FLAGCERT_SOLVER).
    #[arg(long)]
    pub solver: Option<String>,
    /// Exact bound to prove (default: the blowup value of --pattern at --ratios).
    #[arg(long)]
    pub target: Option<String>,
    /// Extremal construction supplying kernel hints and the tight set.
    #[arg(long, requires = "ratios")]
    pub pattern: Option<String>,
    #[arg(long, requires = "pattern")]
    pub ratios: Option<String>,
    #[arg(long, default_value_t = flagcert::sdp::DEFAULT_DENOM_BOUND)]
    pub denom_bound: u64,
    #[arg(long, default_value_t = flagcert::sdp::DEFAULT_HINT_GUARD)]
    pub tol: f64,
    /// Add kernel hints from eigenvectors with eigenvalue below this.
    #[arg(long)]
    pub kernel_tol: Option<f64>,
    /// Largest denominator for those hints.
    #[arg(long, default_value_t = 64)]
    pub kernel_den: u64,
    /// Output certificate.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    pub cert: PathBuf,
}

#[derive(Args, Serialize)]
pub struct StabilityArgs {
    #[arg(long)]
    pub cert: Option<PathBuf>,
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub ratios: String,
    /// Designated type (graph6).
    #[arg(long)]
    pub tau: String,
    /// Certificate over the τ-free family.
    #[arg(long)]
    pub aux_tau_free: Option<PathBuf>,
    /// Certificate over the family forbidding the loopless pattern.
    #[arg(long)]
    pub aux_loopless_free: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SlackQueryArgs {
    #[arg(long)]
    pub cert: PathBuf,
    /// Keep graphs containing this induced subgraph.
    #[arg(long)]
    pub contains: Vec<String>,
    /// Keep graphs without this induced subgraph.
    #[arg(long)]
    pub free: Vec<String>,
    /// Keep graphs with a homomorphism into this pattern.
    #[arg(long)]
    pub hom: Option<String>,
}

#[derive(Args, Serialize)]
pub struct BruteArgs {
    #[arg(long)]
    pub obj: String,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArg,
    /// Compare the maximum with this value.
    #[arg(long)]
    pub reference: Option<String>,
}

#[derive(Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub graph: String,
    /// Edge retention probability.
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate this objective on the sample.
    #[arg(long)]
    pub obj: Option<String>,
    /// Check quasirandomness across two consecutive parts of these sizes.
    #[arg(long)]
    pub parts: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Print the sample in graph6.
    #[arg(long)]
    pub print: bool,
}

#[derive(Args, Serialize)]
pub struct EditdistArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub pattern: String,
    /// Use the restart heuristic even when exact search is feasible.
    #[arg(long)]
    pub heuristic: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Serialize)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub tau: String,
    #[arg(long)]
    pub eps: String,
}

/// Everything needed to reproduce a run.
#[derive(Serialize)]
pub struct JobConfig<'a> {
    #[serde(flatten)]
    pub command: &'a Cmd,
    pub threads: Option<usize>,
    pub cache_dir: Option<String>,
}

/// Result of a subcommand: exit status, text lines and a JSON value.
pub struct Outcome {
    pub status: u8,
    pub text: Vec<String>,
    pub result: Value,
}

impl Outcome {
    pub fn ok(text: Vec<String>, result: Value) -> Self {
        Outcome { status: 0, text, result }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let job = JobConfig { command: &cli.command, threads: cli.threads, cache_dir: std::env::var(CACHE_ENV).ok() };
    let header = json!({
        "tool": "flagcert",
        "version": env!("CARGO_PKG_VERSION"),
        "job": serde_json::to_value(&job).expect("job config serializes"),
    });
    match commands::run(&cli.command, &header) {
        Ok(out) => {
            if cli.json {
                let mut doc = header;
                doc["status"] = out.status.into();
                doc["result"] = out.result;
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                println!("# flagcert {} {}", env!("CARGO_PKG_VERSION"), header["job"]);
                for l in out.text {
                    println!("{l}");
                }
            }
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
