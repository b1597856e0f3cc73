use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use protoinfer::pipeline::{evaluate_dir, load_truth, run_pipeline, PipelineConfig, PipelineError};
use protoinfer::psm::{to_dot, Psm};
use protoinfer::synth::{generate_corpus, ProtocolSpec, SynthError};

const SYNTH_EXIT: u8 = 10;

#[derive(Parser)]
#[command(
    name = "protoinfer",
    version,
    about = "Infer message formats and state machines from traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic trace
    Gen(GenArgs),
    /// Run the full inference pipeline on a trace
    Infer(InferArgs),
    /// Score dumped artifacts against ground truth
    Eval(EvalArgs),
    /// Render a PSM JSON file as Graphviz DOT
    ExportDot(ExportDotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Comma-separated spec files or bundled spec names
    #[arg(long, value_delimiter = ',', default_value = "tlsish,smtpish")]
    specs: Vec<String>,
    #[arg(long, default_value_t = 60)]
    sessions: usize,
    #[arg(long, default_value_t = 0.02)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    /// Trace file (.pcap or .jsonl)
    #[arg(long)]
    trace: PathBuf,
    /// Known-protocol models to filter out
    #[arg(long)]
    known: Option<PathBuf>,
    /// Pipeline config JSON
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Ground truth; writes report.json when given
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    ms: Option<f64>,
    #[arg(long)]
    t_ps: Option<f64>,
    #[arg(long)]
    t_pt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    artifacts: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct ExportDotArgs {
    #[arg(long)]
    psm: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Pipeline(PipelineError),
    Synth(SynthError),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        Failure::Synth(e)
    }
}

fn load_spec(entry: &str) -> Result<ProtocolSpec, SynthError> {
    if let Some(spec) = ProtocolSpec::builtin(entry) {
        return Ok(spec);
    }
    let text = std::fs::read_to_string(entry).map_err(|e| {
        SynthError::Spec(format!(
            "{entry} is neither a bundled spec nor a readable file: {e}"
        ))
    })?;
    ProtocolSpec::from_json(&text)
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let specs = args
        .specs
        .iter()
        .map(|s| load_spec(s))
        .collect::<Result<Vec<_>, _>>()?;
    let corpus = generate_corpus(&specs, args.sessions, args.noise, args.seed)?;
    corpus.write_to(&args.out)?;
    eprintln!(
        "wrote {} packets in {} sessions to {}",
        corpus.packets.len(),
        corpus.truth.sessions.len(),
        args.out.display()
    );
    Ok(())
}

fn read_config(path: &Path) -> Result<PipelineConfig, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    PipelineConfig::from_json(&text)
}

fn infer(args: InferArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(p) => read_config(p)?,
        None => PipelineConfig::default(),
    };
    cfg.trace = Some(args.trace);
    cfg.out_dir = Some(args.out);
    if args.known.is_some() {
        cfg.known_models = args.known;
    }
    if args.truth.is_some() {
        cfg.truth = args.truth;
    }
    if let Some(v) = args.ms {
        cfg.ms = v;
    }
    if let Some(v) = args.t_ps {
        cfg.t_ps = v;
    }
    if let Some(v) = args.t_pt {
        cfg.t_pt = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    let out = run_pipeline(&cfg)?;
    eprintln!(
        "{} format clusters, {} session clusters",
        out.pfc.clusters, out.sessions.k
    );
    if let Some(r) = &out.report {
        println!(
            "{}",
            serde_json::to_string_pretty(r).expect("report serializes")
        );
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), Failure> {
    let truth = load_truth(&args.truth)?;
    let report = evaluate_dir(&args.artifacts, &truth)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn export_dot(args: ExportDotArgs) -> Result<(), Failure> {
    let artifact = |reason: String| PipelineError::Artifact {
        path: args.psm.clone(),
        reason,
    };
    let text = std::fs::read_to_string(&args.psm).map_err(|e| artifact(e.to_string()))?;
    let psm = Psm::from_json(&text).map_err(|e| artifact(e.to_string()))?;
    let name = args
        .psm
        .file_stem()
        .map_or("psm".into(), |s| s.to_string_lossy().into_owned());
    std::fs::write(&args.out, to_dot(&psm, &name)).map_err(|source| PipelineError::Output {
        path: args.out.clone(),
        source,
    })?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Infer(a) => infer(a),
        Command::Eval(a) => eval(a),
        Command::ExportDot(a) => export_dot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Pipeline(e)) => {
            eprintln!("error [{}]: {e}", e.stage());
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Synth(e)) => {
            eprintln!("error [synth]: {e}");
            ExitCode::from(SYNTH_EXIT)
        }
    }
}
