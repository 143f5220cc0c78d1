//! `euler-crm`: run JSON experiment manifests and emit deterministic
//! reports. Exit codes: 0 all verdicts pass, 1 statistical failure,
//! 2 usage/config error, 3 numerical error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use euler_crm_cli::manifest::ExperimentManifest;
use euler_crm_cli::{report, runners, CliError};

const WORKERS_ENV: &str = "EULER_CRM_WORKERS";

#[derive(Parser)]
#[command(
    name = "euler-crm",
    version,
    about = "Numerical experiments on completely random measures and 2D Euler point-vortex dynamics",
    subcommand_value_name = "EXPERIMENT",
    subcommand_help_heading = "Experiments"
)]
struct Cli {
    /// Subcommand naming the experiment kind; it must match the manifest's
    /// "experiment" tag.
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Path to the JSON experiment manifest.
    manifest: PathBuf,
    /// Override the manifest seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker-pool size (default: $EULER_CRM_WORKERS, then all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (default: <manifest>.out next to the manifest).
    #[arg(long)]
    out: Option<PathBuf>,
}

macro_rules! subcommands {
    ($($variant:ident => $tag:literal, $doc:literal;)*) => {
        #[derive(clap::Subcommand)]
        enum Command {
            $(
                #[command(name = $tag, about = $doc)]
                $variant(RunArgs),
            )*
        }

        impl Command {
            fn parts(self) -> (&'static str, RunArgs) {
                match self {
                    $(Command::$variant(args) => ($tag, args),)*
                }
            }
        }
    };
}

subcommands! {
    Sample => "sample", "Draw CRM realizations (atoms + Gaussian coefficients)";
    Moments => "moments", "Monte Carlo moments of stochastic integrals vs oracles";
    Cf => "cf", "Empirical vs Lévy–Khintchine characteristic function";
    Triads => "triads", "Dump the triad coefficient table with quadrature cross-check";
    Lemma41 => "lemma41", "Row-integral residuals of the interaction kernel";
    VortexSim => "vortex-sim", "Integrate a point-vortex configuration";
    WeakResidual => "weak-residual", "Weak-formulation residuals along a trajectory";
    InvarianceTest => "invariance-test", "Monte Carlo mean of the generator";
    SkewTest => "skew-test", "Skew-symmetry of the generator";
    FlowInvariance => "flow-invariance", "CF comparison before/after the vortex flow";
    HypothesisTest => "hypothesis-test", "Independence and stationarity diagnostics";
    Accept => "accept", "Run the full acceptance suite";
}

fn emit_error(e: &CliError) {
    let payload = json!({ "error": e.kind(), "message": e.message() });
    eprintln!("{payload}");
}

fn worker_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(w) = flag {
        if w == 0 {
            return Err(CliError::Config("--workers must be ≥ 1".into()));
        }
        return Ok(w);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return v
            .parse::<usize>()
            .ok()
            .filter(|w| *w >= 1)
            .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer")));
    }
    Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn execute(kind: &'static str, args: RunArgs) -> Result<i32, CliError> {
    let raw = std::fs::read(&args.manifest).map_err(|e| {
        CliError::Config(format!("cannot read manifest {}: {e}", args.manifest.display()))
    })?;
    let mut manifest: ExperimentManifest = serde_json::from_slice(&raw)
        .map_err(|e| CliError::Config(format!("invalid manifest: {e}")))?;
    if manifest.kind() != kind {
        return Err(CliError::Config(format!(
            "manifest describes a `{}` experiment but the `{kind}` subcommand was invoked",
            manifest.kind()
        )));
    }
    if let Some(seed) = args.seed {
        manifest.set_seed(seed)?;
    }
    manifest.validate()?;
    let workers = worker_count(args.workers)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;
    let artifacts = pool.install(|| runners::run(&manifest))?;
    let out_dir = args.out.unwrap_or_else(|| {
        let mut p = args.manifest.clone();
        p.set_extension("out");
        p
    });
    let hash = report::manifest_sha256(&raw);
    let written = report::write_artifacts(
        &out_dir,
        manifest.kind(),
        &hash,
        manifest.seed(),
        workers,
        &artifacts,
    )
    .map_err(|e| CliError::Config(format!("cannot write artifacts: {e}")))?;
    println!("{}", artifacts.summary);
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(if artifacts.passed { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.parts();
    match execute(kind, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            emit_error(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
