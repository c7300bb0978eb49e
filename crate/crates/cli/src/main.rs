use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use tfqsim::experiment::{
    report_summary, run_experiment_with_threads, write_outputs, ExperimentConfig, ExperimentKind,
};

#[derive(Parser, Debug)]
#[command(name = "tfqsim", version, about = "Time-frequency qudit gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time-bin X gate transfer matrix and F_C.
    Xgate(RunArgs),
    /// Phase-ramp fringe, visibility and process fidelity.
    Fringe(RunArgs),
    /// Controlled increment (3x3).
    Cinc(RunArgs),
    /// SUM gate, d = 3.
    Sum3(RunArgs),
    /// SUM gate, d = 16, matched-frequency readout.
    Sum16(RunArgs),
    /// A circuit file run through the gate pipeline.
    Custom {
        #[command(flatten)]
        run: RunArgs,
        /// Circuit file; overrides `circuit` in the config.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Print finished runs next to the reference values.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment config (TOML). Defaults to the built-in config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Photons per input (gates) or per measurement (fringe).
    #[arg(long)]
    shots: Option<u64>,
    /// Output directory. Falls back to the config, then `tfqsim-out/<experiment>`.
    #[arg(long, env = "TFQSIM_OUT_DIR")]
    out: Option<PathBuf>,
    /// Zero every noise knob.
    #[arg(long)]
    ideal: bool,
    /// Worker threads (results do not depend on it).
    #[arg(long, default_value_t = default_threads())]
    threads: usize,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn load_config(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => ExperimentConfig::default_for(kind),
    };
    if cfg.experiment != kind {
        return Err(format!(
            "config describes a {} experiment, not {kind}",
            cfg.experiment
        ));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(shots) = args.shots {
        cfg.counts.shots = shots;
    }
    if args.ideal {
        cfg = cfg.ideal();
    }
    Ok(cfg)
}

fn run(kind: ExperimentKind, args: &RunArgs, circuit: Option<&Path>) -> Result<(), String> {
    let mut cfg = load_config(kind, args)?;
    if let Some(c) = circuit {
        cfg.circuit = Some(c.to_path_buf());
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| Path::new("tfqsim-out").join(kind.name()));
    // The written config describes the run, not where it was written.
    cfg.output_dir = None;
    cfg.validate().map_err(|e| format!("invalid config: {e}"))?;
    info!("running {kind} with seed {} on {} threads", cfg.seed, args.threads);
    let output = run_experiment_with_threads(&cfg, args.threads).map_err(|e| format!("{kind}: {e}"))?;
    let written = write_outputs(&cfg, &output, &out).map_err(|e| e.to_string())?;
    for path in &written {
        info!("wrote {}", path.display());
    }
    let summary = report_summary(&out).map_err(|e| e.to_string())?;
    print!("{summary}");
    Ok(())
}

fn report(dirs: &[PathBuf]) -> Result<(), String> {
    for dir in dirs {
        let summary = report_summary(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        print!("{summary}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Xgate(a) => run(ExperimentKind::Xgate, a, None),
        Command::Fringe(a) => run(ExperimentKind::Fringe, a, None),
        Command::Cinc(a) => run(ExperimentKind::Cinc, a, None),
        Command::Sum3(a) => run(ExperimentKind::Sum3, a, None),
        Command::Sum16(a) => run(ExperimentKind::Sum16, a, None),
        Command::Custom { run: a, circuit } => run(ExperimentKind::Custom, a, circuit.as_deref()),
        Command::Report { dirs } => report(dirs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
