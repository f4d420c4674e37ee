use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use krylov_lab::diagnostics::{diagnose, DiagnoseOptions, WindowGuard};
use krylov_lab::experiments::{
    build_datum, build_operator, env_seed, error_exit_code, run_experiment, write_outputs, DatumSpec, ExperimentConfig,
    ExperimentId, OperatorSpec, DEFAULT_OUTPUT_DIR,
};
use krylov_lab::{LabError, Result};

#[derive(Parser)]
#[command(name = "lab", about = "Krylov solvability laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List experiments and gallery operators.
    List,
    /// Run one experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one SVG chart per trace.
        #[arg(long)]
        svg: bool,
    },
    /// Print the diagnostics report for an operator and datum.
    Diagnose {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        datum: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

const OPERATORS: &[(&str, &str)] = &[
    ("dense", "explicit matrix rows"),
    ("diagonal", "diagonal matrix"),
    ("compact_normal", "diagonal compact normal operator from its eigenvalues"),
    ("shift", "right shift on the window [-N, N], zero_fill or cyclic"),
    ("friedrichs_1d", "periodic system d(Bf)/dx + Cf with constant coefficients"),
    ("prototype", "-f' + c f on a periodic grid"),
    ("random", "seeded spd, psd, hermitian or invertible matrix"),
];

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| LabError::InvalidInput(format!("{}: {e}", path.display())))
}

fn run(config: PathBuf, out: Option<PathBuf>, svg: bool) -> Result<i32> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    cfg.apply_env_seed()?;
    let report = run_experiment(&cfg)?;
    let dir = out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let written = write_outputs(&report, &dir, svg)?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| c.asserted && !c.passed).map(|c| c.name.as_str()).collect();
    println!("{} {:?} -> {}", report.experiment_id, report.outcome, written[0].display());
    for v in &report.verdicts {
        println!("  {}: {:?}", v.label, v.verdict.verdict);
    }
    if !failed.is_empty() {
        println!("  failed checks: {}", failed.join(", "));
    }
    Ok(report.outcome.exit_code())
}

fn diagnose_cmd(operator: PathBuf, datum: PathBuf, n: usize) -> Result<i32> {
    let op: OperatorSpec = read_json(&operator)?;
    let dat: DatumSpec = read_json(&datum)?;
    let seed = env_seed()?.unwrap_or(0);
    let built = build_operator(&op, seed)?;
    let g = build_datum(&dat, &built, seed)?;
    let opts = DiagnoseOptions { guard: built.shift.map(|s| WindowGuard::new(s.radius)), ..Default::default() };
    let report = diagnose(&built.op, &g, n, &opts)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            println!("experiments:");
            for id in ExperimentId::ALL {
                println!("  {:<26} {}", id.name(), id.summary());
            }
            println!("operators:");
            for (name, what) in OPERATORS {
                println!("  {name:<26} {what}");
            }
            Ok(0)
        }
        Command::Run { config, out, svg } => run(config, out, svg),
        Command::Diagnose { operator, datum, n } => diagnose_cmd(operator, datum, n),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
