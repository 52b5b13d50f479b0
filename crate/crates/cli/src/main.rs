use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use log::{error, warn};
use quadgrid::io::{format_report_text, parse_size, parse_spec, run_pipeline, PipelineOptions, SolverChoice};

#[derive(Parser)]
#[command(
    name = "quadgrid",
    version,
    about = "Structured quadrilateral grids aligned to internal boundaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, smooth and write the mesh described by a problem file.
    Generate(GenerateArgs),
}

#[derive(Parser)]
struct GenerateArgs {
    /// Problem file.
    spec: PathBuf,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Grid spacing as a fraction of the smallest gap between boundaries.
    #[arg(long)]
    fraction: Option<f64>,
    /// Stopping tolerance on ||F||_2.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Explicit grid size, e.g. 40x30.
    #[arg(long, value_name = "MxN", value_parser = parse_seed_grid)]
    seed_grid: Option<(usize, usize)>,
    /// Directory for relative output paths (default: the problem file's directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Sane,
    NewtonGmres,
    Both,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Sane => SolverChoice::Sane,
            SolverArg::NewtonGmres => SolverChoice::NewtonGmres,
            SolverArg::Both => SolverChoice::Both,
        }
    }
}

fn parse_seed_grid(s: &str) -> Result<(usize, usize), String> {
    parse_size(s).ok_or_else(|| format!("expected MxN with M, N >= 2, got '{s}'"))
}

fn generate(args: GenerateArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.spec).with_context(|| format!("cannot read {}", args.spec.display()))?;
    let mut spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => {
            error!("{}: {e}", args.spec.display());
            return Ok(1);
        }
    };
    if let Some(s) = args.solver {
        spec.solver.kind = s.into();
    }
    if let Some(f) = args.fraction {
        spec.grid.fraction = f;
    }
    if let Some(t) = args.tol {
        spec.solver.set_tol(t);
    }
    if let Some(n) = args.max_iters {
        spec.solver.set_max_iters(n);
    }
    if let Some(size) = args.seed_grid {
        spec.grid.size = Some(size);
    }

    let opts = PipelineOptions {
        out_dir: args.out_dir,
        base_dir: args.spec.parent().map(PathBuf::from),
    };
    match run_pipeline(&spec, &opts) {
        Ok(out) => {
            print!("{}", format_report_text(&out.report));
            for p in &out.written {
                println!("wrote {}", p.display());
            }
            if out.exit_code() != 0 {
                warn!("solver did not converge");
            }
            Ok(out.exit_code())
        }
        Err(e) => {
            error!("{}: {e}", args.spec.display());
            Ok(e.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Generate(args) = cli.command;
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let code = generate(args).unwrap_or_else(|e| {
        error!("{e:#}");
        1
    });
    ExitCode::from(code as u8)
}
