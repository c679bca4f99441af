use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pnpm_cli::commands;
use pnpm_cli::config::{parse_entries, RunConfig};
use pnpm_cli::{exit, CliError};

#[derive(Parser)]
#[command(
    name = "pnpm",
    version,
    about = "Reconstructed DG schemes for 1D scalar conservation laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-march a problem and write snapshots and the entropy series.
    Run(RunArgs),
    /// Error table over a list of grids.
    Converge {
        #[command(flatten)]
        run: RunArgs,
        /// Write tables for both limiter settings.
        #[arg(long)]
        compare: bool,
    },
    /// Check the pointwise entropy condition on P1P5 data with a jump.
    Counterexample {
        /// Use smooth data instead.
        #[arg(long)]
        smooth: bool,
    },
    /// Singular values of the square reconstruction system.
    Appendix {
        #[arg(long, default_value_t = 6, allow_negative_numbers = true)]
        n_max: i64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    cells: Option<String>,
    #[arg(long)]
    tend: Option<String>,
    /// on or off
    #[arg(long)]
    limiter: Option<String>,
    #[arg(long)]
    flux: Option<String>,
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Comma-separated output times.
    #[arg(long)]
    snapshots: Option<String>,
    /// Comma-separated cell counts.
    #[arg(long)]
    grids: Option<String>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut entries = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
                parse_entries(&text)?
            }
            None => Vec::new(),
        };
        let flags = [
            ("problem", &self.problem),
            ("n", &self.n),
            ("m", &self.m),
            ("cells", &self.cells),
            ("t_end", &self.tend),
            ("limiter", &self.limiter),
            ("flux", &self.flux),
            ("integrator", &self.integrator),
            ("cfl", &self.cfl),
            ("out", &self.out),
            ("snapshots", &self.snapshots),
            ("grids", &self.grids),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                entries.push((key.to_string(), v.clone()));
            }
        }
        RunConfig::from_entries(&entries)
    }
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run(args) => {
            let cfg = args.load()?;
            let s = commands::run(&cfg)?;
            for p in &s.snapshots {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", s.entropy_file.display());
            println!(
                "steps {}  entropy {:.6e} -> {:.6e}  mean theta {:.6}  min margin {:.3e}",
                s.steps, s.initial_entropy, s.final_entropy, s.theta_mean, s.min_margin
            );
        }
        Command::Converge { run, compare } => {
            let cfg = run.load()?;
            for (path, rows) in commands::converge(&cfg, compare)? {
                println!("{}", path.display());
                print!("{}", pnpm_core::diagnostics::to_csv(&rows));
            }
        }
        Command::Counterexample { smooth } => {
            let c = commands::counterexample(smooth)?;
            println!("interface x = 1, P1P5, advection, upwind flux");
            println!(
                "u- = {:.6}  u+ = {:.6}  midpoint = {:.6}",
                c.u_minus, c.u_plus, c.midpoint
            );
            println!("w- = {:.6}", c.w_minus);
            if !c.violated {
                println!("pointwise condition holds");
                return Ok(exit::NOT_FOUND);
            }
            println!("pointwise condition violated");
            println!(
                "unlimited margin {:.6e}; limiter theta = {:.6}, margin {:.6e}",
                c.margin_unlimited, c.theta, c.margin_limited
            );
        }
        Command::Appendix { n_max } => {
            print!("{}", commands::appendix_table(&commands::appendix(n_max)?));
        }
    }
    Ok(exit::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
