use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qeslab::cli::{
    cmd_critical, cmd_kk, cmd_profile, cmd_scan, cmd_table1, cmd_table2, cmd_wronskian, CliError,
    CommandOutput, OutputFormat,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Human => OutputFormat::Human,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qeslab",
    version,
    about = "Spectra, scattering, WKB levels, and Wronskian diagnostics for an inverted hyperbolic potential"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Algebraic energies for n = 1..nmax, valley levels marked.
    Table1 {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        nmax: u32,
    },
    /// WKB valley levels with percent errors against the algebraic spectrum.
    Table2 {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        nmax: u32,
    },
    /// Potential profile plus every algebraic level with its turning points.
    Profile {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
        xmax: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Reflection probability over an energy grid.
    Scan {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        emin: f64,
        #[arg(long, allow_hyphen_values = true)]
        emax: f64,
        #[arg(long)]
        points: usize,
    },
    /// Asymptotic Wronskians of all parity-state pairs.
    Wronskian {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: u32,
        /// Asymptotic probe position.
        #[arg(long = "X")]
        x: Option<f64>,
    },
    /// Couplings where levels exit the valley and where the peaks merge.
    Critical {
        #[arg(long)]
        n: u32,
    },
    /// Companion-model summary: degenerate-pair energy and Wronskian.
    Kk {
        #[arg(long)]
        a1: f64,
        #[arg(long)]
        nu: f64,
    },
}

fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    match cli.command {
        Command::Table1 { b, nmax } => cmd_table1(b, nmax),
        Command::Table2 { b, nmax } => cmd_table2(b, nmax),
        Command::Profile {
            b,
            n,
            xmin,
            xmax,
            samples,
        } => cmd_profile(b, n, xmin, xmax, samples),
        Command::Scan {
            b,
            n,
            emin,
            emax,
            points,
        } => cmd_scan(b, n, emin, emax, points),
        Command::Wronskian { b, n, x } => cmd_wronskian(b, n, x),
        Command::Critical { n } => cmd_critical(n),
        Command::Kk { a1, nu } => cmd_kk(a1, nu),
    }
}

fn emit(cli: &Cli, output: &CommandOutput) -> Result<(), CliError> {
    let rendered = output.render(cli.format.into());
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|output| emit(&cli, &output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qeslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
