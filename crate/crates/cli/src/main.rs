use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mbal::commands::{cmd_balance, cmd_experiment, cmd_generate, BalanceFormat};
use mbal::experiment::{ExperimentConfig, Family, DEFAULT_N};
use mbal::output::TableFormat;
use mbal_core::{Algorithm, Seed};

#[derive(Parser)]
#[command(name = "mbal", version, about = "Matrix balancing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Osborne,
    Lapack,
    #[value(name = "proposed-1")]
    Proposed1,
    #[value(name = "proposed-2")]
    Proposed2,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Osborne => Algorithm::Osborne,
            AlgorithmArg::Lapack => Algorithm::Lapack,
            AlgorithmArg::Proposed1 => Algorithm::OneNormProposed,
            AlgorithmArg::Proposed2 => Algorithm::TwoNormProposed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    CaseStudy,
    NearTriangular,
    Hessenberg,
    BadlyScaled,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::CaseStudy => Family::CaseStudy,
            FamilyArg::NearTriangular => Family::NearTriangular,
            FamilyArg::Hessenberg => Family::Hessenberg,
            FamilyArg::BadlyScaled => Family::BadlyScaled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BalanceFormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Balance a matrix file and report diagnostics.
    Balance {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "proposed-2")]
        algorithm: AlgorithmArg,
        #[arg(long, value_enum, default_value = "text")]
        format: BalanceFormatArg,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace diagnostics across balancing iterations for a generated family.
    Experiment {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        /// Perturbation size; defaults to 1e-32 (case study) or 1e-30 (near triangular).
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Repeatable; all four algorithms when omitted.
        #[arg(long, value_enum)]
        algorithm: Vec<AlgorithmArg>,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated test matrix in the text format.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> mbal::Result<()> {
    match cli.command {
        Command::Balance {
            input,
            algorithm,
            format,
            out,
        } => {
            let format = match format {
                BalanceFormatArg::Text => BalanceFormat::Text,
                BalanceFormatArg::Json => BalanceFormat::Json,
            };
            cmd_balance(&input, algorithm.into(), format, out.as_deref())
        }
        Command::Experiment {
            family,
            n,
            epsilon,
            seed,
            algorithm,
            format,
            out,
        } => {
            let family = Family::from(family);
            let algorithms = if algorithm.is_empty() {
                Algorithm::ALL.to_vec()
            } else {
                algorithm.into_iter().map(Algorithm::from).collect()
            };
            let eps = epsilon.unwrap_or(family.default_epsilon());
            let config = ExperimentConfig::new(family, n, eps, Seed(seed), algorithms)?;
            let format = match format {
                TableFormatArg::Csv => TableFormat::Csv,
                TableFormatArg::Json => TableFormat::Json,
            };
            cmd_experiment(&config, format, out.as_deref())
        }
        Command::Generate {
            family,
            n,
            epsilon,
            seed,
            out,
        } => {
            let family = Family::from(family);
            let eps = epsilon.unwrap_or(family.default_epsilon());
            cmd_generate(family, n, eps, Seed(seed), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mbal: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
