use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mbios_bounds::numerics::DEFAULT_SEED;
use mbios_bounds::report::ReportDocument;
use mbios_bounds::unquantized::SeriesConfig;

mod args;
mod commands;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] mbios_bounds::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_input_error() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
}

#[derive(Parser, Debug)]
#[command(name = "mbios-bounds", version, about = "Rate, parity-check density and bit error bounds for binary linear codes over MBIOS channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format; defaults to the extension of --out, else csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Number of terms kept in the entropy power series.
    #[arg(long, global = true, default_value_t = 10)]
    series_p: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Capacity, error weight and first tanh moment of a channel.
    Capacity {
        #[arg(long)]
        channel: String,
    },
    /// Upper bound on the rate of an ensemble over a channel.
    RateBound {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        ensemble: String,
        #[arg(long, default_value = "unq")]
        method: String,
    },
    /// Lower bound on the asymptotic parity-check density.
    DensityBound {
        #[arg(long)]
        channel: String,
        #[arg(long, default_value = "unq")]
        method: String,
        /// Code rate; the gap to capacity follows from it.
        #[arg(long, conflicts_with = "epsilon")]
        rate: Option<f64>,
        /// Multiplicative gap to capacity.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Lower bound on the bit error probability.
    BerBound {
        #[arg(long)]
        channel: String,
        #[arg(long, conflicts_with = "epsilon")]
        rate: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Check degrees taken from this ensemble.
        #[arg(long, conflicts_with = "t")]
        ensemble: Option<String>,
        /// Normalized parity-check density.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Eb/N0 threshold implied by a bound for an ensemble on the BIAWGN channel.
    Threshold {
        #[arg(long)]
        ensemble: String,
        #[arg(long, default_value = "unq")]
        method: String,
    },
    /// Regenerate a threshold table.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
    },
    /// Data behind one of the comparison plots.
    Sweep {
        #[arg(value_enum)]
        figure: Figure,
        /// Code rates (fig2, fig4).
        #[arg(long, value_delimiter = ',')]
        rates: Vec<f64>,
        /// Right degrees (fig2).
        #[arg(long = "a-r", value_delimiter = ',')]
        a_r: Vec<usize>,
        /// Gaps to capacity (fig3).
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
    },
    /// Re-render a JSON report in the selected format.
    Render { input: PathBuf },
}

/// Run-wide settings shared by the subcommands.
pub struct Context {
    pub series: SeriesConfig,
    pub seed: u64,
}

fn seed_from_env() -> Result<u64, CliError> {
    let Ok(raw) = std::env::var("MBIOS_BOUNDS_SEED") else {
        return Ok(DEFAULT_SEED);
    };
    let t = raw.trim();
    let parsed = match t.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| CliError::Input(format!("MBIOS_BOUNDS_SEED '{raw}' is not an unsigned integer")))
}

fn format_for(format: Option<Format>, out: Option<&Path>) -> Format {
    format.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let series = SeriesConfig::new(cli.series_p)?;
    let ctx = Context {
        series,
        seed: seed_from_env()?,
    };
    let doc = match cli.command {
        Command::Render { ref input } => {
            let text = fs::read_to_string(input)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", input.display())))?;
            ReportDocument::from_json(&text)?
        }
        ref cmd => {
            let mut doc = ReportDocument::new(std::env::args().skip(1).collect());
            doc.timestamp = std::env::var("SOURCE_DATE_EPOCH").ok();
            doc.input("series_p", ctx.series.truncation_p);
            doc.input("seed", ctx.seed);
            commands::execute(cmd, &ctx, &mut doc)?;
            doc
        }
    };
    let body = match format_for(cli.format, cli.out.as_deref()) {
        Format::Csv => doc.to_csv(),
        Format::Json => doc.to_json(),
    };
    match &cli.out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => io::stdout().write_all(body.as_bytes()).map_err(|source| CliError::Write {
            path: "standard output".into(),
            source,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
