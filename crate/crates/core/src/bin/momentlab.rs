use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use momentlab::harness::{self, ConfigError, ExperimentConfig, Format, HarnessError, RepSource};
use momentlab::CatalogKind;

/// Finite-dimensional moment map experiments.
#[derive(Parser)]
#[command(name = "momentlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed and MOMENTLAB_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// List catalog representations.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Check that a catalog representation is a representation.
    Check {
        #[arg(long, value_enum)]
        rep: RepArg,
        /// Spin for su2 (half-integer).
        #[arg(long, default_value_t = 0.5)]
        j: f64,
        /// Truncation size for heisenberg.
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Charge for circle.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        charge: i64,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepArg {
    Su2,
    Heisenberg,
    Circle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            out,
            format,
        } => run(&config, seed, out, format),
        Command::Catalog {
            action: CatalogAction::List,
        } => {
            print!("{}", catalog_listing());
            Ok(0)
        }
        Command::Check { rep, j, n, charge } => check(rep, j, n, charge),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("momentlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn seed_from_env() -> Result<u64, HarnessError> {
    match std::env::var("MOMENTLAB_SEED") {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            HarnessError::Config(ConfigError::Validation {
                field: "MOMENTLAB_SEED".into(),
                message: format!("not an unsigned integer: {v:?}"),
            })
        }),
    }
}

fn run(
    config: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<FormatArg>,
) -> Result<i32, HarnessError> {
    let text = std::fs::read_to_string(config).map_err(|source| HarnessError::Io {
        path: config.to_path_buf(),
        source,
    })?;
    let mut cfg = harness::parse_config_with_seed_default(&text, seed_from_env()?)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out = out.or_else(|| cfg.output.path.clone());
    let format = format
        .map(|f| match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        })
        .or(cfg.output.format);
    let format = harness::infer_format(format, out.as_deref());
    let report = harness::run_experiment(&cfg)?;
    match &out {
        Some(path) => harness::emit_report(&report, &cfg, path, format)?,
        None => print!("{}", harness::render_report(&report, &cfg, format)),
    }
    Ok(report.exit_code())
}

fn check(rep: RepArg, j: f64, n: usize, charge: i64) -> Result<i32, HarnessError> {
    let kind = match rep {
        RepArg::Su2 => CatalogKind::spin(harness::twice_spin(j, "j")?),
        RepArg::Heisenberg => CatalogKind::HeisenbergTruncated { n },
        RepArg::Circle => CatalogKind::Circle { charge },
    };
    let doc = serde_json::json!({ "rep": rep_json(&kind), "experiment": "validity" }).to_string();
    let cfg: ExperimentConfig = harness::parse_config(&doc)?;
    debug_assert_eq!(cfg.rep, RepSource::Catalog(kind));
    let report = harness::run_experiment(&cfg)?;
    print!("{}", harness::render_report(&report, &cfg, Format::Json));
    Ok(report.exit_code())
}

fn rep_json(kind: &CatalogKind) -> serde_json::Value {
    match kind {
        CatalogKind::Su2Spin { twice_j } => {
            serde_json::json!({ "kind": "su2", "j": f64::from(*twice_j) / 2.0 })
        }
        CatalogKind::HeisenbergTruncated { n } => {
            serde_json::json!({ "kind": "heisenberg", "n": n })
        }
        CatalogKind::Circle { charge } => serde_json::json!({ "kind": "circle", "charge": charge }),
        CatalogKind::DirectSum(parts) => {
            serde_json::json!({ "kind": "direct_sum", "parts": parts.iter().map(rep_json).collect::<Vec<_>>() })
        }
    }
}

fn catalog_listing() -> String {
    [
        "su2         --j <half-integer>   spin-j irrep of su(2), dimension 2j+1",
        "heisenberg  --n <modes>          truncated Schroedinger rep of the Heisenberg algebra (Q, P, Z), n >= 4",
        "circle      --charge <integer>   charge-k rep of u(1), dimension 1",
        "direct_sum  (config only)        block sum of catalog reps over one algebra",
        "custom      (config only)        algebra and generators from a JSON file",
    ]
    .iter()
    .map(|l| format!("{l}\n"))
    .collect()
}
