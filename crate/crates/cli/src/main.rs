use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use choquet_cli::commands::{self, LfvArgs, Outcome, SimulateArgs};
use choquet_cli::report::{to_csv, to_json, write_file, write_sidecar_log};
use choquet_cli::suites::{run_suite_timed, summary_lines, Format, SuiteConfig};
use choquet_cli::CliError;
use choquet_core::choquet::Mode;
use choquet_core::lfv::LfvOptions;
use choquet_core::random_sets::Functional;
use choquet_core::setfun::ClassId;

#[derive(Parser)]
#[command(name = "choquet", version, about = "Exact Choquet representations, class tests, random set simulation and LFV certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Represent a set function by its unique measure and verify the result
    Represent {
        /// SetFunction JSON file
        #[arg(long)]
        input: PathBuf,
        /// monotone | alternating | containment | vee_alternating
        #[arg(long)]
        mode: Mode,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Test membership of a set function in a class
    Classify {
        /// SetFunction JSON file
        #[arg(long)]
        input: PathBuf,
        /// completely_monotone, completely_alternating, completely_vee_monotone,
        /// completely_vee_alternating, valuation, exponential_valuation, k_valuation:<k>
        #[arg(long = "class")]
        class: ClassId,
        /// Scan every subset instead of antichains only (small lattices)
        #[arg(long)]
        full_subsets: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate a hitting or avoidance probability by simulation
    Simulate {
        /// Model JSON file (poisson, compound or mixture)
        #[arg(long)]
        model: PathBuf,
        /// hitting | avoidance
        #[arg(long, default_value = "avoidance")]
        functional: Functional,
        /// Query set JSON file
        #[arg(long)]
        q: PathBuf,
        /// Replications
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long)]
        seed: u64,
        /// z threshold for the pass/fail verdict
        #[arg(long, default_value_t = 3.0)]
        z: f64,
        /// Optional CSV of per-batch counts
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for a locally-finite-valuation certificate
    Lfv {
        /// Functional JSON file, or a builtin: poisson5, solid5, pairs4,
        /// interval_poisson, interval_solid
        #[arg(long)]
        phi: String,
        /// Windows JSON file: {"windows": [...]}
        #[arg(long)]
        window: PathBuf,
        /// Allowed shortfall, as p/q
        #[arg(long, default_value = "1/20")]
        delta: String,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        /// Largest covering size on interval windows
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run named verification suites
    Suite(SuiteFlags),
}

#[derive(Args)]
struct SuiteFlags {
    /// SuiteConfig JSON file; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated suite ids
    #[arg(long, value_delimiter = ',')]
    suites: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    z: Option<f64>,
    /// Report path (stdout when absent); a timing log goes to <path>.log
    #[arg(long)]
    output: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
    /// Bonferroni-correct the z threshold within each suite
    #[arg(long)]
    bonferroni: bool,
    /// Fixture file or directory
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Replications per Monte Carlo estimate
    #[arg(long)]
    samples: Option<u64>,
}

fn emit(doc: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => write_file(p, doc),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn finish(outcome: Outcome, output: Option<&Path>) -> Result<i32, CliError> {
    emit(&to_json(&outcome.doc), output)?;
    Ok(if outcome.ok { 0 } else { 1 })
}

fn suite_config(flags: SuiteFlags) -> Result<SuiteConfig, CliError> {
    let SuiteFlags { config, suites, seed, z, output, format, bonferroni, fixtures, samples } = flags;
    let mut cfg = match config {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => SuiteConfig::new(&[], None),
    };
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    cfg.seed = seed.or(cfg.seed);
    cfg.z = z.unwrap_or(cfg.z);
    cfg.output = output.or(cfg.output);
    if let Some(f) = format {
        cfg.format = serde_json::from_value(serde_json::Value::String(f.clone()))
            .map_err(|_| CliError::Config(format!("unknown format {f:?}")))?;
    }
    cfg.bonferroni |= bonferroni;
    cfg.fixtures = fixtures.or(cfg.fixtures);
    cfg.samples = samples.or(cfg.samples);
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Represent { input, mode, output } => finish(commands::represent(&input, mode)?, output.as_deref()),
        Command::Classify { input, class, full_subsets, output } => {
            finish(commands::classify(&input, class, full_subsets)?, output.as_deref())
        }
        Command::Simulate { model, functional, q, n, seed, z, csv, output } => {
            let args = SimulateArgs { model: &model, functional, q: &q, n, seed, z, csv: csv.as_deref() };
            finish(commands::simulate(&args)?, output.as_deref())
        }
        Command::Lfv { phi, window, delta, nmax, budget, output } => {
            let delta = choquet_cli::models::rational(&delta)?;
            let opts = LfvOptions { delta, n_max: nmax, cover_budget: budget };
            finish(commands::lfv(&LfvArgs { phi: &phi, window: &window, opts })?, output.as_deref())
        }
        Command::Suite(flags) => {
            let cfg = suite_config(flags)?;
            let (rep, times) = run_suite_timed(&cfg)?;
            let doc = match cfg.format {
                Format::Json => to_json(&rep),
                Format::Csv => to_csv(&rep),
            };
            emit(&doc, cfg.output.as_deref())?;
            let mut lines = summary_lines(&rep);
            for (name, secs) in &times {
                lines.push(format!("time {name} {secs:.3}s"));
            }
            if let Some(out) = &cfg.output {
                write_sidecar_log(out, &lines)?;
            }
            for l in summary_lines(&rep) {
                eprintln!("{l}");
            }
            for s in &rep.suites {
                for c in s.failures() {
                    eprintln!("failed {}::{} got {}", s.suite, c.name, c.got);
                }
            }
            Ok(if rep.pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
