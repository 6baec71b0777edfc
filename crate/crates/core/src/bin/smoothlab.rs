use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smoothlab::cli::{self, ConfigError, ExperimentConfig, EXIT_CONFIG, EXIT_NUMERICAL};
use smoothlab::harness::CheckId;
use smoothlab::moduli::ModulusKind;
use smoothlab::numerics::{JacobiWeight, LpExponent};

/// Moduli of smoothness and approximation inequalities on [-1, 1].
#[derive(Parser)]
#[command(name = "smoothlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corpus of test functions.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Tab-separated modulus values at each t.
    Modulus {
        function: String,
        /// new, dt, weighted_dt or main_part
        #[arg(long, default_value = "dt")]
        kind: ModulusKind,
        #[arg(long)]
        k: usize,
        /// Derivative order of the new modulus.
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value = "inf")]
        p: LpExponent,
        /// Jacobi exponents `alpha,beta`.
        #[arg(long, value_parser = parse_weight, default_value = "0,0")]
        weight: JacobiWeight,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// Best approximation errors E_n.
    Bestapprox {
        function: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value = "inf")]
        p: LpExponent,
        #[arg(long, value_parser = parse_weight, default_value = "0,0")]
        weight: JacobiWeight,
    },
    /// Runs the shipped suite restricted to the given checks (or `all`).
    Verify {
        #[arg(required = true)]
        checks: Vec<String>,
        /// Also write the report files here.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Runs a configuration file, or the shipped suite by name.
    Run {
        config: String,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Print only the summary table.
        #[arg(long)]
        quiet: bool,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
}

fn parse_weight(s: &str) -> Result<JacobiWeight, String> {
    let (a, b) = s.split_once(',').ok_or("expected alpha,beta")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| e.to_string());
    JacobiWeight::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

fn config_exit(e: ConfigError) -> ExitCode {
    eprintln!("smoothlab: invalid configuration: {e}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn numerical_exit(e: smoothlab::Error) -> ExitCode {
    eprintln!("smoothlab: {e}");
    ExitCode::from(EXIT_NUMERICAL as u8)
}

fn load(config: &str) -> Result<ExperimentConfig, ConfigError> {
    let path = PathBuf::from(config);
    if config == cli::PAPER_SUITE && !path.exists() {
        return Ok(cli::paper_suite());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| ConfigError {
        line: None,
        message: format!("{config}: {e}"),
    })?;
    cli::parse_config(&text)
}

fn execute(cfg: &ExperimentConfig, out: Option<PathBuf>, details: bool) -> ExitCode {
    let workers = match cli::workers_from_env() {
        Ok(w) => w,
        Err(e) => return config_exit(e),
    };
    let summary = cli::execute(cfg, workers);
    if let Some(dir) = out {
        if let Err(e) = cli::write_outputs(cfg, &summary, &dir) {
            eprintln!("smoothlab: writing {}: {e}", dir.display());
            return ExitCode::from(EXIT_NUMERICAL as u8);
        }
    }
    if details {
        print!("{}", summary.details());
        println!();
    }
    print!("{}", summary.table_text());
    ExitCode::from(summary.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match cli.command {
        Command::Corpus { action: CorpusAction::List } => {
            print!("{}", cli::corpus_table());
            ExitCode::SUCCESS
        }
        Command::Modulus { function, kind, k, r, p, weight, t } => {
            match cli::modulus_eval(&function, kind, k, r, p, weight, &t) {
                Ok(table) => {
                    print!("{table}");
                    ExitCode::SUCCESS
                }
                Err(e) => numerical_exit(e),
            }
        }
        Command::Bestapprox { function, n, p, weight } => {
            match cli::bestapprox_table(&function, &n, p, weight) {
                Ok(table) => {
                    print!("{table}");
                    ExitCode::SUCCESS
                }
                Err(e) => numerical_exit(e),
            }
        }
        Command::Verify { checks, output_dir } => {
            let mut cfg = cli::paper_suite();
            if !checks.iter().any(|c| c == "all") {
                let mut ids = Vec::new();
                for c in &checks {
                    match c.parse::<CheckId>() {
                        Ok(id) => ids.push(id),
                        Err(e) => {
                            return config_exit(ConfigError { line: None, message: e.to_string() })
                        }
                    }
                }
                cfg.checks.retain(|e| ids.contains(&e.id));
            }
            execute(&cfg, output_dir, true)
        }
        Command::Run { config, output_dir, quiet } => match load(&config) {
            Ok(cfg) => {
                let dir = output_dir.unwrap_or_else(|| cfg.output_dir.clone());
                execute(&cfg, Some(dir), !quiet)
            }
            Err(e) => config_exit(e),
        },
    }
}
