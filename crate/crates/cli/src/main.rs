use std::path::PathBuf;
use std::process::ExitCode;

use bergman_cli::experiments::{approximation, counterexample5};
use bergman_cli::exports::{assemble, berezin_field, carleson_report, pretty, FieldSource};
use bergman_cli::identities::run_identities;
use bergman_cli::{load_measure, write_output, BerezinOrder, HarnessError, RunConfig};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "bergman", version, about = "Toeplitz operators, Berezin transforms and Carleson diagnostics on the Bergman space")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Truncation order N.
    #[arg(long, global = true, default_value_t = 48)]
    n_trunc: usize,
    /// Toeplitz order k.
    #[arg(long, global = true, default_value_t = 1)]
    k: usize,
    /// Berezin transform order: an integer, or `quadratic` for n(j) = ceil((j+1)²/32).
    #[arg(long, global = true, default_value = "2")]
    n_berezin: BerezinOrder,
    /// Measure description (TOML).
    #[arg(long, global = true)]
    measure: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for the random identity corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Outermost grid radius.
    #[arg(long, global = true, default_value_t = 0.995)]
    grid_rmax: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run every identity suite and report residuals.
    VerifyIdentities,
    /// Assemble T_μ^(k) and write it as CSV and JSON.
    Assemble,
    /// Sample B_n of a measure or of a projection E_j on the grid.
    BerezinField {
        /// Use the projection E_j instead of --measure.
        #[arg(long, conflicts_with = "measure")]
        projection: Option<usize>,
    },
    /// Carleson diagnostics for a positive measure.
    CarlesonReport,
    /// Growth of the invariant Laplacian on projections and the symbols a_j.
    Counterexample5 {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        j_list: Vec<usize>,
    },
    /// Convergence sweeps B_n(a) → a and T_(B_n(T_μ^(k))) → T_μ^(k).
    Approximation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((summary, ok)) => {
            print!("{}", pretty(&summary));
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config(c: &Common) -> Result<RunConfig, HarnessError> {
    let cfg = RunConfig {
        n_trunc: c.n_trunc,
        k: c.k,
        n_berezin: c.n_berezin,
        out_dir: c.out.clone(),
        seed: c.seed,
        grid_rmax: c.grid_rmax,
        ..RunConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn measure(c: &Common) -> Result<bergman_core::MeasureSpec, HarnessError> {
    match &c.measure {
        Some(p) => load_measure(p),
        None => Err(HarnessError::Config("--measure <file> is required".into())),
    }
}

fn fixed_order(cfg: &RunConfig) -> Result<usize, HarnessError> {
    match cfg.n_berezin {
        BerezinOrder::Fixed(n) => Ok(n),
        BerezinOrder::Quadratic => Err(HarnessError::Config("--n-berezin must be an integer here".into())),
    }
}

fn run(cli: Cli) -> Result<(Value, bool), HarnessError> {
    let cfg = config(&cli.common)?;
    match cli.command {
        Command::VerifyIdentities => {
            let summary = run_identities(&cfg);
            let v = serde_json::to_value(&summary).expect("summary serializes");
            write_output(&cfg.out_dir, "identities.json", &pretty(&v))?;
            Ok((v, summary.all_pass))
        }
        Command::Assemble => {
            let (v, _) = assemble(&cfg, &measure(&cli.common)?)?;
            Ok((v, true))
        }
        Command::BerezinField { projection } => {
            let src = match projection {
                Some(k) => FieldSource::Projection(k),
                None => FieldSource::Measure(measure(&cli.common)?),
            };
            let (v, _) = berezin_field(&cfg, &src, fixed_order(&cfg)?)?;
            Ok((v, true))
        }
        Command::CarlesonReport => {
            let (v, _) = carleson_report(&cfg, &measure(&cli.common)?)?;
            Ok((v, true))
        }
        Command::Counterexample5 { j_list } => {
            let table = counterexample5(&cfg, cfg.k, &j_list)?;
            write_output(&cfg.out_dir, "growth.csv", &table.growth_csv())?;
            write_output(&cfg.out_dir, "symbols.csv", &table.symbols_csv())?;
            let v = serde_json::to_value(&table).expect("table serializes");
            write_output(&cfg.out_dir, "counterexample5.json", &pretty(&v))?;
            Ok((v, true))
        }
        Command::Approximation => {
            let a = approximation(&cfg)?;
            write_output(&cfg.out_dir, "approximation.csv", &a.to_csv())?;
            let v = serde_json::to_value(&a).expect("sweeps serialize");
            write_output(&cfg.out_dir, "approximation.json", &pretty(&v))?;
            Ok((v, a.all_non_increasing))
        }
    }
}
