use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qrnn::check::run_all;
use qrnn::config::{resolve, Overrides};
use qrnn::error::exit;
use qrnn::experiment::{run_bench, run_eval, run_train};
use qrnn::Error;

/// Quantum ridgelet neural network: training, benchmarking and self-checks.
#[derive(Parser)]
#[command(name = "qrnn", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for initialization and batch shuffling (overrides `train.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of epochs (overrides `train.epochs`).
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Directory holding `<TICKER>.csv` files (overrides `data.fixture_dir`).
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    /// Comma-separated tickers (overrides `data.tickers`).
    #[arg(long, global = true, value_delimiter = ',')]
    tickers: Option<Vec<String>>,
    /// Estimate `<Z>` from this many shots at evaluation time.
    #[arg(long, global = true)]
    shots: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Train one hybrid model on a price file.
    Train {
        #[arg(long)]
        data: PathBuf,
    },
    /// Train and score both models on every configured ticker.
    Bench,
    /// Run the oracle equivalence suite.
    Check,
    /// Score a saved model on a price file.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
}

fn overrides(g: &GlobalArgs) -> Overrides {
    Overrides {
        seed: g.seed,
        output_dir: g.out.clone(),
        epochs: g.epochs,
        fixture_dir: g.fixtures.clone(),
        tickers: g.tickers.clone(),
        shots: g.shots,
    }
}

fn fail(e: Error) -> i32 {
    eprintln!("error: {e}");
    e.class().exit_code()
}

fn train(config: Option<&Path>, o: &Overrides, data: &Path) -> Result<i32, Error> {
    let config = resolve(config, o)?;
    let outcome = run_train(&config, data, &config.output_dir)?;
    let m = outcome.metrics;
    println!("test_rmse={} test_mae={}", m.test_rmse, m.test_mae);
    println!("wrote {}", config.output_dir.display());
    Ok(exit::OK)
}

fn bench(config: Option<&Path>, o: &Overrides) -> Result<i32, Error> {
    let config = resolve(config, o)?;
    let report = run_bench(&config, &config.output_dir)?;
    print!("{}", report.metrics_csv());
    for f in &report.failures {
        eprintln!("error: {}: {}", f.ticker, f.message);
    }
    Ok(if report.failures.is_empty() {
        exit::OK
    } else if report.rows.is_empty() {
        exit::DATA
    } else {
        exit::PARTIAL
    })
}

fn check() -> i32 {
    let reports = run_all();
    for r in &reports {
        println!("{r}");
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} identities passed", reports.len());
    if passed == reports.len() {
        exit::OK
    } else {
        exit::CHECK_FAILED
    }
}

fn eval(config: Option<&Path>, o: &Overrides, checkpoint: &Path, data: &Path) -> Result<i32, Error> {
    let config = resolve(config, o)?;
    let m = run_eval(&config, checkpoint, data)?;
    println!(
        "train_rmse={} train_mae={} test_rmse={} test_mae={}",
        m.train_rmse, m.train_mae, m.test_rmse, m.test_mae
    );
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = overrides(&cli.global);
    let config = cli.global.config.as_deref();
    let code = match &cli.command {
        Command::Train { data } => train(config, &o, data).unwrap_or_else(fail),
        Command::Bench => bench(config, &o).unwrap_or_else(fail),
        Command::Check => check(),
        Command::Eval { checkpoint, data } => eval(config, &o, checkpoint, data).unwrap_or_else(fail),
    };
    ExitCode::from(code as u8)
}
