//! Argument handling and the end-to-end run.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use cow_core::engine::{form_batches, run_batch, BatchConfig, OperatorSelection};
use cow_core::feasibility::FeasibilityMode;
use cow_core::vault::VaultLedger;
use cow_core::PriceTable;

use crate::error::IngestError;
use crate::ingest::{ingest_csv, Ingested};
use crate::ledger_io::{load_ledger, render_journal, render_ledger};
use crate::prices::load_price_table;
use crate::report::{render_structured, render_text, BatchRun, RunReport, DEFAULT_PRECISION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ENGINE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INGEST: i32 = 3;

/// Environment variable overriding the fractional digits shown for quantities.
pub const PRECISION_VAR: &str = "COW_SETTLE_PRECISION";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Feasibility {
    Strict,
    Floor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    AllAssets,
}

/// Match swap orders into coincidence-of-wants cycles and settle them
/// against per-asset vaults.
#[derive(Debug, Parser)]
#[command(name = "cow-settle", version, arg_required_else_help = true)]
pub struct Args {
    /// Swap CSV.
    #[arg(long, value_name = "CSV")]
    pub orders: PathBuf,
    /// Price file of SYMBOL=PRICE lines.
    #[arg(long, value_name = "FILE")]
    pub prices: PathBuf,
    /// Operator asset, or `all`.
    #[arg(long, value_name = "SYMBOL|all")]
    pub operator: Option<String>,
    /// Try every asset as operator.
    #[arg(long, value_enum, conflicts_with = "operator")]
    pub mode: Option<Mode>,
    /// Longest cycle, in orders.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 240)]
    pub expiry_seconds: i64,
    /// Close open chains with synthetic bridging orders.
    #[arg(long)]
    pub bridge: bool,
    /// Allow partially filled orders (default).
    #[arg(long, overrides_with = "no_partial_fills")]
    pub partial_fills: bool,
    /// Settle only cycles that fill every order completely.
    #[arg(long)]
    pub no_partial_fills: bool,
    #[arg(long, value_enum, default_value = "floor")]
    pub feasibility: Feasibility,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Fail on rows with unpriced assets instead of skipping them.
    #[arg(long)]
    pub strict_ingest: bool,
    /// Starting vault balances (SYMBOL QUANTITY lines). Without it vaults are
    /// not liquidity-checked.
    #[arg(long, value_name = "FILE")]
    pub ledger: Option<PathBuf>,
    /// Write final vault balances.
    #[arg(long, value_name = "FILE")]
    pub ledger_out: Option<PathBuf>,
    /// Write the posting journal as CSV.
    #[arg(long, value_name = "FILE")]
    pub journal_out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Ingest(IngestError),
    Engine(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Ingest(_) => EXIT_INGEST,
            Failure::Engine(_) => EXIT_ENGINE,
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        Failure::Ingest(e)
    }
}

/// Run all batches in time order, threading the ledger through them.
pub fn simulate(
    ingested: &Ingested,
    table: &PriceTable,
    config: &BatchConfig,
    ledger: VaultLedger,
) -> cow_core::Result<(Vec<BatchRun>, VaultLedger)> {
    let mut ledger = ledger;
    let mut runs = Vec::new();
    for batch in form_batches(&ingested.orders, config)? {
        let report = run_batch(&batch.orders, config, table, &ledger)?;
        ledger = report.ledger.clone();
        runs.push(BatchRun {
            rows: batch.positions.iter().map(|&p| ingested.rows[p]).collect(),
            orders: batch.orders,
            report,
        });
    }
    Ok((runs, ledger))
}

pub fn parse_precision(value: Option<&str>) -> Result<u32, String> {
    match value {
        None => Ok(DEFAULT_PRECISION),
        Some(s) => match s.trim().parse::<u32>() {
            Ok(p) if p <= 18 => Ok(p),
            _ => Err(format!("{PRECISION_VAR} must be an integer in 0..=18, got {s:?}")),
        },
    }
}

fn execute(args: &Args, precision: u32, stdout: &mut dyn Write) -> Result<(), Failure> {
    let table = load_price_table(&args.prices)?;
    let operator = match (&args.mode, args.operator.as_deref()) {
        (Some(Mode::AllAssets), _) | (None, None) => None,
        (None, Some(op)) if op.eq_ignore_ascii_case("all") => None,
        (None, Some(op)) => Some(
            table
                .resolve(op)
                .cloned()
                .ok_or_else(|| Failure::Usage(format!("operator asset {op} has no price")))?,
        ),
    };
    let config = BatchConfig {
        batch_size: args.batch_size,
        expiry_window_secs: args.expiry_seconds,
        k_max: args.depth,
        feasibility_mode: match args.feasibility {
            Feasibility::Strict => FeasibilityMode::StrictEquality,
            Feasibility::Floor => FeasibilityMode::FloorInequality,
        },
        bridging_enabled: args.bridge,
        allow_partial_fills: !args.no_partial_fills,
        operator_assets: match &operator {
            Some(a) => OperatorSelection::Assets(vec![a.clone()]),
            None => OperatorSelection::All,
        },
        ..BatchConfig::default()
    };
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let ledger = match &args.ledger {
        Some(p) => load_ledger(p)?,
        None => VaultLedger::unconstrained(),
    };
    let ingested = ingest_csv(&args.orders, &table, args.strict_ingest)?;
    let (batches, ledger) =
        simulate(&ingested, &table, &config, ledger).map_err(|e| Failure::Engine(e.to_string()))?;

    let report = RunReport {
        orders_source: args.orders.display().to_string(),
        prices_source: args.prices.display().to_string(),
        operator: operator.map(|a| a.symbol().to_string()),
        config,
        total_rows: ingested.total_rows,
        skipped: ingested.skipped,
        batches,
        ledger,
    };
    let text = match args.format {
        Format::Text => render_text(&report, precision),
        Format::Structured => render_structured(&report),
    };
    let write = |path: &PathBuf, body: &str| {
        fs::write(path, body).map_err(|e| Failure::Engine(format!("{}: {e}", path.display())))
    };
    match &args.report {
        Some(p) => write(p, &text)?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Engine(e.to_string()))?,
    }
    if let Some(p) = &args.ledger_out {
        write(p, &render_ledger(&report.ledger))?;
    }
    if let Some(p) = &args.journal_out {
        write(p, &render_journal(report.ledger.journal()))?;
    }
    Ok(())
}

/// Parse `args` (program name first) and run. Returns the exit code.
pub fn run<I, T>(args: I, precision_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
                return EXIT_OK;
            }
            let _ = stderr.write_all(rendered.as_bytes());
            return EXIT_USAGE;
        }
    };
    let result = parse_precision(precision_env)
        .map_err(Failure::Usage)
        .and_then(|p| execute(&args, p, stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) => format!("usage error: {m}"),
                Failure::Ingest(e) => format!("ingest error: {e}"),
                Failure::Engine(m) => format!("engine error: {m}"),
            };
            let _ = writeln!(stderr, "cow-settle: {msg}");
            f.code()
        }
    }
}
