//! Swap CSV ingestion.
//!
//! One row per executed swap. Each becomes an order quoted at equal USD value
//! on both sides: `give_qty = amount_usd / p(src)` and
//! `want_qty = amount_usd / p(dst)`. Optional `give_qty` / `want_qty` columns
//! override the derived quantities.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use cow_core::{AssetId, Decimal, PriceTable, SwapOrder};
use serde::Deserialize;

use crate::error::IngestError;

#[derive(Clone, Debug, Deserialize)]
pub struct SwapRecord {
    pub time: String,
    #[serde(default)]
    pub blockchain: String,
    pub tx_hash: String,
    pub amount_usd: String,
    pub src_asset_symbol: String,
    pub dst_asset_symbol: String,
    #[serde(default)]
    pub sender_address: String,
    #[serde(default)]
    pub receiver: String,
    #[serde(default)]
    pub give_qty: Option<String>,
    #[serde(default)]
    pub want_qty: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkippedRow {
    /// Zero-based data row.
    pub row: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct Ingested {
    pub orders: Vec<SwapOrder>,
    /// Data row of each order.
    pub rows: Vec<usize>,
    pub skipped: Vec<SkippedRow>,
    pub total_rows: usize,
}

/// Seconds since the epoch. Accepts `YYYY-MM-DD HH:MM[:SS]`, the same with a
/// `T` separator, or RFC 3339 with an offset. Naive times are UTC.
pub fn parse_time(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp());
    }
    const FORMATS: [&str; 4] = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M"];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|t| t.and_utc().timestamp())
}

pub fn ingest_csv(path: &Path, table: &PriceTable, strict: bool) -> Result<Ingested, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    ingest_reader(file, table, strict, &path.display().to_string())
}

pub fn ingest_reader<R: Read>(
    reader: R,
    table: &PriceTable,
    strict: bool,
    source_name: &str,
) -> Result<Ingested, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::Format {
            source_name: source_name.into(),
            reason: e.to_string(),
        })?
        .clone();
    for required in ["time", "tx_hash", "amount_usd", "src_asset_symbol", "dst_asset_symbol"] {
        if !headers.iter().any(|h| h == required) {
            return Err(IngestError::Format {
                source_name: source_name.into(),
                reason: format!("missing column {required}"),
            });
        }
    }

    let mut out = Ingested::default();
    for (row, record) in rdr.deserialize::<SwapRecord>().enumerate() {
        out.total_rows += 1;
        let fail = |reason: String| IngestError::Row {
            source_name: source_name.into(),
            row,
            reason,
        };
        let record = record.map_err(|e| fail(e.to_string()))?;
        let (src, dst) = match (
            table.resolve(&record.src_asset_symbol),
            table.resolve(&record.dst_asset_symbol),
        ) {
            (Some(s), Some(d)) => (s.clone(), d.clone()),
            (s, _) => {
                let missing = if s.is_none() {
                    &record.src_asset_symbol
                } else {
                    &record.dst_asset_symbol
                };
                if missing.is_empty() {
                    return Err(fail("empty asset symbol".into()));
                }
                let reason = format!("no price for {missing}");
                if strict {
                    return Err(fail(reason));
                }
                out.skipped.push(SkippedRow { row, reason });
                continue;
            }
        };
        let order = record_to_order(&record, src, dst, table).map_err(fail)?;
        out.orders.push(order);
        out.rows.push(row);
    }
    Ok(out)
}

fn record_to_order(
    record: &SwapRecord,
    src: AssetId,
    dst: AssetId,
    table: &PriceTable,
) -> Result<SwapOrder, String> {
    let ts = parse_time(&record.time).ok_or_else(|| format!("unparseable time {:?}", record.time))?;
    let amount: Decimal = record
        .amount_usd
        .parse()
        .map_err(|e| format!("amount_usd: {e}"))?;
    if !amount.is_positive() {
        return Err(format!("amount_usd must be positive, got {amount}"));
    }
    let mut rounded = false;
    let mut qty = |column: &Option<String>, asset: &AssetId| -> Result<Decimal, String> {
        match column.as_deref().filter(|s| !s.is_empty()) {
            Some(s) => s.parse().map_err(|e| format!("{e}")),
            None => {
                let price = table.price(asset).map_err(|e| e.to_string())?;
                let q = amount.div(price).map_err(|e| e.to_string())?;
                rounded |= !q.exact;
                Ok(q.value)
            }
        }
    };
    let give_derived = record.give_qty.as_deref().is_none_or(str::is_empty);
    let give = qty(&record.give_qty, &src)?;
    let want = qty(&record.want_qty, &dst)?;
    let order = SwapOrder::new(record.tx_hash.clone(), src, give, dst, want)
        .map(|o| o.at(ts).with_rounding(rounded))
        .map_err(|e| e.to_string())?;
    if give_derived {
        order.with_notional(amount).map_err(|e| e.to_string())
    } else {
        Ok(order)
    }
}
