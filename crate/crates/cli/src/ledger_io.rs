//! Vault balance files and posting journals.
//!
//! Balance files hold one `SYMBOL QUANTITY` pair per line; `#` starts a
//! comment. Journals are CSV with columns `order_id,symbol,signed_qty`.

use std::fs;
use std::path::Path;

use cow_core::vault::{Posting, VaultLedger};
use cow_core::{AssetId, Decimal};

use crate::error::IngestError;

pub fn parse_ledger(text: &str, source_name: &str) -> Result<VaultLedger, IngestError> {
    let mut ledger = VaultLedger::new();
    for (n, raw) in text.lines().enumerate() {
        let fail = |reason: String| IngestError::Line {
            source_name: source_name.into(),
            line: n + 1,
            reason,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(symbol), Some(qty), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(fail(format!("expected SYMBOL QUANTITY, got {line:?}")));
        };
        let qty: Decimal = qty.parse().map_err(|e: cow_core::Error| fail(e.to_string()))?;
        if qty.is_negative() {
            return Err(fail(format!("negative balance for {symbol}")));
        }
        let asset = AssetId::new(symbol).map_err(|e| fail(e.to_string()))?;
        ledger.fund(asset, qty).map_err(|e| fail(e.to_string()))?;
    }
    Ok(ledger)
}

pub fn load_ledger(path: &Path) -> Result<VaultLedger, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    parse_ledger(&text, &path.display().to_string())
}

pub fn render_ledger(ledger: &VaultLedger) -> String {
    let mut out = String::new();
    for (asset, qty) in ledger.balances() {
        out.push_str(&format!("{} {}\n", asset.symbol(), qty));
    }
    out
}

pub fn render_journal(postings: &[Posting]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["order_id", "symbol", "signed_qty"]).expect("in-memory write");
    for p in postings {
        w.write_record([p.order_id.as_str(), p.asset.symbol(), &p.qty.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn parse_journal(text: &str, source_name: &str) -> Result<Vec<Posting>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let fail = |reason: String| IngestError::Row {
            source_name: source_name.into(),
            row,
            reason,
        };
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        if rec.len() != 3 {
            return Err(fail(format!("expected 3 fields, got {}", rec.len())));
        }
        out.push(Posting {
            order_id: rec[0].to_string(),
            asset: AssetId::new(&rec[1]).map_err(|e| fail(e.to_string()))?,
            qty: rec[2].parse().map_err(|e: cow_core::Error| fail(e.to_string()))?,
        });
    }
    Ok(out)
}
