//! `SYMBOL=DECIMAL` price files.

use std::fs;
use std::path::Path;

use cow_core::{AssetId, Decimal, Error as CoreError, PriceTable};

use crate::error::IngestError;

/// Parse a price file. Blank lines and `#` comments are ignored.
pub fn parse_price_table(text: &str, source_name: &str) -> Result<PriceTable, IngestError> {
    let mut table = PriceTable::new(source_name);
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
        let (symbol, price) = line
            .split_once('=')
            .ok_or_else(|| fail(format!("expected SYMBOL=PRICE, got {line:?}")))?;
        let price: Decimal = price.trim().parse().map_err(|e: CoreError| fail(e.to_string()))?;
        AssetId::new(symbol)
            .and_then(|asset| table.insert(asset, price))
            .map_err(|e| fail(e.to_string()))?;
    }
    Ok(table)
}

pub fn load_price_table(path: &Path) -> Result<PriceTable, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    parse_price_table(&text, &path.display().to_string())
}
