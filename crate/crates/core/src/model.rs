//! Assets, swap orders and the oracle price table.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::decimal::Decimal;
use crate::error::{Error, Result};

/// Ticker symbol identifying an asset and its vault.
///
/// Identity is case-insensitive (`eth` and `ETH` are the same asset); the
/// spelling given at construction is kept for display.
#[derive(Clone)]
pub struct AssetId {
    symbol: String,
    key: String,
}

impl AssetId {
    pub fn new(symbol: &str) -> Result<Self> {
        let symbol = symbol.trim();
        if symbol.is_empty() {
            return Err(Error::EmptySymbol);
        }
        Ok(AssetId {
            symbol: String::from(symbol),
            key: symbol.to_ascii_uppercase(),
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    /// Upper-cased identity key.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for AssetId {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for AssetId {}

impl PartialOrd for AssetId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AssetId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl Hash for AssetId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl fmt::Display for AssetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.symbol)
    }
}

impl fmt::Debug for AssetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)
    }
}

/// One trader intent: give `give_qty` of `give_asset` for `want_qty` of
/// `want_asset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapOrder {
    id: String,
    give_asset: AssetId,
    give_qty: Decimal,
    want_asset: AssetId,
    want_qty: Decimal,
    min_rate: Decimal,
    timestamp: i64,
    synthetic: bool,
    rounded: bool,
    notional_usd: Option<Decimal>,
}

impl SwapOrder {
    pub fn new(
        id: impl Into<String>,
        give_asset: AssetId,
        give_qty: Decimal,
        want_asset: AssetId,
        want_qty: Decimal,
    ) -> Result<Self> {
        let id = id.into();
        let invalid = |reason| Error::InvalidOrder {
            id: id.clone(),
            reason,
        };
        if give_asset == want_asset {
            return Err(invalid("give and want assets must differ"));
        }
        if !give_qty.is_positive() {
            return Err(invalid("give quantity must be positive"));
        }
        if !want_qty.is_positive() {
            return Err(invalid("want quantity must be positive"));
        }
        Ok(SwapOrder {
            id,
            give_asset,
            give_qty,
            want_asset,
            want_qty,
            min_rate: Decimal::ONE,
            timestamp: 0,
            synthetic: false,
            rounded: false,
            notional_usd: None,
        })
    }

    /// Minimum acceptable fraction of the quoted `want_qty`; defaults to 1.
    pub fn with_min_rate(mut self, min_rate: Decimal) -> Result<Self> {
        if !min_rate.is_positive() {
            return Err(Error::InvalidOrder {
                id: self.id,
                reason: "min rate must be positive",
            });
        }
        self.min_rate = min_rate;
        Ok(self)
    }

    pub fn at(mut self, timestamp: i64) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn synthetic(mut self) -> Self {
        self.synthetic = true;
        self
    }

    /// Marks quantities that were produced by an inexact division.
    pub fn with_rounding(mut self, rounded: bool) -> Self {
        self.rounded |= rounded;
        self
    }

    /// Exact USD size quoted by the source, when the quantities were derived
    /// from it by division.
    pub fn with_notional(mut self, usd: Decimal) -> Result<Self> {
        if !usd.is_positive() {
            return Err(Error::InvalidOrder {
                id: self.id,
                reason: "notional must be positive",
            });
        }
        self.notional_usd = Some(usd);
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn give_asset(&self) -> &AssetId {
        &self.give_asset
    }

    pub fn give_qty(&self) -> Decimal {
        self.give_qty
    }

    pub fn want_asset(&self) -> &AssetId {
        &self.want_asset
    }

    pub fn want_qty(&self) -> Decimal {
        self.want_qty
    }

    pub fn min_rate(&self) -> Decimal {
        self.min_rate
    }

    pub fn timestamp(&self) -> i64 {
        self.timestamp
    }

    pub fn is_synthetic(&self) -> bool {
        self.synthetic
    }

    pub fn is_rounded(&self) -> bool {
        self.rounded
    }

    pub fn notional_usd(&self) -> Option<Decimal> {
        self.notional_usd
    }
}

/// Oracle USD prices, one strictly positive entry per asset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PriceTable {
    entries: BTreeMap<AssetId, Decimal>,
    source_label: String,
}

impl PriceTable {
    pub fn new(source_label: impl Into<String>) -> Self {
        PriceTable {
            entries: BTreeMap::new(),
            source_label: source_label.into(),
        }
    }

    pub fn insert(&mut self, asset: AssetId, price: Decimal) -> Result<()> {
        if !price.is_positive() {
            return Err(Error::NonPositivePrice(asset.symbol));
        }
        if self.entries.contains_key(&asset) {
            return Err(Error::DuplicatePrice(asset.symbol));
        }
        self.entries.insert(asset, price);
        Ok(())
    }

    /// Builder used by tests and fixtures.
    pub fn with(mut self, symbol: &str, price: &str) -> Result<Self> {
        self.insert(AssetId::new(symbol)?, price.parse()?)?;
        Ok(self)
    }

    pub fn price(&self, asset: &AssetId) -> Result<Decimal> {
        self.entries
            .get(asset)
            .copied()
            .ok_or_else(|| Error::UnpricedAsset(asset.symbol.clone()))
    }

    /// The table's own spelling of `symbol`, if priced.
    pub fn resolve(&self, symbol: &str) -> Option<&AssetId> {
        let probe = AssetId::new(symbol).ok()?;
        self.entries.get_key_value(&probe).map(|(k, _)| k)
    }

    pub fn contains(&self, asset: &AssetId) -> bool {
        self.entries.contains_key(asset)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AssetId, Decimal)> {
        self.entries.iter().map(|(a, p)| (a, *p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }
}

/// Give- and want-side USD value of an order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UsdValue {
    pub give_usd: Decimal,
    pub want_usd: Decimal,
    /// Both products fit in 18 fractional digits.
    pub exact: bool,
}

pub fn usd_value(order: &SwapOrder, table: &PriceTable) -> Result<UsdValue> {
    let give = order.give_qty.mul(table.price(&order.give_asset)?)?;
    let want = order.want_qty.mul(table.price(&order.want_asset)?)?;
    Ok(UsdValue {
        give_usd: give.value,
        want_usd: want.value,
        exact: give.exact && want.exact,
    })
}

/// USD size available to fill: the quoted notional if known, else the
/// give-side value.
pub fn capacity_usd(order: &SwapOrder, table: &PriceTable) -> Result<Decimal> {
    match order.notional_usd {
        Some(n) => Ok(n),
        None => Ok(usd_value(order, table)?.give_usd),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> AssetId {
        AssetId::new(s).unwrap()
    }

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn asset_identity_ignores_case() {
        assert_eq!(a("eth"), a("ETH"));
        assert_eq!(a(" aArbWETH ").symbol(), "aArbWETH");
        assert_eq!(a("aArbWETH").key(), "AARBWETH");
        assert_eq!(AssetId::new("  "), Err(Error::EmptySymbol));
    }

    #[test]
    fn order_invariants() {
        let ok = SwapOrder::new("o", a("ETH"), d("1"), a("USDC"), d("3000")).unwrap();
        assert_eq!(ok.min_rate(), Decimal::ONE);
        assert!(!ok.is_synthetic());
        assert!(SwapOrder::new("o", a("ETH"), d("1"), a("eth"), d("3000")).is_err());
        assert!(SwapOrder::new("o", a("ETH"), Decimal::ZERO, a("USDC"), d("1")).is_err());
        assert!(SwapOrder::new("o", a("ETH"), d("1"), a("USDC"), d("-1")).is_err());
        assert!(ok.clone().with_min_rate(Decimal::ZERO).is_err());
    }

    #[test]
    fn price_table_rules() {
        let t = PriceTable::new("t").with("ETH", "3000").unwrap();
        assert_eq!(t.price(&a("eth")).unwrap(), d("3000"));
        assert_eq!(t.resolve("Eth").unwrap().symbol(), "ETH");
        assert!(matches!(
            t.clone().with("ETH", "1"),
            Err(Error::DuplicatePrice(_))
        ));
        assert!(matches!(
            t.clone().with("FOO", "0"),
            Err(Error::NonPositivePrice(_))
        ));
        assert!(matches!(t.price(&a("ARB")), Err(Error::UnpricedAsset(_))));
    }

    #[test]
    fn usd_values_of_worked_orders() {
        let t = PriceTable::new("t")
            .with("ETH", "3000")
            .unwrap()
            .with("USDC", "1")
            .unwrap()
            .with("ARB", "2")
            .unwrap();
        let o1 = SwapOrder::new("o1", a("ETH"), d("1"), a("USDC"), d("3000")).unwrap();
        let v = usd_value(&o1, &t).unwrap();
        assert_eq!((v.give_usd, v.want_usd), (d("3000"), d("3000")));
        let o3 = SwapOrder::new("o3", a("ARB"), d("1500"), a("ETH"), d("1")).unwrap();
        let v = usd_value(&o3, &t).unwrap();
        assert_eq!((v.give_usd, v.want_usd), (d("3000"), d("3000")));
        assert!(v.exact);
        let o = SwapOrder::new("x", a("ETH"), d("1"), a("DAI"), d("1")).unwrap();
        assert!(matches!(usd_value(&o, &t), Err(Error::UnpricedAsset(_))));
    }
}
