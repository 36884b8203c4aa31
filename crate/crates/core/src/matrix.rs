//! Asset and dollar transfer matrices for a set of orders.
//!
//! Rows are orders, columns are vaults (one per asset). Sign convention:
//! `+q` means the vault receives `q` of its asset from the trader, `-q`
//! means the vault pays `q` out. An order contributes `+give_qty` in its
//! give column and `-want_qty` in its want column.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::model::{capacity_usd, AssetId, PriceTable, SwapOrder};

/// Asset-denominated flows `M`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferMatrix {
    pub assets: Vec<AssetId>,
    pub rows: Vec<Vec<Decimal>>,
    pub row_order_ids: Vec<String>,
    /// Some entry was rounded to 18 digits.
    pub rounded: bool,
}

/// Dollar-denominated flows `V = M·P`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DollarMatrix {
    pub assets: Vec<AssetId>,
    pub rows: Vec<Vec<Decimal>>,
    pub row_order_ids: Vec<String>,
    pub rounded: bool,
}

/// Column sums `N = 1ᵀV`: net USD flow per vault.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImbalanceVector {
    pub assets: Vec<AssetId>,
    pub values: Vec<Decimal>,
    pub rounded: bool,
}

fn column_sums(width: usize, rows: &[Vec<Decimal>]) -> Result<Vec<Decimal>> {
    let mut sums = vec![Decimal::ZERO; width];
    for row in rows {
        for (s, v) in sums.iter_mut().zip(row) {
            *s = s.checked_add(*v)?;
        }
    }
    Ok(sums)
}

impl TransferMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.assets.len())
    }

    /// `1ᵀM`, reported as a diagnostic; quantities of different assets are
    /// not comparable so this is not a conservation test.
    pub fn column_sums(&self) -> Result<Vec<Decimal>> {
        column_sums(self.assets.len(), &self.rows)
    }

    pub fn column(&self, asset: &AssetId) -> Option<usize> {
        self.assets.iter().position(|a| a == asset)
    }
}

impl DollarMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.assets.len())
    }

    /// Per-order net USD (`want value − give value` with the sign flipped by
    /// the vault convention).
    pub fn row_sums(&self) -> Result<Vec<Decimal>> {
        self.rows
            .iter()
            .map(|r| r.iter().try_fold(Decimal::ZERO, |acc, v| acc.checked_add(*v)))
            .collect()
    }

    pub fn column(&self, asset: &AssetId) -> Option<usize> {
        self.assets.iter().position(|a| a == asset)
    }

    /// Append a row given as a per-column USD flow over the same columns.
    pub fn push_row(&mut self, order_id: impl Into<String>, row: Vec<Decimal>) -> Result<()> {
        if row.len() != self.assets.len() {
            return Err(Error::LengthMismatch {
                expected: self.assets.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        self.row_order_ids.push(order_id.into());
        Ok(())
    }
}

impl ImbalanceVector {
    /// Every component is zero, or within `tolerance` when rounding occurred.
    pub fn is_closed(&self, tolerance: Decimal) -> bool {
        let tol = if self.rounded { tolerance } else { Decimal::ZERO };
        self.values.iter().all(|v| v.abs() <= tol)
    }

    /// `-N` as a dollar row.
    pub fn negated(&self) -> Result<Vec<Decimal>> {
        self.values.iter().map(|v| v.checked_neg()).collect()
    }
}

/// Vault columns in order of first appearance along the legs.
pub fn column_order(orders: &[SwapOrder]) -> Vec<AssetId> {
    let mut assets: Vec<AssetId> = Vec::new();
    for o in orders {
        for a in [o.give_asset(), o.want_asset()] {
            if !assets.contains(a) {
                assets.push(a.clone());
            }
        }
    }
    assets
}

pub fn build_transfer_matrix(orders: &[SwapOrder]) -> TransferMatrix {
    let assets = column_order(orders);
    build_transfer_matrix_over(orders, assets)
}

/// Build `M` over a given column layout; assets missing from it are appended.
pub fn build_transfer_matrix_over(orders: &[SwapOrder], mut assets: Vec<AssetId>) -> TransferMatrix {
    for a in column_order(orders) {
        if !assets.contains(&a) {
            assets.push(a);
        }
    }
    let mut rows = Vec::with_capacity(orders.len());
    let mut ids = Vec::with_capacity(orders.len());
    for o in orders {
        let mut row = vec![Decimal::ZERO; assets.len()];
        for (j, a) in assets.iter().enumerate() {
            if a == o.give_asset() {
                row[j] = o.give_qty();
            } else if a == o.want_asset() {
                // want_qty > 0 so negation cannot overflow
                row[j] = Decimal::from_raw(-o.want_qty().raw());
            }
        }
        rows.push(row);
        ids.push(String::from(o.id()));
    }
    TransferMatrix {
        assets,
        rows,
        row_order_ids: ids,
        rounded: orders.iter().any(|o| o.is_rounded()),
    }
}

pub fn to_dollars(m: &TransferMatrix, table: &PriceTable) -> Result<DollarMatrix> {
    let prices = m
        .assets
        .iter()
        .map(|a| table.price(a))
        .collect::<Result<Vec<_>>>()?;
    let mut rounded = m.rounded;
    let mut rows = Vec::with_capacity(m.rows.len());
    for row in &m.rows {
        let mut out = Vec::with_capacity(row.len());
        for (q, p) in row.iter().zip(&prices) {
            let v = q.mul(*p)?;
            rounded |= !v.exact;
            out.push(v.value);
        }
        rows.push(out);
    }
    Ok(DollarMatrix {
        assets: m.assets.clone(),
        rows,
        row_order_ids: m.row_order_ids.clone(),
        rounded,
    })
}

pub fn imbalance(v: &DollarMatrix) -> Result<ImbalanceVector> {
    Ok(ImbalanceVector {
        assets: v.assets.clone(),
        values: column_sums(v.assets.len(), &v.rows)?,
        rounded: v.rounded,
    })
}

/// `M' = V'·P⁻¹`, dividing each column by its price.
pub fn recover_orders(v: &DollarMatrix, table: &PriceTable) -> Result<TransferMatrix> {
    let prices = v
        .assets
        .iter()
        .map(|a| table.price(a))
        .collect::<Result<Vec<_>>>()?;
    let mut rounded = v.rounded;
    let mut rows = Vec::with_capacity(v.rows.len());
    for row in &v.rows {
        let mut out = Vec::with_capacity(row.len());
        for (usd, p) in row.iter().zip(&prices) {
            let q = usd.div(*p)?;
            rounded |= !q.exact;
            out.push(q.value);
        }
        rows.push(out);
    }
    Ok(TransferMatrix {
        assets: v.assets.clone(),
        rows,
        row_order_ids: v.row_order_ids.clone(),
        rounded,
    })
}

/// Smallest USD capacity across the legs and the first leg attaining it.
pub fn min_dollar_leg(orders: &[SwapOrder], table: &PriceTable) -> Result<(Decimal, usize)> {
    let mut best: Option<(Decimal, usize)> = None;
    for (j, o) in orders.iter().enumerate() {
        let usd = capacity_usd(o, table)?;
        if best.is_none_or(|(b, _)| usd < b) {
            best = Some((usd, j));
        }
    }
    best.ok_or(Error::EmptyCycle)
}

/// A leg resized to a common USD notional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFill {
    pub order: SwapOrder,
    /// Share of the original give-side value that is filled.
    pub fill_fraction: Decimal,
}

/// Resize every leg so its give and want sides are both worth `target_usd`
/// at oracle prices. Quantities are `target_usd / price`, rounded half-even.
pub fn scale_cycle(
    orders: &[SwapOrder],
    target_usd: Decimal,
    table: &PriceTable,
) -> Result<Vec<PartialFill>> {
    if !target_usd.is_positive() {
        return Err(Error::NonPositiveTarget);
    }
    let mut out = Vec::with_capacity(orders.len());
    for (leg, o) in orders.iter().enumerate() {
        let capacity = capacity_usd(o, table)?;
        if target_usd > capacity {
            return Err(Error::TargetExceedsCapacity {
                leg,
                target: target_usd,
                capacity,
            });
        }
        let give = target_usd.div(table.price(o.give_asset())?)?;
        let want = target_usd.div(table.price(o.want_asset())?)?;
        let fraction = target_usd.div(capacity)?;
        let mut scaled = SwapOrder::new(
            o.id(),
            o.give_asset().clone(),
            give.value,
            o.want_asset().clone(),
            want.value,
        )?
        .with_min_rate(o.min_rate())?
        .at(o.timestamp())
        .with_rounding(!give.exact || !want.exact);
        if o.is_synthetic() {
            scaled = scaled.synthetic();
        }
        out.push(PartialFill {
            order: scaled,
            fill_fraction: fraction.value,
        });
    }
    Ok(out)
}
