use alloc::vec::Vec;

use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::feasibility::{check_partial_fills, FeasibilityMode, FeasibilityVerdict};
use crate::matrix::{build_transfer_matrix, imbalance, scale_cycle, to_dollars, DollarMatrix};
use crate::model::{PriceTable, SwapOrder};
use crate::USD_TOLERANCE;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CycleKind {
    /// Closed entirely by batch orders.
    #[default]
    Complete,
    /// An open chain closed by one synthetic bridging order.
    Bridged,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleLeg {
    /// The leg as filled: quantities are the scaled ones.
    pub order: SwapOrder,
    /// Position of the source order in its batch; `None` for a bridge.
    pub batch_index: Option<usize>,
    pub fill_fraction: Decimal,
}

/// A settled or settleable loop of orders, every leg worth `leg_usd`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CowCycle {
    pub kind: CycleKind,
    pub legs: Vec<CycleLeg>,
    pub leg_usd: Decimal,
    pub verdict: FeasibilityVerdict,
    /// `V'` of the filled legs.
    pub dollar_matrix: DollarMatrix,
}

impl CowCycle {
    /// Scale a closed cycle of `orders` to `leg_usd` per leg and check it.
    ///
    /// `batch_indices`, when given, must align with `orders`.
    pub fn complete(
        orders: &[SwapOrder],
        batch_indices: Option<&[usize]>,
        leg_usd: Decimal,
        table: &PriceTable,
        mode: FeasibilityMode,
    ) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::EmptyCycle);
        }
        if let Some(ix) = batch_indices {
            if ix.len() != orders.len() {
                return Err(Error::LengthMismatch {
                    expected: orders.len(),
                    found: ix.len(),
                });
            }
        }
        let fills = scale_cycle(orders, leg_usd, table)?;
        let verdict = check_partial_fills(orders, &fills, table, mode)?;
        let scaled: Vec<SwapOrder> = fills.iter().map(|f| f.order.clone()).collect();
        let v = to_dollars(&build_transfer_matrix(&scaled), table)?;
        let n = imbalance(&v)?;
        if !n.is_closed(USD_TOLERANCE) {
            return Err(open_cycle_error(&n));
        }
        let legs = fills
            .into_iter()
            .enumerate()
            .map(|(j, f)| CycleLeg {
                order: f.order,
                batch_index: batch_indices.map(|ix| ix[j]),
                fill_fraction: f.fill_fraction,
            })
            .collect();
        Ok(CowCycle {
            kind: CycleKind::Complete,
            legs,
            leg_usd,
            verdict,
            dollar_matrix: v,
        })
    }

    pub fn len(&self) -> usize {
        self.legs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }

    /// Reported cycle volume.
    ///
    /// A complete cycle reports its per-leg notional; a bridged cycle reports
    /// the sum over all legs including the bridge.
    pub fn volume_usd(&self) -> Result<Decimal> {
        match self.kind {
            CycleKind::Complete => Ok(self.leg_usd),
            CycleKind::Bridged => self.leg_usd.checked_mul_int(self.legs.len() as i64),
        }
    }

    pub fn batch_indices(&self) -> Vec<Option<usize>> {
        self.legs.iter().map(|l| l.batch_index).collect()
    }

    pub fn filled_orders(&self) -> Vec<SwapOrder> {
        self.legs.iter().map(|l| l.order.clone()).collect()
    }

    /// Rotate legs so that the first leg gives `asset`.
    pub fn rotate_to(&mut self, asset: &crate::model::AssetId) {
        if let Some(p) = self.legs.iter().position(|l| l.order.give_asset() == asset) {
            self.legs.rotate_left(p);
            self.verdict.per_leg.rotate_left(p);
            self.dollar_matrix.rows.rotate_left(p);
            self.dollar_matrix.row_order_ids.rotate_left(p);
        }
    }
}

pub(crate) fn open_cycle_error(n: &crate::matrix::ImbalanceVector) -> Error {
    let (asset, net) = n
        .assets
        .iter()
        .zip(&n.values)
        .max_by_key(|(_, x)| x.abs())
        .map(|(a, x)| (a.symbol().into(), *x))
        .unwrap_or_default();
    Error::OpenCycle { asset, net }
}
