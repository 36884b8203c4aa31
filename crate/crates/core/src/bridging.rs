//! Synthetic bridging orders that close an open chain.
//!
//! For an open chain with dollar matrix `V` and imbalance `N = 1ᵀV`, the
//! bridging order carries the dollar flow `-N`: it wants the asset whose
//! vault is short and gives the asset whose vault holds the surplus.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cycle::{open_cycle_error, CowCycle, CycleKind, CycleLeg};
use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::feasibility::{check_cycle_with, FeasibilityMode};
use crate::matrix::{
    build_transfer_matrix, imbalance, min_dollar_leg, scale_cycle, to_dollars, ImbalanceVector,
};
use crate::model::{AssetId, PriceTable, SwapOrder};
use crate::USD_TOLERANCE;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgingOrder {
    /// Always flagged synthetic.
    pub order: SwapOrder,
    /// The imbalance this order negates.
    pub provenance: ImbalanceVector,
    pub notional_usd: Decimal,
    /// Account that executes the bridge (an LP or auxiliary actor).
    pub executor: Option<String>,
}

impl BridgingOrder {
    pub fn with_executor(mut self, executor: impl Into<String>) -> Self {
        self.executor = Some(executor.into());
        self
    }
}

pub fn bridge_id(give: &AssetId, want: &AssetId) -> String {
    format!("bridge:{give}->{want}")
}

pub fn synthesize_bridge(n: &ImbalanceVector, table: &PriceTable) -> Result<BridgingOrder> {
    if n.values.len() != n.assets.len() {
        return Err(Error::LengthMismatch {
            expected: n.assets.len(),
            found: n.values.len(),
        });
    }
    let tol = if n.rounded { USD_TOLERANCE } else { Decimal::ZERO };
    let significant: Vec<usize> = (0..n.values.len())
        .filter(|&j| n.values[j].abs() > tol)
        .collect();
    if significant.is_empty() {
        return Err(Error::NoBridgeNeeded);
    }
    let surplus = significant.iter().copied().find(|&j| n.values[j].is_positive());
    let deficit = significant.iter().copied().find(|&j| n.values[j].is_negative());
    let (Some(sj), Some(dj)) = (surplus, deficit) else {
        return Err(Error::UnclosableImbalance(significant.len()));
    };
    if significant.len() != 2 {
        return Err(Error::UnclosableImbalance(significant.len()));
    }
    let (inflow, outflow) = (n.values[sj], n.values[dj]);
    if inflow.checked_add(outflow)?.abs() > tol {
        return Err(Error::NonCancellingImbalance {
            surplus: inflow,
            deficit: outflow,
        });
    }

    // -N: the vault that netted an inflow pays out, the other receives.
    let want_asset = &n.assets[sj];
    let give_asset = &n.assets[dj];
    let want = inflow.div(table.price(want_asset)?)?;
    let give = outflow.checked_neg()?.div(table.price(give_asset)?)?;
    let order = SwapOrder::new(
        bridge_id(give_asset, want_asset),
        give_asset.clone(),
        give.value,
        want_asset.clone(),
        want.value,
    )?
    .synthetic()
    .with_rounding(n.rounded || !give.exact || !want.exact);
    Ok(BridgingOrder {
        order,
        provenance: n.clone(),
        notional_usd: inflow,
        executor: None,
    })
}

fn validate_chain(chain: &[SwapOrder]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::EmptyCycle);
    }
    for j in 0..chain.len() {
        let give = chain[j].give_asset();
        if chain[..j].iter().any(|o| o.give_asset() == give) {
            return Err(Error::NotAChain { leg: j });
        }
        if j + 1 < chain.len() && chain[j].want_asset() != chain[j + 1].give_asset() {
            return Err(Error::NotAChain { leg: j });
        }
    }
    let last = chain[chain.len() - 1].want_asset();
    if chain[1..].iter().any(|o| o.give_asset() == last) {
        return Err(Error::NotAChain {
            leg: chain.len() - 1,
        });
    }
    Ok(())
}

/// Close `chain` at its minimum dollar leg.
pub fn close_chain(chain: &[SwapOrder], table: &PriceTable) -> Result<(CowCycle, BridgingOrder)> {
    let (target, _) = min_dollar_leg(chain, table)?;
    close_chain_at(chain, None, target, table, FeasibilityMode::default())
}

/// Scale `chain` to `leg_usd` per leg and append the bridging order.
pub fn close_chain_at(
    chain: &[SwapOrder],
    batch_indices: Option<&[usize]>,
    leg_usd: Decimal,
    table: &PriceTable,
    mode: FeasibilityMode,
) -> Result<(CowCycle, BridgingOrder)> {
    validate_chain(chain)?;
    if let Some(ix) = batch_indices {
        if ix.len() != chain.len() {
            return Err(Error::LengthMismatch {
                expected: chain.len(),
                found: ix.len(),
            });
        }
    }
    let fills = scale_cycle(chain, leg_usd, table)?;
    let scaled: Vec<SwapOrder> = fills.iter().map(|f| f.order.clone()).collect();
    let mut v = to_dollars(&build_transfer_matrix(&scaled), table)?;
    let n = imbalance(&v)?;
    let mut bridge = synthesize_bridge(&n, table)?;

    // The bridge must hand back exactly what the chain's end vaults moved, so
    // take its quantities from the scaled endpoint legs and check they agree
    // with the route through -N.
    let first = &scaled[0];
    let last = &scaled[scaled.len() - 1];
    let tol = if n.rounded { USD_TOLERANCE } else { Decimal::ZERO };
    let gap = |a: Decimal, b: Decimal, asset: &AssetId| -> Result<bool> {
        let usd = a.checked_sub(b)?.abs().mul(table.price(asset)?)?.value;
        Ok(usd <= tol)
    };
    if !gap(bridge.order.want_qty(), first.give_qty(), first.give_asset())?
        || !gap(bridge.order.give_qty(), last.want_qty(), last.want_asset())?
    {
        return Err(Error::NonCancellingImbalance {
            surplus: bridge.notional_usd,
            deficit: leg_usd,
        });
    }
    let bridge_order = SwapOrder::new(
        bridge.order.id(),
        last.want_asset().clone(),
        last.want_qty(),
        first.give_asset().clone(),
        first.give_qty(),
    )?
    .synthetic()
    .with_rounding(bridge.order.is_rounded())
    .at(chain.iter().map(|o| o.timestamp()).max().unwrap_or(0));
    bridge.order = bridge_order;
    bridge.notional_usd = leg_usd;

    v.push_row(bridge.order.id(), n.negated()?)?;
    let closed = imbalance(&v)?;
    if !closed.values.iter().all(|x| x.is_zero()) {
        return Err(open_cycle_error(&closed));
    }

    let mut originals: Vec<SwapOrder> = chain.to_vec();
    originals.push(bridge.order.clone());
    let mut quantities: Vec<_> = scaled.iter().map(|o| o.give_qty()).collect();
    quantities.push(bridge.order.give_qty());
    let rounded = scaled.iter().any(|o| o.is_rounded()) || bridge.order.is_rounded();
    let verdict = check_cycle_with(&originals, &quantities, rounded, table, mode)?;

    let mut legs: Vec<CycleLeg> = fills
        .into_iter()
        .enumerate()
        .map(|(j, f)| CycleLeg {
            order: f.order,
            batch_index: batch_indices.map(|ix| ix[j]),
            fill_fraction: f.fill_fraction,
        })
        .collect();
    legs.push(CycleLeg {
        order: bridge.order.clone(),
        batch_index: None,
        fill_fraction: Decimal::ONE,
    });
    let cycle = CowCycle {
        kind: CycleKind::Bridged,
        legs,
        leg_usd,
        verdict,
        dollar_matrix: v,
    };
    Ok((cycle, bridge))
}
