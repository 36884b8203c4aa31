//! Per-asset LP vaults and atomic settlement of cycles against them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cycle::CowCycle;
use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::model::AssetId;

/// Order id recorded on postings that seed a vault.
pub const FUNDING_ID: &str = "funding";

/// One signed movement of a vault's asset: positive is a deposit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Posting {
    pub order_id: String,
    pub asset: AssetId,
    pub qty: Decimal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LiquidityCheck {
    /// Each single payout must fit in the vault's starting balance.
    #[default]
    Atomic,
    /// Postings run in leg order, payout before receipt; a payout may spend
    /// receipts of earlier legs but no balance may dip below zero.
    Sequential,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VaultLedger {
    balances: BTreeMap<AssetId, Decimal>,
    journal: Vec<Posting>,
    version: u64,
    unconstrained: bool,
}

impl VaultLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ledger whose vaults are never short: liquidity is not checked and
    /// balances may go negative. Used when no inventory is known.
    pub fn unconstrained() -> Self {
        VaultLedger {
            unconstrained: true,
            ..Self::default()
        }
    }

    pub fn is_unconstrained(&self) -> bool {
        self.unconstrained
    }

    /// Deposit LP inventory into the vault of `asset`.
    pub fn fund(&mut self, asset: AssetId, qty: Decimal) -> Result<()> {
        self.post(Posting {
            order_id: FUNDING_ID.into(),
            asset,
            qty,
        })?;
        self.version += 1;
        Ok(())
    }

    fn post(&mut self, p: Posting) -> Result<()> {
        let bal = self.balances.entry(p.asset.clone()).or_insert(Decimal::ZERO);
        let next = bal.checked_add(p.qty)?;
        if next.is_negative() && !self.unconstrained {
            return Err(Error::InsufficientLiquidity {
                asset: p.asset.symbol().into(),
                needed: p.qty.abs(),
                available: *bal,
            });
        }
        *bal = next;
        self.journal.push(p);
        Ok(())
    }

    /// Rebuild a ledger by folding `postings` into an empty one.
    pub fn replay<'a>(postings: impl IntoIterator<Item = &'a Posting>) -> Result<Self> {
        let mut ledger = Self::new();
        for p in postings {
            ledger.post(p.clone())?;
        }
        ledger.version = 1;
        Ok(ledger)
    }

    pub fn balance(&self, asset: &AssetId) -> Decimal {
        self.balances.get(asset).copied().unwrap_or(Decimal::ZERO)
    }

    pub fn balances(&self) -> &BTreeMap<AssetId, Decimal> {
        &self.balances
    }

    pub fn journal(&self) -> &[Posting] {
        &self.journal
    }

    pub fn version(&self) -> u64 {
        self.version
    }
}

/// The atomic unit of vault postings for one cycle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SettlementPlan {
    pub cycle: CowCycle,
    pub postings: Vec<Posting>,
    pub net_per_vault: BTreeMap<AssetId, Decimal>,
    pub snapshot_version: u64,
}

impl SettlementPlan {
    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }
}

pub fn plan_settlement(cycle: &CowCycle, ledger: &VaultLedger) -> Result<SettlementPlan> {
    plan_settlement_with(cycle, ledger, LiquidityCheck::Atomic)
}

pub fn plan_settlement_with(
    cycle: &CowCycle,
    ledger: &VaultLedger,
    check: LiquidityCheck,
) -> Result<SettlementPlan> {
    if cycle.legs.is_empty() {
        return Ok(SettlementPlan {
            cycle: cycle.clone(),
            snapshot_version: ledger.version,
            ..Default::default()
        });
    }
    if !cycle.verdict.feasible {
        return Err(Error::InfeasibleCycle);
    }

    // Per leg: the want vault pays the trader, the give vault receives.
    let mut postings = Vec::with_capacity(cycle.legs.len() * 2);
    for leg in &cycle.legs {
        let o = &leg.order;
        postings.push(Posting {
            order_id: o.id().into(),
            asset: o.want_asset().clone(),
            qty: o.want_qty().checked_neg()?,
        });
        postings.push(Posting {
            order_id: o.id().into(),
            asset: o.give_asset().clone(),
            qty: o.give_qty(),
        });
    }

    let mut net_per_vault: BTreeMap<AssetId, Decimal> = BTreeMap::new();
    for p in &postings {
        let e = net_per_vault.entry(p.asset.clone()).or_insert(Decimal::ZERO);
        *e = e.checked_add(p.qty)?;
    }
    if let Some((asset, net)) = net_per_vault.iter().find(|(_, n)| !n.is_zero()) {
        return Err(Error::OpenCycle {
            asset: asset.symbol().into(),
            net: *net,
        });
    }

    if !ledger.unconstrained {
        match check {
            LiquidityCheck::Atomic => {
                for p in postings.iter().filter(|p| p.qty.is_negative()) {
                    let available = ledger.balance(&p.asset);
                    if p.qty.abs() > available {
                        return Err(Error::InsufficientLiquidity {
                            asset: p.asset.symbol().into(),
                            needed: p.qty.abs(),
                            available,
                        });
                    }
                }
            }
            LiquidityCheck::Sequential => {
                let mut running = ledger.balances.clone();
                for p in &postings {
                    let bal = running.entry(p.asset.clone()).or_insert(Decimal::ZERO);
                    let next = bal.checked_add(p.qty)?;
                    if next.is_negative() {
                        return Err(Error::InsufficientLiquidity {
                            asset: p.asset.symbol().into(),
                            needed: p.qty.abs(),
                            available: *bal,
                        });
                    }
                    *bal = next;
                }
            }
        }
    }

    Ok(SettlementPlan {
        cycle: cycle.clone(),
        postings,
        net_per_vault,
        snapshot_version: ledger.version,
    })
}

/// Apply every posting of `plan` or none of them.
pub fn apply_settlement(plan: &SettlementPlan, ledger: &VaultLedger) -> Result<VaultLedger> {
    if plan.snapshot_version != ledger.version {
        return Err(Error::StalePlan {
            planned: plan.snapshot_version,
            current: ledger.version,
        });
    }
    if plan.postings.is_empty() {
        return Ok(ledger.clone());
    }
    let mut next = ledger.clone();
    // Net flow per vault is zero, so apply receipts before payouts; the
    // intermediate balances then never undercut the final ones.
    let (receipts, payouts): (Vec<&Posting>, Vec<&Posting>) =
        plan.postings.iter().partition(|p| !p.qty.is_negative());
    for p in receipts.into_iter().chain(payouts) {
        next.post(p.clone())?;
    }
    next.version += 1;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::FeasibilityMode;
    use crate::model::{PriceTable, SwapOrder};
    use alloc::vec;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn a(s: &str) -> AssetId {
        AssetId::new(s).unwrap()
    }

    fn worked_cycle() -> CowCycle {
        let orders = vec![
            SwapOrder::new("o1", a("ETH"), d("1"), a("USDC"), d("3000")).unwrap(),
            SwapOrder::new("o2", a("USDC"), d("3000"), a("ARB"), d("1500")).unwrap(),
            SwapOrder::new("o3", a("ARB"), d("1500"), a("ETH"), d("1")).unwrap(),
        ];
        let t = PriceTable::new("t")
            .with("ETH", "3000")
            .unwrap()
            .with("USDC", "1")
            .unwrap()
            .with("ARB", "2")
            .unwrap();
        CowCycle::complete(&orders, None, d("3000"), &t, FeasibilityMode::default()).unwrap()
    }

    fn funded(entries: &[(&str, &str)]) -> VaultLedger {
        let mut l = VaultLedger::new();
        for (s, q) in entries {
            l.fund(a(s), d(q)).unwrap();
        }
        l
    }

    #[test]
    fn worked_cycle_preserves_capital() {
        let ledger = funded(&[("USDC", "5000"), ("ETH", "2"), ("ARB", "2000")]);
        let plan = plan_settlement(&worked_cycle(), &ledger).unwrap();
        assert_eq!(plan.postings.len(), 6);
        assert!(plan.net_per_vault.values().all(|n| n.is_zero()));
        let after = apply_settlement(&plan, &ledger).unwrap();
        assert_eq!(after.balances(), ledger.balances());
        assert_eq!(after.journal().len(), ledger.journal().len() + 6);
        let replayed = VaultLedger::replay(after.journal()).unwrap();
        assert_eq!(replayed.balances(), after.balances());
    }

    #[test]
    fn empty_cycle_and_plan() {
        let ledger = funded(&[("ETH", "1")]);
        let plan = plan_settlement(&CowCycle::default(), &ledger).unwrap();
        assert!(plan.is_empty());
        assert_eq!(apply_settlement(&plan, &ledger).unwrap(), ledger);
    }

    #[test]
    fn underfunded_vault_is_refused() {
        let ledger = funded(&[("USDC", "5000"), ("ETH", "2"), ("ARB", "100")]);
        assert!(matches!(
            plan_settlement(&worked_cycle(), &ledger),
            Err(Error::InsufficientLiquidity { .. })
        ));
    }

    #[test]
    fn sequential_check_counts_earlier_receipts() {
        // the ETH paid on the last leg arrives on the first one
        let ledger = funded(&[("USDC", "3000"), ("ARB", "1500")]);
        assert!(plan_settlement(&worked_cycle(), &ledger).is_err());
        plan_settlement_with(&worked_cycle(), &ledger, LiquidityCheck::Sequential).unwrap();
        let thin = funded(&[("USDC", "2999"), ("ARB", "1500")]);
        assert!(plan_settlement_with(&worked_cycle(), &thin, LiquidityCheck::Sequential).is_err());
    }

    #[test]
    fn double_apply_is_stale() {
        let ledger = funded(&[("USDC", "5000"), ("ETH", "2"), ("ARB", "2000")]);
        let plan = plan_settlement(&worked_cycle(), &ledger).unwrap();
        let after = apply_settlement(&plan, &ledger).unwrap();
        assert!(matches!(
            apply_settlement(&plan, &after),
            Err(Error::StalePlan { .. })
        ));
    }

    #[test]
    fn infeasible_cycle_is_refused() {
        let mut c = worked_cycle();
        c.verdict.feasible = false;
        assert_eq!(
            plan_settlement(&c, &VaultLedger::new()),
            Err(Error::InfeasibleCycle)
        );
    }

    #[test]
    fn unconstrained_ledger_skips_liquidity() {
        let plan = plan_settlement(&worked_cycle(), &VaultLedger::unconstrained()).unwrap();
        let after = apply_settlement(&plan, &VaultLedger::unconstrained()).unwrap();
        assert!(after.balances().values().all(|b| b.is_zero()));
    }
}
