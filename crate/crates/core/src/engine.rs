//! Batch pipeline: graph, cycle enumeration, partial fills, bridging,
//! settlement.
//!
//! Every batch order has a USD capacity (its quoted notional, else its
//! give-side value). Complete cycles are claimed first, largest per-leg
//! notional first, each at the smallest residual capacity among its legs. Operator assets are then
//! visited in order; one without a complete cycle may close a forward chain
//! of its orders with a bridging order, picking the chain with the smallest
//! notional. Every claim is planned and applied against a working vault
//! ledger before it counts.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bridging::{close_chain_at, BridgingOrder};
use crate::cycle::{CowCycle, CycleKind};
use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::feasibility::FeasibilityMode;
use crate::graph::{build_graph, enumerate_cycles, AssetGraph};
use crate::model::{capacity_usd, AssetId, PriceTable, SwapOrder};
use crate::vault::{apply_settlement, plan_settlement_with, LiquidityCheck, SettlementPlan, VaultLedger};
use crate::USD_TOLERANCE;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorSelection {
    All,
    Assets(Vec<AssetId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchConfig {
    pub batch_size: usize,
    pub expiry_window_secs: i64,
    /// Longest cycle, in orders. Bridged chains use at most `k_max - 1`.
    pub k_max: usize,
    pub feasibility_mode: FeasibilityMode,
    pub bridging_enabled: bool,
    pub allow_partial_fills: bool,
    pub operator_assets: OperatorSelection,
    /// Account recorded as executor of bridging orders.
    pub operator_account: String,
    /// Settle cycles whose realized rate product is not one.
    pub allow_rate_deviation: bool,
    pub liquidity_check: LiquidityCheck,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            batch_size: 10,
            expiry_window_secs: 240,
            k_max: 4,
            feasibility_mode: FeasibilityMode::FloorInequality,
            bridging_enabled: false,
            allow_partial_fills: true,
            operator_assets: OperatorSelection::All,
            operator_account: String::from("operator"),
            allow_rate_deviation: false,
            liquidity_check: LiquidityCheck::Atomic,
        }
    }
}

impl BatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 1 {
            return Err(Error::InvalidConfig("batch size must be at least 1"));
        }
        if self.expiry_window_secs <= 0 {
            return Err(Error::InvalidConfig("expiry window must be positive"));
        }
        if self.k_max < 2 {
            return Err(Error::InvalidConfig("k_max must be at least 2"));
        }
        Ok(())
    }
}

/// Orders matched together; `positions[i]` is the index of `orders[i]` in
/// the input list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Batch {
    pub positions: Vec<usize>,
    pub orders: Vec<SwapOrder>,
}

/// Greedy chunking in time order. A batch closes at `batch_size` orders or
/// when the next order is more than `expiry_window_secs` younger than the
/// batch's oldest. Orders inside a batch keep their input order.
pub fn form_batches(orders: &[SwapOrder], config: &BatchConfig) -> Result<Vec<Batch>> {
    config.validate()?;
    let mut by_time: Vec<usize> = (0..orders.len()).collect();
    by_time.sort_by_key(|&i| (orders[i].timestamp(), i));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for i in by_time {
        if let Some(&oldest) = current.first() {
            let age = orders[i].timestamp() - orders[oldest].timestamp();
            if current.len() >= config.batch_size || age > config.expiry_window_secs {
                groups.push(core::mem::take(&mut current));
            }
        }
        current.push(i);
    }
    if !current.is_empty() {
        groups.push(current);
    }
    Ok(groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            Batch {
                orders: g.iter().map(|&i| orders[i].clone()).collect(),
                positions: g,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorStatus {
    FullyFeasible,
    CompletedViaBridging,
    NoCowCycle,
    IsolatedAsset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorOutcome {
    pub asset: AssetId,
    pub status: OperatorStatus,
    /// Indices into [`BatchReport::cycles`].
    pub cycles: Vec<usize>,
    /// Outgoing batch orders of the asset.
    pub out_degree: usize,
    /// Longest forward chain explored for bridging, as batch indices.
    pub longest_chain: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub kind: CycleKind,
    /// Batch indices of the batch legs in canonical rotation (bridge omitted).
    pub order_indices: Vec<usize>,
    /// Operator asset that opened a bridged chain.
    pub operator: Option<AssetId>,
    /// The filled cycle, when it could be sized at all.
    pub cycle: Option<CowCycle>,
    pub bridge: Option<BridgingOrder>,
    /// Settled in this batch.
    pub selected: bool,
    pub plan: Option<SettlementPlan>,
    pub rejection: Option<Error>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchSummary {
    pub complete_cycles: usize,
    pub bridged_cycles: usize,
    pub bridging_orders: usize,
    pub total_volume_usd: Decimal,
    pub matched_orders: usize,
    pub unmatched_orders: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchReport {
    pub operators: Vec<OperatorOutcome>,
    /// Complete-cycle discoveries in claim order, then bridged cycles in
    /// operator order.
    pub cycles: Vec<CycleRecord>,
    /// Give-side USD filled per batch order.
    pub filled_usd: Vec<Decimal>,
    /// Give-side USD value per batch order.
    pub capacity_usd: Vec<Decimal>,
    /// Batch indices of orders with no fill.
    pub unmatched: Vec<usize>,
    /// Ledger after every selected settlement.
    pub ledger: VaultLedger,
    pub summary: BatchSummary,
}

impl BatchReport {
    pub fn selected(&self) -> impl Iterator<Item = &CycleRecord> {
        self.cycles.iter().filter(|c| c.selected)
    }

    pub fn bridges(&self) -> impl Iterator<Item = &BridgingOrder> {
        self.selected().filter_map(|c| c.bridge.as_ref())
    }
}

struct Matcher<'a> {
    orders: &'a [SwapOrder],
    config: &'a BatchConfig,
    table: &'a PriceTable,
    capacity: Vec<Decimal>,
    residual: Vec<Decimal>,
    ledger: VaultLedger,
}

impl<'a> Matcher<'a> {
    fn target(&self, indices: &[usize]) -> Option<Decimal> {
        let target = indices.iter().map(|&i| self.residual[i]).min()?;
        if !target.is_positive() {
            return None;
        }
        if !self.config.allow_partial_fills
            && indices
                .iter()
                .any(|&i| self.residual[i] != self.capacity[i] || self.capacity[i] != target)
        {
            return None;
        }
        Some(target)
    }

    /// Plan, apply and consume capacity, or say why not.
    fn settle(&mut self, cycle: &CowCycle, indices: &[usize]) -> Result<SettlementPlan> {
        if !cycle.verdict.feasible {
            return Err(Error::InfeasibleCycle);
        }
        let deviation = cycle.verdict.rate_product_deviation;
        if !self.config.allow_rate_deviation && deviation.abs() > USD_TOLERANCE {
            return Err(Error::RateDeviation(deviation));
        }
        let plan = plan_settlement_with(cycle, &self.ledger, self.config.liquidity_check)?;
        let ledger = apply_settlement(&plan, &self.ledger)?;
        let mut residual = self.residual.clone();
        for &i in indices {
            residual[i] = residual[i].checked_sub(cycle.leg_usd)?;
        }
        self.ledger = ledger;
        self.residual = residual;
        Ok(plan)
    }

    fn claim_complete(&mut self, graph: &AssetGraph) -> Result<Vec<CycleRecord>> {
        let mut candidates: Vec<(Decimal, Vec<usize>)> = Vec::new();
        for cand in enumerate_cycles(graph, self.config.k_max) {
            let full = cand
                .order_indices
                .iter()
                .map(|&i| self.capacity[i])
                .min()
                .unwrap_or(Decimal::ZERO);
            candidates.push((full, cand.order_indices));
        }
        // largest notional first, then canonical index order
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));

        let mut records = Vec::with_capacity(candidates.len());
        for (_, indices) in candidates {
            let mut record = CycleRecord {
                kind: CycleKind::Complete,
                order_indices: indices.clone(),
                operator: None,
                cycle: None,
                bridge: None,
                selected: false,
                plan: None,
                rejection: None,
            };
            let Some(target) = self.target(&indices) else {
                record.rejection = Some(Error::NonPositiveTarget);
                records.push(record);
                continue;
            };
            let legs: Vec<SwapOrder> = indices.iter().map(|&i| self.orders[i].clone()).collect();
            match CowCycle::complete(&legs, Some(&indices), target, self.table, self.config.feasibility_mode) {
                Ok(cycle) => {
                    match self.settle(&cycle, &indices) {
                        Ok(plan) => {
                            record.selected = true;
                            record.plan = Some(plan);
                        }
                        Err(e) => record.rejection = Some(e),
                    }
                    record.cycle = Some(cycle);
                }
                Err(e) => record.rejection = Some(e),
            }
            records.push(record);
        }
        Ok(records)
    }

    /// Forward chains of live orders from `start`: strictly new assets, no
    /// step back in time, 2..=`max_legs` orders.
    fn chains_from(&self, start: &AssetId, max_legs: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut out = Vec::new();
        let mut longest = Vec::new();
        let mut path: Vec<usize> = Vec::new();
        let mut assets: Vec<&AssetId> = vec![start];
        self.extend_chain(start, max_legs, &mut path, &mut assets, &mut out, &mut longest);
        (out, longest)
    }

    fn extend_chain<'o>(
        &'o self,
        at: &AssetId,
        max_legs: usize,
        path: &mut Vec<usize>,
        assets: &mut Vec<&'o AssetId>,
        out: &mut Vec<Vec<usize>>,
        longest: &mut Vec<usize>,
    ) {
        if path.len() > longest.len() {
            *longest = path.clone();
        }
        if path.len() >= 2 {
            out.push(path.clone());
        }
        if path.len() == max_legs {
            return;
        }
        let after = path.last().map(|&i| self.orders[i].timestamp());
        for (i, o) in self.orders.iter().enumerate() {
            if o.is_synthetic()
                || o.give_asset() != at
                || !self.residual[i].is_positive()
                || path.contains(&i)
                || assets.contains(&o.want_asset())
                || after.is_some_and(|t| o.timestamp() < t)
            {
                continue;
            }
            path.push(i);
            assets.push(o.want_asset());
            self.extend_chain(o.want_asset(), max_legs, path, assets, out, longest);
            assets.pop();
            path.pop();
        }
    }

    fn bridge_from(&mut self, operator: &AssetId) -> Result<(Option<CycleRecord>, Vec<usize>)> {
        let (chains, longest) = self.chains_from(operator, self.config.k_max - 1);
        let mut ranked: Vec<(Decimal, Vec<usize>)> = chains
            .into_iter()
            .filter_map(|c| self.target(&c).map(|t| (t, c)))
            .collect();
        ranked.sort();

        let mut last_rejection = None;
        for (target, indices) in ranked {
            let legs: Vec<SwapOrder> = indices.iter().map(|&i| self.orders[i].clone()).collect();
            let closed = close_chain_at(&legs, Some(&indices), target, self.table, self.config.feasibility_mode);
            let (cycle, bridge) = match closed {
                Ok(pair) => pair,
                Err(e) => {
                    last_rejection = Some((indices, e, None));
                    continue;
                }
            };
            let bridge = bridge.with_executor(self.config.operator_account.clone());
            match self.settle(&cycle, &indices) {
                Ok(plan) => {
                    let record = CycleRecord {
                        kind: CycleKind::Bridged,
                        order_indices: indices,
                        operator: Some(operator.clone()),
                        cycle: Some(cycle),
                        bridge: Some(bridge),
                        selected: true,
                        plan: Some(plan),
                        rejection: None,
                    };
                    return Ok((Some(record), longest));
                }
                Err(e) => last_rejection = Some((indices, e, Some((cycle, bridge)))),
            }
        }
        let record = last_rejection.map(|(indices, e, built)| {
            let (cycle, bridge) = match built {
                Some((c, b)) => (Some(c), Some(b)),
                None => (None, None),
            };
            CycleRecord {
                kind: CycleKind::Bridged,
                order_indices: indices,
                operator: Some(operator.clone()),
                cycle,
                bridge,
                selected: false,
                plan: None,
                rejection: Some(e),
            }
        });
        Ok((record, longest))
    }

    /// No live order gives or wants `asset`.
    fn is_isolated(&self, asset: &AssetId) -> bool {
        self.orders.iter().enumerate().all(|(i, o)| {
            (o.give_asset() != asset && o.want_asset() != asset) || !self.residual[i].is_positive()
        })
    }
}

/// Match one batch of orders against `table`, settling into a copy of
/// `ledger`.
pub fn run_batch(
    batch: &[SwapOrder],
    config: &BatchConfig,
    table: &PriceTable,
    ledger: &VaultLedger,
) -> Result<BatchReport> {
    config.validate()?;
    let mut capacity = Vec::with_capacity(batch.len());
    for o in batch {
        let usd = capacity_usd(o, table)?;
        capacity.push(if o.is_synthetic() { Decimal::ZERO } else { usd });
    }
    let graph = build_graph(batch);
    let mut m = Matcher {
        orders: batch,
        config,
        table,
        residual: capacity.clone(),
        capacity,
        ledger: ledger.clone(),
    };

    let mut cycles = m.claim_complete(&graph)?;

    let operator_assets: Vec<AssetId> = match &config.operator_assets {
        OperatorSelection::All => graph.nodes().to_vec(),
        OperatorSelection::Assets(list) => list.clone(),
    };
    let mut operators = Vec::with_capacity(operator_assets.len());
    for asset in operator_assets {
        let complete: Vec<usize> = cycles
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind == CycleKind::Complete && r.selected)
            .filter(|(_, r)| r.order_indices.iter().any(|&i| batch[i].give_asset() == &asset))
            .map(|(n, _)| n)
            .collect();
        let out_degree = graph.out_edges(&asset).count();
        let mut outcome = OperatorOutcome {
            asset: asset.clone(),
            status: OperatorStatus::NoCowCycle,
            cycles: Vec::new(),
            out_degree,
            longest_chain: Vec::new(),
        };
        if !complete.is_empty() {
            outcome.status = OperatorStatus::FullyFeasible;
            outcome.cycles = complete;
        } else if config.bridging_enabled && out_degree > 0 {
            let (record, longest) = m.bridge_from(&asset)?;
            outcome.longest_chain = longest;
            if let Some(record) = record {
                if record.selected {
                    outcome.status = OperatorStatus::CompletedViaBridging;
                }
                outcome.cycles.push(cycles.len());
                cycles.push(record);
            }
        }
        operators.push(outcome);
    }
    // isolation is judged on what is left once every claim is made
    for outcome in operators.iter_mut() {
        if outcome.status == OperatorStatus::NoCowCycle && m.is_isolated(&outcome.asset) {
            outcome.status = OperatorStatus::IsolatedAsset;
        }
    }

    let filled_usd: Vec<Decimal> = m
        .capacity
        .iter()
        .zip(&m.residual)
        .map(|(c, r)| c.checked_sub(*r))
        .collect::<Result<_>>()?;
    let unmatched: Vec<usize> = (0..batch.len()).filter(|&i| filled_usd[i].is_zero()).collect();

    let mut summary = BatchSummary {
        unmatched_orders: unmatched.len(),
        matched_orders: batch.len() - unmatched.len(),
        ..Default::default()
    };
    for r in cycles.iter().filter(|r| r.selected) {
        match r.kind {
            CycleKind::Complete => summary.complete_cycles += 1,
            CycleKind::Bridged => summary.bridged_cycles += 1,
        }
        if r.bridge.is_some() {
            summary.bridging_orders += 1;
        }
        if let Some(c) = &r.cycle {
            summary.total_volume_usd = summary.total_volume_usd.checked_add(c.volume_usd()?)?;
        }
    }

    Ok(BatchReport {
        operators,
        cycles,
        filled_usd,
        capacity_usd: m.capacity,
        unmatched,
        ledger: m.ledger,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn a(s: &str) -> AssetId {
        AssetId::new(s).unwrap()
    }

    fn o(id: &str, g: &str, gq: &str, w: &str, wq: &str, t: i64) -> SwapOrder {
        SwapOrder::new(id, a(g), d(gq), a(w), d(wq)).unwrap().at(t)
    }

    fn prices() -> PriceTable {
        PriceTable::new("t")
            .with("ETH", "3000")
            .unwrap()
            .with("USDC", "1")
            .unwrap()
            .with("ARB", "2")
            .unwrap()
    }

    #[test]
    fn batches_close_on_size_and_expiry() {
        let cfg = BatchConfig::default();
        let eleven: Vec<_> = (0..11).map(|i| o("x", "ETH", "1", "USDC", "1", i * 5)).collect();
        let b = form_batches(&eleven, &cfg).unwrap();
        assert_eq!(b.iter().map(|b| b.orders.len()).collect::<Vec<_>>(), [10, 1]);
        let spaced: Vec<_> = (0..3).map(|i| o("x", "ETH", "1", "USDC", "1", i * 300)).collect();
        let b = form_batches(&spaced, &cfg).unwrap();
        assert_eq!(b.len(), 3);
        assert!(form_batches(&[], &cfg).unwrap().is_empty());
        let bad = BatchConfig { k_max: 1, ..cfg };
        assert!(form_batches(&spaced, &bad).is_err());
    }

    #[test]
    fn batch_members_keep_input_order() {
        let cfg = BatchConfig::default();
        let orders = [
            o("late", "ETH", "1", "USDC", "1", 100),
            o("early", "ETH", "1", "USDC", "1", 0),
        ];
        let b = form_batches(&orders, &cfg).unwrap();
        assert_eq!(b[0].positions, [0, 1]);
    }

    #[test]
    fn empty_batch() {
        let r = run_batch(&[], &BatchConfig::default(), &prices(), &VaultLedger::unconstrained()).unwrap();
        assert!(r.cycles.is_empty() && r.operators.is_empty());
        assert_eq!(r.summary, BatchSummary::default());
    }

    #[test]
    fn worked_orders_settle_fully() {
        let batch = [
            o("o1", "ETH", "1", "USDC", "3000", 0),
            o("o2", "USDC", "3000", "ARB", "1500", 0),
            o("o3", "ARB", "1500", "ETH", "1", 0),
        ];
        let r = run_batch(&batch, &BatchConfig::default(), &prices(), &VaultLedger::unconstrained()).unwrap();
        assert_eq!(r.summary.complete_cycles, 1);
        let c = r.cycles[0].cycle.as_ref().unwrap();
        assert_eq!(c.leg_usd, d("3000"));
        assert!(r.operators.iter().all(|op| op.status == OperatorStatus::FullyFeasible));
        assert!(r.unmatched.is_empty());
    }

    #[test]
    fn unpriced_asset_aborts() {
        let batch = [o("x", "ETH", "1", "DAI", "3000", 0)];
        assert!(matches!(
            run_batch(&batch, &BatchConfig::default(), &prices(), &VaultLedger::unconstrained()),
            Err(Error::UnpricedAsset(_))
        ));
    }

    #[test]
    fn bridging_closes_chain() {
        let batch = [
            o("o1", "ETH", "1", "USDC", "3000", 0),
            o("o2", "USDC", "3000", "ARB", "1500", 1),
        ];
        let cfg = BatchConfig {
            bridging_enabled: true,
            ..Default::default()
        };
        let r = run_batch(&batch, &cfg, &prices(), &VaultLedger::unconstrained()).unwrap();
        assert_eq!(r.operators[0].status, OperatorStatus::CompletedViaBridging);
        assert_eq!(r.summary.bridging_orders, 1);
        let b = r.bridges().next().unwrap();
        assert_eq!(b.order.give_asset(), &a("ARB"));
        assert_eq!(b.executor.as_deref(), Some("operator"));
        // both orders are used up, so USDC has nothing left to trade
        assert_eq!(r.operators[1].status, OperatorStatus::IsolatedAsset);
        assert_eq!(r.operators[2].status, OperatorStatus::IsolatedAsset);

        let off = run_batch(&batch, &BatchConfig::default(), &prices(), &VaultLedger::unconstrained()).unwrap();
        assert_eq!(off.summary.bridging_orders, 0);
        assert_eq!(off.operators[0].status, OperatorStatus::NoCowCycle);
    }

    #[test]
    fn chains_do_not_step_back_in_time() {
        let batch = [
            o("o1", "ETH", "1", "USDC", "3000", 10),
            o("o2", "USDC", "3000", "ARB", "1500", 5),
        ];
        let cfg = BatchConfig {
            bridging_enabled: true,
            ..Default::default()
        };
        let r = run_batch(&batch, &cfg, &prices(), &VaultLedger::unconstrained()).unwrap();
        assert_eq!(r.summary.bridging_orders, 0);
    }

    #[test]
    fn whole_fills_only_when_partials_disabled() {
        let batch = [
            o("o1", "ETH", "1", "USDC", "3000", 0),
            o("o2", "USDC", "6000", "ETH", "2", 0),
        ];
        let cfg = BatchConfig {
            allow_partial_fills: false,
            ..Default::default()
        };
        let r = run_batch(&batch, &cfg, &prices(), &VaultLedger::unconstrained()).unwrap();
        assert_eq!(r.summary.complete_cycles, 0);
        let r = run_batch(&batch, &BatchConfig::default(), &prices(), &VaultLedger::unconstrained()).unwrap();
        assert_eq!(r.summary.complete_cycles, 1);
        assert_eq!(r.filled_usd, [d("3000"), d("3000")]);
    }

    #[test]
    fn underfunded_vault_blocks_settlement() {
        let batch = [
            o("o1", "ETH", "1", "USDC", "3000", 0),
            o("o2", "USDC", "3000", "ETH", "1", 0),
        ];
        let mut ledger = VaultLedger::new();
        ledger.fund(a("ETH"), d("0.5")).unwrap();
        ledger.fund(a("USDC"), d("10000")).unwrap();
        let r = run_batch(&batch, &BatchConfig::default(), &prices(), &ledger).unwrap();
        assert!(!r.cycles[0].selected);
        assert!(matches!(r.cycles[0].rejection, Some(Error::InsufficientLiquidity { .. })));
        assert_eq!(r.ledger.balances(), ledger.balances());
        assert_eq!(r.unmatched, [0, 1]);
    }
}
