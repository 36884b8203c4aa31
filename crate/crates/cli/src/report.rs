//! Run reports: a human-readable trace and a structured JSON document.

use std::fmt::Write as _;

use cow_core::cycle::{CowCycle, CycleKind};
use cow_core::engine::{BatchConfig, BatchReport, CycleRecord, OperatorOutcome, OperatorStatus};
use cow_core::feasibility::FeasibilityMode;
use cow_core::vault::VaultLedger;
use cow_core::{Decimal, SwapOrder};
use serde_json::{json, Value};

use crate::ingest::SkippedRow;

/// Fractional digits shown for asset quantities unless overridden.
pub const DEFAULT_PRECISION: u32 = 7;

#[derive(Clone, Debug)]
pub struct BatchRun {
    /// Data row of each batch order.
    pub rows: Vec<usize>,
    pub orders: Vec<SwapOrder>,
    pub report: BatchReport,
}

impl BatchRun {
    fn row(&self, batch_index: usize) -> usize {
        self.rows[batch_index]
    }

    fn rows_of(&self, indices: &[usize]) -> Vec<usize> {
        indices.iter().map(|&i| self.row(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub orders_source: String,
    pub prices_source: String,
    /// `None` when every asset is tried as operator.
    pub operator: Option<String>,
    pub config: BatchConfig,
    pub total_rows: usize,
    pub skipped: Vec<SkippedRow>,
    pub batches: Vec<BatchRun>,
    pub ledger: VaultLedger,
}

impl RunReport {
    pub fn bridging_orders(&self) -> usize {
        self.batches.iter().map(|b| b.report.summary.bridging_orders).sum()
    }
}

fn status_label(s: OperatorStatus) -> &'static str {
    match s {
        OperatorStatus::FullyFeasible => "Fully feasible",
        OperatorStatus::CompletedViaBridging => "Completed via bridging",
        OperatorStatus::NoCowCycle => "No CoW cycle",
        OperatorStatus::IsolatedAsset => "Isolated asset",
    }
}

fn status_key(s: OperatorStatus) -> &'static str {
    match s {
        OperatorStatus::FullyFeasible => "fully_feasible",
        OperatorStatus::CompletedViaBridging => "completed_via_bridging",
        OperatorStatus::NoCowCycle => "no_cow_cycle",
        OperatorStatus::IsolatedAsset => "isolated_asset",
    }
}

fn mode_key(m: FeasibilityMode) -> &'static str {
    match m {
        FeasibilityMode::StrictEquality => "strict",
        FeasibilityMode::FloorInequality => "floor",
    }
}

fn usd(d: Decimal) -> String {
    d.to_fixed(2)
}

fn list(rows: &[usize]) -> String {
    let items: Vec<String> = rows.iter().map(|r| r.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn asset_path(cycle: &CowCycle, close: bool) -> String {
    let mut parts: Vec<&str> = cycle.legs.iter().map(|l| l.order.give_asset().symbol()).collect();
    if close {
        if let Some(first) = parts.first().copied() {
            parts.push(first);
        }
    } else if let Some(last) = cycle.legs.last() {
        parts.push(last.order.want_asset().symbol());
    }
    parts.join(" -> ")
}

pub fn render_text(report: &RunReport, precision: u32) -> String {
    let mut out = String::new();
    let cfg = &report.config;
    let _ = writeln!(
        out,
        "Orders: {} ({} rows, {} ingested, {} skipped)",
        report.orders_source,
        report.total_rows,
        report.total_rows - report.skipped.len(),
        report.skipped.len()
    );
    for s in &report.skipped {
        let _ = writeln!(out, "  skipped row {}: {}", s.row, s.reason);
    }
    let _ = writeln!(out, "Prices: {}", report.prices_source);
    match &report.operator {
        Some(op) => {
            let _ = writeln!(out, "Operator asset: {op}");
        }
        None => out.push_str("Mode: All operator assets\n"),
    }
    let _ = writeln!(out, "Max depth: {}", cfg.k_max);
    out.push_str(if cfg.bridging_enabled {
        "Bridging mode: Enabled (minimize bridging USD value)\n"
    } else {
        "Bridging mode: Disabled\n"
    });
    out.push_str(if cfg.allow_partial_fills {
        "Partial fills: Allowed\n"
    } else {
        "Partial fills: Disallowed\n"
    });
    let _ = writeln!(out, "Feasibility: {}", mode_key(cfg.feasibility_mode));

    for (n, batch) in report.batches.iter().enumerate() {
        let _ = writeln!(out, "\n=== Batch {}: rows {} ===", n + 1, list(&batch.rows));
        for op in &batch.report.operators {
            render_operator(&mut out, batch, op, precision);
        }
        render_summary(&mut out, batch);
    }

    if !report.ledger.is_unconstrained() {
        out.push_str("\nVault balances:\n");
        for (asset, qty) in report.ledger.balances() {
            let _ = writeln!(out, "  {} {}", asset.symbol(), qty.to_trimmed(precision));
        }
    }
    out
}

fn render_legs(out: &mut String, cycle: &CowCycle, precision: u32) {
    out.push_str("Using Oracle Price\n");
    for (j, leg) in cycle.legs.iter().enumerate() {
        let o = &leg.order;
        let _ = write!(
            out,
            "T{} : {} {} -> {} {}",
            j + 1,
            o.give_qty().to_trimmed(precision),
            o.give_asset().symbol(),
            o.want_qty().to_trimmed(precision),
            o.want_asset().symbol()
        );
        out.push_str(if o.is_synthetic() { " (bridge)\n" } else { "\n" });
    }
}

fn render_operator(out: &mut String, batch: &BatchRun, op: &OperatorOutcome, precision: u32) {
    let asset = op.asset.symbol();
    let _ = writeln!(out, "\n--- Testing operator asset: {asset} ---");
    for &c in &op.cycles {
        let record = &batch.report.cycles[c];
        let Some(cycle) = &record.cycle else {
            if let Some(e) = &record.rejection {
                let _ = writeln!(out, "Sequence {} rejected: {e}", list(&batch.rows_of(&record.order_indices)));
            }
            continue;
        };
        match record.kind {
            CycleKind::Complete => {
                let mut cycle = cycle.clone();
                cycle.rotate_to(&op.asset);
                let rows: Vec<usize> = cycle.legs.iter().filter_map(|l| l.batch_index).map(|i| batch.row(i)).collect();
                let _ = writeln!(out, "Cycle found: {}", asset_path(&cycle, true));
                let _ = writeln!(out, "Swap Indices: {}", list(&rows));
                let _ = writeln!(out, "Lowest Dollar Value: {}", usd(cycle.leg_usd));
                if let Ok(v) = cycle.volume_usd() {
                    let _ = writeln!(out, "Cycle USD Volume: {}", usd(v));
                }
                render_legs(out, &cycle, precision);
            }
            CycleKind::Bridged => {
                let chain = CowCycle {
                    legs: cycle.legs.iter().filter(|l| !l.order.is_synthetic()).cloned().collect(),
                    ..CowCycle::default()
                };
                let _ = writeln!(out, "Partial sequence found: {}", asset_path(&chain, false));
                let _ = writeln!(out, "Swap Indices: {}", list(&batch.rows_of(&record.order_indices)));
                if let Some(bridge) = &record.bridge {
                    let b = &bridge.order;
                    let _ = writeln!(out, "Missing leg: {} -> {}", b.give_asset().symbol(), b.want_asset().symbol());
                    out.push_str("Bridging order proposed:\n");
                    let _ = writeln!(
                        out,
                        "  {} -> {} (value: {} USD)",
                        b.give_asset().symbol(),
                        b.want_asset().symbol(),
                        usd(bridge.notional_usd)
                    );
                    out.push_str("Bridging index: [synthetic bridging]\n");
                }
                if let Ok(v) = cycle.volume_usd() {
                    let terms = vec![usd(cycle.leg_usd); cycle.len()].join(" + ");
                    let _ = writeln!(out, "Cycle USD Volume (with bridging): {terms} = {}", usd(v));
                }
                render_legs(out, cycle, precision);
                if let Some(e) = &record.rejection {
                    let _ = writeln!(out, "Bridging rejected: {e}");
                }
            }
        }
    }
    match op.status {
        OperatorStatus::NoCowCycle if op.cycles.is_empty() => {
            if op.longest_chain.len() == 1 {
                let o = &batch.orders[op.longest_chain[0]];
                let _ = writeln!(out, "Partial sequence found: {} -> {}", o.give_asset().symbol(), o.want_asset().symbol());
            }
            out.push_str("No forward chains found.\n");
        }
        OperatorStatus::IsolatedAsset if op.out_degree == 0 => {
            let _ = writeln!(out, "No outgoing swap from {asset} found.");
        }
        OperatorStatus::IsolatedAsset => {
            let _ = writeln!(out, "Every order touching {asset} is already filled.");
        }
        _ => {}
    }
    let _ = writeln!(out, "Status: {}", status_label(op.status));
}

fn render_summary(out: &mut String, batch: &BatchRun) {
    let r = &batch.report;
    let s = &r.summary;
    out.push_str("\nSummary:\n");
    let _ = writeln!(out, "Cycles settled: {} complete, {} bridged", s.complete_cycles, s.bridged_cycles);
    let _ = writeln!(out, "Total cycle volume: {} USD", usd(s.total_volume_usd));
    let _ = writeln!(out, "Unmatched rows: {}", list(&batch.rows_of(&r.unmatched)));
    for rec in r.cycles.iter().filter(|c| !c.selected && c.kind == CycleKind::Complete) {
        let reason = rec.rejection.as_ref().map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(out, "Not settled: {} ({reason})", list(&batch.rows_of(&rec.order_indices)));
    }
    let _ = writeln!(out, "{} bridging orders discovered:", s.bridging_orders);
    for b in r.bridges() {
        let _ = writeln!(
            out,
            "  - {} -> {} : {} USD",
            b.order.give_asset().symbol(),
            b.order.want_asset().symbol(),
            usd(b.notional_usd)
        );
    }
}

fn order_json(o: &SwapOrder) -> Value {
    json!({
        "id": o.id(),
        "give_asset": o.give_asset().symbol(),
        "give_qty": o.give_qty().to_string(),
        "want_asset": o.want_asset().symbol(),
        "want_qty": o.want_qty().to_string(),
        "synthetic": o.is_synthetic(),
    })
}

fn cycle_json(batch: &BatchRun, id: usize, rec: &CycleRecord) -> Value {
    let mut v = json!({
        "id": id,
        "kind": match rec.kind { CycleKind::Complete => "complete", CycleKind::Bridged => "bridged" },
        "rows": batch.rows_of(&rec.order_indices),
        "operator": rec.operator.as_ref().map(|a| a.symbol()),
        "selected": rec.selected,
        "rejection": rec.rejection.as_ref().map(|e| e.to_string()),
    });
    if let Some(c) = &rec.cycle {
        v["leg_usd"] = json!(c.leg_usd.to_string());
        v["volume_usd"] = json!(c.volume_usd().ok().map(|d| d.to_string()));
        v["feasible"] = json!(c.verdict.feasible);
        v["tolerance_applied"] = json!(c.verdict.tolerance_applied);
        v["rate_product_deviation"] = json!(c.verdict.rate_product_deviation.to_string());
        v["legs"] = c
            .legs
            .iter()
            .map(|l| {
                let mut leg = order_json(&l.order);
                leg["row"] = json!(l.batch_index.map(|i| batch.row(i)));
                leg["fill_fraction"] = json!(l.fill_fraction.to_string());
                leg
            })
            .collect();
        let m = &c.dollar_matrix;
        v["dollar_matrix"] = json!({
            "assets": m.assets.iter().map(|a| a.symbol()).collect::<Vec<_>>(),
            "rows": m.rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
    }
    if let Some(b) = &rec.bridge {
        v["bridge"] = json!({
            "order": order_json(&b.order),
            "notional_usd": b.notional_usd.to_string(),
            "executor": b.executor,
        });
    }
    v
}

fn batch_json(batch: &BatchRun) -> Value {
    let r = &batch.report;
    let operators: Vec<Value> = r
        .operators
        .iter()
        .map(|op| {
            json!({
                "asset": op.asset.symbol(),
                "status": status_key(op.status),
                "cycles": op.cycles,
                "out_degree": op.out_degree,
                "longest_chain": batch.rows_of(&op.longest_chain),
            })
        })
        .collect();
    let fills: Vec<Value> = (0..batch.orders.len())
        .map(|i| {
            json!({
                "row": batch.row(i),
                "order_id": batch.orders[i].id(),
                "capacity_usd": r.capacity_usd[i].to_string(),
                "filled_usd": r.filled_usd[i].to_string(),
            })
        })
        .collect();
    let s = &r.summary;
    json!({
        "rows": batch.rows,
        "operators": operators,
        "cycles": r.cycles.iter().enumerate().map(|(n, c)| cycle_json(batch, n, c)).collect::<Vec<_>>(),
        "fills": fills,
        "unmatched_rows": batch.rows_of(&r.unmatched),
        "summary": {
            "complete_cycles": s.complete_cycles,
            "bridged_cycles": s.bridged_cycles,
            "bridging_orders": s.bridging_orders,
            "total_volume_usd": s.total_volume_usd.to_string(),
            "matched_orders": s.matched_orders,
            "unmatched_orders": s.unmatched_orders,
        },
    })
}

/// JSON report. Decimals are exact strings; object keys are sorted.
pub fn render_structured(report: &RunReport) -> String {
    let cfg = &report.config;
    let ledger: serde_json::Map<String, Value> = report
        .ledger
        .balances()
        .iter()
        .map(|(a, q)| (a.symbol().to_string(), json!(q.to_string())))
        .collect();
    let doc = json!({
        "orders_source": report.orders_source,
        "prices_source": report.prices_source,
        "config": {
            "operator": report.operator,
            "depth": cfg.k_max,
            "batch_size": cfg.batch_size,
            "expiry_seconds": cfg.expiry_window_secs,
            "bridging": cfg.bridging_enabled,
            "partial_fills": cfg.allow_partial_fills,
            "feasibility": mode_key(cfg.feasibility_mode),
        },
        "ingest": {
            "total_rows": report.total_rows,
            "ingested": report.total_rows - report.skipped.len(),
            "skipped": report.skipped.iter().map(|s| json!({"row": s.row, "reason": s.reason})).collect::<Vec<_>>(),
        },
        "batches": report.batches.iter().map(batch_json).collect::<Vec<_>>(),
        "bridging_orders": report.bridging_orders(),
        "ledger": {
            "unconstrained": report.ledger.is_unconstrained(),
            "version": report.ledger.version(),
            "balances": ledger,
        },
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}
