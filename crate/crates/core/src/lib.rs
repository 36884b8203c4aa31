//! Coincidence-of-Wants matching over exact decimals.
//!
//! Swap orders form a directed asset multigraph. Closed loops in that graph
//! ([`graph::enumerate_cycles`]) can be settled against per-asset LP vaults
//! without external liquidity once every leg is scaled to the cheapest leg's
//! dollar value. Open chains are closed with a synthetic bridging order whose
//! dollar flow cancels the chain's imbalance. [`engine::run_batch`] ties the
//! steps together for one batch of orders.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bridging;
pub mod cycle;
pub mod decimal;
pub mod engine;
pub mod error;
pub mod feasibility;
pub mod graph;
pub mod matrix;
pub mod model;
pub mod vault;

pub use decimal::{Decimal, Rounded};
pub use error::{Error, Result};
pub use model::{capacity_usd, usd_value, AssetId, PriceTable, SwapOrder, UsdValue};

pub use num_rational::BigRational;

/// Tolerance in USD for conservation checks on values that went through an
/// inexact division: 10⁻⁹.
pub const USD_TOLERANCE: Decimal = Decimal::from_raw(1_000_000_000);
