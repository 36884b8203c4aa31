use alloc::string::String;

use crate::decimal::Decimal;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid decimal literal {0:?}")]
    ParseDecimal(String),
    #[error("decimal overflow")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,

    #[error("empty asset symbol")]
    EmptySymbol,
    #[error("invalid order {id}: {reason}")]
    InvalidOrder { id: String, reason: &'static str },
    #[error("price for {0} must be strictly positive")]
    NonPositivePrice(String),
    #[error("duplicate price entry for {0}")]
    DuplicatePrice(String),
    #[error("no oracle price for asset {0}")]
    UnpricedAsset(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cycle has no legs")]
    EmptyCycle,
    #[error("orders do not form a closed cycle at leg {leg}")]
    NotACycle { leg: usize },
    #[error("orders do not form a simple chain at leg {leg}")]
    NotAChain { leg: usize },
    #[error("fill target must be strictly positive")]
    NonPositiveTarget,
    #[error("fill target {target} exceeds leg {leg} capacity {capacity}")]
    TargetExceedsCapacity {
        leg: usize,
        target: Decimal,
        capacity: Decimal,
    },

    #[error("imbalance vector is zero; no bridge needed")]
    NoBridgeNeeded,
    #[error("imbalance has {0} non-zero components; one bridging order cannot close it")]
    UnclosableImbalance(usize),
    #[error("imbalance components {surplus} and {deficit} do not cancel")]
    NonCancellingImbalance { surplus: Decimal, deficit: Decimal },

    #[error("cycle is not value-feasible")]
    InfeasibleCycle,
    #[error("cycle leaves vault {asset} with net flow {net}")]
    OpenCycle { asset: String, net: Decimal },
    #[error("rate product deviates from one by {0}")]
    RateDeviation(Decimal),
    #[error("vault {asset} holds {available}, cannot pay out {needed}")]
    InsufficientLiquidity {
        asset: String,
        needed: Decimal,
        available: Decimal,
    },
    #[error("settlement plan was computed against ledger version {planned}, ledger is at {current}")]
    StalePlan { planned: u64, current: u64 },

    #[error("invalid batch configuration: {0}")]
    InvalidConfig(&'static str),
}
