//! Value-feasibility of a cycle under chosen fill quantities.
//!
//! With `q_j` the quantity of the give asset supplied on leg `j`, the realized
//! rate of leg `j` is `q_{j+1} / q_j` (cyclic). All comparisons are made on
//! exact rationals.

use alloc::vec::Vec;

use num_rational::BigRational;

use crate::decimal::{rational_one, rational_zero, within, Decimal};
use crate::error::{Error, Result};
use crate::matrix::PartialFill;
use crate::model::{PriceTable, SwapOrder};
use crate::USD_TOLERANCE;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FeasibilityMode {
    /// Every leg receives exactly the oracle value it contributes, and every
    /// order's own quote is value-neutral.
    StrictEquality,
    /// Every leg's realized rate meets the order's floor
    /// `min_rate · want_qty / give_qty`.
    #[default]
    FloorInequality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegCheck {
    pub realized_rate: BigRational,
    pub required_rate: BigRational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub mode: FeasibilityMode,
    pub per_leg: Vec<LegCheck>,
    /// `Π realized − 1`, rounded to 18 digits.
    pub rate_product_deviation: Decimal,
    /// USD shortfalls up to [`USD_TOLERANCE`] were accepted because some
    /// quantity was rounded.
    pub tolerance_applied: bool,
}

impl Default for FeasibilityVerdict {
    /// Verdict of the empty cycle: vacuously feasible.
    fn default() -> Self {
        FeasibilityVerdict {
            feasible: true,
            mode: FeasibilityMode::default(),
            per_leg: Vec::new(),
            rate_product_deviation: Decimal::ZERO,
            tolerance_applied: false,
        }
    }
}

pub fn check_cycle(
    orders: &[SwapOrder],
    fills: &[Decimal],
    table: &PriceTable,
    mode: FeasibilityMode,
) -> Result<FeasibilityVerdict> {
    check_cycle_with(orders, fills, false, table, mode)
}

/// Check the original `orders` against the quantities of their scaled legs.
pub fn check_partial_fills(
    orders: &[SwapOrder],
    fills: &[PartialFill],
    table: &PriceTable,
    mode: FeasibilityMode,
) -> Result<FeasibilityVerdict> {
    let quantities: Vec<Decimal> = fills.iter().map(|f| f.order.give_qty()).collect();
    let rounded = fills.iter().any(|f| f.order.is_rounded());
    check_cycle_with(orders, &quantities, rounded, table, mode)
}

/// As [`check_cycle`]; `fills_rounded` marks fill quantities that came from
/// an inexact division, which enables the USD tolerance.
pub fn check_cycle_with(
    orders: &[SwapOrder],
    fills: &[Decimal],
    fills_rounded: bool,
    table: &PriceTable,
    mode: FeasibilityMode,
) -> Result<FeasibilityVerdict> {
    let k = orders.len();
    if fills.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            found: fills.len(),
        });
    }
    if k == 0 {
        return Ok(FeasibilityVerdict {
            mode,
            ..Default::default()
        });
    }
    if fills.iter().any(|q| !q.is_positive()) {
        return Err(Error::NonPositiveTarget);
    }
    for j in 0..k {
        if orders[j].want_asset() != orders[(j + 1) % k].give_asset() {
            return Err(Error::NotACycle { leg: j });
        }
    }

    let tolerant = fills_rounded || orders.iter().any(|o| o.is_rounded());
    let tolerance = if tolerant { USD_TOLERANCE } else { Decimal::ZERO };
    let mut per_leg = Vec::with_capacity(k);
    let mut product_num = rational_one();
    let mut product_den = rational_one();

    for (j, order) in orders.iter().enumerate() {
        let q = fills[j].to_rational();
        let q_next = fills[(j + 1) % k].to_rational();
        let realized = &q_next / &q;
        product_num *= &q_next;
        product_den *= &q;

        let price_give = table.price(order.give_asset())?.to_rational();
        let price_want = table.price(order.want_asset())?.to_rational();
        let (required, pass) = match mode {
            FeasibilityMode::FloorInequality => {
                let required = order.min_rate().to_rational() * order.want_qty().to_rational()
                    / order.give_qty().to_rational();
                let pass = realized >= required || {
                    let shortfall_usd = (&required - &realized) * &q * &price_want;
                    within(&shortfall_usd, tolerance)
                };
                (required, pass)
            }
            FeasibilityMode::StrictEquality => {
                let required = &price_give / &price_want;
                let fill_gap = &q_next * &price_want - &q * &price_give;
                let quote_gap = order.want_qty().to_rational() * &price_want
                    - order.give_qty().to_rational() * &price_give;
                let pass = within(&fill_gap, tolerance) && within(&quote_gap, tolerance);
                (required, pass)
            }
        };
        per_leg.push(LegCheck {
            realized_rate: realized,
            required_rate: required,
            pass,
        });
    }

    let deviation = if product_num == product_den {
        rational_zero()
    } else {
        (&product_num - &product_den) / &product_den
    };
    Ok(FeasibilityVerdict {
        feasible: per_leg.iter().all(|l| l.pass),
        mode,
        per_leg,
        rate_product_deviation: Decimal::from_rational(&deviation)?.value,
        tolerance_applied: tolerant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::scale_cycle;
    use crate::model::AssetId;
    use alloc::vec;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn o(id: &str, g: &str, gq: &str, w: &str, wq: &str) -> SwapOrder {
        SwapOrder::new(id, AssetId::new(g).unwrap(), d(gq), AssetId::new(w).unwrap(), d(wq)).unwrap()
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

    fn worked() -> Vec<SwapOrder> {
        vec![
            o("o1", "ETH", "1", "USDC", "3000"),
            o("o2", "USDC", "3000", "ARB", "1500"),
            o("o3", "ARB", "1500", "ETH", "1"),
        ]
    }

    #[test]
    fn worked_cycle_is_feasible_both_ways() {
        let fills = [d("1"), d("3000"), d("1500")];
        for mode in [FeasibilityMode::FloorInequality, FeasibilityMode::StrictEquality] {
            let v = check_cycle(&worked(), &fills, &prices(), mode).unwrap();
            assert!(v.feasible, "{mode:?}");
            assert_eq!(v.rate_product_deviation, Decimal::ZERO);
            assert!(!v.tolerance_applied);
        }
    }

    #[test]
    fn greedy_leg_fails_strict() {
        let mut orders = worked();
        orders[1] = o("o2", "USDC", "3000", "ARB", "1600");
        let fills = [d("1"), d("3000"), d("1500")];
        let strict = check_cycle(&orders, &fills, &prices(), FeasibilityMode::StrictEquality).unwrap();
        assert!(!strict.feasible);
        assert!(strict.per_leg[0].pass && !strict.per_leg[1].pass);
        let floor = check_cycle(&orders, &fills, &prices(), FeasibilityMode::FloorInequality).unwrap();
        assert!(!floor.feasible);
    }

    #[test]
    fn generous_leg_passes_floor_only() {
        let mut orders = worked();
        orders[1] = o("o2", "USDC", "3000", "ARB", "1400");
        let fills = [d("1"), d("3000"), d("1500")];
        assert!(check_cycle(&orders, &fills, &prices(), FeasibilityMode::FloorInequality).unwrap().feasible);
        assert!(!check_cycle(&orders, &fills, &prices(), FeasibilityMode::StrictEquality).unwrap().feasible);
    }

    #[test]
    fn min_rate_tightens_floor() {
        let mut orders = worked();
        orders[0] = orders[0].clone().with_min_rate(d("1.01")).unwrap();
        let fills = [d("1"), d("3000"), d("1500")];
        let v = check_cycle(&orders, &fills, &prices(), FeasibilityMode::FloorInequality).unwrap();
        assert!(!v.per_leg[0].pass);
    }

    #[test]
    fn scaled_partial_fill_is_feasible() {
        let fills = scale_cycle(&worked(), d("0.24"), &prices()).unwrap();
        let v = check_partial_fills(&worked(), &fills, &prices(), FeasibilityMode::StrictEquality).unwrap();
        assert!(v.feasible);
        assert_eq!(fills[0].order.give_qty(), d("0.00008"));
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(
            check_cycle(&worked(), &[d("1")], &prices(), FeasibilityMode::default()),
            Err(Error::LengthMismatch { expected: 3, found: 1 })
        ));
        let open = &worked()[..2];
        assert!(matches!(
            check_cycle(open, &[d("1"), d("3000")], &prices(), FeasibilityMode::default()),
            Err(Error::NotACycle { leg: 1 })
        ));
        assert!(check_cycle(&[], &[], &prices(), FeasibilityMode::default()).unwrap().feasible);
    }
}
