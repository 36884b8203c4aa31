use cow_core::bridging::close_chain;
use cow_core::engine::{run_batch, BatchConfig};
use cow_core::vault::VaultLedger;
use cow_core::{usd_value, AssetId, Decimal, PriceTable, SwapOrder};
use proptest::prelude::*;

fn dec(mantissa: i64, exp: u32) -> Decimal {
    Decimal::from_parts(mantissa, exp).unwrap()
}

fn positive() -> impl Strategy<Value = Decimal> {
    (1i64..1_000_000_000, 0u32..=9).prop_map(|(m, e)| dec(m, e))
}

proptest! {
    #[test]
    fn usd_value_is_exact(q in positive(), p in positive(), w in positive(), pw in positive()) {
        let table = PriceTable::new("p")
            .with("AAA", &p.to_string()).unwrap()
            .with("BBB", &pw.to_string()).unwrap();
        let o = SwapOrder::new("o", AssetId::new("aaa").unwrap(), q, AssetId::new("BbB").unwrap(), w).unwrap();
        let v = usd_value(&o, &table).unwrap();
        prop_assert!(v.exact);
        prop_assert_eq!(v.give_usd.to_rational(), q.to_rational() * p.to_rational());
        prop_assert_eq!(v.want_usd.to_rational(), w.to_rational() * pw.to_rational());
    }

    #[test]
    fn symbol_case_does_not_matter(sym in "[a-zA-Z]{1,8}") {
        let lower = AssetId::new(&sym.to_lowercase()).unwrap();
        let upper = AssetId::new(&sym.to_uppercase()).unwrap();
        prop_assert_eq!(lower, upper);
    }

    #[test]
    fn parse_display_round_trip(m in any::<i64>(), e in 0u32..=18) {
        let d = dec(m, e);
        prop_assert_eq!(d.to_string().parse::<Decimal>().unwrap(), d);
    }

    #[test]
    fn bridged_chains_close_exactly(
        p in prop::collection::vec(positive(), 4),
        usd in prop::collection::vec(1i64..100_000, 3),
    ) {
        let mut table = PriceTable::new("p");
        let assets: Vec<AssetId> = (0..4).map(|i| AssetId::new(&format!("X{i}")).unwrap()).collect();
        for (a, price) in assets.iter().zip(&p) {
            table.insert(a.clone(), *price).unwrap();
        }
        let chain: Vec<SwapOrder> = (0..3)
            .map(|j| {
                let amount = Decimal::from_int(usd[j]);
                let give = amount.div(p[j]).unwrap();
                let want = amount.div(p[j + 1]).unwrap();
                SwapOrder::new(format!("c{j}"), assets[j].clone(), give.value, assets[j + 1].clone(), want.value)
                    .unwrap()
                    .with_notional(amount)
                    .unwrap()
                    .with_rounding(!give.exact || !want.exact)
            })
            .collect();
        let (cycle, bridge) = close_chain(&chain, &table).unwrap();
        prop_assert_eq!(cycle.len(), 4);
        prop_assert_eq!(bridge.order.give_asset(), &assets[3]);
        prop_assert_eq!(bridge.order.want_asset(), &assets[0]);
        let v = &cycle.dollar_matrix;
        for col in 0..v.assets.len() {
            let sum = v.rows.iter().fold(Decimal::ZERO, |acc, r| acc.checked_add(r[col]).unwrap());
            prop_assert!(sum.is_zero());
        }
    }

    #[test]
    fn disabling_bridging_never_adds_cycles(
        edges in prop::collection::vec((0usize..5, 1usize..5, 1i64..500, 0i64..300), 0..10),
    ) {
        let mut table = PriceTable::new("p");
        for i in 0..5 {
            table.insert(AssetId::new(&format!("Z{i}")).unwrap(), Decimal::from_int(i as i64 + 1)).unwrap();
        }
        let orders: Vec<SwapOrder> = edges
            .iter()
            .enumerate()
            .map(|(n, &(a, off, usd, t))| {
                let b = (a + off) % 5;
                let amount = Decimal::from_int(usd);
                let pa = Decimal::from_int(a as i64 + 1);
                let pb = Decimal::from_int(b as i64 + 1);
                let give = amount.div(pa).unwrap();
                let want = amount.div(pb).unwrap();
                SwapOrder::new(
                    format!("e{n}"),
                    AssetId::new(&format!("Z{a}")).unwrap(),
                    give.value,
                    AssetId::new(&format!("Z{b}")).unwrap(),
                    want.value,
                )
                .unwrap()
                .at(t)
                .with_notional(amount)
                .unwrap()
                .with_rounding(!give.exact || !want.exact)
            })
            .collect();
        let ledger = VaultLedger::unconstrained();
        let on = BatchConfig { bridging_enabled: true, ..BatchConfig::default() };
        let off = BatchConfig::default();
        let with = run_batch(&orders, &on, &table, &ledger).unwrap();
        let without = run_batch(&orders, &off, &table, &ledger).unwrap();
        prop_assert!(without.selected().count() <= with.selected().count());
        prop_assert_eq!(without.summary.bridging_orders, 0);
        // settled fills never exceed order capacity
        for (f, c) in with.filled_usd.iter().zip(&with.capacity_usd) {
            prop_assert!(f <= c && !f.is_negative());
        }
        let again = run_batch(&orders, &on, &table, &ledger).unwrap();
        prop_assert_eq!(again, with);
    }
}
