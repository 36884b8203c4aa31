use std::collections::BTreeSet;

use cow_core::graph::{build_graph, canonical_rotation, enumerate_cycles, is_cow_cycle};
use cow_core::{AssetId, Decimal, SwapOrder};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn orders_from_edges(edges: &[(usize, usize)]) -> Vec<SwapOrder> {
    edges
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            SwapOrder::new(
                format!("o{i}"),
                AssetId::new(&format!("A{a}")).unwrap(),
                Decimal::ONE,
                AssetId::new(&format!("A{b}")).unwrap(),
                Decimal::ONE,
            )
            .unwrap()
        })
        .collect()
}

fn random_edges(rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let nodes = rng.gen_range(2..=8);
    let m = rng.gen_range(0..=15);
    (0..m)
        .map(|_| {
            let a = rng.gen_range(0..nodes);
            let mut b = rng.gen_range(0..nodes - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect()
}

/// Every sequence of distinct orders that chains back to its start without
/// revisiting an asset, in canonical rotation.
fn brute_force(edges: &[(usize, usize)], k_max: usize) -> BTreeSet<Vec<usize>> {
    fn extend(
        edges: &[(usize, usize)],
        k_max: usize,
        path: &mut Vec<usize>,
        seen_assets: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let start = edges[path[0]].0;
        let at = edges[*path.last().unwrap()].1;
        if at == start {
            out.insert(canonical_rotation(path));
            return;
        }
        if path.len() == k_max || seen_assets.contains(&at) {
            return;
        }
        seen_assets.push(at);
        for (i, &(a, _)) in edges.iter().enumerate() {
            if a == at && !path.contains(&i) {
                path.push(i);
                extend(edges, k_max, path, seen_assets, out);
                path.pop();
            }
        }
        seen_assets.pop();
    }
    let mut out = BTreeSet::new();
    for i in 0..edges.len() {
        let mut path = vec![i];
        let mut seen = vec![edges[i].0];
        extend(edges, k_max, &mut path, &mut seen, &mut out);
    }
    out
}

#[test]
fn matches_brute_force_on_random_multigraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut nonempty = 0;
    for _ in 0..1500 {
        let edges = random_edges(&mut rng);
        let k_max = rng.gen_range(2..=5);
        let orders = orders_from_edges(&edges);
        let got: Vec<Vec<usize>> = enumerate_cycles(&build_graph(&orders), k_max)
            .into_iter()
            .map(|c| c.order_indices)
            .collect();
        let expected = brute_force(&edges, k_max);
        let got_set: BTreeSet<_> = got.iter().cloned().collect();
        assert_eq!(got_set.len(), got.len(), "duplicates for {edges:?}");
        assert_eq!(got_set, expected, "edges {edges:?} k_max {k_max}");
        nonempty += usize::from(!expected.is_empty());
    }
    assert!(nonempty > 300, "generator too sparse: {nonempty}");
}

#[test]
fn dense_small_graph() {
    // complete digraph on 4 assets plus a parallel copy of every edge
    let mut edges = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                edges.push((a, b));
                edges.push((a, b));
            }
        }
    }
    let orders = orders_from_edges(&edges);
    for k in 2..=5 {
        let got: BTreeSet<_> = enumerate_cycles(&build_graph(&orders), k)
            .into_iter()
            .map(|c| c.order_indices)
            .collect();
        assert_eq!(got, brute_force(&edges, k), "k = {k}");
    }
}

proptest! {
    #[test]
    fn output_is_sound_and_canonical(
        edges in prop::collection::vec((0usize..6, 0usize..5), 0..14),
        k_max in 2usize..6,
    ) {
        let edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a, if b >= a { b + 1 } else { b })).collect();
        let orders = orders_from_edges(&edges);
        let cycles = enumerate_cycles(&build_graph(&orders), k_max);
        for w in cycles.windows(2) {
            prop_assert!(w[0].order_indices < w[1].order_indices);
        }
        for c in &cycles {
            prop_assert!(c.len() >= 2 && c.len() <= k_max);
            prop_assert!(is_cow_cycle(&orders, &c.order_indices));
            prop_assert_eq!(&canonical_rotation(&c.order_indices), &c.order_indices);
            prop_assert_eq!(c.assets.len(), c.len() + 1);
        }
    }
}
