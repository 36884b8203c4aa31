//! Directed asset multigraph and length-bounded simple-cycle enumeration.
//!
//! Each order is an edge `give_asset -> want_asset`. Cycles are found over
//! assets with Johnson's decomposition (least start vertex, search restricted
//! to vertices above it), pruned by distance back to the start instead of
//! blocking. Each asset cycle is then expanded over parallel edges into
//! order-index cycles.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{AssetId, SwapOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: AssetId,
    pub to: AssetId,
    pub order_index: usize,
    /// Bridging orders never become cycle legs.
    pub synthetic: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssetGraph {
    nodes: Vec<AssetId>,
    edges: Vec<Edge>,
}

impl AssetGraph {
    /// Assets in order of first appearance (give side before want side).
    pub fn nodes(&self) -> &[AssetId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, asset: &AssetId) -> Option<usize> {
        self.nodes.iter().position(|n| n == asset)
    }

    pub fn out_edges<'a>(&'a self, asset: &'a AssetId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.from == asset)
    }

    pub fn in_edges<'a>(&'a self, asset: &'a AssetId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.to == asset)
    }
}

/// A closed sequence of orders, `want(j) == give(j + 1 mod k)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CycleCandidate {
    /// Canonical rotation: the smallest order index comes first.
    pub order_indices: Vec<usize>,
    /// Give assets of each leg followed by the first asset again.
    pub assets: Vec<AssetId>,
}

impl CycleCandidate {
    pub fn len(&self) -> usize {
        self.order_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order_indices.is_empty()
    }

    /// Order indices rotated so that the leg at `position` comes first.
    pub fn rotated_from(&self, position: usize) -> Vec<usize> {
        let k = self.order_indices.len();
        (0..k)
            .map(|j| self.order_indices[(position + j) % k])
            .collect()
    }

    pub fn contains_order(&self, index: usize) -> bool {
        self.order_indices.contains(&index)
    }
}

pub fn build_graph(orders: &[SwapOrder]) -> AssetGraph {
    let mut graph = AssetGraph::default();
    for (order_index, order) in orders.iter().enumerate() {
        for asset in [order.give_asset(), order.want_asset()] {
            if !graph.nodes.contains(asset) {
                graph.nodes.push(asset.clone());
            }
        }
        graph.edges.push(Edge {
            from: order.give_asset().clone(),
            to: order.want_asset().clone(),
            order_index,
            synthetic: order.is_synthetic(),
        });
    }
    graph
}

/// True when `indices` name distinct orders whose assets close into a simple
/// loop.
pub fn is_cow_cycle(orders: &[SwapOrder], indices: &[usize]) -> bool {
    let k = indices.len();
    if k < 2 {
        return false;
    }
    let mut seen_assets: Vec<&AssetId> = Vec::with_capacity(k);
    for (j, &i) in indices.iter().enumerate() {
        if indices[..j].contains(&i) {
            return false;
        }
        let (Some(cur), Some(next)) = (orders.get(i), orders.get(indices[(j + 1) % k])) else {
            return false;
        };
        if cur.want_asset() != next.give_asset() || seen_assets.contains(&cur.give_asset()) {
            return false;
        }
        seen_assets.push(cur.give_asset());
    }
    true
}

/// Rotation of `indices` that starts at its smallest element.
pub fn canonical_rotation(indices: &[usize]) -> Vec<usize> {
    let Some(start) = indices
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(p, _)| p)
    else {
        return Vec::new();
    };
    (0..indices.len())
        .map(|j| indices[(start + j) % indices.len()])
        .collect()
}

/// Every simple cycle of 2..=`k_max` orders, once each, sorted by canonical
/// index sequence.
pub fn enumerate_cycles(graph: &AssetGraph, k_max: usize) -> Vec<CycleCandidate> {
    let n = graph.nodes.len();
    if k_max < 2 || n < 2 {
        return Vec::new();
    }
    // parallel[u][v] = order indices of live edges u -> v
    let mut parallel: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; n];
    for e in graph.edges.iter().filter(|e| !e.synthetic) {
        let (Some(u), Some(v)) = (graph.node_index(&e.from), graph.node_index(&e.to)) else {
            continue;
        };
        parallel[u][v].push(e.order_index);
    }
    let adjacency: Vec<Vec<usize>> = parallel
        .iter()
        .map(|row| (0..n).filter(|&v| !row[v].is_empty()).collect())
        .collect();

    let mut node_cycles = Vec::new();
    for start in 0..n {
        let mut search = BoundedSearch::new(&adjacency, start, k_max);
        search.run();
        node_cycles.extend(search.found);
    }

    let mut out = Vec::new();
    for cycle in node_cycles {
        expand_parallel(graph, &parallel, &cycle, &mut out);
    }
    out.sort();
    out
}

fn expand_parallel(
    graph: &AssetGraph,
    parallel: &[Vec<Vec<usize>>],
    nodes: &[usize],
    out: &mut Vec<CycleCandidate>,
) {
    let k = nodes.len();
    let choices: Vec<&[usize]> = (0..k)
        .map(|j| parallel[nodes[j]][nodes[(j + 1) % k]].as_slice())
        .collect();
    let mut pick = vec![0usize; k];
    loop {
        let indices: Vec<usize> = (0..k).map(|j| choices[j][pick[j]]).collect();
        let start = (0..k).min_by_key(|&j| indices[j]).unwrap_or(0);
        let order_indices = (0..k).map(|j| indices[(start + j) % k]).collect();
        let mut assets: Vec<AssetId> = (0..k)
            .map(|j| graph.nodes[nodes[(start + j) % k]].clone())
            .collect();
        assets.push(assets[0].clone());
        out.push(CycleCandidate {
            order_indices,
            assets,
        });

        // odometer over parallel-edge choices
        let mut j = 0;
        loop {
            if j == k {
                return;
            }
            pick[j] += 1;
            if pick[j] < choices[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

const UNREACHABLE: usize = usize::MAX;

/// Cycle search from one start vertex over vertices `>= start`, as in
/// Johnson's decomposition by least vertex.
///
/// `dist[v]` is the edge distance from `v` back to the start inside that
/// subgraph. Entering `v` at path length `l` is pointless once
/// `l + dist[v] > k_max`, which bounds the search without missing cycles.
struct BoundedSearch<'a> {
    adjacency: &'a [Vec<usize>],
    start: usize,
    k_max: usize,
    dist: Vec<usize>,
    on_path: Vec<bool>,
    path: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl<'a> BoundedSearch<'a> {
    fn new(adjacency: &'a [Vec<usize>], start: usize, k_max: usize) -> Self {
        let n = adjacency.len();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, outs) in adjacency.iter().enumerate().skip(start) {
            for &v in outs.iter().filter(|&&v| v >= start) {
                reverse[v].push(u);
            }
        }
        let mut dist = vec![UNREACHABLE; n];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &reverse[v] {
                if dist[u] == UNREACHABLE {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        BoundedSearch {
            adjacency,
            start,
            k_max,
            dist,
            on_path: vec![false; n],
            path: Vec::with_capacity(k_max),
            found: Vec::new(),
        }
    }

    fn run(&mut self) {
        self.visit(self.start);
    }

    fn visit(&mut self, v: usize) {
        self.on_path[v] = true;
        self.path.push(v);
        let len = self.path.len();
        let adjacency = self.adjacency;
        for &w in &adjacency[v] {
            if w == self.start {
                if len >= 2 {
                    self.found.push(self.path.clone());
                }
            } else if w > self.start
                && !self.on_path[w]
                && self.dist[w] != UNREACHABLE
                && len + self.dist[w] <= self.k_max
            {
                self.visit(w);
            }
        }
        self.path.pop();
        self.on_path[v] = false;
    }
}
