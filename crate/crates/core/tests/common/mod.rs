//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use quilts_core::generate::PathConstraints;
use quilts_core::nodelink::ExpandedGraph;
use quilts_core::{LayeredGraph, Link, NodeId};

/// Small layered graph: every layer non-empty, links drawn from all ordered
/// pairs of distinct nodes.
pub fn small_graph(max_nodes: usize, max_layers: usize) -> impl Strategy<Value = LayeredGraph> {
    (2..=max_layers)
        .prop_flat_map(move |layers| (Just(layers), layers.max(2)..=max_nodes.max(layers)))
        .prop_flat_map(|(layers, nodes)| {
            let extra = prop::collection::vec(1..=layers, nodes - layers);
            let pairs = nodes * (nodes - 1);
            (Just(layers), Just(nodes), extra, prop::collection::vec(prop::bool::weighted(0.3), pairs))
        })
        .prop_map(|(layers, nodes, extra, keep)| {
            let mut layer_of: Vec<usize> = (1..=layers).collect();
            layer_of.extend(extra);
            let mut links = Vec::new();
            let mut k = 0;
            for u in 0..nodes {
                for v in 0..nodes {
                    if u == v {
                        continue;
                    }
                    if keep[k] {
                        links.push(Link::new(u, v));
                    }
                    k += 1;
                }
            }
            LayeredGraph::new(layers, layer_of, links).unwrap()
        })
}

/// Every simple directed path from `c.source` to `c.destination`, found
/// without any pruning, then filtered by the constraints.
pub fn brute_force_good_paths(g: &LayeredGraph, c: &PathConstraints) -> BTreeSet<Vec<NodeId>> {
    fn walk(g: &LayeredGraph, path: &mut Vec<NodeId>, dst: NodeId, out: &mut Vec<Vec<NodeId>>) {
        let v = *path.last().unwrap();
        if v == dst {
            out.push(path.clone());
            return;
        }
        for w in 0..g.node_count() {
            if g.has_link(Link::new(v, w)) && !path.contains(&w) {
                path.push(w);
                walk(g, path, dst, out);
                path.pop();
            }
        }
    }
    let mut all = Vec::new();
    walk(g, &mut vec![c.source], c.destination, &mut all);
    all.into_iter()
        .filter(|p| {
            let len = p.len() - 1;
            let skip = p.windows(2).any(|w| g.layer_of(w[1]) != g.layer_of(w[0]) + 1);
            len >= c.min_links && len <= c.max_links && (skip || !c.require_skip)
        })
        .collect()
}

/// Pairwise crossing count over every layer gap.
pub fn brute_force_crossings(e: &ExpandedGraph) -> usize {
    let pos = e.positions();
    let mut c = 0;
    for (i, s) in e.segments.iter().enumerate() {
        for t in &e.segments[i + 1..] {
            if e.nodes[s.upper].layer != e.nodes[t.upper].layer {
                continue;
            }
            let a = pos[s.upper] as i64 - pos[t.upper] as i64;
            let b = pos[s.lower] as i64 - pos[t.lower] as i64;
            if a * b < 0 {
                c += 1;
            }
        }
    }
    c
}

/// Ordered pairs `(u, v)` with `layer(v) = layer(u) + 1`, counted one by one.
pub fn brute_force_possible(g: &LayeredGraph) -> usize {
    let n = g.node_count();
    let mut c = 0;
    for u in 0..n {
        for v in 0..n {
            if g.layer_of(v) == g.layer_of(u) + 1 {
                c += 1;
            }
        }
    }
    c
}

/// Proper and skip counts straight from the layer numbers.
pub fn reclassify(g: &LayeredGraph) -> (usize, usize) {
    let proper = g
        .links()
        .iter()
        .filter(|l| g.layer_of(l.dst) == g.layer_of(l.src) + 1)
        .count();
    (proper, g.links().len() - proper)
}

/// Half-away-from-zero rounding written without `f64::round`.
pub fn round_half_away(x: f64) -> usize {
    let floor = x.floor();
    if x - floor >= 0.5 {
        floor as usize + 1
    } else {
        floor as usize
    }
}

/// Seeded counterpart of [`small_graph`] for loops that need a fixed count.
pub fn random_small_graph<R: rand::Rng>(rng: &mut R, max_nodes: usize, max_layers: usize, p: f64) -> LayeredGraph {
    let layers = rng.gen_range(2..=max_layers);
    let nodes = rng.gen_range(layers.max(2)..=max_nodes.max(layers));
    let mut layer_of: Vec<usize> = (1..=layers).collect();
    layer_of.extend((layers..nodes).map(|_| rng.gen_range(1..=layers)));
    let mut links = Vec::new();
    for u in 0..nodes {
        for v in 0..nodes {
            if u != v && rng.gen_bool(p) {
                links.push(Link::new(u, v));
            }
        }
    }
    LayeredGraph::new(layers, layer_of, links).unwrap()
}

/// The node sequence spelled by `links` if they form one simple chain from
/// `from` to `to`.
pub fn chain(links: &[Link], from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
    let mut path = vec![from];
    let mut left: Vec<Link> = links.to_vec();
    while let Some(i) = left.iter().position(|l| l.src == *path.last().unwrap()) {
        let l = left.swap_remove(i);
        if path.contains(&l.dst) {
            return None;
        }
        path.push(l.dst);
    }
    (left.is_empty() && *path.last().unwrap() == to && path.len() > 1).then_some(path)
}
