//! Layered node-link layout with fixed layers.
//!
//! Links spanning several layers are split by dummy nodes so that every
//! drawn segment joins adjacent layers, then within-layer orders are improved
//! by barycentric sweeps. Layer 1 is the top row and layer `L` the bottom row.

use serde::{Deserialize, Serialize};

use crate::bundle::{Depiction, LayoutBundle, LayoutError, LinkStyle, Markers, PathCommand, Rect, Shape};
use crate::color::Rgb;
use crate::graph::{ElementId, LayeredGraph, Link, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExpandedKind {
    Original { node: NodeId },
    Dummy { link: Link },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedNode {
    pub kind: ExpandedKind,
    pub layer: usize,
}

/// A drawn piece of a link between layers `k` (upper) and `k + 1` (lower).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub upper: usize,
    pub lower: usize,
    pub link: Link,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedGraph {
    /// Indices `0..n` are the original nodes, in node-id order; dummies follow.
    pub nodes: Vec<ExpandedNode>,
    /// Left-to-right order of expanded node indices for each layer (index 0 is layer 1).
    pub order: Vec<Vec<usize>>,
    pub segments: Vec<Segment>,
    /// For each link, the expanded nodes it passes through from source to destination.
    pub chains: Vec<(Link, Vec<usize>)>,
}

pub fn insert_dummy_nodes(g: &LayeredGraph) -> ExpandedGraph {
    let mut nodes: Vec<ExpandedNode> = (0..g.node_count())
        .map(|u| ExpandedNode {
            kind: ExpandedKind::Original { node: u },
            layer: g.layer_of(u),
        })
        .collect();
    let mut order: Vec<Vec<usize>> = (1..=g.layer_count()).map(|l| g.nodes_in_layer(l).to_vec()).collect();
    let mut segments = Vec::new();
    let mut chains = Vec::with_capacity(g.links().len());

    for &link in g.links() {
        let a = g.layer_of(link.src);
        let b = g.layer_of(link.dst);
        let mut chain = vec![link.src];
        if a != b {
            // intermediate layers, walked from the source side
            let mids: Vec<usize> = if b > a { (a + 1..b).collect() } else { (b + 1..a).rev().collect() };
            for layer in mids {
                let id = nodes.len();
                nodes.push(ExpandedNode {
                    kind: ExpandedKind::Dummy { link },
                    layer,
                });
                order[layer - 1].push(id);
                chain.push(id);
            }
        }
        chain.push(link.dst);
        if a != b {
            for w in chain.windows(2) {
                let (upper, lower) = if nodes[w[0]].layer < nodes[w[1]].layer { (w[0], w[1]) } else { (w[1], w[0]) };
                segments.push(Segment { upper, lower, link });
            }
        }
        chains.push((link, chain));
    }
    ExpandedGraph {
        nodes,
        order,
        segments,
        chains,
    }
}

impl ExpandedGraph {
    pub fn dummy_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, ExpandedKind::Dummy { .. }))
            .count()
    }

    /// Position of every expanded node within its layer.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.nodes.len()];
        for layer in &self.order {
            for (i, &v) in layer.iter().enumerate() {
                pos[v] = i;
            }
        }
        pos
    }
}

/// Inversions among `(upper, lower)` position pairs: pairs with
/// `(a1 - a2) * (b1 - b2) < 0`. Sort by `(a, b)`, then count earlier
/// elements with a strictly larger `b` using a Fenwick tree.
fn inversions(pairs: &mut [(usize, usize)], width: usize) -> usize {
    pairs.sort_unstable();
    let mut tree = vec![0usize; width + 1];
    let mut seen = 0;
    let mut total = 0;
    for &(_, b) in pairs.iter() {
        // count of earlier b' <= b
        let mut i = b + 1;
        let mut le = 0;
        while i > 0 {
            le += tree[i];
            i -= i & i.wrapping_neg();
        }
        total += seen - le;
        let mut i = b + 1;
        while i <= width {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
        seen += 1;
    }
    total
}

pub fn count_crossings(e: &ExpandedGraph) -> usize {
    let pos = e.positions();
    let layers = e.order.len();
    let mut per_gap: Vec<Vec<(usize, usize)>> = vec![Vec::new(); layers.saturating_sub(1)];
    for s in &e.segments {
        let k = e.nodes[s.upper].layer;
        per_gap[k - 1].push((pos[s.upper], pos[s.lower]));
    }
    per_gap
        .iter_mut()
        .enumerate()
        .map(|(k, pairs)| inversions(pairs, e.order[k + 1].len()))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub initial: usize,
    pub best: usize,
    /// Best crossing count seen after each pass.
    pub history: Vec<usize>,
    pub sweeps: usize,
}

pub fn barycentric_sweep(e: &ExpandedGraph, max_sweeps: usize) -> ExpandedGraph {
    barycentric_sweep_with_report(e, max_sweeps).0
}

/// Alternating top-down / bottom-up barycenter passes. One sweep is a down
/// pass followed by an up pass; each pass ends with a sifting round that
/// moves single nodes to their cheapest slot. Returns the best ordering seen, which is the
/// input ordering when nothing improves on it.
pub fn barycentric_sweep_with_report(e: &ExpandedGraph, max_sweeps: usize) -> (ExpandedGraph, SweepReport) {
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); e.nodes.len()];
    let mut down: Vec<Vec<usize>> = vec![Vec::new(); e.nodes.len()];
    for s in &e.segments {
        down[s.upper].push(s.lower);
        up[s.lower].push(s.upper);
    }

    let initial = count_crossings(e);
    let mut best = e.clone();
    let mut best_count = initial;
    let mut work = e.clone();
    let mut history = Vec::new();
    let mut sweeps = 0;
    let layers = e.order.len();
    // Ties follow the previous order; after a sweep without improvement the
    // tie order is reversed once before giving up.
    let mut flip = false;

    while sweeps < max_sweeps && best_count > 0 {
        sweeps += 1;
        let before = best_count;
        for pass_down in [true, false] {
            let targets: Vec<usize> = if pass_down { (1..layers).collect() } else { (0..layers.saturating_sub(1)).rev().collect() };
            for k in targets {
                let pos = work.positions();
                let adj = if pass_down { &up } else { &down };
                reorder_layer(&mut work.order[k], &pos, adj, flip);
            }
            for k in 0..layers {
                let pos = work.positions();
                sift_layer(&mut work.order[k], &pos, &up, &down);
            }
            let c = count_crossings(&work);
            if c < best_count {
                best_count = c;
                best = work.clone();
            }
            history.push(best_count);
            if best_count == 0 {
                break;
            }
        }
        if best_count < before {
            flip = false;
        } else if flip {
            break;
        } else {
            flip = true;
        }
    }
    let report = SweepReport {
        initial,
        best: best_count,
        history,
        sweeps,
    };
    (best, report)
}

fn reorder_layer(layer: &mut [usize], pos: &[usize], fixed_neighbors: &[Vec<usize>], flip: bool) {
    let mut keyed: Vec<(f64, usize, usize)> = layer
        .iter()
        .map(|&v| {
            let nbrs = &fixed_neighbors[v];
            let bary = if nbrs.is_empty() {
                pos[v] as f64
            } else {
                nbrs.iter().map(|&w| pos[w] as f64).sum::<f64>() / nbrs.len() as f64
            };
            (bary, pos[v], v)
        })
        .collect();
    if flip {
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2)));
    } else {
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    }
    for (slot, (_, _, v)) in layer.iter_mut().zip(keyed) {
        *slot = v;
    }
}

/// Crossings between the segments of `u` and `v` when `u` sits left of `v`.
fn pair_crossings(u: usize, v: usize, pos: &[usize], up: &[Vec<usize>], down: &[Vec<usize>]) -> usize {
    let side = |adj: &[Vec<usize>]| {
        adj[u]
            .iter()
            .map(|&a| adj[v].iter().filter(|&&b| pos[a] > pos[b]).count())
            .sum::<usize>()
    };
    side(up) + side(down)
}

/// Moves each node of a layer to the slot with the fewest crossings against
/// both neighbouring layers, keeping its slot on ties.
fn sift_layer(layer: &mut Vec<usize>, pos: &[usize], up: &[Vec<usize>], down: &[Vec<usize>]) {
    let nodes = layer.clone();
    for v in nodes {
        let from = layer.iter().position(|&x| x == v).unwrap();
        layer.remove(from);
        // cost of slot 0: v left of everything
        let mut cost: usize = layer.iter().map(|&w| pair_crossings(v, w, pos, up, down)).sum();
        let mut best = (cost, from);
        let mut at_from = cost;
        for (j, &w) in layer.iter().enumerate() {
            cost = cost + pair_crossings(w, v, pos, up, down) - pair_crossings(v, w, pos, up, down);
            if j + 1 == from {
                at_from = cost;
            }
            if cost < best.0 {
                best = (cost, j + 1);
            }
        }
        if from == 0 {
            at_from = layer.iter().map(|&w| pair_crossings(v, w, pos, up, down)).sum();
        }
        let slot = if best.0 < at_from { best.1 } else { from };
        layer.insert(slot, v);
    }
}

/// Display geometry for node-link diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeLinkParams {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub node_size: f64,
    /// Horizontal distance between neighbouring slots in a row.
    pub pitch: f64,
    pub max_sweeps: usize,
}

impl Default for NodeLinkParams {
    fn default() -> Self {
        Self {
            width: 2560.0,
            height: 1600.0,
            margin: 24.0,
            node_size: 12.0,
            pitch: 20.0,
            max_sweeps: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkPolyline {
    pub link: Link,
    pub style: LinkStyle,
    pub points: Vec<(f64, f64)>,
    /// Control point of a same-layer arc.
    pub control: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeLinkLayout {
    pub width: f64,
    pub height: f64,
    pub node_size: f64,
    pub layer_separation: f64,
    pub layer_y: Vec<f64>,
    /// Center of every expanded node (originals first).
    pub centers: Vec<(f64, f64)>,
    pub node_count: usize,
    pub links: Vec<LinkPolyline>,
    pub crossings: usize,
    pub expanded: ExpandedGraph,
    numbers: Vec<usize>,
}

pub fn layout_node_link(g: &LayeredGraph, params: &NodeLinkParams) -> Result<NodeLinkLayout, LayoutError> {
    if g.layer_sizes().contains(&0) {
        return Err(LayoutError::DegenerateGraph);
    }
    let expanded = barycentric_sweep(&insert_dummy_nodes(g), params.max_sweeps);
    let crossings = count_crossings(&expanded);
    let layers = g.layer_count();

    let usable = params.height - 2.0 * params.margin - params.node_size;
    let layer_separation = if layers > 1 { usable / (layers - 1) as f64 } else { 0.0 };
    let top = params.margin + params.node_size / 2.0;
    let layer_y: Vec<f64> = (0..layers).map(|k| top + k as f64 * layer_separation).collect();

    let widest = expanded.order.iter().map(Vec::len).max().unwrap_or(1);
    let row_span = (widest.saturating_sub(1)) as f64 * params.pitch;
    // room for same-layer arcs on the right of the widest row
    let width = params.width.max(row_span + 2.0 * params.margin + params.node_size + 2.0 * params.pitch);
    let mid = width / 2.0;

    let mut centers = vec![(0.0, 0.0); expanded.nodes.len()];
    for (k, row) in expanded.order.iter().enumerate() {
        let span = (row.len().saturating_sub(1)) as f64 * params.pitch;
        for (i, &v) in row.iter().enumerate() {
            centers[v] = (mid - span / 2.0 + i as f64 * params.pitch, layer_y[k]);
        }
    }

    let links = expanded
        .chains
        .iter()
        .map(|(link, chain)| {
            let a = g.layer_of(link.src);
            let b = g.layer_of(link.dst);
            let points: Vec<(f64, f64)> = chain.iter().map(|&v| centers[v]).collect();
            if a == b {
                let (x0, y) = points[0];
                let x1 = points[1].0;
                let lift = if a == 1 { 0.35 } else { -0.35 } * layer_separation.max(params.pitch);
                LinkPolyline {
                    link: *link,
                    style: LinkStyle::SameLayer,
                    points,
                    control: Some((x0.max(x1) + params.pitch, y + lift)),
                }
            } else {
                LinkPolyline {
                    link: *link,
                    style: if b < a { LinkStyle::Backward } else { LinkStyle::Normal },
                    points,
                    control: None,
                }
            }
        })
        .collect();

    let mut numbers = vec![0; g.node_count()];
    for layer in 1..=layers {
        for (i, &u) in g.nodes_in_layer(layer).iter().enumerate() {
            numbers[u] = i + 1;
        }
    }

    Ok(NodeLinkLayout {
        width,
        height: params.height,
        node_size: params.node_size,
        layer_separation,
        layer_y,
        centers,
        node_count: g.node_count(),
        links,
        crossings,
        expanded,
        numbers,
    })
}

impl NodeLinkLayout {
    pub fn node_rect(&self, node: NodeId) -> Rect {
        let (x, y) = self.centers[node];
        let s = self.node_size;
        Rect::new(x - s / 2.0, y - s / 2.0, s, s)
    }

    pub fn node_number(&self, node: NodeId) -> usize {
        self.numbers[node]
    }

    pub fn to_bundle(&self, markers: Option<Markers>) -> LayoutBundle {
        let mut shapes = Vec::with_capacity(self.links.len() + self.node_count);
        for pl in &self.links {
            let mut commands = vec![PathCommand::Move {
                x: pl.points[0].0,
                y: pl.points[0].1,
            }];
            match pl.control {
                Some((cx, cy)) => {
                    let (x, y) = pl.points[pl.points.len() - 1];
                    commands.push(PathCommand::Quad { cx, cy, x, y });
                }
                None => commands.extend(pl.points[1..].iter().map(|&(x, y)| PathCommand::Line { x, y })),
            }
            shapes.push(Shape::Path {
                commands,
                stroke: if pl.style == LinkStyle::Backward { Rgb::BACKWARD_BLUE } else { Rgb::LINK_GRAY },
                width: 1.25,
                style: pl.style,
                id: Some(ElementId::Link(pl.link)),
            });
        }
        for u in 0..self.node_count {
            shapes.push(Shape::Rect {
                rect: self.node_rect(u),
                fill: Rgb::WHITE,
                stroke: Some(Rgb::BLACK),
                label: None,
                id: Some(ElementId::Node(u)),
            });
        }
        LayoutBundle::new(Depiction::NodeLink, self.width, self.height, self.node_size, shapes).with_markers(markers)
    }
}
