//! Layered graph model.
//!
//! A [`LayeredGraph`] is a directed graph whose nodes carry a fixed layer in
//! `1..=layer_count`. Links going from layer `k` to layer `k + 1` are *proper*;
//! every other link is a *skip* link (forward over two or more layers, within
//! one layer, or backward).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node identifier in `0..node_count`.
pub type NodeId = usize;

/// A directed link between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[NodeId; 2]", into = "[NodeId; 2]")]
pub struct Link {
    pub src: NodeId,
    pub dst: NodeId,
}

impl Link {
    pub fn new(src: NodeId, dst: NodeId) -> Self {
        Self { src, dst }
    }
}

impl From<[NodeId; 2]> for Link {
    fn from([src, dst]: [NodeId; 2]) -> Self {
        Self { src, dst }
    }
}

impl From<Link> for [NodeId; 2] {
    fn from(l: Link) -> Self {
        [l.src, l.dst]
    }
}

/// Direction of a skip link relative to the layering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipDirection {
    /// Destination layer is at least two layers below the source layer.
    Forward,
    SameLayer,
    /// Destination layer precedes the source layer.
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkClass {
    Proper,
    Skip(SkipDirection),
}

impl LinkClass {
    pub fn is_skip(self) -> bool {
        matches!(self, LinkClass::Skip(_))
    }
}

/// Something a viewer can click on: a node or a link.
///
/// The textual form (`n12`, `l3-17`) is the id namespace shared by layout
/// bundles, SVG output, and the trial API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementId {
    Node(NodeId),
    Link(Link),
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::Node(n) => write!(f, "n{n}"),
            ElementId::Link(l) => write!(f, "l{}-{}", l.src, l.dst),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed element id `{0}`")]
pub struct ParseElementIdError(pub String);

impl FromStr for ElementId {
    type Err = ParseElementIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseElementIdError(s.to_string());
        if let Some(rest) = s.strip_prefix('n') {
            return rest.parse().map(ElementId::Node).map_err(|_| err());
        }
        if let Some(rest) = s.strip_prefix('l') {
            let (a, b) = rest.split_once('-').ok_or_else(err)?;
            let src = a.parse().map_err(|_| err())?;
            let dst = b.parse().map_err(|_| err())?;
            return Ok(ElementId::Link(Link::new(src, dst)));
        }
        Err(err())
    }
}

impl Serialize for ElementId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A structural problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NoLayers,
    LayerOutOfRange { node: NodeId, layer: usize },
    EmptyLayer { layer: usize },
    UnknownNode { link: Link },
    SelfLoop { node: NodeId },
    DuplicateLink { link: Link },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoLayers => write!(f, "graph has no layers"),
            Violation::LayerOutOfRange { node, layer } => {
                write!(f, "node {node} has out-of-range layer {layer}")
            }
            Violation::EmptyLayer { layer } => write!(f, "layer {layer} is empty"),
            Violation::UnknownNode { link } => {
                write!(f, "link {}->{} names an unknown node", link.src, link.dst)
            }
            Violation::SelfLoop { node } => write!(f, "self-loop on node {node}"),
            Violation::DuplicateLink { link } => {
                write!(f, "duplicate link {}->{}", link.src, link.dst)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid link {}->{}: unknown node", .0.src, .0.dst)]
    InvalidLink(Link),
    #[error("invalid graph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Checks raw graph parts. `layer_of[u]` is node `u`'s 1-based layer.
///
/// Returns every violation found, in a stable order.
pub fn validate(layer_count: usize, layer_of: &[usize], links: &[Link]) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if layer_count == 0 {
        out.push(Violation::NoLayers);
    }
    let mut occupied = vec![false; layer_count + 1];
    for (node, &layer) in layer_of.iter().enumerate() {
        if layer == 0 || layer > layer_count {
            out.push(Violation::LayerOutOfRange { node, layer });
        } else {
            occupied[layer] = true;
        }
    }
    for (layer, &seen) in occupied.iter().enumerate().skip(1) {
        if !seen {
            out.push(Violation::EmptyLayer { layer });
        }
    }
    let n = layer_of.len();
    let mut seen = BTreeSet::new();
    for &link in links {
        if link.src >= n || link.dst >= n {
            out.push(Violation::UnknownNode { link });
            continue;
        }
        if link.src == link.dst {
            out.push(Violation::SelfLoop { node: link.src });
        }
        if !seen.insert(link) {
            out.push(Violation::DuplicateLink { link });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Directed graph with a fixed layer assignment. Immutable once built.
#[derive(Debug, Clone)]
pub struct LayeredGraph {
    layer_count: usize,
    layer_of: Vec<usize>,
    links: Vec<Link>,
    // derived
    layers: Vec<Vec<NodeId>>,
    out_links: Vec<Vec<NodeId>>,
    in_links: Vec<Vec<NodeId>>,
    link_index: HashMap<Link, usize>,
}

impl PartialEq for LayeredGraph {
    fn eq(&self, other: &Self) -> bool {
        self.layer_count == other.layer_count
            && self.layer_of == other.layer_of
            && self.links == other.links
    }
}

impl Eq for LayeredGraph {}

impl LayeredGraph {
    /// Builds a graph, rejecting anything [`validate`] flags.
    pub fn new(layer_count: usize, layer_of: Vec<usize>, links: Vec<Link>) -> Result<Self, GraphError> {
        validate(layer_count, &layer_of, &links).map_err(GraphError::Invalid)?;

        let n = layer_of.len();
        let mut layers = vec![Vec::new(); layer_count];
        for (u, &l) in layer_of.iter().enumerate() {
            layers[l - 1].push(u);
        }
        let mut out_links = vec![Vec::new(); n];
        let mut in_links = vec![Vec::new(); n];
        let mut link_index = HashMap::with_capacity(links.len());
        for (i, l) in links.iter().enumerate() {
            out_links[l.src].push(l.dst);
            in_links[l.dst].push(l.src);
            link_index.insert(*l, i);
        }
        for adj in out_links.iter_mut().chain(in_links.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(Self {
            layer_count,
            layer_of,
            links,
            layers,
            out_links,
            in_links,
            link_index,
        })
    }

    pub fn node_count(&self) -> usize {
        self.layer_of.len()
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    /// 1-based layer of `node`. Panics on an unknown node.
    pub fn layer_of(&self, node: NodeId) -> usize {
        self.layer_of[node]
    }

    pub fn layer_assignment(&self) -> &[usize] {
        &self.layer_of
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Nodes of 1-based `layer` in ascending node-id order.
    pub fn nodes_in_layer(&self, layer: usize) -> &[NodeId] {
        &self.layers[layer - 1]
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// 0-based position of `node` within its layer (node-id order).
    pub fn index_in_layer(&self, node: NodeId) -> usize {
        let layer = self.nodes_in_layer(self.layer_of[node]);
        layer.binary_search(&node).expect("node listed in its own layer")
    }

    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        &self.out_links[node]
    }

    pub fn predecessors(&self, node: NodeId) -> &[NodeId] {
        &self.in_links[node]
    }

    pub fn has_link(&self, link: Link) -> bool {
        self.link_index.contains_key(&link)
    }

    pub fn contains_element(&self, element: ElementId) -> bool {
        match element {
            ElementId::Node(n) => n < self.node_count(),
            ElementId::Link(l) => self.has_link(l),
        }
    }

    /// Classifies any pair of known nodes.
    pub fn classify_link(&self, link: Link) -> Result<LinkClass, GraphError> {
        let n = self.node_count();
        if link.src >= n || link.dst >= n {
            return Err(GraphError::InvalidLink(link));
        }
        let a = self.layer_of[link.src];
        let b = self.layer_of[link.dst];
        Ok(if b == a + 1 {
            LinkClass::Proper
        } else if b > a + 1 {
            LinkClass::Skip(SkipDirection::Forward)
        } else if b == a {
            LinkClass::Skip(SkipDirection::SameLayer)
        } else {
            LinkClass::Skip(SkipDirection::Backward)
        })
    }

    pub fn is_skip(&self, link: Link) -> bool {
        self.layer_of[link.dst] != self.layer_of[link.src] + 1
    }

    /// Number of node pairs that could carry a proper link:
    /// the sum over adjacent layers of `|layer k| * |layer k+1|`.
    pub fn possible_proper_links(&self) -> usize {
        possible_proper_links(&self.layer_sizes())
    }

    /// `(proper, skip)` link counts.
    pub fn link_counts(&self) -> (usize, usize) {
        let skip = self.links.iter().filter(|l| self.is_skip(**l)).count();
        (self.links.len() - skip, skip)
    }
}

/// Sum of products of adjacent layer sizes.
pub fn possible_proper_links(layer_sizes: &[usize]) -> usize {
    layer_sizes.windows(2).map(|w| w[0] * w[1]).sum()
}
