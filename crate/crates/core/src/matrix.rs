//! Centered-matrix layout: nodes on the diagonal, grouped by layer.

use serde::{Deserialize, Serialize};

use crate::bundle::{Depiction, LayoutBundle, LayoutError, Markers, Rect, Shape};
use crate::color::{assign_colors, ColorMap, Rgb};
use crate::graph::{ElementId, LayeredGraph, Link, NodeId};
use crate::quilt::SkipDepiction;

/// Cell size that makes a `max_nodes` matrix exactly `display_height` tall.
pub fn matrix_cell_size(display_height: f64, max_nodes: usize) -> f64 {
    assert!(max_nodes > 0, "max_nodes must be positive");
    display_height / max_nodes as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerBlock {
    pub layer: usize,
    /// First diagonal index of the block.
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkCell {
    pub link: Link,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteredMatrixLayout {
    pub cell_size: f64,
    /// Diagonal index of every node id.
    pub position: Vec<usize>,
    pub blocks: Vec<LayerBlock>,
    pub link_cells: Vec<LinkCell>,
    pub width: f64,
    pub height: f64,
    colors: ColorMap,
}

pub fn layout_centered_matrix(g: &LayeredGraph, cell_size: f64) -> Result<CenteredMatrixLayout, LayoutError> {
    let n = g.node_count();
    let mut position = vec![0; n];
    let mut blocks = Vec::with_capacity(g.layer_count());
    let mut next = 0;
    for layer in 1..=g.layer_count() {
        let nodes = g.nodes_in_layer(layer);
        if nodes.is_empty() {
            return Err(LayoutError::DegenerateGraph);
        }
        blocks.push(LayerBlock {
            layer,
            start: next,
            len: nodes.len(),
        });
        for &u in nodes {
            position[u] = next;
            next += 1;
        }
    }
    let link_cells = g
        .links()
        .iter()
        .map(|&link| LinkCell {
            link,
            row: position[link.src],
            col: position[link.dst],
        })
        .collect();
    let side = n as f64 * cell_size;
    Ok(CenteredMatrixLayout {
        cell_size,
        position,
        blocks,
        link_cells,
        width: side,
        height: side,
        colors: assign_colors(g, SkipDepiction::Mixed)?,
    })
}

impl CenteredMatrixLayout {
    pub fn cell_rect(&self, row: usize, col: usize) -> Rect {
        let k = self.cell_size;
        Rect::new(col as f64 * k, row as f64 * k, k, k)
    }

    pub fn node_rect(&self, node: NodeId) -> Rect {
        let p = self.position[node];
        self.cell_rect(p, p)
    }

    pub fn to_bundle(&self, markers: Option<Markers>) -> LayoutBundle {
        let k = self.cell_size;
        let mut shapes = Vec::new();
        for b in &self.blocks {
            let s = b.start as f64 * k;
            let len = b.len as f64 * k;
            shapes.push(Shape::Rect {
                rect: Rect::new(s, s, len, len),
                fill: self.colors.layer_tint(b.layer),
                stroke: Some(Rgb::GRID),
                label: None,
                id: None,
            });
        }
        let mut nodes: Vec<NodeId> = (0..self.position.len()).collect();
        nodes.sort_by_key(|&u| self.position[u]);
        for u in nodes {
            shapes.push(Shape::Rect {
                rect: self.node_rect(u),
                fill: self.colors.node_fill(u),
                stroke: Some(Rgb::WHITE),
                label: None,
                id: Some(ElementId::Node(u)),
            });
        }
        for c in &self.link_cells {
            let r = self.cell_rect(c.row, c.col);
            let (cx, cy) = r.center();
            shapes.push(Shape::Circle {
                cx,
                cy,
                r: 0.4 * k,
                fill: Rgb::BLACK,
                label: None,
                id: Some(ElementId::Link(c.link)),
            });
        }
        LayoutBundle::new(Depiction::CenteredMatrix, self.width, self.height, k, shapes).with_markers(markers)
    }

    /// Within-layer label number used by source/destination markers.
    pub fn node_number(&self, node: NodeId) -> usize {
        self.colors.number[node]
    }
}
