//! Quilt layout.
//!
//! A Quilt chains the proper-link submatrices of a layered graph into a
//! staircase. Odd layers are horizontal strips (one column per node) and even
//! layers vertical strips (one row per node). Layer 1 sits at the top left;
//! submatrix `M_k` for the proper links from layer `k` to layer `k + 1` lies
//! where the column range of the horizontal strip meets the row range of the
//! vertical strip:
//!
//! ```text
//!  [ L1 ]
//!  [ M1 ][L2][ M2 ]
//!              [ L3 ]
//!              [ M3 ][L4] ...
//! ```
//!
//! Each node thus owns one grid line (a column for odd layers, a row for even
//! layers) running through the submatrices on both sides of its strip. Skip
//! links cannot be placed by position, so every layer with outgoing skip
//! links gets a *skip band* appended to the far end of its outgoing
//! submatrix (or to its strip, for the last layer). Skip link `u -> v` takes
//! the next free slot on `u`'s line and is drawn with `v`'s encoding.
//!
//! Geometry is computed on an integer cell grid and scaled by `cell_size`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bundle::{Depiction, LayoutBundle, LayoutError, Markers, Rect, Shape};
use crate::color::{assign_colors, ColorMap, Rgb};
use crate::graph::{ElementId, LayeredGraph, Link, NodeId};

/// How skip-link destinations are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipDepiction {
    /// Layer by chromaticity, node by brightness.
    ColorOnly,
    /// Layer by chromaticity, node by number.
    Mixed,
    /// Layer by letter, node by number.
    TextOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn of_layer(layer: usize) -> Self {
        if layer % 2 == 1 {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeCell {
    pub node: NodeId,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub layer: usize,
    pub orientation: Orientation,
    pub extent: Rect,
    pub cells: Vec<NodeCell>,
}

/// Proper links from `layer` to `layer + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submatrix {
    pub layer: usize,
    pub rect: Rect,
    pub rows: usize,
    pub cols: usize,
}

/// Skip cells of the links leaving `layer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipBand {
    pub layer: usize,
    pub rect: Rect,
    pub slots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlyphKind {
    Proper,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkGlyph {
    pub link: Link,
    pub kind: GlyphKind,
    pub cell: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuiltLayout {
    pub style: SkipDepiction,
    pub cell_size: f64,
    pub strips: Vec<Strip>,
    pub submatrices: Vec<Submatrix>,
    pub skip_bands: Vec<SkipBand>,
    pub glyphs: Vec<LinkGlyph>,
    pub width: f64,
    pub height: f64,
    pub colors: ColorMap,
}

/// Grid origin of each layer's strip, in cells.
fn strip_origins(sizes: &[usize]) -> Vec<(usize, usize)> {
    let mut origins = Vec::with_capacity(sizes.len());
    let (mut x, mut y) = (0, 0);
    for (i, &n) in sizes.iter().enumerate() {
        if i % 2 == 0 {
            // horizontal strip at (x, y); the next vertical strip hangs off its right end
            origins.push((x, y));
        } else {
            let prev = sizes[i - 1];
            origins.push((x + prev, y + 1));
            x += prev + 1;
            y += 1 + n;
        }
    }
    origins
}

pub fn layout_quilt(g: &LayeredGraph, style: SkipDepiction, cell_size: f64) -> Result<QuiltLayout, LayoutError> {
    let sizes = g.layer_sizes();
    if sizes.iter().any(|&s| s == 0) {
        return Err(LayoutError::DegenerateGraph);
    }
    let colors = assign_colors(g, style)?;
    let layers = sizes.len();
    let origins = strip_origins(&sizes);
    let cell = |x: usize, y: usize| Rect::new(x as f64, y as f64, 1.0, 1.0);

    // the grid line each node owns: a column for odd layers, a row for even
    let mut line = vec![0usize; g.node_count()];
    let mut strips = Vec::with_capacity(layers);
    for layer in 1..=layers {
        let (x, y) = origins[layer - 1];
        let n = sizes[layer - 1];
        let orientation = Orientation::of_layer(layer);
        let extent = match orientation {
            Orientation::Horizontal => Rect::new(x as f64, y as f64, n as f64, 1.0),
            Orientation::Vertical => Rect::new(x as f64, y as f64, 1.0, n as f64),
        };
        let cells = g
            .nodes_in_layer(layer)
            .iter()
            .enumerate()
            .map(|(i, &node)| {
                let rect = match orientation {
                    Orientation::Horizontal => {
                        line[node] = x + i;
                        cell(x + i, y)
                    }
                    Orientation::Vertical => {
                        line[node] = y + i;
                        cell(x, y + i)
                    }
                };
                NodeCell { node, rect }
            })
            .collect();
        strips.push(Strip {
            layer,
            orientation,
            extent,
            cells,
        });
    }

    let mut submatrices = Vec::with_capacity(layers.saturating_sub(1));
    for layer in 1..layers {
        let (h, v) = if layer % 2 == 1 { (layer, layer + 1) } else { (layer + 1, layer) };
        let hx = strips[h - 1].extent;
        let vy = strips[v - 1].extent;
        submatrices.push(Submatrix {
            layer,
            rect: Rect::new(hx.x, vy.y, hx.w, vy.h),
            rows: sizes[v - 1],
            cols: sizes[h - 1],
        });
    }

    let mut glyphs = Vec::with_capacity(g.links().len());
    let mut skips_by_layer: BTreeMap<usize, BTreeMap<NodeId, Vec<Link>>> = BTreeMap::new();
    for &link in g.links() {
        let (a, b) = (g.layer_of(link.src), g.layer_of(link.dst));
        if b == a + 1 {
            let (col_node, row_node) = if a % 2 == 1 { (link.src, link.dst) } else { (link.dst, link.src) };
            glyphs.push(LinkGlyph {
                link,
                kind: GlyphKind::Proper,
                cell: cell(line[col_node], line[row_node]),
            });
        } else {
            skips_by_layer.entry(a).or_default().entry(link.src).or_default().push(link);
        }
    }

    let mut skip_bands = Vec::new();
    for (&layer, by_node) in &skips_by_layer {
        let slots = by_node.values().map(Vec::len).max().unwrap_or(0);
        let strip = strips[layer - 1].extent;
        // the band starts where the layer's outgoing submatrix ends
        let end = if layer < layers { submatrices[layer - 1].rect } else { strip };
        let rect = match Orientation::of_layer(layer) {
            Orientation::Horizontal => Rect::new(strip.x, end.bottom(), strip.w, slots as f64),
            Orientation::Vertical => Rect::new(end.right(), strip.y, slots as f64, strip.h),
        };
        for (&src, links) in by_node {
            let mut sorted = links.clone();
            sorted.sort_unstable();
            for (slot, link) in sorted.into_iter().enumerate() {
                let at = match Orientation::of_layer(layer) {
                    Orientation::Horizontal => cell(line[src], rect.y as usize + slot),
                    Orientation::Vertical => cell(rect.x as usize + slot, line[src]),
                };
                glyphs.push(LinkGlyph {
                    link,
                    kind: GlyphKind::Skip,
                    cell: at,
                });
            }
        }
        skip_bands.push(SkipBand { layer, rect, slots });
    }

    let mut width: f64 = 0.0;
    let mut height: f64 = 0.0;
    for r in strips
        .iter()
        .map(|s| &s.extent)
        .chain(submatrices.iter().map(|m| &m.rect))
        .chain(skip_bands.iter().map(|b| &b.rect))
    {
        width = width.max(r.right());
        height = height.max(r.bottom());
    }

    let k = cell_size;
    for s in &mut strips {
        s.extent = s.extent.scaled(k);
        for c in &mut s.cells {
            c.rect = c.rect.scaled(k);
        }
    }
    for m in &mut submatrices {
        m.rect = m.rect.scaled(k);
    }
    for b in &mut skip_bands {
        b.rect = b.rect.scaled(k);
    }
    for gl in &mut glyphs {
        gl.cell = gl.cell.scaled(k);
    }

    Ok(QuiltLayout {
        style,
        cell_size,
        strips,
        submatrices,
        skip_bands,
        glyphs,
        width: width * k,
        height: height * k,
        colors,
    })
}

/// True when the layout's bounding box fits inside `width x height`.
pub fn fits_display(layout: &QuiltLayout, width: f64, height: f64) -> bool {
    layout.fits_display(width, height)
}

impl QuiltLayout {
    pub fn fits_display(&self, width: f64, height: f64) -> bool {
        self.width <= width && self.height <= height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn node_cell(&self, node: NodeId) -> Option<Rect> {
        self.strips
            .iter()
            .flat_map(|s| &s.cells)
            .find(|c| c.node == node)
            .map(|c| c.rect)
    }

    pub fn to_bundle(&self, markers: Option<Markers>) -> LayoutBundle {
        let k = self.cell_size;
        let mut shapes = Vec::new();
        for m in &self.submatrices {
            shapes.push(Shape::Rect {
                rect: m.rect,
                fill: Rgb::WHITE,
                stroke: Some(Rgb::GRID),
                label: None,
                id: None,
            });
        }
        for b in &self.skip_bands {
            shapes.push(Shape::Rect {
                rect: b.rect,
                fill: Rgb::BAND,
                stroke: Some(Rgb::GRID),
                label: None,
                id: None,
            });
        }
        for s in &self.strips {
            for c in &s.cells {
                shapes.push(Shape::Rect {
                    rect: c.rect,
                    fill: self.colors.node_fill(c.node),
                    stroke: Some(Rgb::WHITE),
                    label: self.colors.node_label(c.node),
                    id: Some(ElementId::Node(c.node)),
                });
            }
        }
        for gl in &self.glyphs {
            let (cx, cy) = gl.cell.center();
            let (fill, label) = match gl.kind {
                GlyphKind::Proper => (Rgb::BLACK, None),
                GlyphKind::Skip => {
                    let dst = gl.link.dst;
                    match self.style {
                        SkipDepiction::ColorOnly => (self.colors.node_fill(dst), None),
                        _ => (self.colors.node_fill(dst), self.colors.node_label(dst)),
                    }
                }
            };
            shapes.push(Shape::Circle {
                cx,
                cy,
                r: 0.4 * k,
                fill,
                label,
                id: Some(ElementId::Link(gl.link)),
            });
        }
        LayoutBundle::new(Depiction::Quilt(self.style), self.width, self.height, k, shapes).with_markers(markers)
    }
}
