//! Layout bundle: the flat shape list every layout exports and the renderer
//! and trial UI consume.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Rgb;
use crate::graph::{ElementId, NodeId};
use crate::quilt::SkipDepiction;

pub const BUNDLE_FORMAT: &str = "quilts.bundle/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("graph has an empty layer")]
    DegenerateGraph,
    #[error("{0} layers exceed the 15-entry palette")]
    TooManyLayers(usize),
}

/// Axis-aligned rectangle; `x, y` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// True when the interiors overlap; touching edges do not count.
    pub fn overlaps(&self, other: &Rect) -> bool {
        const EPS: f64 = 1e-9;
        self.x < other.right() - EPS
            && other.x < self.right() - EPS
            && self.y < other.bottom() - EPS
            && other.y < self.bottom() - EPS
    }

    pub fn contains(&self, other: &Rect) -> bool {
        const EPS: f64 = 1e-9;
        other.x >= self.x - EPS
            && other.y >= self.y - EPS
            && other.right() <= self.right() + EPS
            && other.bottom() <= self.bottom() + EPS
    }

    pub fn scaled(&self, k: f64) -> Rect {
        Rect::new(self.x * k, self.y * k, self.w * k, self.h * k)
    }
}

/// Which of the five depictions a bundle shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depiction {
    Quilt(SkipDepiction),
    CenteredMatrix,
    NodeLink,
}

impl Depiction {
    pub const ALL: [Depiction; 5] = [
        Depiction::Quilt(SkipDepiction::ColorOnly),
        Depiction::Quilt(SkipDepiction::Mixed),
        Depiction::Quilt(SkipDepiction::TextOnly),
        Depiction::CenteredMatrix,
        Depiction::NodeLink,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Depiction::Quilt(SkipDepiction::ColorOnly) => "quilt-color",
            Depiction::Quilt(SkipDepiction::Mixed) => "quilt-mixed",
            Depiction::Quilt(SkipDepiction::TextOnly) => "quilt-text",
            Depiction::CenteredMatrix => "matrix",
            Depiction::NodeLink => "node-link",
        }
    }
}

impl fmt::Display for Depiction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown depiction `{0}`")]
pub struct ParseDepictionError(pub String);

impl FromStr for Depiction {
    type Err = ParseDepictionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Depiction::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| ParseDepictionError(s.to_string()))
    }
}

impl Serialize for Depiction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Depiction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Styling class of a drawn link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkStyle {
    Normal,
    Backward,
    SameLayer,
}

impl LinkStyle {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkStyle::Normal => "normal",
            LinkStyle::Backward => "backward",
            LinkStyle::SameLayer => "same-layer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum PathCommand {
    Move { x: f64, y: f64 },
    Line { x: f64, y: f64 },
    /// Quadratic curve through control point `(cx, cy)`.
    Quad { cx: f64, cy: f64, x: f64, y: f64 },
}

impl PathCommand {
    fn points(&self) -> Vec<(f64, f64)> {
        match *self {
            PathCommand::Move { x, y } | PathCommand::Line { x, y } => vec![(x, y)],
            PathCommand::Quad { cx, cy, x, y } => vec![(cx, cy), (x, y)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Shape {
    Rect {
        rect: Rect,
        fill: Rgb,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stroke: Option<Rgb>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<ElementId>,
    },
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
        fill: Rgb,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<ElementId>,
    },
    Text {
        x: f64,
        y: f64,
        size: f64,
        text: String,
        fill: Rgb,
    },
    Path {
        commands: Vec<PathCommand>,
        stroke: Rgb,
        width: f64,
        style: LinkStyle,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<ElementId>,
    },
}

impl Shape {
    pub fn id(&self) -> Option<ElementId> {
        match self {
            Shape::Rect { id, .. } | Shape::Circle { id, .. } | Shape::Path { id, .. } => *id,
            Shape::Text { .. } => None,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Shape::Rect { label, .. } | Shape::Circle { label, .. } => label.as_deref(),
            _ => None,
        }
    }

    /// Axis-aligned bounds; text is treated as a point at its anchor.
    pub fn bounds(&self) -> Rect {
        match self {
            Shape::Rect { rect, .. } => *rect,
            Shape::Circle { cx, cy, r, .. } => Rect::new(cx - r, cy - r, 2.0 * r, 2.0 * r),
            Shape::Text { x, y, .. } => Rect::new(*x, *y, 0.0, 0.0),
            Shape::Path { commands, .. } => {
                let pts: Vec<(f64, f64)> = commands.iter().flat_map(PathCommand::points).collect();
                let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
                let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                for (x, y) in pts {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
                Rect::new(x0, y0, x1 - x0, y1 - y0)
            }
        }
    }
}

/// Source and destination of the trial shown in the bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Markers {
    pub source: NodeId,
    pub destination: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutBundle {
    pub format: String,
    pub depiction: Depiction,
    pub width: f64,
    pub height: f64,
    pub cell_size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markers: Option<Markers>,
    pub shapes: Vec<Shape>,
}

impl LayoutBundle {
    pub fn new(depiction: Depiction, width: f64, height: f64, cell_size: f64, shapes: Vec<Shape>) -> Self {
        Self {
            format: BUNDLE_FORMAT.to_string(),
            depiction,
            width,
            height,
            cell_size,
            markers: None,
            shapes,
        }
    }

    pub fn with_markers(mut self, markers: Option<Markers>) -> Self {
        self.markers = markers;
        self
    }

    pub fn shape_for(&self, id: ElementId) -> Option<&Shape> {
        self.shapes.iter().find(|s| s.id() == Some(id))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }
}
