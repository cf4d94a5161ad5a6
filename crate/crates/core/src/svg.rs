//! SVG output for layout bundles.
//!
//! The document has three groups: `base` (the bundle's shapes in order),
//! `overlay` (red copies of highlighted elements, omitted when nothing is
//! highlighted) and `markers` (source and destination). Numbers use two
//! decimals, so identical inputs give identical bytes.

use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use crate::bundle::{Depiction, LayoutBundle, Markers, PathCommand, Rect, Shape};
use crate::color::Rgb;
use crate::graph::ElementId;
use crate::quilt::SkipDepiction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("shape {index} ({bounds:?}) lies outside the {width}x{height} canvas")]
    ShapeOutOfBounds {
        index: usize,
        bounds: Rect,
        width: f64,
        height: f64,
    },
    #[error("marker node {0} has no shape in the bundle")]
    MissingMarkerNode(usize),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderOptions {
    pub highlight: BTreeSet<ElementId>,
    /// Overrides the bundle's own markers.
    pub markers: Option<Markers>,
    /// Canvas size; defaults to the bundle's bounding box.
    pub canvas: Option<(f64, f64)>,
}

/// Dot radius of a color-only marker, as a fraction of the cell side.
pub const MARKER_DOT: f64 = 0.22;
/// Label height as a fraction of the cell side.
pub const LABEL_SCALE: f64 = 0.6;

struct F(f64);

impl std::fmt::Display for F {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // avoid "-0.00"
        let v = if self.0.abs() < 0.005 { 0.0 } else { self.0 };
        write!(f, "{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn id_attr(id: Option<ElementId>, prefix: &str) -> String {
    id.map(|id| format!(r#" id="{prefix}{id}""#)).unwrap_or_default()
}

fn text(out: &mut String, x: f64, y: f64, size: f64, fill: Rgb, body: &str, bold: bool) {
    let weight = if bold { r#" font-weight="bold""# } else { "" };
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="{}" font-family="sans-serif" text-anchor="middle" dominant-baseline="central" fill="{fill}"{weight}>{}</text>"#,
        F(x),
        F(y),
        F(size),
        escape(body)
    );
}

fn path_data(commands: &[PathCommand]) -> String {
    let parts: Vec<String> = commands
        .iter()
        .map(|c| match *c {
            PathCommand::Move { x, y } => format!("M{} {}", F(x), F(y)),
            PathCommand::Line { x, y } => format!("L{} {}", F(x), F(y)),
            PathCommand::Quad { cx, cy, x, y } => format!("Q{} {} {} {}", F(cx), F(cy), F(x), F(y)),
        })
        .collect();
    parts.join(" ")
}

fn base_shape(out: &mut String, shape: &Shape) {
    match shape {
        Shape::Rect {
            rect,
            fill,
            stroke,
            label,
            id,
        } => {
            let stroke = stroke.map(|s| format!(r#" stroke="{s}""#)).unwrap_or_default();
            let _ = writeln!(
                out,
                r#"<rect{} x="{}" y="{}" width="{}" height="{}" fill="{fill}"{stroke}/>"#,
                id_attr(*id, ""),
                F(rect.x),
                F(rect.y),
                F(rect.w),
                F(rect.h)
            );
            if let Some(label) = label {
                let (cx, cy) = rect.center();
                text(out, cx, cy, LABEL_SCALE * rect.w.min(rect.h), Rgb::BLACK, label, false);
            }
        }
        Shape::Circle {
            cx,
            cy,
            r,
            fill,
            label,
            id,
        } => {
            let _ = writeln!(
                out,
                r#"<circle{} cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
                id_attr(*id, ""),
                F(*cx),
                F(*cy),
                F(*r)
            );
            if let Some(label) = label {
                text(out, *cx, *cy, 1.2 * r, Rgb::BLACK, label, false);
            }
        }
        Shape::Text {
            x,
            y,
            size,
            text: body,
            fill,
        } => text(out, *x, *y, *size, *fill, body, false),
        Shape::Path {
            commands,
            stroke,
            width,
            style,
            id,
        } => {
            let _ = writeln!(
                out,
                r#"<path{} class="{}" d="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
                id_attr(*id, ""),
                style.as_str(),
                path_data(commands),
                F(*width)
            );
        }
    }
}

fn overlay_shape(out: &mut String, shape: &Shape) {
    let red = Rgb::HIGHLIGHT;
    match shape {
        Shape::Rect { rect, id, .. } => {
            let sw = 0.15 * rect.w.min(rect.h);
            let _ = writeln!(
                out,
                r#"<rect{} x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{red}" stroke-width="{}"/>"#,
                id_attr(*id, "hl-"),
                F(rect.x + sw / 2.0),
                F(rect.y + sw / 2.0),
                F(rect.w - sw),
                F(rect.h - sw),
                F(sw)
            );
        }
        Shape::Circle { cx, cy, r, id, .. } => {
            let _ = writeln!(
                out,
                r#"<circle{} cx="{}" cy="{}" r="{}" fill="{red}"/>"#,
                id_attr(*id, "hl-"),
                F(*cx),
                F(*cy),
                F(*r)
            );
        }
        Shape::Path {
            commands, width, id, ..
        } => {
            let _ = writeln!(
                out,
                r#"<path{} d="{}" fill="none" stroke="{red}" stroke-width="{}"/>"#,
                id_attr(*id, "hl-"),
                path_data(commands),
                F(2.0 * width)
            );
        }
        Shape::Text { .. } => {}
    }
}

fn marker(out: &mut String, depiction: Depiction, role: &str, shape: &Shape, node: usize) {
    let rect = shape.bounds();
    let (cx, cy) = rect.center();
    let side = rect.w.min(rect.h);
    let label = shape.label().map(str::to_string).unwrap_or_else(|| node.to_string());
    match depiction {
        Depiction::Quilt(SkipDepiction::ColorOnly) => {
            let _ = writeln!(
                out,
                r#"<circle id="marker-{role}" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                F(cx),
                F(cy),
                F(MARKER_DOT * side),
                Rgb::WHITE
            );
        }
        Depiction::Quilt(style) => {
            let fill = if style == SkipDepiction::Mixed { Rgb::WHITE } else { Rgb::MARKER_RED };
            let _ = writeln!(out, r#"<g id="marker-{role}">"#);
            text(out, cx, cy, LABEL_SCALE * side, fill, &label, true);
            let _ = writeln!(out, "</g>");
        }
        Depiction::CenteredMatrix | Depiction::NodeLink => {
            let fill = if role == "source" { Rgb::MARKER_RED } else { Rgb::BLACK };
            let _ = writeln!(out, r#"<g id="marker-{role}">"#);
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
                F(rect.x),
                F(rect.y),
                F(rect.w),
                F(rect.h)
            );
            text(out, cx, cy, LABEL_SCALE * side, Rgb::WHITE, &label, true);
            let _ = writeln!(out, "</g>");
        }
    }
}

pub fn render(bundle: &LayoutBundle, opts: &RenderOptions) -> Result<String, RenderError> {
    let (width, height) = opts.canvas.unwrap_or((bundle.width, bundle.height));
    let canvas = Rect::new(0.0, 0.0, width, height);
    for (index, shape) in bundle.shapes.iter().enumerate() {
        let bounds = shape.bounds();
        if !canvas.contains(&bounds) {
            return Err(RenderError::ShapeOutOfBounds {
                index,
                bounds,
                width,
                height,
            });
        }
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-depiction="{}">"#,
        bundle.depiction,
        w = F(width),
        h = F(height)
    );
    out.push_str("<g id=\"base\">\n");
    for shape in &bundle.shapes {
        base_shape(&mut out, shape);
    }
    out.push_str("</g>\n");

    if !opts.highlight.is_empty() {
        out.push_str("<g id=\"overlay\">\n");
        for shape in &bundle.shapes {
            if shape.id().is_some_and(|id| opts.highlight.contains(&id)) {
                overlay_shape(&mut out, shape);
            }
        }
        out.push_str("</g>\n");
    }

    if let Some(m) = opts.markers.or(bundle.markers) {
        out.push_str("<g id=\"markers\">\n");
        for (role, node) in [("source", m.source), ("destination", m.destination)] {
            let shape = bundle
                .shape_for(ElementId::Node(node))
                .ok_or(RenderError::MissingMarkerNode(node))?;
            marker(&mut out, bundle.depiction, role, shape, node);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
