//! Layer chromaticities, node brightness ramps and node labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bundle::LayoutError;
use crate::graph::{LayeredGraph, NodeId};
use crate::quilt::SkipDepiction;

/// 8-bit sRGB color, serialized as `#rrggbb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const BLACK: Rgb = Rgb(0, 0, 0);
    pub const WHITE: Rgb = Rgb(255, 255, 255);
    /// Path highlight; no palette entry produces it.
    pub const HIGHLIGHT: Rgb = Rgb(255, 0, 0);
    /// Marker red, distinct from the highlight.
    pub const MARKER_RED: Rgb = Rgb(208, 0, 0);
    pub const BACKWARD_BLUE: Rgb = Rgb(0, 90, 255);
    pub const LINK_GRAY: Rgb = Rgb(80, 80, 80);
    pub const BAND: Rgb = Rgb(245, 245, 245);
    pub const GRID: Rgb = Rgb(232, 232, 232);

    /// HSV to RGB with `h` in degrees and `s`, `v` in `[0, 1]`; channels are
    /// rounded half away from zero.
    pub fn from_hsv(h: f64, s: f64, v: f64) -> Rgb {
        let h = h.rem_euclid(360.0) / 60.0;
        let c = v * s;
        let x = c * (1.0 - (h % 2.0 - 1.0).abs());
        let (r, g, b) = match h as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = v - c;
        let q = |t: f64| ((t + m) * 255.0).round().clamp(0.0, 255.0) as u8;
        Rgb(q(r), q(g), q(b))
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let hex = s
            .strip_prefix('#')
            .filter(|h| h.len() == 6)
            .ok_or_else(|| serde::de::Error::custom(format!("bad color `{s}`")))?;
        let byte = |i: usize| {
            u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| serde::de::Error::custom(format!("bad color `{s}`")))
        };
        Ok(Rgb(byte(0)?, byte(2)?, byte(4)?))
    }
}

/// Hue (degrees) and saturation identifying a layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chroma {
    pub hue: f64,
    pub saturation: f64,
}

/// Hand-tuned layer chromaticities, ordered so neighbouring layers differ
/// strongly in hue.
pub const PALETTE: [Chroma; 15] = [
    Chroma { hue: 210.0, saturation: 0.80 },
    Chroma { hue: 30.0, saturation: 0.90 },
    Chroma { hue: 120.0, saturation: 0.65 },
    Chroma { hue: 320.0, saturation: 0.70 },
    Chroma { hue: 55.0, saturation: 0.85 },
    Chroma { hue: 265.0, saturation: 0.60 },
    Chroma { hue: 180.0, saturation: 0.75 },
    Chroma { hue: 350.0, saturation: 0.55 },
    Chroma { hue: 90.0, saturation: 0.80 },
    Chroma { hue: 235.0, saturation: 0.45 },
    Chroma { hue: 15.0, saturation: 0.45 },
    Chroma { hue: 150.0, saturation: 0.90 },
    Chroma { hue: 295.0, saturation: 0.40 },
    Chroma { hue: 195.0, saturation: 0.35 },
    Chroma { hue: 70.0, saturation: 0.40 },
];

pub const LAYER_LETTERS: &str = "ABCDEFGHIJKLMNO";

/// Lowest brightness of the color-only ramp.
pub const BRIGHTNESS_FLOOR: f64 = 0.35;
/// Brightness used for every node in mixed Quilts.
pub const MIXED_BRIGHTNESS: f64 = 0.85;
/// Light neutral fill for text-only Quilts.
pub const NEUTRAL_BRIGHTNESS: f64 = 0.92;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorMap {
    pub style: SkipDepiction,
    /// Chromaticity per layer (index 0 is layer 1). Unused by text-only fills.
    pub layer_chroma: Vec<Chroma>,
    /// Brightness per node id.
    pub brightness: Vec<f64>,
    /// 1-based position of each node within its layer.
    pub number: Vec<usize>,
    layer_of: Vec<usize>,
}

pub fn assign_colors(g: &LayeredGraph, style: SkipDepiction) -> Result<ColorMap, LayoutError> {
    let layers = g.layer_count();
    if layers > PALETTE.len() {
        return Err(LayoutError::TooManyLayers(layers));
    }
    let n = g.node_count();
    let mut brightness = vec![0.0; n];
    let mut number = vec![0; n];
    for layer in 1..=layers {
        let nodes = g.nodes_in_layer(layer);
        for (i, &u) in nodes.iter().enumerate() {
            number[u] = i + 1;
            brightness[u] = match style {
                SkipDepiction::ColorOnly => brightness_ramp(i, nodes.len()),
                SkipDepiction::Mixed => MIXED_BRIGHTNESS,
                SkipDepiction::TextOnly => NEUTRAL_BRIGHTNESS,
            };
        }
    }
    Ok(ColorMap {
        style,
        layer_chroma: PALETTE[..layers].to_vec(),
        brightness,
        number,
        layer_of: g.layer_assignment().to_vec(),
    })
}

/// Linear ramp from 1.0 down to the floor; a lone node gets full brightness.
pub fn brightness_ramp(index: usize, len: usize) -> f64 {
    if len <= 1 {
        return 1.0;
    }
    1.0 - (1.0 - BRIGHTNESS_FLOOR) * index as f64 / (len - 1) as f64
}

impl ColorMap {
    pub fn layer_letter(layer: usize) -> char {
        LAYER_LETTERS.as_bytes()[layer - 1] as char
    }

    /// Fill of a layer's chromaticity at full brightness.
    pub fn layer_color(&self, layer: usize) -> Rgb {
        let c = self.layer_chroma[layer - 1];
        Rgb::from_hsv(c.hue, c.saturation, MIXED_BRIGHTNESS)
    }

    /// Pale tint of a layer, for backgrounds.
    pub fn layer_tint(&self, layer: usize) -> Rgb {
        let c = self.layer_chroma[layer - 1];
        Rgb::from_hsv(c.hue, c.saturation * 0.18, 1.0)
    }

    /// Cell fill of a node.
    pub fn node_fill(&self, node: NodeId) -> Rgb {
        match self.style {
            SkipDepiction::TextOnly => Rgb::from_hsv(0.0, 0.0, NEUTRAL_BRIGHTNESS),
            _ => {
                let c = self.layer_chroma[self.layer_of[node] - 1];
                Rgb::from_hsv(c.hue, c.saturation, self.brightness[node])
            }
        }
    }

    /// Text drawn on a node's cell and on skip glyphs pointing at it.
    pub fn node_label(&self, node: NodeId) -> Option<String> {
        match self.style {
            SkipDepiction::ColorOnly => None,
            SkipDepiction::Mixed => Some(self.number[node].to_string()),
            SkipDepiction::TextOnly => Some(format!(
                "{}{}",
                Self::layer_letter(self.layer_of[node]),
                self.number[node]
            )),
        }
    }
}
