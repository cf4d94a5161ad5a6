//! Layered-graph depictions: random stimulus generation, Quilt, centered
//! matrix and node-link layouts, SVG output, path tracing, and the
//! scheduling and summary pieces of the trial harness.

pub mod bundle;
pub mod color;
pub mod generate;
pub mod graph;
pub mod interchange;
pub mod matrix;
pub mod nodelink;
pub mod path;
pub mod quilt;
pub mod record;
pub mod schedule;
pub mod summary;
pub mod svg;

pub use bundle::{Depiction, LayoutBundle, LayoutError, Markers, Rect, Shape};
pub use generate::{
    generate, generate_until_valid, good_paths, required_link_counts, test_constraints, Experiment, GenError,
    GenerationOptions, PathConstraints, Stimulus, TreatmentSpec, Verdict,
};
pub use graph::{ElementId, LayeredGraph, Link, LinkClass, NodeId, SkipDirection};
pub use matrix::{layout_centered_matrix, matrix_cell_size};
pub use nodelink::{barycentric_sweep, count_crossings, insert_dummy_nodes, layout_node_link, NodeLinkParams};
pub use path::{is_good_path, ClickResult, PathState, Status};
pub use quilt::{layout_quilt, SkipDepiction};
pub use svg::{render, RenderOptions};
