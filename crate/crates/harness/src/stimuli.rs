//! Stimulus generation and per-depiction layout with the display settings
//! of each study.

use quilts_core::generate::GenerationOptions;
use quilts_core::{
    generate_until_valid, layout_centered_matrix, layout_node_link, layout_quilt, Depiction, Experiment, GenError,
    LayeredGraph, LayoutBundle, LayoutError, Markers, NodeLinkParams, Stimulus, TreatmentSpec,
};

pub fn stimulus(spec: &TreatmentSpec, seed: u64) -> Result<Stimulus, GenError> {
    generate_until_valid(spec, seed, &GenerationOptions::for_experiment(spec.experiment))
}

/// Lays out `g` for `depiction`. Quilts and matrices share the study's cell
/// size; node-link diagrams fill the study's display.
pub fn bundle_for(
    g: &LayeredGraph,
    depiction: Depiction,
    experiment: Experiment,
    markers: Option<Markers>,
) -> Result<LayoutBundle, LayoutError> {
    let display = experiment.default_display();
    Ok(match depiction {
        Depiction::Quilt(style) => layout_quilt(g, style, display.cell_size)?.to_bundle(markers),
        Depiction::CenteredMatrix => layout_centered_matrix(g, display.cell_size)?.to_bundle(markers),
        Depiction::NodeLink => {
            let params = NodeLinkParams {
                width: display.width,
                height: display.height,
                ..NodeLinkParams::default()
            };
            layout_node_link(g, &params)?.to_bundle(markers)
        }
    })
}
