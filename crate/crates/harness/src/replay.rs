//! Re-runs logged click scripts through the path engine.

use std::sync::Arc;
use std::time::Duration;

use quilts_core::path::{replay, ClickEvent, LoggedResult};
use quilts_core::record::{Outcome, TrialRecord};
use quilts_core::{GenError, Status};
use serde::Serialize;

use crate::stimuli;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub trial_id: String,
    pub outcome: Outcome,
    /// Status of the path engine after the last click.
    pub replayed: Status,
    /// Sequence numbers whose replayed result differs from the log.
    pub mismatches: Vec<u64>,
    /// False when the regenerated stimulus has other endpoints than the record.
    pub endpoints_match: bool,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        let outcome_ok = match self.outcome {
            Outcome::Completed => matches!(self.replayed, Status::Completed { .. }),
            Outcome::TimedOut | Outcome::Abandoned => !matches!(self.replayed, Status::Completed { .. }),
        };
        self.endpoints_match && self.mismatches.is_empty() && outcome_ok
    }
}

/// Regenerates the record's stimulus from its spec and seed and replays its
/// clicks from time zero.
pub fn replay_record(r: &TrialRecord) -> Result<ReplayReport, GenError> {
    let stim = stimuli::stimulus(&r.spec, r.seed)?;
    let constraints = r.spec.experiment.constraints(stim.graph.layer_count(), r.source, r.destination);
    let events: Vec<ClickEvent> = r
        .clicks
        .iter()
        .map(|c| ClickEvent {
            element: c.element,
            at: c.at_ms,
        })
        .collect();
    let (state, results) = replay(Arc::new(stim.graph), constraints, Duration::ZERO, &events);
    let mismatches = r
        .clicks
        .iter()
        .zip(results)
        .filter(|(c, got)| c.result != LoggedResult::from(*got))
        .map(|(c, _)| c.seq)
        .collect();
    Ok(ReplayReport {
        trial_id: r.trial_id.clone(),
        outcome: r.outcome,
        replayed: state.status(),
        mismatches,
        endpoints_match: stim.source == r.source && stim.destination == r.destination,
    })
}
