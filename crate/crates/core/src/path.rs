//! Interactive path tracing.
//!
//! A trace grows from two ends: the forward fringe starts at the source and
//! follows out-links, the backward fringe ends at the destination and follows
//! in-links. Clicking a highlighted element backtracks its fringe to just
//! before that element. When the fringes meet and the joined path is good,
//! the trace completes on its own.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::PathConstraints;
use crate::graph::{ElementId, LayeredGraph, Link, NodeId};

/// Trials halt after four minutes.
pub const TIME_LIMIT: Duration = Duration::from_secs(240);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Active,
    Completed {
        #[serde(with = "millis")]
        elapsed: Duration,
    },
    TimedOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    UnknownElement,
    /// Not reachable from either tip through one link.
    NotAdjacent,
    /// More than one link could carry the clicked node.
    Ambiguous,
    /// The element would revisit a node already on the trace.
    Revisit,
    /// The fringes already meet but the path is not good; only backtracking is allowed.
    Joined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ClickResult {
    Extended,
    Backtracked,
    Rejected { reason: Rejection },
    Completed {
        #[serde(with = "millis")]
        elapsed: Duration,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathError {
    #[error("the trial has already ended")]
    ClickAfterEnd,
    #[error("the trial timed out")]
    TimedOut,
    #[error("the link sequence is not a source-to-destination walk")]
    NotAPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fringe {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathState {
    graph: Arc<LayeredGraph>,
    constraints: PathConstraints,
    /// Starts at the source.
    forward: Vec<NodeId>,
    /// Ends at the destination, stored in path order.
    backward: Vec<NodeId>,
    start: Duration,
    status: Status,
}

impl PathState {
    pub fn new(graph: Arc<LayeredGraph>, constraints: PathConstraints, start: Duration) -> Self {
        Self {
            graph,
            forward: vec![constraints.source],
            backward: vec![constraints.destination],
            constraints,
            start,
            status: Status::Active,
        }
    }

    pub fn graph(&self) -> &LayeredGraph {
        &self.graph
    }

    pub fn constraints(&self) -> &PathConstraints {
        &self.constraints
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn start(&self) -> Duration {
        self.start
    }

    pub fn forward_fringe(&self) -> &[NodeId] {
        &self.forward
    }

    pub fn backward_fringe(&self) -> &[NodeId] {
        &self.backward
    }

    pub fn elapsed(&self, now: Duration) -> Duration {
        now.saturating_sub(self.start)
    }

    /// Nodes and links of both fringes. A fringe contributes only once it
    /// holds at least one link.
    pub fn highlight(&self) -> BTreeSet<ElementId> {
        let mut set = BTreeSet::new();
        for fringe in [&self.forward, &self.backward] {
            if fringe.len() < 2 {
                continue;
            }
            set.extend(fringe.iter().map(|&u| ElementId::Node(u)));
            set.extend(fringe.windows(2).map(|w| ElementId::Link(Link::new(w[0], w[1]))));
        }
        set
    }

    /// The whole path once the fringes meet.
    pub fn joined_path(&self) -> Option<Vec<NodeId>> {
        let tip = *self.forward.last()?;
        if tip != self.backward[0] {
            return None;
        }
        let mut path = self.forward.clone();
        path.extend_from_slice(&self.backward[1..]);
        Some(path)
    }

    pub fn tick(&mut self, now: Duration) {
        if self.status == Status::Active && self.elapsed(now) >= TIME_LIMIT {
            self.status = Status::TimedOut;
        }
    }

    pub fn click(&mut self, element: ElementId, at: Duration) -> Result<ClickResult, PathError> {
        if self.status != Status::Active {
            return Err(PathError::ClickAfterEnd);
        }
        self.tick(at);
        if self.status == Status::TimedOut {
            return Err(PathError::TimedOut);
        }
        if !self.graph.contains_element(element) {
            return Ok(ClickResult::Rejected {
                reason: Rejection::UnknownElement,
            });
        }
        if self.backtrack(element) {
            return Ok(ClickResult::Backtracked);
        }
        if self.joined_path().is_some() {
            return Ok(ClickResult::Rejected {
                reason: Rejection::Joined,
            });
        }
        let step = match element {
            ElementId::Link(link) => self.link_step(link),
            ElementId::Node(node) => self.node_step(node),
        };
        match step {
            Err(reason) => Ok(ClickResult::Rejected { reason }),
            Ok((Fringe::Forward, node)) => {
                self.forward.push(node);
                Ok(self.after_extension(at))
            }
            Ok((Fringe::Backward, node)) => {
                self.backward.insert(0, node);
                Ok(self.after_extension(at))
            }
        }
    }

    fn after_extension(&mut self, at: Duration) -> ClickResult {
        if let Some(path) = self.joined_path() {
            let links: Vec<Link> = path.windows(2).map(|w| Link::new(w[0], w[1])).collect();
            if is_good_path(&self.graph, &links, &self.constraints) == Ok(true) {
                let elapsed = self.elapsed(at);
                self.status = Status::Completed { elapsed };
                return ClickResult::Completed { elapsed };
            }
        }
        ClickResult::Extended
    }

    fn backtrack(&mut self, element: ElementId) -> bool {
        if self.forward.len() > 1 {
            if let Some(keep) = position_in(&self.forward, element, true) {
                self.forward.truncate(keep);
                if self.forward.is_empty() {
                    self.forward.push(self.constraints.source);
                }
                return true;
            }
        }
        if self.backward.len() > 1 {
            if let Some(drop) = position_in(&self.backward, element, false) {
                self.backward.drain(..drop);
                if self.backward.is_empty() {
                    self.backward.push(self.constraints.destination);
                }
                return true;
            }
        }
        false
    }

    /// A node may join the trace if it is new, or if it is the other
    /// fringe's tip (closing the path).
    fn admissible(&self, node: NodeId, from: Fringe) -> bool {
        let (own, other, other_tip) = match from {
            Fringe::Forward => (&self.forward, &self.backward, self.backward[0]),
            Fringe::Backward => (&self.backward, &self.forward, *self.forward.last().unwrap()),
        };
        !own.contains(&node) && (!other.contains(&node) || node == other_tip)
    }

    fn link_step(&self, link: Link) -> Result<(Fringe, NodeId), Rejection> {
        let ftip = *self.forward.last().unwrap();
        let bhead = self.backward[0];
        if link.src == ftip {
            return if self.admissible(link.dst, Fringe::Forward) {
                Ok((Fringe::Forward, link.dst))
            } else {
                Err(Rejection::Revisit)
            };
        }
        if link.dst == bhead {
            return if self.admissible(link.src, Fringe::Backward) {
                Ok((Fringe::Backward, link.src))
            } else {
                Err(Rejection::Revisit)
            };
        }
        Err(Rejection::NotAdjacent)
    }

    fn node_step(&self, node: NodeId) -> Result<(Fringe, NodeId), Rejection> {
        let ftip = *self.forward.last().unwrap();
        let bhead = self.backward[0];
        let fwd = self.graph.has_link(Link::new(ftip, node));
        let bwd = self.graph.has_link(Link::new(node, bhead));
        let mut candidates = Vec::with_capacity(2);
        if fwd && self.admissible(node, Fringe::Forward) {
            candidates.push((Fringe::Forward, node));
        }
        if bwd && self.admissible(node, Fringe::Backward) {
            candidates.push((Fringe::Backward, node));
        }
        match candidates.len() {
            1 => Ok(candidates[0]),
            0 if fwd || bwd => Err(Rejection::Revisit),
            0 => Err(Rejection::NotAdjacent),
            _ => Err(Rejection::Ambiguous),
        }
    }
}

/// Length to keep (forward) or to drop from the front (backward) when
/// `element` is clicked on `fringe`.
fn position_in(fringe: &[NodeId], element: ElementId, forward: bool) -> Option<usize> {
    match element {
        ElementId::Node(u) => {
            let i = fringe.iter().position(|&v| v == u)?;
            Some(if forward { i } else { i + 1 })
        }
        ElementId::Link(l) => {
            let i = fringe.windows(2).position(|w| w[0] == l.src && w[1] == l.dst)?;
            Some(i + 1)
        }
    }
}

/// True iff `path` is simple, its length is within bounds, and it carries a
/// skip link when one is required.
pub fn is_good_path(g: &LayeredGraph, path: &[Link], c: &PathConstraints) -> Result<bool, PathError> {
    let first = path.first().ok_or(PathError::NotAPath)?;
    let last = path.last().ok_or(PathError::NotAPath)?;
    if first.src != c.source || last.dst != c.destination {
        return Err(PathError::NotAPath);
    }
    if path.windows(2).any(|w| w[0].dst != w[1].src) || path.iter().any(|&l| !g.has_link(l)) {
        return Err(PathError::NotAPath);
    }
    let mut seen = BTreeSet::from([c.source]);
    let simple = path.iter().all(|l| seen.insert(l.dst));
    let len_ok = (c.min_links..=c.max_links).contains(&path.len());
    let skip_ok = !c.require_skip || path.iter().any(|&l| g.is_skip(l));
    Ok(simple && len_ok && skip_ok)
}

/// One click as received by the trial service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub element: ElementId,
    /// Server receipt time relative to the trial clock's origin.
    #[serde(rename = "at_ms", with = "millis")]
    pub at: Duration,
}

/// Outcome of a click as written to the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoggedResult {
    Click(ClickResult),
    Error { error: PathError },
}

impl From<Result<ClickResult, PathError>> for LoggedResult {
    fn from(r: Result<ClickResult, PathError>) -> Self {
        match r {
            Ok(c) => LoggedResult::Click(c),
            Err(error) => LoggedResult::Error { error },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickLogEntry {
    pub trial_id: String,
    pub seq: u64,
    pub element: ElementId,
    #[serde(with = "millis")]
    pub at_ms: Duration,
    /// Client clock, kept for diagnostics only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_time_ms: Option<u64>,
    pub result: LoggedResult,
}

/// Folds `events` over a fresh state.
pub fn replay(
    graph: Arc<LayeredGraph>,
    constraints: PathConstraints,
    start: Duration,
    events: &[ClickEvent],
) -> (PathState, Vec<Result<ClickResult, PathError>>) {
    let mut state = PathState::new(graph, constraints, start);
    let results = events.iter().map(|e| state.click(e.element, e.at)).collect();
    (state, results)
}

/// Serde adapter writing a `Duration` as whole milliseconds.
pub mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}
