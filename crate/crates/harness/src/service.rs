//! Trial orchestration: hands out scheduled trials, validates clicks through
//! the path engine, and appends a record when a trial ends.

use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use quilts_core::path::{ClickLogEntry, LoggedResult, PathError, TIME_LIMIT};
use quilts_core::record::{append_record, Outcome, TrialRecord, RECORD_SCHEMA};
use quilts_core::schedule::{Schedule, TrialCell};
use quilts_core::{ClickResult, ElementId, GenError, LayoutBundle, LayoutError, Markers, PathState, Status, Stimulus};
use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::stimuli;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("no trial `{0}` has been issued")]
    UnknownTrial(String),
    #[error("no participant {0} in the schedule")]
    UnknownParticipant(usize),
    #[error("participant {0} has no trials left")]
    NoMoreTrials(usize),
    #[error("trial `{0}` has already ended")]
    ClickAfterEnd(String),
    #[error("trial `{0}` ran out of time")]
    TimedOut(String),
    #[error("malformed element id `{0}`")]
    BadElement(String),
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("could not write the trial log: {0}")]
    Log(#[from] std::io::Error),
}

impl ServiceError {
    /// Stable code sent to clients.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownTrial(_) => "unknown-trial",
            ServiceError::UnknownParticipant(_) => "unknown-participant",
            ServiceError::NoMoreTrials(_) => "no-more-trials",
            ServiceError::ClickAfterEnd(_) => "click-after-end",
            ServiceError::TimedOut(_) => "timed-out",
            ServiceError::BadElement(_) => "bad-element",
            ServiceError::Generation(_) => "generation-failed",
            ServiceError::Layout(_) => "layout-failed",
            ServiceError::Log(_) => "log-failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    Active,
    Completed,
    TimedOut,
    Abandoned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssuedTrial {
    pub participant: usize,
    /// Trials in the participant's schedule.
    pub total: usize,
    #[serde(flatten)]
    pub cell: TrialCell,
    pub source: usize,
    pub destination: usize,
    pub time_limit_ms: u64,
    pub bundle: LayoutBundle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickReply {
    pub trial_id: String,
    #[serde(flatten)]
    pub result: ClickResult,
    pub status: TrialStatus,
    pub highlight: Vec<ElementId>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialView {
    pub trial_id: String,
    pub participant: usize,
    pub status: TrialStatus,
    pub highlight: Vec<ElementId>,
    pub elapsed_ms: u64,
    pub clicks: usize,
}

struct Trial {
    participant: usize,
    cell: TrialCell,
    stimulus: Arc<Stimulus>,
    bundle: Arc<LayoutBundle>,
    path: PathState,
    clicks: Vec<ClickLogEntry>,
    ended: Option<(Outcome, Duration)>,
}

impl Trial {
    fn status(&self) -> TrialStatus {
        match self.ended {
            None => TrialStatus::Active,
            Some((Outcome::Completed, _)) => TrialStatus::Completed,
            Some((Outcome::TimedOut, _)) => TrialStatus::TimedOut,
            Some((Outcome::Abandoned, _)) => TrialStatus::Abandoned,
        }
    }

    fn elapsed(&self, now: Duration) -> Duration {
        match self.ended {
            Some((_, e)) => e,
            None => self.path.elapsed(now).min(TIME_LIMIT),
        }
    }

    fn record(&self) -> TrialRecord {
        let (outcome, elapsed) = self.ended.expect("record of an ended trial");
        TrialRecord {
            schema: RECORD_SCHEMA,
            participant: self.participant,
            trial_index: self.cell.index,
            trial_id: self.cell.trial_id.clone(),
            session: self.cell.session,
            practice: self.cell.practice,
            depiction: self.cell.depiction,
            spec: self.cell.spec,
            seed: self.cell.seed,
            source: self.stimulus.source,
            destination: self.stimulus.destination,
            outcome,
            elapsed_ms: elapsed.as_millis() as u64,
            accuracy: u8::from(outcome == Outcome::Completed),
            clicks: self.clicks.clone(),
        }
    }
}

#[derive(Default)]
struct State {
    /// Next schedule position per participant.
    cursor: Vec<usize>,
    trials: HashMap<String, Trial>,
    stimuli: HashMap<(usize, u64), Arc<Stimulus>>,
    records: Vec<TrialRecord>,
}

pub struct TrialService {
    schedule: Schedule,
    clock: Arc<dyn Clock>,
    log: Option<Mutex<File>>,
    state: Mutex<State>,
}

fn ids(set: BTreeSet<ElementId>) -> Vec<ElementId> {
    set.into_iter().collect()
}

impl TrialService {
    pub fn new(schedule: Schedule, clock: Arc<dyn Clock>) -> Self {
        let state = State {
            cursor: vec![0; schedule.participants.len()],
            ..State::default()
        };
        Self {
            schedule,
            clock,
            log: None,
            state: Mutex::new(state),
        }
    }

    /// Appends records to `path` (JSONL), creating it if needed.
    pub fn with_log(mut self, path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        self.log = Some(Mutex::new(file));
        Ok(self)
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn now(&self) -> Duration {
        self.clock.now()
    }

    /// Records written so far, in order.
    pub fn records(&self) -> Vec<TrialRecord> {
        self.state.lock().unwrap().records.clone()
    }

    /// The participant's current trial, issuing the next scheduled one when
    /// the previous trial has ended. The trial clock starts on issue.
    pub fn next_trial(&self, participant: usize) -> Result<IssuedTrial, ServiceError> {
        let plan = self
            .schedule
            .participants
            .get(participant)
            .ok_or(ServiceError::UnknownParticipant(participant))?;
        let now = self.clock.now();
        let mut st = self.state.lock().unwrap();
        self.expire(&mut st, now)?;

        loop {
            let pos = st.cursor[participant];
            let cell = plan.trials.get(pos).ok_or(ServiceError::NoMoreTrials(participant))?;
            if let Some(t) = st.trials.get(&cell.trial_id) {
                if t.ended.is_some() {
                    st.cursor[participant] += 1;
                    continue;
                }
                return Ok(self.issued(t, plan.trials.len()));
            }
            let key = (cell.treatment, cell.seed);
            let stimulus = match st.stimuli.get(&key) {
                Some(s) => s.clone(),
                None => {
                    let s = Arc::new(stimuli::stimulus(&cell.spec, cell.seed)?);
                    st.stimuli.insert(key, s.clone());
                    s
                }
            };
            let markers = Markers {
                source: stimulus.source,
                destination: stimulus.destination,
            };
            let bundle = stimuli::bundle_for(&stimulus.graph, cell.depiction, self.schedule.experiment, Some(markers))?;
            let path = PathState::new(Arc::new(stimulus.graph.clone()), stimulus.constraints(), now);
            let trial = Trial {
                participant,
                cell: cell.clone(),
                stimulus,
                bundle: Arc::new(bundle),
                path,
                clicks: Vec::new(),
                ended: None,
            };
            let out = self.issued(&trial, plan.trials.len());
            tracing::info!(trial = %cell.trial_id, depiction = %cell.depiction, "issued");
            st.trials.insert(cell.trial_id.clone(), trial);
            return Ok(out);
        }
    }

    fn issued(&self, t: &Trial, total: usize) -> IssuedTrial {
        IssuedTrial {
            participant: t.participant,
            total,
            cell: t.cell.clone(),
            source: t.stimulus.source,
            destination: t.stimulus.destination,
            time_limit_ms: TIME_LIMIT.as_millis() as u64,
            bundle: (*t.bundle).clone(),
        }
    }

    pub fn click(&self, trial_id: &str, element: &str, client_time_ms: Option<u64>) -> Result<ClickReply, ServiceError> {
        let element: ElementId = element.parse().map_err(|_| ServiceError::BadElement(element.to_string()))?;
        let now = self.clock.now();
        let mut st = self.state.lock().unwrap();
        let t = st
            .trials
            .get_mut(trial_id)
            .ok_or_else(|| ServiceError::UnknownTrial(trial_id.to_string()))?;
        if t.ended.is_some() {
            return Err(ServiceError::ClickAfterEnd(trial_id.to_string()));
        }
        let at = t.path.elapsed(now);
        let result = t.path.click(element, now);
        t.clicks.push(ClickLogEntry {
            trial_id: trial_id.to_string(),
            seq: t.clicks.len() as u64,
            element,
            at_ms: at,
            client_time_ms,
            result: LoggedResult::from(result),
        });
        match result {
            Ok(r) => {
                if let ClickResult::Completed { elapsed } = r {
                    t.ended = Some((Outcome::Completed, elapsed));
                }
                let reply = ClickReply {
                    trial_id: trial_id.to_string(),
                    result: r,
                    status: t.status(),
                    highlight: ids(t.path.highlight()),
                    elapsed_ms: t.elapsed(now).as_millis() as u64,
                };
                if t.ended.is_some() {
                    let record = t.record();
                    self.append(&mut st, record)?;
                }
                Ok(reply)
            }
            Err(PathError::TimedOut) => {
                t.ended = Some((Outcome::TimedOut, TIME_LIMIT));
                let record = t.record();
                self.append(&mut st, record)?;
                Err(ServiceError::TimedOut(trial_id.to_string()))
            }
            Err(_) => Err(ServiceError::ClickAfterEnd(trial_id.to_string())),
        }
    }

    pub fn abandon(&self, trial_id: &str) -> Result<TrialView, ServiceError> {
        let now = self.clock.now();
        let mut st = self.state.lock().unwrap();
        self.expire(&mut st, now)?;
        let t = st
            .trials
            .get_mut(trial_id)
            .ok_or_else(|| ServiceError::UnknownTrial(trial_id.to_string()))?;
        if t.ended.is_some() {
            return Err(ServiceError::ClickAfterEnd(trial_id.to_string()));
        }
        t.ended = Some((Outcome::Abandoned, t.path.elapsed(now)));
        let view = view(t, now);
        let record = t.record();
        self.append(&mut st, record)?;
        Ok(view)
    }

    pub fn trial(&self, trial_id: &str) -> Result<TrialView, ServiceError> {
        let now = self.clock.now();
        let mut st = self.state.lock().unwrap();
        self.expire(&mut st, now)?;
        st.trials
            .get(trial_id)
            .map(|t| view(t, now))
            .ok_or_else(|| ServiceError::UnknownTrial(trial_id.to_string()))
    }

    /// Ends every active trial that has run out of time and logs it.
    /// Returns the ids that were closed.
    pub fn sweep_timeouts(&self) -> Result<Vec<String>, ServiceError> {
        let now = self.clock.now();
        let mut st = self.state.lock().unwrap();
        self.expire(&mut st, now)
    }

    fn expire(&self, st: &mut State, now: Duration) -> Result<Vec<String>, ServiceError> {
        let mut closed: Vec<String> = Vec::new();
        for (id, t) in st.trials.iter_mut() {
            if t.ended.is_none() {
                t.path.tick(now);
                if t.path.status() == Status::TimedOut {
                    t.ended = Some((Outcome::TimedOut, TIME_LIMIT));
                    closed.push(id.clone());
                }
            }
        }
        closed.sort();
        for id in &closed {
            let record = st.trials[id].record();
            tracing::info!(trial = %id, "timed out");
            self.append(st, record)?;
        }
        Ok(closed)
    }

    fn append(&self, st: &mut State, record: TrialRecord) -> Result<(), ServiceError> {
        if let Some(log) = &self.log {
            let mut file = log.lock().unwrap();
            append_record(&mut *file, &record)?;
            file.flush()?;
        }
        st.records.push(record);
        Ok(())
    }
}

fn view(t: &Trial, now: Duration) -> TrialView {
    TrialView {
        trial_id: t.cell.trial_id.clone(),
        participant: t.participant,
        status: t.status(),
        highlight: ids(t.path.highlight()),
        elapsed_ms: t.elapsed(now).as_millis() as u64,
        clicks: t.clicks.len(),
    }
}
