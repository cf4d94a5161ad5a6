//! Trial schedules.
//!
//! Each participant sees the experiment's three depictions in one of the six
//! possible orders (participant `p` uses order `p mod 6`). Within a depiction
//! block the treatments follow one row of a cyclic Latin square; participant
//! `p` takes row `(p * blocks + b) mod n` for its `b`-th block, where `blocks`
//! is the number of blocks per participant. Trial seeds depend on session,
//! depiction and treatment only, so every participant sees the same graph in
//! the same cell.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::Depiction;
use crate::generate::{derive_seed, Experiment, TreatmentSpec};
use crate::quilt::SkipDepiction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialCell {
    pub trial_id: String,
    /// Position in the participant's list, practice trials included.
    pub index: usize,
    pub session: usize,
    pub depiction: Depiction,
    /// Index into the experiment's treatment grid.
    pub treatment: usize,
    pub spec: TreatmentSpec,
    pub seed: u64,
    #[serde(default)]
    pub practice: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantSchedule {
    pub participant: usize,
    pub depiction_order: Vec<Depiction>,
    pub trials: Vec<TrialCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub experiment: Experiment,
    pub seed: u64,
    pub sessions: usize,
    /// Treatment grid order after the seeded shuffle; Latin-square entries index into it.
    pub treatment_order: Vec<usize>,
    pub participants: Vec<ParticipantSchedule>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScheduleOptions {
    /// Practice trials placed before each depiction block.
    pub practice_per_block: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("a schedule needs at least one participant")]
    NoParticipants,
}

impl Experiment {
    /// Depictions compared in the experiment.
    pub fn depictions(self) -> [Depiction; 3] {
        match self {
            Experiment::Exp1 => [
                Depiction::Quilt(SkipDepiction::ColorOnly),
                Depiction::Quilt(SkipDepiction::Mixed),
                Depiction::Quilt(SkipDepiction::TextOnly),
            ],
            Experiment::Exp2 => [
                Depiction::Quilt(SkipDepiction::Mixed),
                Depiction::NodeLink,
                Depiction::CenteredMatrix,
            ],
        }
    }

    pub fn sessions(self) -> usize {
        match self {
            Experiment::Exp1 => 2,
            Experiment::Exp2 => 1,
        }
    }
}

/// Cyclic Latin square: entry `(r, c)` is `(r + c) mod n`.
pub fn latin_square(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|r| (0..n).map(|c| (r + c) % n).collect()).collect()
}

/// The six orders of three items, in lexicographic order.
pub fn permutations3<T: Copy>(items: [T; 3]) -> [[T; 3]; 6] {
    let [a, b, c] = items;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

pub fn trial_seed(seed: u64, session: usize, depiction: Depiction, treatment: usize) -> u64 {
    let d = Depiction::ALL.iter().position(|&x| x == depiction).unwrap() as u64;
    derive_seed(derive_seed(derive_seed(seed, session as u64), d), treatment as u64)
}

pub fn build_schedule(experiment: Experiment, participants: usize, seed: u64) -> Result<Schedule, ScheduleError> {
    build_schedule_with(experiment, participants, seed, &ScheduleOptions::default())
}

pub fn build_schedule_with(
    experiment: Experiment,
    participants: usize,
    seed: u64,
    opts: &ScheduleOptions,
) -> Result<Schedule, ScheduleError> {
    if participants == 0 {
        return Err(ScheduleError::NoParticipants);
    }
    let grid = experiment.treatments();
    let n = grid.len();
    let mut treatment_order: Vec<usize> = (0..n).collect();
    treatment_order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x5eed)));
    let square = latin_square(n);
    let orders = permutations3(experiment.depictions());
    let sessions = experiment.sessions();
    let blocks = sessions * 3;

    let participants = (0..participants)
        .map(|p| {
            let order = orders[p % 6];
            let mut trials = Vec::with_capacity(blocks * (n + opts.practice_per_block));
            let mut push = |session: usize, depiction: Depiction, treatment: usize, seed: u64, practice: bool| {
                let index = trials.len();
                trials.push(TrialCell {
                    trial_id: format!("p{p}-t{index}"),
                    index,
                    session,
                    depiction,
                    treatment,
                    spec: grid[treatment],
                    seed,
                    practice,
                });
            };
            for session in 0..sessions {
                for (slot, &depiction) in order.iter().enumerate() {
                    let block = session * 3 + slot;
                    let row = &square[(p * blocks + block) % n];
                    for i in 0..opts.practice_per_block {
                        let t = treatment_order[row[i % n]];
                        let s = derive_seed(trial_seed(seed, session, depiction, t), practice_salt(i));
                        push(session, depiction, t, s, true);
                    }
                    for &col in row {
                        let t = treatment_order[col];
                        push(session, depiction, t, trial_seed(seed, session, depiction, t), false);
                    }
                }
            }
            ParticipantSchedule {
                participant: p,
                depiction_order: order.to_vec(),
                trials,
            }
        })
        .collect();

    Ok(Schedule {
        experiment,
        seed,
        sessions,
        treatment_order,
        participants,
    })
}

/// Salt for the `i`-th practice trial of a block.
const fn practice_salt(i: usize) -> u64 {
    0x9000 + i as u64
}
