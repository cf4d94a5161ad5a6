//! Trial service, HTTP API and command-line plumbing around `quilts_core`.

pub mod api;
pub mod clock;
pub mod replay;
pub mod service;
pub mod stimuli;

pub use clock::{Clock, ManualClock, SystemClock};
pub use service::{ClickReply, IssuedTrial, ServiceError, TrialService, TrialStatus, TrialView};
