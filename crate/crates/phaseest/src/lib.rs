//! Campaign harness, file formats and manifest handling on top of
//! `phaseest-core`.
//!
//! Trials are independent work items; each derives its own random stream
//! from `(seed, point index, trial index)`, so campaign results do not
//! depend on the execution schedule.

pub mod campaign;
pub mod manifest;
pub mod output;

pub use campaign::{run_campaign, CampaignRow, CampaignSummary, PhiPolicy};
