//! Seeded Monte Carlo campaigns over the protocol models.

pub mod campaign;
pub mod config;
pub mod exec;
pub mod stats;
pub mod sweep;

pub use campaign::{protocol2_transcripts, run_campaign, run_campaign_with, write_transcripts, AttackReport};
pub use config::{load, CampaignConfig, ProtocolKind, SweepGrid};
pub use exec::{map_reduce, Execution, Tally};
pub use stats::{chi_square_fit, Estimate, Verdict};
pub use sweep::{run_sweep, write_sweep_csv, SweepRow};
