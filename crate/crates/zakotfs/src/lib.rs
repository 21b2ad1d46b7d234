//! Campaign orchestration, configuration, CSV output and the command-line
//! front end for the `zakotfs-core` simulator.

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod output;

pub use config::{load_config, parse_config, CampaignConfig, ChannelKind, Experiment, PowerMode};
pub use error::{AppError, Result};
pub use harness::{CampaignResult, Mode, PaprResult, PointResult, SeResult};
