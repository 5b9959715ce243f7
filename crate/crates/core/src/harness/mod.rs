//! Scenario-driven simulator: config, event loop, metrics and outputs.

pub mod behavior;
pub mod config;
pub mod metrics;
pub mod output;
pub mod schema;
pub mod sim;
pub mod sweep;
pub mod synthetic;
pub mod window;

pub use config::{ConfigError, ScenarioConfig};
pub use metrics::{accuracy_report, AccuracyReport, MetricsFrame};
pub use sim::{run_scenario, FlagKind, FlagRecord, RunOutput};
