//! Deterministic proof-of-human-contribution library and simulator.

pub mod agents;
pub mod analytics;
pub mod economy;
pub mod error;
pub mod feasibility;
pub mod harness;
pub mod model;
pub mod parallel;
pub mod pipeline;
pub mod reputation;
pub mod security;

pub use error::{PohcError, Result};
pub use model::{Layer, UnitScore, ValidatorId};
pub use parallel::Exec;
