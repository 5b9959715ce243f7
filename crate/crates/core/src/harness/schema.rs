//! Published JSON Schema for scenario files, plus the output column order.

use serde_json::{json, Value};

use super::config::ScenarioConfig;
use super::metrics::{FLAGS_COLUMNS, LEDGER_COLUMNS, METRICS_COLUMNS};
use super::sweep::SWEEP_COLUMNS;

/// Scenario schema with an `x-outputs` section listing CSV columns in order.
pub fn scenario_schema() -> Value {
    let mut schema = serde_json::to_value(schemars::schema_for!(ScenarioConfig)).expect("schema serializes");
    schema["x-outputs"] = json!({
        "metrics.csv": METRICS_COLUMNS.as_slice(),
        "flags.csv": FLAGS_COLUMNS.as_slice(),
        "ledger.csv": LEDGER_COLUMNS.as_slice(),
        "sweep.csv": SWEEP_COLUMNS.as_slice(),
        "manifest.json": ["tool", "version", "seed", "config_sha256", "horizon", "outputs"],
    });
    schema
}

pub fn scenario_schema_pretty() -> String {
    serde_json::to_string_pretty(&scenario_schema()).expect("schema serializes") + "\n"
}
