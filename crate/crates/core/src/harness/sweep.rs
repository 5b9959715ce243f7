//! One-parameter sweeps over a scenario document.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::Value;

use crate::error::Result;
use crate::model::Layer;
use crate::parallel::Exec;

use super::config::{ConfigError, ScenarioConfig};
use super::metrics::accuracy_report;
use super::output::write_run;
use super::sim::{run_scenario, RunOutput};

pub const SWEEP_COLUMNS: [&str; 8] = [
    "param",
    "value",
    "dir",
    "accuracy",
    "accuracy_l2",
    "final_share_honest",
    "final_mean_reputation",
    "total_supply_micros",
];

/// Splits `a,b,c`; each item is read as JSON if it parses, else as a string.
pub fn parse_values(list: &str) -> Vec<Value> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string())))
        .collect()
}

/// Sets `a.b.0.c` inside `doc`, creating missing objects on the way.
pub fn set_dotted(doc: &mut Value, key: &str, value: Value) -> std::result::Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::new(key, "empty segment in parameter key"));
    }
    let mut cur = doc;
    for (n, part) in parts.iter().enumerate() {
        let last = n + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| ConfigError::new(key, format!("{part:?} is not an array index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| ConfigError::new(key, format!("index {idx} out of range (len {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(ConfigError::new(
                    key,
                    format!("{part:?} is inside a non-container value"),
                ))
            }
        };
    }
    Ok(())
}

/// Label used for a sweep value's output directory.
pub fn value_label(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// One validated config per value.
pub fn expand(doc: &Value, key: &str, values: &[Value]) -> std::result::Result<Vec<ScenarioConfig>, ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::new("values", "no sweep values given"));
    }
    values
        .iter()
        .map(|v| {
            let mut d = doc.clone();
            set_dotted(&mut d, key, v.clone())?;
            ScenarioConfig::from_value(d)
        })
        .collect()
}

/// Runs every config; order of results follows `configs`.
pub fn run_all(configs: &[ScenarioConfig], exec: Exec) -> Vec<Result<RunOutput>> {
    exec.map(configs, run_scenario)
}

pub fn write_sweep(
    out_dir: &Path,
    key: &str,
    values: &[Value],
    configs: &[ScenarioConfig],
    runs: &[RunOutput],
) -> io::Result<()> {
    fs::create_dir_all(out_dir)?;
    let mut w = csv::Writer::from_path(out_dir.join("sweep.csv"))?;
    w.write_record(SWEEP_COLUMNS)?;
    for ((v, cfg), run) in values.iter().zip(configs).zip(runs) {
        let label = value_label(v);
        let dir = format!("{key}={label}");
        write_run(&out_dir.join(&dir), cfg, run)?;
        let report = accuracy_report(&run.frames);
        let last = run.frames.last();
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            key.to_string(),
            label,
            dir,
            opt(report.overall),
            opt(report.layer(Layer::Community)),
            opt(last.map(|f| f.shares[0])),
            opt(last.map(|f| f.mean_reputation)),
            run.ledger.total_supply().0.to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_mixed_values() {
        assert_eq!(
            parse_values("1, 2.5,abc,true"),
            vec![json!(1), json!(2.5), json!("abc"), json!(true)]
        );
        assert!(parse_values(" , ").is_empty());
    }

    #[test]
    fn sets_nested_and_indexed_keys() {
        let mut d = json!({"a": {"b": 1}, "xs": [{"c": 0}]});
        set_dotted(&mut d, "a.b", json!(2)).unwrap();
        set_dotted(&mut d, "xs.0.c", json!(5)).unwrap();
        set_dotted(&mut d, "n.m", json!(true)).unwrap();
        assert_eq!(d, json!({"a": {"b": 2}, "xs": [{"c": 5}], "n": {"m": true}}));
        assert!(set_dotted(&mut d, "xs.9.c", json!(1)).is_err());
        assert!(set_dotted(&mut d, "a.b.c", json!(1)).is_err());
    }

    #[test]
    fn expand_rejects_unknown_keys() {
        let doc = serde_json::to_value(ScenarioConfig::baseline()).unwrap();
        assert!(expand(&doc, "voting.nonsense", &[json!(1)]).is_err());
        let cfgs = expand(&doc, "voting.honest_noise", &[json!(0.05), json!(0.2)]).unwrap();
        assert_eq!(cfgs[1].voting.honest_noise, 0.2);
    }

    #[test]
    fn labels_are_path_safe() {
        assert_eq!(value_label(&json!("a/b c")), "a_b_c");
        assert_eq!(value_label(&json!(0.5)), "0.5");
    }
}
