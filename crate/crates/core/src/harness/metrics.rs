//! Per-tick metrics and the summary report built from them.

use serde::Serialize;

use crate::economy::{Micros, PoolBalances};
use crate::model::{Layer, Tick};

/// Column order of `metrics.csv`.
pub const METRICS_COLUMNS: [&str; 41] = [
    "tick",
    "arrivals",
    "routed_l1",
    "routed_l2",
    "routed_l3",
    "routed_l4",
    "routed_l5",
    "queued_l1",
    "queued_l2",
    "queued_l3",
    "queued_l4",
    "queued_l5",
    "decisive_l1",
    "decisive_l2",
    "decisive_l3",
    "decisive_l4",
    "decisive_l5",
    "correct_l1",
    "correct_l2",
    "correct_l3",
    "correct_l4",
    "correct_l5",
    "accuracy",
    "issued_micros",
    "pool_validator_micros",
    "pool_security_micros",
    "pool_system_micros",
    "total_supply_micros",
    "pool_depletions",
    "collusion_flags",
    "sybil_flags",
    "confirmed_flags",
    "dishonest_flagged",
    "dishonest_total",
    "share_honest",
    "share_lazy",
    "share_colluder",
    "share_sybil_operator",
    "mean_reputation",
    "posterior_error",
    "users",
];

/// Column order of `flags.csv`.
pub const FLAGS_COLUMNS: [&str; 7] = [
    "tick",
    "kind",
    "members",
    "score",
    "collusion_ratio",
    "confirmed",
    "enforced",
];

/// Column order of `ledger.csv`.
pub const LEDGER_COLUMNS: [&str; 13] = [
    "tick",
    "contribution",
    "recipient",
    "base_reward",
    "quality_multiplier",
    "domain_weight",
    "anti_inflation_factor",
    "security_bonus",
    "amount_micros",
    "contributor_micros",
    "validator_pool_micros",
    "security_pool_micros",
    "system_pool_micros",
];

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MetricsFrame {
    pub tick: Tick,
    pub arrivals: u32,
    /// Contributions handled by each layer this tick.
    pub routed: [u32; 5],
    /// Queue length per layer at the end of the tick.
    pub queued: [u32; 5],
    /// Accept/reject verdicts per layer.
    pub decisive: [u32; 5],
    /// Decisive verdicts that match latent quality.
    pub correct: [u32; 5],
    pub issued: Micros,
    pub pools: PoolBalances,
    pub total_supply: Micros,
    pub depletions: u64,
    pub collusion_flags: u32,
    pub sybil_flags: u32,
    /// Flags whose members are all dishonest.
    pub confirmed_flags: u32,
    /// Distinct dishonest validators flagged so far.
    pub dishonest_flagged: u32,
    pub dishonest_total: u32,
    pub shares: [f64; 4],
    pub mean_reputation: f64,
    pub posterior_error: Option<f64>,
    pub users: f64,
}

impl MetricsFrame {
    pub fn accuracy(&self) -> Option<f64> {
        let d: u32 = self.decisive.iter().sum();
        let c: u32 = self.correct.iter().sum();
        (d > 0).then(|| f64::from(c) / f64::from(d))
    }

    pub fn csv_record(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut r = Vec::with_capacity(METRICS_COLUMNS.len());
        r.push(self.tick.to_string());
        r.push(self.arrivals.to_string());
        for arr in [&self.routed, &self.queued, &self.decisive, &self.correct] {
            r.extend(arr.iter().map(|x| x.to_string()));
        }
        r.push(opt(self.accuracy()));
        r.push(self.issued.0.to_string());
        r.push(self.pools.validator.0.to_string());
        r.push(self.pools.security.0.to_string());
        r.push(self.pools.system.0.to_string());
        r.push(self.total_supply.0.to_string());
        r.push(self.depletions.to_string());
        r.push(self.collusion_flags.to_string());
        r.push(self.sybil_flags.to_string());
        r.push(self.confirmed_flags.to_string());
        r.push(self.dishonest_flagged.to_string());
        r.push(self.dishonest_total.to_string());
        r.extend(self.shares.iter().map(|x| x.to_string()));
        r.push(self.mean_reputation.to_string());
        r.push(opt(self.posterior_error));
        r.push(self.users.to_string());
        r
    }
}

/// Summary over a run. Undefined ratios are `None`, never 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub per_layer: [Option<f64>; 5],
    pub overall: Option<f64>,
    pub detector_precision: Option<f64>,
    pub detector_recall: Option<f64>,
    pub mean_posterior_error: Option<f64>,
}

impl AccuracyReport {
    pub fn layer(&self, layer: Layer) -> Option<f64> {
        self.per_layer[layer.index()]
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn accuracy_report(frames: &[MetricsFrame]) -> AccuracyReport {
    let mut decisive = [0u64; 5];
    let mut correct = [0u64; 5];
    let (mut flags, mut confirmed) = (0u64, 0u64);
    let (mut err_sum, mut err_n) = (0.0, 0u64);
    for f in frames {
        for i in 0..5 {
            decisive[i] += u64::from(f.decisive[i]);
            correct[i] += u64::from(f.correct[i]);
        }
        flags += u64::from(f.collusion_flags + f.sybil_flags);
        confirmed += u64::from(f.confirmed_flags);
        if let Some(e) = f.posterior_error {
            err_sum += e;
            err_n += 1;
        }
    }
    let per_layer = std::array::from_fn(|i| ratio(correct[i], decisive[i]));
    let recall = frames
        .last()
        .and_then(|f| ratio(u64::from(f.dishonest_flagged), u64::from(f.dishonest_total)));
    AccuracyReport {
        per_layer,
        overall: ratio(correct.iter().sum(), decisive.iter().sum()),
        detector_precision: ratio(confirmed, flags),
        detector_recall: recall,
        mean_posterior_error: (err_n > 0).then(|| err_sum / err_n as f64),
    }
}
