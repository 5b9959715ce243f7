//! Strategic validator behavior: utility, equilibrium and stability checks,
//! and replicator dynamics over strategy shares.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, PohcError, Result};
use crate::model::{Strategy, UnitScore};

pub const DETECTION_FLOOR: f64 = 0.3;
pub const PENALTY_RATIO_FLOOR: f64 = 5.0;
pub const DECAY_RANGE: (f64, f64) = (0.90, 0.95);
/// Accuracy of a validator putting in zero effort.
pub const BASE_ACCURACY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct StrategyParams {
    pub reward_sensitivity: f64,
    pub reputation_sensitivity: f64,
    pub effort: UnitScore,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct StabilityParams {
    pub detection_probability: UnitScore,
    pub penalty_to_reward_ratio: f64,
    pub reputation_decay: f64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        StabilityParams {
            detection_probability: UnitScore::saturate(0.4),
            penalty_to_reward_ratio: 6.0,
            reputation_decay: 0.92,
        }
    }
}

/// `Reward(a) = a`.
pub fn reward(accuracy: f64) -> f64 {
    accuracy
}

/// `Cost(e) = e²`.
pub fn cost(effort: f64) -> f64 {
    effort * effort
}

/// `base + (1 - base) · effort`.
pub fn accuracy_from_effort(effort: UnitScore) -> f64 {
    BASE_ACCURACY + (1.0 - BASE_ACCURACY) * effort.get()
}

/// β · reward − cost + γ · reputation change.
pub fn validator_utility(
    reward_at_accuracy: f64,
    cost_at_effort: f64,
    reputation_delta: f64,
    beta: f64,
    gamma: f64,
) -> Result<f64> {
    for (name, x) in [
        ("reward", reward_at_accuracy),
        ("cost", cost_at_effort),
        ("reputation_delta", reputation_delta),
        ("beta", beta),
        ("gamma", gamma),
    ] {
        check_finite(name, x)?;
    }
    Ok(beta * reward_at_accuracy - cost_at_effort + gamma * reputation_delta)
}

/// Honest validation is an equilibrium when β · ∂Reward ≥ ∂Cost.
pub fn honest_equilibrium_condition(marginal_reward: f64, marginal_cost: f64, beta: f64) -> bool {
    beta * marginal_reward >= marginal_cost
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityBound {
    Detection,
    Ratio,
    Decay,
}

impl StabilityBound {
    pub fn name(self) -> &'static str {
        match self {
            StabilityBound::Detection => "detection",
            StabilityBound::Ratio => "ratio",
            StabilityBound::Decay => "decay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub violated: Vec<StabilityBound>,
}

/// detection > 0.3, penalty/reward > 5 and decay in [0.90, 0.95].
pub fn stability_bounds_check(p: &StabilityParams) -> StabilityReport {
    let mut violated = Vec::new();
    if p.detection_probability.get() <= DETECTION_FLOOR {
        violated.push(StabilityBound::Detection);
    }
    if p.penalty_to_reward_ratio.is_nan() || p.penalty_to_reward_ratio <= PENALTY_RATIO_FLOOR {
        violated.push(StabilityBound::Ratio);
    }
    if !(DECAY_RANGE.0..=DECAY_RANGE.1).contains(&p.reputation_decay) {
        violated.push(StabilityBound::Decay);
    }
    StabilityReport {
        stable: violated.is_empty(),
        violated,
    }
}

/// Population shares over [`Strategy::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct StrategyShares(pub [f64; 4]);

impl StrategyShares {
    pub fn new(shares: [f64; 4]) -> Result<Self> {
        let sum: f64 = shares.iter().sum();
        if shares.iter().any(|s| !s.is_finite() || *s < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(PohcError::BadWeights(sum));
        }
        Ok(StrategyShares(shares))
    }

    pub fn get(&self, s: Strategy) -> f64 {
        self.0[s.index()]
    }

    pub fn all_honest() -> Self {
        StrategyShares([1.0, 0.0, 0.0, 0.0])
    }
}

/// One replicator step: `share · (1 + rate · (payoff − mean payoff))`,
/// floored at zero and renormalized. The mean is share-weighted.
pub fn step_strategies(shares: &StrategyShares, payoffs: &[f64; 4], learning_rate: f64) -> Result<StrategyShares> {
    check_finite("learning_rate", learning_rate)?;
    for p in payoffs {
        check_finite("payoff", *p)?;
    }
    let mean: f64 = shares.0.iter().zip(payoffs).map(|(s, p)| s * p).sum();
    let mut next = [0.0; 4];
    for i in 0..4 {
        next[i] = (shares.0[i] * (1.0 + learning_rate * (payoffs[i] - mean))).max(0.0);
    }
    let total: f64 = next.iter().sum();
    if total <= 0.0 {
        return Ok(*shares);
    }
    for x in &mut next {
        *x /= total;
    }
    Ok(StrategyShares(next))
}
