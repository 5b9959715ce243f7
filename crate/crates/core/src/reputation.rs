//! Reputation updates, reputation-derived vote weights and validator ranking.

use std::collections::BTreeMap;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_normalized_weights, PohcError, Result};
use crate::model::{UnitScore, ValidatorId, ValidatorProfile};

/// Default mixing weight between past reputation and current performance.
pub const DEFAULT_REPUTATION_DECAY: f64 = 0.92;
pub const DIFFICULTY_BONUS: f64 = 0.1;

/// Order: accuracy, speed, security, consistency, innovation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DimensionWeights(pub [f64; 5]);

impl Default for DimensionWeights {
    fn default() -> Self {
        DimensionWeights([0.2; 5])
    }
}

impl DimensionWeights {
    pub fn validate(&self) -> Result<()> {
        check_normalized_weights(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceVector {
    pub accuracy: UnitScore,
    pub speed: UnitScore,
    pub security: UnitScore,
    pub consistency: UnitScore,
    pub innovation: UnitScore,
    pub weights: DimensionWeights,
}

impl PerformanceVector {
    fn dims(&self) -> [f64; 5] {
        [
            self.accuracy.get(),
            self.speed.get(),
            self.security.get(),
            self.consistency.get(),
            self.innovation.get(),
        ]
    }
}

pub fn weighted_performance(p: &PerformanceVector) -> Result<UnitScore> {
    p.weights.validate()?;
    let s = p.dims().iter().zip(p.weights.0.iter()).map(|(x, w)| x * w).sum::<f64>();
    Ok(UnitScore::saturate(s))
}

/// `alpha · rep + (1 - alpha) · weighted_performance(perf)`.
pub fn update_reputation(rep: UnitScore, perf: &PerformanceVector, alpha: f64) -> Result<UnitScore> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(PohcError::OutOfUnitRange {
            what: "alpha",
            value: alpha,
        });
    }
    let p = weighted_performance(perf)?.get();
    Ok(UnitScore::saturate(alpha * rep.get() + (1.0 - alpha) * p))
}

/// `rep² · security`, normalized over the list.
pub fn validation_weights(validators: &[ValidatorProfile]) -> Result<BTreeMap<ValidatorId, f64>> {
    if validators.is_empty() {
        return Err(PohcError::NoWeightMass);
    }
    let raw: Vec<(ValidatorId, f64)> = validators
        .iter()
        .map(|v| (v.id, v.reputation.get().powi(2) * v.security_score.get()))
        .collect();
    normalize_raw_weights(raw)
}

/// Same rule as [`validation_weights`] on bare `(reputation, security)` pairs.
pub fn weight_mass(reputation: UnitScore, security: UnitScore) -> f64 {
    reputation.get().powi(2) * security.get()
}

fn normalize_raw_weights(raw: Vec<(ValidatorId, f64)>) -> Result<BTreeMap<ValidatorId, f64>> {
    let total: f64 = raw.iter().map(|(_, w)| *w).sum();
    if total <= 0.0 {
        return Err(PohcError::NoWeightMass);
    }
    Ok(raw.into_iter().map(|(id, w)| (id, w / total)).collect())
}

pub fn recency_factor(days: u32, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(PohcError::InvalidArgument {
            name: "lambda",
            reason: "must be positive".into(),
        });
    }
    Ok((-lambda * f64::from(days)).exp())
}

pub fn difficulty_multiplier(average_complexity: UnitScore) -> f64 {
    1.0 + DIFFICULTY_BONUS * average_complexity.get()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryInput {
    pub score: f64,
    pub weight: f64,
    pub days_since_last_activity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankInputs {
    pub categories: BTreeMap<String, CategoryInput>,
    pub recency_lambda: f64,
    pub average_complexity: UnitScore,
}

/// Σ w · score · e^{-λ·days} · (1 + 0.1 · complexity).
pub fn validator_rank(inputs: &RankInputs) -> Result<f64> {
    let mult = difficulty_multiplier(inputs.average_complexity);
    let mut rank = 0.0;
    for c in inputs.categories.values() {
        check_finite("category score", c.score)?;
        check_finite("category weight", c.weight)?;
        if c.score < 0.0 || c.weight < 0.0 {
            return Err(PohcError::InvalidArgument {
                name: "category",
                reason: "scores and weights must be non-negative".into(),
            });
        }
        rank += c.weight * c.score * recency_factor(c.days_since_last_activity, inputs.recency_lambda)? * mult;
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Strategy, Tier, TrustStatus};

    fn u(x: f64) -> UnitScore {
        UnitScore::new(x).unwrap()
    }

    fn perf(dims: [f64; 5], weights: [f64; 5]) -> PerformanceVector {
        PerformanceVector {
            accuracy: u(dims[0]),
            speed: u(dims[1]),
            security: u(dims[2]),
            consistency: u(dims[3]),
            innovation: u(dims[4]),
            weights: DimensionWeights(weights),
        }
    }

    fn v(id: u32, rep: f64, sec: f64) -> ValidatorProfile {
        ValidatorProfile {
            id: ValidatorId(id),
            tier: Tier::Community,
            reputation: u(rep),
            security_score: u(sec),
            trust_status: TrustStatus::Trusted,
            culture: "A".into(),
            expertise: BTreeMap::new(),
            availability: UnitScore::ONE,
            strategy: Strategy::Honest,
            last_active: 0,
        }
    }

    #[test]
    fn weighted_performance_examples() {
        let eq = [0.2; 5];
        assert_eq!(weighted_performance(&perf([1.0; 5], eq)).unwrap().get(), 1.0);
        assert_eq!(weighted_performance(&perf([0.0; 5], eq)).unwrap().get(), 0.0);
        let p = perf([0.8, 0.4, 0.9, 0.9, 0.9], [0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!((weighted_performance(&p).unwrap().get() - 0.6).abs() < 1e-12);
        assert!(weighted_performance(&perf([1.0; 5], [0.5; 5])).is_err());
    }

    #[test]
    fn update_examples() {
        let p = perf([0.3, 0.3, 0.3, 0.3, 0.3], [0.2; 5]);
        assert_eq!(update_reputation(u(0.7), &p, 1.0).unwrap().get(), 0.7);
        assert!((update_reputation(u(0.7), &p, 0.0).unwrap().get() - 0.3).abs() < 1e-12);
        let full = perf([1.0; 5], [0.2; 5]);
        assert!((update_reputation(u(0.5), &full, 0.9).unwrap().get() - 0.55).abs() < 1e-12);
        assert!(update_reputation(u(0.5), &full, 1.1).is_err());
    }

    #[test]
    fn validation_weight_examples() {
        let w = validation_weights(&[v(0, 0.6, 0.9), v(1, 0.6, 0.9), v(2, 0.6, 0.9)]).unwrap();
        assert!(w.values().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
        let w = validation_weights(&[v(0, 1.0, 0.7), v(1, 0.5, 0.7)]).unwrap();
        assert!((w[&ValidatorId(0)] - 0.8).abs() < 1e-12);
        assert!((w[&ValidatorId(1)] - 0.2).abs() < 1e-12);
        let w = validation_weights(&[v(0, 1.0, 0.0), v(1, 0.5, 0.7)]).unwrap();
        assert_eq!(w[&ValidatorId(0)], 0.0);
        assert_eq!(validation_weights(&[v(0, 0.0, 1.0)]), Err(PohcError::NoWeightMass));
        assert_eq!(validation_weights(&[]), Err(PohcError::NoWeightMass));
    }

    #[test]
    fn recency_examples() {
        assert_eq!(recency_factor(0, 0.3).unwrap(), 1.0);
        // e^{-1} to 20 digits: 0.36787944117144233
        assert!((recency_factor(10, 0.1).unwrap() - 0.367_879_441_171_442_33).abs() < 1e-6);
        let xs: Vec<f64> = (0..20).map(|d| recency_factor(d, 0.05).unwrap()).collect();
        assert!(xs.windows(2).all(|w| w[1] < w[0]));
        assert!(recency_factor(1, 0.0).is_err());
    }

    fn cat(score: f64, weight: f64, days: u32) -> CategoryInput {
        CategoryInput {
            score,
            weight,
            days_since_last_activity: days,
        }
    }

    #[test]
    fn rank_examples() {
        let one = |complexity| RankInputs {
            categories: [("accuracy".to_string(), cat(1.0, 1.0, 0))].into_iter().collect(),
            recency_lambda: 0.1,
            average_complexity: u(complexity),
        };
        assert_eq!(validator_rank(&one(0.0)).unwrap(), 1.0);
        assert!((validator_rank(&one(1.0)).unwrap() - 1.1).abs() < 1e-12);
        let two = RankInputs {
            categories: [("a".to_string(), cat(1.0, 0.5, 0)), ("b".to_string(), cat(0.5, 1.0, 0))]
                .into_iter()
                .collect(),
            recency_lambda: 0.1,
            average_complexity: u(0.0),
        };
        assert_eq!(validator_rank(&two).unwrap(), 1.0);
    }
}
