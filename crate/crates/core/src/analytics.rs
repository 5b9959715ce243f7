//! Closed-form models: queueing metrics, the Bayesian quality posterior,
//! verdict confidence, the cultural bias floor and the user growth ODE.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, PohcError, Result};
use crate::feasibility::max_pairwise_kl;
use crate::model::{CulturalProfile, UnitScore};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueParams {
    /// λ, arrivals per tick.
    pub arrival_rate: f64,
    /// μ, services per tick per server.
    pub service_rate: f64,
    /// c.
    pub servers: u32,
}

impl QueueParams {
    fn capacity(&self) -> Result<f64> {
        if !(self.service_rate.is_finite() && self.service_rate > 0.0) || self.servers == 0 {
            return Err(PohcError::InvalidArgument {
                name: "queue",
                reason: "service rate must be positive and servers >= 1".into(),
            });
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate >= 0.0) {
            return Err(PohcError::InvalidArgument {
                name: "arrival_rate",
                reason: "must be >= 0".into(),
            });
        }
        Ok(f64::from(self.servers) * self.service_rate)
    }
}

/// ρ = λ / (cμ).
pub fn utilization(q: &QueueParams) -> Result<f64> {
    Ok(q.arrival_rate / q.capacity()?)
}

/// W = ρ / (cμ − λ) + 1/μ, the simplified wait-time expression (not Erlang-C).
/// Evaluated over a common denominator so exact inputs round once.
pub fn wait_time(q: &QueueParams) -> Result<f64> {
    let cap = q.capacity()?;
    if q.arrival_rate >= cap {
        return Err(PohcError::UnstableQueue);
    }
    let rho = q.arrival_rate / cap;
    let slack = cap - q.arrival_rate;
    Ok((rho * q.service_rate + slack) / (slack * q.service_rate))
}

/// λ_max = Σ c · μ over validator types.
pub fn max_throughput(layers: &[(u32, f64)]) -> f64 {
    layers.iter().map(|(c, mu)| f64::from(*c) * mu).sum()
}

pub fn quality_adjusted_throughput(max_rate: f64, average_accuracy: UnitScore) -> f64 {
    max_rate * average_accuracy.get()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    /// Security-adjusted assessment A′.
    pub value: UnitScore,
    /// σ², the assessor's noise variance.
    pub variance: f64,
    pub reputation_weight: f64,
}

/// Precision-weighted posterior mean under a Beta(α, β) prior:
/// `(Σ w·A′/σ² + α) / (Σ w/σ² + α + β)`, clamped to `[0, 1]`.
pub fn posterior_quality(assessments: &[Assessment], alpha: f64, beta: f64) -> Result<UnitScore> {
    if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
        return Err(PohcError::InvalidArgument {
            name: "prior",
            reason: "alpha and beta must be positive".into(),
        });
    }
    let mut num = alpha;
    let mut den = alpha + beta;
    for a in assessments {
        check_finite("variance", a.variance)?;
        check_finite("reputation_weight", a.reputation_weight)?;
        if a.variance <= 0.0 || a.reputation_weight < 0.0 {
            return Err(PohcError::InvalidArgument {
                name: "assessment",
                reason: "variance must be positive and weight non-negative".into(),
            });
        }
        num += a.value.get() / a.variance * a.reputation_weight;
        den += a.reputation_weight / a.variance;
    }
    UnitScore::clamped(num / den)
}

/// `sqrt(C_T · C_S · C_Sec)`.
pub fn confidence(technical: UnitScore, social: UnitScore, security: UnitScore) -> UnitScore {
    UnitScore::saturate((technical.get() * social.get() * security.get()).sqrt())
}

/// `1 − Var(assessments)` (population variance).
pub fn technical_confidence(assessments: &[f64]) -> UnitScore {
    if assessments.is_empty() {
        return UnitScore::ZERO;
    }
    let n = assessments.len() as f64;
    let m = assessments.iter().sum::<f64>() / n;
    let var = assessments.iter().map(|a| (a - m).powi(2)).sum::<f64>() / n;
    UnitScore::saturate(1.0 - var)
}

/// `1 − Pr(fraud detected)`. Taken literally: more detected fraud lowers confidence.
pub fn security_confidence(fraud_detected: UnitScore) -> UnitScore {
    UnitScore::saturate(1.0 - fraud_detected.get())
}

/// max pairwise KL (nats, smoothed) · P(conflict).
pub fn bias_lower_bound(cultures: &[CulturalProfile], p_conflict: UnitScore) -> Result<f64> {
    if cultures.len() < 2 {
        return Err(PohcError::TooFewCultures {
            needed: 2,
            got: cultures.len(),
        });
    }
    Ok(max_pairwise_kl(cultures)? * p_conflict.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrowthParams {
    pub growth_rate: f64,
    pub churn_rate: f64,
    pub network_gamma: f64,
    pub carrying_capacity: f64,
    pub min_viable_token_value: f64,
    pub base_churn: UnitScore,
}

impl GrowthParams {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("growth_rate", self.growth_rate),
            ("churn_rate", self.churn_rate),
            ("network_gamma", self.network_gamma),
            ("min_viable_token_value", self.min_viable_token_value),
        ] {
            check_finite(name, x)?;
        }
        if !(self.carrying_capacity.is_finite() && self.carrying_capacity > 0.0) {
            return Err(PohcError::InvalidArgument {
                name: "carrying_capacity",
                reason: "must be positive".into(),
            });
        }
        if self.growth_rate < 0.0 || self.churn_rate < 0.0 || self.network_gamma < 0.0 {
            return Err(PohcError::InvalidArgument {
                name: "growth",
                reason: "rates must be non-negative".into(),
            });
        }
        Ok(())
    }

    /// Base churn, doubled unless the token value clears the viability floor.
    pub fn churn_factor(&self, token_value: f64) -> f64 {
        if token_value > self.min_viable_token_value {
            self.base_churn.get()
        } else {
            2.0 * self.base_churn.get()
        }
    }
}

/// dU/dt = α·U·(1 − U/K)·(1 + γ·ln(max(U, 1))) − β·U·churn.
pub fn growth_derivative(users: f64, token_value: f64, p: &GrowthParams) -> f64 {
    let network = 1.0 + p.network_gamma * users.max(1.0).ln();
    p.growth_rate * users * (1.0 - users / p.carrying_capacity) * network
        - p.churn_rate * users * p.churn_factor(token_value)
}

fn check_step(users: f64, dt: f64) -> Result<()> {
    check_finite("users", users)?;
    if users < 0.0 {
        return Err(PohcError::InvalidArgument {
            name: "users",
            reason: "must be >= 0".into(),
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PohcError::InvalidArgument {
            name: "dt",
            reason: "must be positive".into(),
        });
    }
    Ok(())
}

/// One classical RK4 step, floored at zero.
pub fn growth_step(users: f64, token_value: f64, p: &GrowthParams, dt: f64) -> Result<f64> {
    check_step(users, dt)?;
    let f = |u: f64| growth_derivative(u, token_value, p);
    let k1 = f(users);
    let k2 = f(users + 0.5 * dt * k1);
    let k3 = f(users + 0.5 * dt * k2);
    let k4 = f(users + dt * k3);
    Ok((users + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0))
}

/// Forward Euler step, for cross-checking the RK4 integrator.
pub fn growth_step_euler(users: f64, token_value: f64, p: &GrowthParams, dt: f64) -> Result<f64> {
    check_step(users, dt)?;
    Ok((users + dt * growth_derivative(users, token_value, p)).max(0.0))
}
