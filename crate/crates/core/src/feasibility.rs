//! Domain feasibility scoring and band classification.
//!
//! A domain's feasibility blends how objective its assessments are, how much
//! of a contribution can be checked, and how closely cultures agree on what
//! counts as valuable.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{PohcError, Result};
use crate::model::{CulturalProfile, UnitScore};

pub const OBJECTIVITY_WEIGHT: f64 = 0.4;
pub const VERIFIABILITY_WEIGHT: f64 = 0.3;
pub const CONSENSUS_WEIGHT: f64 = 0.3;

/// Upper band edge (exclusive): `F > 0.7` is HIGH.
pub const HIGH_BAND: f64 = 0.7;
/// Lower band edge (exclusive): `F < 0.4` is LOW.
pub const LOW_BAND: f64 = 0.4;
/// Minimum cross-cultural consensus for a viable domain.
pub const VIABILITY_THRESHOLD: f64 = 0.6;

/// Additive smoothing applied to every category before taking a KL divergence.
pub const KL_SMOOTHING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub name: String,
    pub objectivity: UnitScore,
    pub verifiable_aspects: u32,
    pub total_aspects: u32,
    pub cultures: Vec<CulturalProfile>,
    /// Issuance weight for contributions in this domain.
    pub economy_weight: f64,
    /// Contributions can be checked by automated tests (eligible for layer 1).
    #[serde(default)]
    pub algorithmic: bool,
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.total_aspects == 0 {
            return Err(PohcError::NoAspects);
        }
        if self.verifiable_aspects > self.total_aspects {
            return Err(PohcError::TooManyVerifiable {
                verifiable: self.verifiable_aspects,
                total: self.total_aspects,
            });
        }
        if self.cultures.is_empty() {
            return Err(PohcError::TooFewCultures { needed: 1, got: 0 });
        }
        if !(self.economy_weight.is_finite() && self.economy_weight > 0.0) {
            return Err(PohcError::NonPositiveFactor("economy_weight"));
        }
        Ok(())
    }

    /// Full feasibility score from the domain's component inputs.
    pub fn feasibility(&self) -> Result<UnitScore> {
        self.validate()?;
        let ver = verifiability(self.verifiable_aspects, self.total_aspects)?;
        let cc = cultural_consensus(&self.cultures)?;
        Ok(feasibility_score(self.objectivity, ver, cc))
    }

    pub fn classify(&self) -> Result<Classification> {
        Ok(classify_domain(self.feasibility()?))
    }
}

/// `1 - Var/Mean` over cross-cultural assessments, clamped to `[0, 1]`.
/// Uses the population variance.
pub fn objectivity(assessments: &[f64]) -> Result<UnitScore> {
    if assessments.is_empty() || assessments.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(PohcError::DegenerateAssessments);
    }
    let n = assessments.len() as f64;
    let mean = assessments.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Err(PohcError::DegenerateAssessments);
    }
    let var = assessments.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    Ok(UnitScore::saturate(1.0 - var / mean))
}

pub fn verifiability(verifiable: u32, total: u32) -> Result<UnitScore> {
    if total == 0 {
        return Err(PohcError::NoAspects);
    }
    if verifiable > total {
        return Err(PohcError::TooManyVerifiable { verifiable, total });
    }
    UnitScore::new(f64::from(verifiable) / f64::from(total))
}

/// `KL(p || q)` in nats after smoothing both sides by [`KL_SMOOTHING`].
pub fn kl_divergence(p: &CulturalProfile, q: &CulturalProfile) -> Result<f64> {
    if p.len() != q.len() {
        return Err(PohcError::DimensionMismatch);
    }
    let ps = p.smoothed(KL_SMOOTHING);
    let qs = q.smoothed(KL_SMOOTHING);
    let kl = ps.iter().zip(&qs).map(|(a, b)| a * (a / b).ln()).sum::<f64>();
    // Rounding can push the divergence of near-identical inputs slightly negative.
    Ok(kl.max(0.0))
}

/// Largest `KL(P_i || P_j)` over all ordered pairs `i != j`; zero for fewer
/// than two profiles.
pub fn max_pairwise_kl(cultures: &[CulturalProfile]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (i, p) in cultures.iter().enumerate() {
        for (j, q) in cultures.iter().enumerate() {
            if i != j {
                worst = worst.max(kl_divergence(p, q)?);
            }
        }
    }
    Ok(worst)
}

/// `1 - max pairwise KL`, clamped. A single culture has full consensus.
pub fn cultural_consensus(cultures: &[CulturalProfile]) -> Result<UnitScore> {
    if cultures.is_empty() {
        return Err(PohcError::TooFewCultures { needed: 1, got: 0 });
    }
    Ok(UnitScore::saturate(1.0 - max_pairwise_kl(cultures)?))
}

pub fn feasibility_score(obj: UnitScore, ver: UnitScore, cc: UnitScore) -> UnitScore {
    UnitScore::saturate(OBJECTIVITY_WEIGHT * obj.get() + VERIFIABILITY_WEIGHT * ver.get() + CONSENSUS_WEIGHT * cc.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeasibilityBand {
    High,
    Medium,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub band: FeasibilityBand,
    pub is_viable: bool,
}

/// Both band edges are strict, so exactly 0.4 and 0.7 land in MEDIUM.
pub fn classify_domain(f: UnitScore) -> Classification {
    let x = f.get();
    let band = if x > HIGH_BAND {
        FeasibilityBand::High
    } else if x < LOW_BAND {
        FeasibilityBand::Low
    } else {
        FeasibilityBand::Medium
    };
    Classification {
        band,
        is_viable: x > VIABILITY_THRESHOLD,
    }
}
