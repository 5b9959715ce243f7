//! Shared domain types: bounded scores, contributions, validator profiles,
//! verdicts and cultural value profiles.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use schemars::{json_schema, JsonSchema, Schema, SchemaGenerator};
use serde::{Deserialize, Serialize};

use crate::error::{PohcError, Result};

/// A real number in `[0, 1]`.
///
/// There are two constructors and callers pick one explicitly:
/// [`UnitScore::clamped`] saturates out-of-range values, [`UnitScore::new`]
/// rejects them.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct UnitScore(f64);

impl UnitScore {
    pub const ZERO: UnitScore = UnitScore(0.0);
    pub const ONE: UnitScore = UnitScore(1.0);

    /// Strict constructor: `x` must be finite and inside `[0, 1]`.
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(PohcError::NonFinite("unit score"));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(PohcError::OutOfUnitRange {
                what: "unit score",
                value: x,
            });
        }
        Ok(UnitScore(x))
    }

    /// Clamping constructor. Non-finite input is still an error.
    pub fn clamped(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(PohcError::NonFinite("unit score"));
        }
        Ok(UnitScore(x.clamp(0.0, 1.0)))
    }

    /// Clamps a value already known to be finite (formula outputs built from
    /// finite unit scores).
    pub(crate) fn saturate(x: f64) -> Self {
        debug_assert!(x.is_finite());
        UnitScore(if x.is_nan() { 0.0 } else { x.clamp(0.0, 1.0) })
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// `min(max(x, 0), 1)`; rejects NaN and infinities.
pub fn clamp_unit(x: f64) -> Result<UnitScore> {
    UnitScore::clamped(x)
}

impl TryFrom<f64> for UnitScore {
    type Error = PohcError;
    fn try_from(x: f64) -> Result<Self> {
        UnitScore::new(x)
    }
}

impl From<UnitScore> for f64 {
    fn from(u: UnitScore) -> f64 {
        u.0
    }
}

impl fmt::Display for UnitScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl JsonSchema for UnitScore {
    fn schema_name() -> Cow<'static, str> {
        "UnitScore".into()
    }

    fn json_schema(_: &mut SchemaGenerator) -> Schema {
        json_schema!({ "type": "number", "minimum": 0.0, "maximum": 1.0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(transparent)]
pub struct ValidatorId(pub u32);

impl fmt::Display for ValidatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContributionId(pub u64);

impl fmt::Display for ContributionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Simulation time. One tick is one day.
pub type Tick = u32;

/// The five verification stages, in escalation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema)]
pub enum Layer {
    Algorithmic = 1,
    Community = 2,
    Expert = 3,
    CrossCultural = 4,
    Impact = 5,
}

impl Layer {
    pub const ALL: [Layer; 5] = [
        Layer::Algorithmic,
        Layer::Community,
        Layer::Expert,
        Layer::CrossCultural,
        Layer::Impact,
    ];

    /// 1-based layer number.
    pub fn number(self) -> u8 {
        self as u8
    }

    /// 0-based index for per-layer arrays.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_number(n: u8) -> Result<Layer> {
        match n {
            1..=5 => Ok(Layer::ALL[n as usize - 1]),
            _ => Err(PohcError::InvalidArgument {
                name: "layer",
                reason: format!("{n} is not in 1..=5"),
            }),
        }
    }
}

/// Evidence channels attached to a contribution. Authorship attestation
/// stands in for a signature check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvidenceBundle {
    pub temporal: bool,
    pub social: bool,
    pub technical: bool,
    pub impact: bool,
    pub authorship_attested: bool,
}

impl EvidenceBundle {
    /// Fraction of the four evidence channels present.
    pub fn coverage(&self) -> f64 {
        [self.temporal, self.social, self.technical, self.impact]
            .iter()
            .filter(|b| **b)
            .count() as f64
            / 4.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: ContributionId,
    pub domain: String,
    pub contributor: u32,
    /// Latent ground truth; only the simulator and accuracy metrics read it.
    pub true_quality: UnitScore,
    pub evidence: EvidenceBundle,
    pub submitted_at: Tick,
    pub complexity: UnitScore,
    pub culturally_sensitive: bool,
    /// Latent: the submission carries malicious content.
    pub malicious: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrustStatus {
    Trusted,
    NewOrFlagged,
    FraudSuspect,
}

impl TrustStatus {
    /// One step towards `FraudSuspect`.
    pub fn demoted(self) -> TrustStatus {
        match self {
            TrustStatus::Trusted => TrustStatus::NewOrFlagged,
            _ => TrustStatus::FraudSuspect,
        }
    }

    /// One step towards `Trusted`.
    pub fn promoted(self) -> TrustStatus {
        match self {
            TrustStatus::FraudSuspect => TrustStatus::NewOrFlagged,
            _ => TrustStatus::Trusted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Honest,
    Lazy,
    Colluder,
    SybilOperator,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Honest,
        Strategy::Lazy,
        Strategy::Colluder,
        Strategy::SybilOperator,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_dishonest(self) -> bool {
        self != Strategy::Honest
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tier {
    Community,
    Expert,
    Ambassador,
    ImpactAssessor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatorProfile {
    pub id: ValidatorId,
    pub tier: Tier,
    pub reputation: UnitScore,
    pub security_score: UnitScore,
    pub trust_status: TrustStatus,
    pub culture: String,
    /// Expertise per domain; covers every domain in the scenario.
    pub expertise: BTreeMap<String, UnitScore>,
    pub availability: UnitScore,
    pub strategy: Strategy,
    pub last_active: Tick,
}

impl ValidatorProfile {
    pub fn expertise_in(&self, domain: &str) -> UnitScore {
        self.expertise.get(domain).copied().unwrap_or(UnitScore::ZERO)
    }

    /// Every score field is inside `[0, 1]`.
    pub fn scores_in_range(&self) -> bool {
        let ok = |u: UnitScore| (0.0..=1.0).contains(&u.get());
        ok(self.reputation)
            && ok(self.security_score)
            && ok(self.availability)
            && self.expertise.values().all(|u| ok(*u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictFlag {
    Pass,
    SecurityFlagged,
    CollusionFlagged,
    Rejected,
}

/// One layer's outcome for one contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub contribution_id: ContributionId,
    pub layer: Layer,
    /// `None` only when the layer refused to score (security flag).
    pub score: Option<UnitScore>,
    pub flag: VerdictFlag,
    pub validators: Vec<ValidatorId>,
    pub tick: Tick,
}

impl Verdict {
    pub fn new(
        contribution_id: ContributionId,
        layer: Layer,
        score: Option<UnitScore>,
        flag: VerdictFlag,
        validators: Vec<ValidatorId>,
        tick: Tick,
    ) -> Result<Verdict> {
        if layer != Layer::Algorithmic && validators.is_empty() {
            return Err(PohcError::InvalidArgument {
                name: "validators",
                reason: format!("layer {} verdict needs at least one validator", layer.number()),
            });
        }
        Ok(Verdict {
            contribution_id,
            layer,
            score,
            flag,
            validators,
            tick,
        })
    }

    /// True for PASS and REJECTED: the verdict decides the contribution.
    pub fn is_decisive(&self) -> bool {
        matches!(self.flag, VerdictFlag::Pass | VerdictFlag::Rejected)
    }
}

/// Categorical distribution over a fixed alphabet of value dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CulturalProfile {
    distribution: Vec<f64>,
}

pub const PROFILE_SUM_TOLERANCE: f64 = 1e-9;

impl CulturalProfile {
    pub fn new(distribution: Vec<f64>) -> Result<Self> {
        if distribution.is_empty() {
            return Err(PohcError::InvalidArgument {
                name: "distribution",
                reason: "empty alphabet".into(),
            });
        }
        if distribution.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(PohcError::InvalidArgument {
                name: "distribution",
                reason: "entries must be finite and non-negative".into(),
            });
        }
        let sum: f64 = distribution.iter().sum();
        if (sum - 1.0).abs() > PROFILE_SUM_TOLERANCE {
            return Err(PohcError::Unnormalized(sum));
        }
        Ok(CulturalProfile { distribution })
    }

    /// Builds a profile from arbitrary non-negative weights by dividing by their sum.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(PohcError::NoWeightMass);
        }
        Self::new(weights.iter().map(|w| w / sum).collect())
    }

    pub fn uniform(k: usize) -> Self {
        CulturalProfile {
            distribution: vec![1.0 / k as f64; k],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.distribution
    }

    pub fn len(&self) -> usize {
        self.distribution.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distribution.is_empty()
    }

    /// Adds `delta` entrywise, floors at zero and renormalizes. Falls back to
    /// the uniform profile when every entry is driven to zero.
    pub fn perturbed(&self, delta: &[f64]) -> Result<Self> {
        if delta.len() != self.len() {
            return Err(PohcError::DimensionMismatch);
        }
        let raw: Vec<f64> = self
            .distribution
            .iter()
            .zip(delta)
            .map(|(p, d)| (p + d).max(0.0))
            .collect();
        if raw.iter().sum::<f64>() <= 0.0 {
            return Ok(Self::uniform(self.len()));
        }
        Self::from_weights(&raw)
    }

    /// Adds `eps` to every category and renormalizes.
    pub fn smoothed(&self, eps: f64) -> Vec<f64> {
        let denom = 1.0 + eps * self.len() as f64;
        self.distribution.iter().map(|p| (p + eps) / denom).collect()
    }
}

impl TryFrom<Vec<f64>> for CulturalProfile {
    type Error = PohcError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        CulturalProfile::new(v)
    }
}

impl From<CulturalProfile> for Vec<f64> {
    fn from(p: CulturalProfile) -> Vec<f64> {
        p.distribution
    }
}

impl JsonSchema for CulturalProfile {
    fn schema_name() -> Cow<'static, str> {
        "CulturalProfile".into()
    }

    fn json_schema(_: &mut SchemaGenerator) -> Schema {
        json_schema!({
            "type": "array",
            "items": { "type": "number", "minimum": 0.0 },
            "minItems": 1,
            "description": "probability vector; entries sum to 1 within 1e-9"
        })
    }
}
