//! The five-layer verification pipeline: per-layer scoring rules, expert
//! selection, routing with daily capacity limits, and the aggregate
//! achievement score.

use std::collections::BTreeMap;

use rand::Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, PohcError, Result};
use crate::feasibility::FeasibilityBand;
use crate::model::{
    ContributionId, Layer, Tick, Tier, TrustStatus, UnitScore, ValidatorId, ValidatorProfile, Verdict, VerdictFlag,
};

/// Layer 1 refuses to score anything whose security check falls below this.
pub const SECURITY_GATE: f64 = 0.8;
/// Layer 1 scores strictly above this trigger the tier-1 validator reward.
pub const TIER1_REWARD_SCORE: f64 = 0.85;
/// Minimum panel for layers 2-5 (stands in for the multi-signature requirement).
pub const MIN_PANEL: usize = 3;
/// Expertise at or above this counts as a domain match in expert selection.
pub const DOMAIN_MATCH_THRESHOLD: f64 = 0.5;
/// DomainMatch factor for an expert outside their field.
pub const OFF_DOMAIN_MATCH: f64 = 0.5;
pub const DEFAULT_CONSENSUS_GAP: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub layer: Layer,
    pub daily_capacity: u32,
    /// Nominal accuracy band `(low, high)` used for reporting.
    pub base_accuracy: (UnitScore, UnitScore),
    pub min_panel: usize,
    /// Validator tier that staffs the layer; `None` for the algorithmic layer.
    pub tier: Option<Tier>,
}

impl LayerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.daily_capacity == 0 {
            return Err(PohcError::InvalidArgument {
                name: "daily_capacity",
                reason: format!("layer {} capacity must be positive", self.layer.number()),
            });
        }
        let floor = if self.layer == Layer::Algorithmic { 1 } else { MIN_PANEL };
        if self.min_panel < floor {
            return Err(PohcError::InvalidArgument {
                name: "min_panel",
                reason: format!("layer {} needs a panel of at least {floor}", self.layer.number()),
            });
        }
        if self.base_accuracy.0 > self.base_accuracy.1 {
            return Err(PohcError::InvalidArgument {
                name: "base_accuracy",
                reason: "low end above high end".into(),
            });
        }
        Ok(())
    }
}

/// Per-layer configuration, always exactly one entry per layer in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(try_from = "Vec<LayerConfig>", into = "Vec<LayerConfig>")]
pub struct LayerTable([LayerConfig; 5]);

impl LayerTable {
    pub fn new(configs: Vec<LayerConfig>) -> Result<Self> {
        if configs.len() != 5 {
            return Err(PohcError::InvalidArgument {
                name: "layers",
                reason: format!("expected 5 layer configs, got {}", configs.len()),
            });
        }
        for (i, c) in configs.iter().enumerate() {
            if c.layer.index() != i {
                return Err(PohcError::InvalidArgument {
                    name: "layers",
                    reason: "layer configs must be listed in order 1..=5".into(),
                });
            }
            c.validate()?;
        }
        let arr: [LayerConfig; 5] = configs.try_into().expect("length checked");
        Ok(LayerTable(arr))
    }

    pub fn get(&self, layer: Layer) -> &LayerConfig {
        &self.0[layer.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &LayerConfig> {
        self.0.iter()
    }

    pub fn total_capacity(&self) -> u64 {
        self.0.iter().map(|c| u64::from(c.daily_capacity)).sum()
    }
}

impl Default for LayerTable {
    /// Upper ends of the per-day capacity ranges, with the default accuracy bands.
    fn default() -> Self {
        let cfg = |layer, cap, lo: f64, hi: f64, panel, tier| LayerConfig {
            layer,
            daily_capacity: cap,
            base_accuracy: (UnitScore::saturate(lo), UnitScore::saturate(hi)),
            min_panel: panel,
            tier,
        };
        LayerTable([
            cfg(Layer::Algorithmic, 2000, 0.90, 0.97, 1, None),
            cfg(Layer::Community, 1200, 0.75, 0.88, 5, Some(Tier::Community)),
            cfg(Layer::Expert, 150, 0.92, 0.99, 3, Some(Tier::Expert)),
            cfg(Layer::CrossCultural, 80, 0.70, 0.85, 4, Some(Tier::Ambassador)),
            cfg(Layer::Impact, 30, 0.80, 0.95, 3, Some(Tier::ImpactAssessor)),
        ])
    }
}

impl TryFrom<Vec<LayerConfig>> for LayerTable {
    type Error = PohcError;
    fn try_from(v: Vec<LayerConfig>) -> Result<Self> {
        LayerTable::new(v)
    }
}

impl From<LayerTable> for Vec<LayerConfig> {
    fn from(t: LayerTable) -> Self {
        t.0.into()
    }
}

/// Scenario-generated observables for the algorithmic checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer1Observation {
    pub correctness: UnitScore,
    pub novelty: UnitScore,
    pub complexity: UnitScore,
    pub authenticity: UnitScore,
    pub security: UnitScore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer1Outcome {
    pub verdict: Verdict,
    /// Score cleared the tier-1 reward trigger.
    pub tier1_reward: bool,
}

pub fn layer1_verify(
    contribution_id: ContributionId,
    obs: &Layer1Observation,
    accept_threshold: f64,
    tick: Tick,
) -> Layer1Outcome {
    if obs.security.get() < SECURITY_GATE {
        return Layer1Outcome {
            verdict: Verdict {
                contribution_id,
                layer: Layer::Algorithmic,
                score: None,
                flag: VerdictFlag::SecurityFlagged,
                validators: Vec::new(),
                tick,
            },
            tier1_reward: false,
        };
    }
    // Integer weights over 10 so that all-ones inputs land exactly on 1.0.
    let base =
        (4.0 * obs.correctness.get() + 3.0 * obs.novelty.get() + 2.0 * obs.complexity.get() + obs.authenticity.get())
            / 10.0;
    let score = UnitScore::saturate(base * obs.security.get());
    let flag = if score.get() >= accept_threshold {
        VerdictFlag::Pass
    } else {
        VerdictFlag::Rejected
    };
    Layer1Outcome {
        verdict: Verdict {
            contribution_id,
            layer: Layer::Algorithmic,
            score: Some(score),
            flag,
            validators: Vec::new(),
            tick,
        },
        tier1_reward: score.get() > TIER1_REWARD_SCORE,
    }
}

pub fn security_weight(status: TrustStatus) -> f64 {
    match status {
        TrustStatus::Trusted => 1.0,
        TrustStatus::NewOrFlagged => 0.5,
        TrustStatus::FraudSuspect => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vote {
    pub validator_id: ValidatorId,
    pub assessment: UnitScore,
    pub tick: Tick,
}

/// A vote together with the per-voter terms of the bias-corrected sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedVote {
    pub vote: Vote,
    pub weight: f64,
    pub bias_correction: f64,
    pub status: TrustStatus,
}

/// `clamp(Σ w_i · vote_i · (1 + bias_i) · securityweight_i)`.
pub fn layer2_score(votes: &[WeightedVote]) -> Result<UnitScore> {
    if votes.len() < MIN_PANEL {
        return Err(PohcError::PanelTooSmall {
            needed: MIN_PANEL,
            got: votes.len(),
        });
    }
    let mut effective = 0.0;
    let mut sum = 0.0;
    for v in votes {
        check_finite("vote weight", v.weight)?;
        check_finite("bias correction", v.bias_correction)?;
        if v.weight < 0.0 {
            return Err(PohcError::InvalidArgument {
                name: "weight",
                reason: format!("{} is negative", v.weight),
            });
        }
        let sw = security_weight(v.status);
        effective += v.weight * sw;
        sum += v.weight * v.vote.assessment.get() * (1.0 + v.bias_correction) * sw;
    }
    if effective <= 0.0 {
        return Err(PohcError::NoTrustedQuorum);
    }
    clamp_sum(sum)
}

fn clamp_sum(x: f64) -> Result<UnitScore> {
    UnitScore::clamped(x)
}

/// Expertise · Reputation · Availability · DomainMatch.
pub fn selection_weight(expert: &ValidatorProfile, domain: &str) -> f64 {
    let expertise = expert.expertise_in(domain).get();
    let domain_match = if expertise >= DOMAIN_MATCH_THRESHOLD {
        1.0
    } else {
        OFF_DOMAIN_MATCH
    };
    expertise * expert.reputation.get() * expert.availability.get() * domain_match
}

/// Draws `k` distinct experts, each draw proportional to [`selection_weight`]
/// among the candidates still in the pool. Zero-weight candidates are only
/// drawn (uniformly) once every positive-weight candidate is taken.
pub fn select_experts<R: Rng + ?Sized>(
    pool: &[ValidatorProfile],
    domain: &str,
    k: usize,
    rng: &mut R,
) -> Result<Vec<ValidatorId>> {
    if pool.is_empty() {
        return Err(PohcError::NoEligibleExperts);
    }
    if k > pool.len() {
        return Err(PohcError::PoolTooSmall { k, pool: pool.len() });
    }
    let mut candidates: Vec<(ValidatorId, f64)> = pool.iter().map(|v| (v.id, selection_weight(v, domain))).collect();
    if candidates.iter().all(|(_, w)| *w <= 0.0) {
        return Err(PohcError::NoEligibleExperts);
    }
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = candidates.iter().map(|(_, w)| *w).sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, (_, w)) in candidates.iter().enumerate() {
                if *w <= 0.0 {
                    continue;
                }
                pick = Some(i);
                if target < *w {
                    break;
                }
                target -= *w;
            }
            pick.expect("positive mass implies a positive candidate")
        } else {
            rng.random_range(0..candidates.len())
        };
        chosen.push(candidates.swap_remove(idx).0);
    }
    Ok(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCulturalResult {
    pub score: UnitScore,
    pub consensus: bool,
    /// Largest gap between two culture means.
    pub max_gap: f64,
}

/// Mean of per-culture means; consensus when every pair of culture means is
/// within `max_gap` of each other.
pub fn layer4_cross_cultural(groups: &BTreeMap<String, Vec<UnitScore>>, max_gap: f64) -> Result<CrossCulturalResult> {
    if groups.len() < 2 {
        return Err(PohcError::NotCrossCultural);
    }
    let mut means = Vec::with_capacity(groups.len());
    for votes in groups.values() {
        if votes.is_empty() {
            return Err(PohcError::NotCrossCultural);
        }
        means.push(votes.iter().map(|v| v.get()).sum::<f64>() / votes.len() as f64);
    }
    let hi = means.iter().cloned().fold(f64::MIN, f64::max);
    let lo = means.iter().cloned().fold(f64::MAX, f64::min);
    let score = UnitScore::saturate(means.iter().sum::<f64>() / means.len() as f64);
    let gap = hi - lo;
    Ok(CrossCulturalResult {
        score,
        consensus: gap <= max_gap + 1e-12,
        max_gap: gap,
    })
}

/// Least-squares slope of measured impact over time, divided by `slope_scale`
/// and clamped into `[0, 1]`.
pub fn layer5_impact(series: &[(Tick, f64)], slope_scale: f64) -> Result<UnitScore> {
    if series.len() < 2 || series.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(PohcError::InvalidSeries);
    }
    if !(slope_scale.is_finite() && slope_scale > 0.0) {
        return Err(PohcError::InvalidArgument {
            name: "slope_scale",
            reason: "must be positive".into(),
        });
    }
    for (_, y) in series {
        check_finite("impact", *y)?;
    }
    let n = series.len() as f64;
    let mx = series.iter().map(|(t, _)| f64::from(*t)).sum::<f64>() / n;
    let my = series.iter().map(|(_, y)| *y).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in series {
        let dx = f64::from(*t) - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    clamp_sum((sxy / sxx) / slope_scale)
}

/// Why a contribution is being sent up the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Escalation {
    /// Layer 1 security gate tripped.
    Security,
    /// Authenticity check or quorum failure asked for an expert look.
    Investigation,
    /// Culturally sensitive material.
    CrossCultural,
    /// Scheduled long-term impact follow-up.
    ImpactFollowUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteRequest {
    pub band: FeasibilityBand,
    pub algorithmic: bool,
    pub culturally_sensitive: bool,
    pub escalation: Option<Escalation>,
}

impl RouteRequest {
    pub fn target(&self) -> Layer {
        match self.escalation {
            Some(Escalation::Security) | Some(Escalation::Investigation) => Layer::Expert,
            Some(Escalation::CrossCultural) => Layer::CrossCultural,
            Some(Escalation::ImpactFollowUp) => Layer::Impact,
            None if self.culturally_sensitive => Layer::CrossCultural,
            None if self.algorithmic && self.band == FeasibilityBand::High => Layer::Algorithmic,
            None => Layer::Community,
        }
    }
}

/// Contributions routed to each layer so far today.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DayLoad([u32; 5]);

impl DayLoad {
    pub fn get(&self, layer: Layer) -> u32 {
        self.0[layer.index()]
    }

    pub fn record(&mut self, layer: Layer) {
        self.0[layer.index()] += 1;
    }

    pub fn counts(&self) -> [u32; 5] {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Layer(Layer),
    /// Target layer is full for the day.
    Queued(Layer),
}

pub fn route(request: &RouteRequest, layers: &LayerTable, load: &DayLoad) -> Route {
    let target = request.target();
    if load.get(target) >= layers.get(target).daily_capacity {
        Route::Queued(target)
    } else {
        Route::Layer(target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApowEntry {
    pub contribution_value: f64,
    pub verification_strength: UnitScore,
    pub civilization_impact: f64,
}

/// Σ value · strength · impact.
pub fn apow_score(entries: &[ApowEntry]) -> Result<f64> {
    let mut total = 0.0;
    for e in entries {
        let v = check_finite("contribution_value", e.contribution_value)?;
        let i = check_finite("civilization_impact", e.civilization_impact)?;
        if v < 0.0 || i < 0.0 {
            return Err(PohcError::InvalidArgument {
                name: "apow entry",
                reason: "value and impact must be non-negative".into(),
            });
        }
        total += v * e.verification_strength.get() * i;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn u(x: f64) -> UnitScore {
        UnitScore::new(x).unwrap()
    }

    fn obs(c: f64, n: f64, x: f64, a: f64, s: f64) -> Layer1Observation {
        Layer1Observation {
            correctness: u(c),
            novelty: u(n),
            complexity: u(x),
            authenticity: u(a),
            security: u(s),
        }
    }

    fn wv(id: u32, a: f64, w: f64, b: f64, status: TrustStatus) -> WeightedVote {
        WeightedVote {
            vote: Vote {
                validator_id: ValidatorId(id),
                assessment: u(a),
                tick: 0,
            },
            weight: w,
            bias_correction: b,
            status,
        }
    }

    #[test]
    fn layer1_examples() {
        let out = layer1_verify(ContributionId(0), &obs(1.0, 1.0, 1.0, 1.0, 1.0), 0.5, 0);
        assert_eq!(out.verdict.score, Some(UnitScore::ONE));
        assert_eq!(out.verdict.flag, VerdictFlag::Pass);
        assert!(out.tier1_reward);

        let out = layer1_verify(ContributionId(0), &obs(1.0, 1.0, 1.0, 1.0, 0.7), 0.5, 0);
        assert_eq!(out.verdict.flag, VerdictFlag::SecurityFlagged);
        assert_eq!(out.verdict.score, None);

        let out = layer1_verify(ContributionId(0), &obs(0.5, 0.5, 0.5, 0.5, 0.9), 0.5, 0);
        assert!((out.verdict.score.unwrap().get() - 0.45).abs() < 1e-12);
        assert_eq!(out.verdict.flag, VerdictFlag::Rejected);
        assert!(!out.tier1_reward);
    }

    #[test]
    fn security_gate_is_inclusive_at_point_eight() {
        let out = layer1_verify(ContributionId(0), &obs(1.0, 1.0, 1.0, 1.0, 0.8), 0.5, 0);
        assert_eq!(out.verdict.flag, VerdictFlag::Pass);
    }

    #[test]
    fn security_weight_table() {
        assert_eq!(security_weight(TrustStatus::Trusted), 1.0);
        assert_eq!(security_weight(TrustStatus::NewOrFlagged), 0.5);
        assert_eq!(security_weight(TrustStatus::FraudSuspect), 0.0);
    }

    #[test]
    fn layer2_examples() {
        let t = TrustStatus::Trusted;
        let third = 1.0 / 3.0;
        let s = layer2_score(&[
            wv(0, 1.0, third, 0.0, t),
            wv(1, 1.0, third, 0.0, t),
            wv(2, 1.0, third, 0.0, t),
        ])
        .unwrap();
        assert!((s.get() - 1.0).abs() < 1e-12);

        let s = layer2_score(&[
            wv(0, 0.8, 0.5, 0.1, TrustStatus::Trusted),
            wv(1, 0.6, 0.5, 0.0, TrustStatus::NewOrFlagged),
            wv(2, 0.9, 0.0, 0.0, TrustStatus::Trusted),
        ])
        .unwrap();
        assert!((s.get() - 0.59).abs() < 1e-12, "{}", s.get());

        let f = TrustStatus::FraudSuspect;
        let with = layer2_score(&[
            wv(0, 0.5, 0.5, 0.0, t),
            wv(1, 0.5, 0.5, 0.0, t),
            wv(2, 1.0, 0.7, 0.3, f),
        ])
        .unwrap();
        let without = layer2_score(&[
            wv(0, 0.5, 0.5, 0.0, t),
            wv(1, 0.5, 0.5, 0.0, t),
            wv(2, 0.0, 0.0, 0.0, t),
        ])
        .unwrap();
        assert_eq!(with, without);

        assert_eq!(
            layer2_score(&[
                wv(0, 1.0, 1.0, 0.0, f),
                wv(1, 1.0, 1.0, 0.0, f),
                wv(2, 1.0, 1.0, 0.0, f)
            ]),
            Err(PohcError::NoTrustedQuorum)
        );
        assert!(matches!(
            layer2_score(&[wv(0, 1.0, 1.0, 0.0, t)]),
            Err(PohcError::PanelTooSmall { .. })
        ));
    }

    fn expert(id: u32, expertise: f64, rep: f64, avail: f64) -> ValidatorProfile {
        ValidatorProfile {
            id: ValidatorId(id),
            tier: Tier::Expert,
            reputation: u(rep),
            security_score: UnitScore::ONE,
            trust_status: TrustStatus::Trusted,
            culture: "A".into(),
            expertise: [("math".to_string(), u(expertise))].into_iter().collect(),
            availability: u(avail),
            strategy: crate::model::Strategy::Honest,
            last_active: 0,
        }
    }

    #[test]
    fn unavailable_expert_is_never_selected() {
        let pool = vec![
            expert(0, 0.9, 0.9, 0.0),
            expert(1, 0.9, 0.9, 1.0),
            expert(2, 0.6, 0.5, 0.5),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let pick = select_experts(&pool, "math", 2, &mut rng).unwrap();
            assert!(!pick.contains(&ValidatorId(0)));
        }
        // With k = pool size the zero-weight expert fills the last slot.
        let all = select_experts(&pool, "math", 3, &mut rng).unwrap();
        assert_eq!(all[2], ValidatorId(0));
    }

    #[test]
    fn expert_selection_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pool = vec![expert(0, 0.9, 0.9, 0.0)];
        assert_eq!(
            select_experts(&pool, "math", 1, &mut rng),
            Err(PohcError::NoEligibleExperts)
        );
        assert!(matches!(
            select_experts(&pool, "math", 2, &mut rng),
            Err(PohcError::PoolTooSmall { .. })
        ));
    }

    fn groups(g: &[(&str, &[f64])]) -> BTreeMap<String, Vec<UnitScore>> {
        g.iter()
            .map(|(k, v)| (k.to_string(), v.iter().map(|x| u(*x)).collect()))
            .collect()
    }

    #[test]
    fn layer4_examples() {
        let r = layer4_cross_cultural(&groups(&[("a", &[0.7, 0.7]), ("b", &[0.7])]), 0.2).unwrap();
        assert!((r.score.get() - 0.7).abs() < 1e-12 && r.consensus);
        let r = layer4_cross_cultural(&groups(&[("a", &[0.9]), ("b", &[0.3])]), 0.2).unwrap();
        assert!((r.score.get() - 0.6).abs() < 1e-12 && !r.consensus);
        let r = layer4_cross_cultural(&groups(&[("a", &[0.8]), ("b", &[0.7])]), 0.2).unwrap();
        assert!((r.score.get() - 0.75).abs() < 1e-12 && r.consensus);
        assert_eq!(
            layer4_cross_cultural(&groups(&[("a", &[0.8])]), 0.2),
            Err(PohcError::NotCrossCultural)
        );
        assert_eq!(
            layer4_cross_cultural(&groups(&[("a", &[0.8]), ("b", &[])]), 0.2),
            Err(PohcError::NotCrossCultural)
        );
    }

    #[test]
    fn layer5_examples() {
        assert_eq!(layer5_impact(&[(0, 3.0), (5, 3.0), (9, 3.0)], 1.0).unwrap().get(), 0.0);
        assert_eq!(layer5_impact(&[(0, 3.0), (1, 2.0), (2, 1.0)], 1.0).unwrap().get(), 0.0);
        assert!((layer5_impact(&[(0, 0.0), (1, 1.0), (2, 2.0)], 1.0).unwrap().get() - 1.0).abs() < 1e-12);
        assert!((layer5_impact(&[(0, 0.0), (10, 1.0)], 0.2).unwrap().get() - 0.5).abs() < 1e-12);
        assert_eq!(layer5_impact(&[(0, 1.0)], 1.0), Err(PohcError::InvalidSeries));
        assert_eq!(layer5_impact(&[(1, 1.0), (1, 2.0)], 1.0), Err(PohcError::InvalidSeries));
    }

    fn req(band: FeasibilityBand, algorithmic: bool, sensitive: bool, esc: Option<Escalation>) -> RouteRequest {
        RouteRequest {
            band,
            algorithmic,
            culturally_sensitive: sensitive,
            escalation: esc,
        }
    }

    #[test]
    fn routing_examples() {
        let layers = LayerTable::default();
        let mut load = DayLoad::default();
        let code = req(FeasibilityBand::High, true, false, None);
        assert_eq!(route(&code, &layers, &load), Route::Layer(Layer::Algorithmic));
        for _ in 0..2000 {
            load.record(Layer::Algorithmic);
        }
        assert_eq!(route(&code, &layers, &load), Route::Queued(Layer::Algorithmic));
        let sensitive = req(FeasibilityBand::High, true, true, None);
        assert_eq!(route(&sensitive, &layers, &load), Route::Layer(Layer::CrossCultural));
        let medium = req(FeasibilityBand::Medium, true, false, None);
        assert_eq!(route(&medium, &layers, &load), Route::Layer(Layer::Community));
        let flagged = req(FeasibilityBand::High, true, false, Some(Escalation::Security));
        assert_eq!(route(&flagged, &layers, &load), Route::Layer(Layer::Expert));
        let follow = req(FeasibilityBand::Medium, false, false, Some(Escalation::ImpactFollowUp));
        assert_eq!(route(&follow, &layers, &load), Route::Layer(Layer::Impact));
    }

    #[test]
    fn layer_table_validation() {
        let mut v: Vec<LayerConfig> = LayerTable::default().into();
        v.swap(0, 1);
        assert!(LayerTable::new(v).is_err());
        let mut v: Vec<LayerConfig> = LayerTable::default().into();
        v[1].min_panel = 2;
        assert!(LayerTable::new(v).is_err());
        assert_eq!(LayerTable::default().total_capacity(), 2000 + 1200 + 150 + 80 + 30);
    }

    #[test]
    fn apow_examples() {
        assert_eq!(apow_score(&[]).unwrap(), 0.0);
        let e = |v, s, i| ApowEntry {
            contribution_value: v,
            verification_strength: u(s),
            civilization_impact: i,
        };
        assert_eq!(apow_score(&[e(2.0, 0.5, 3.0)]).unwrap(), 3.0);
        assert_eq!(apow_score(&[e(1.0, 1.0, 1.0), e(1.0, 1.0, 1.0)]).unwrap(), 2.0);
        assert!(apow_score(&[e(-1.0, 1.0, 1.0)]).is_err());
    }
}
