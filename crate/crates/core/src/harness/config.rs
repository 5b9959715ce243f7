//! Scenario files: parsing, defaults and validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::agents::StabilityParams;
use crate::analytics::GrowthParams;
use crate::feasibility::DomainSpec;
use crate::model::{CulturalProfile, Layer, Strategy, Tier, UnitScore};
use crate::pipeline::{LayerConfig, LayerTable};
use crate::reputation::DimensionWeights;
use crate::security::EQUAL_AUTHENTICITY_WEIGHTS;

/// A config problem, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() || self.field == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    /// Number of ticks (days) to simulate.
    pub horizon: u32,
    pub domains: Vec<DomainSpec>,
    /// Expected contributions per tick, by domain name.
    pub arrival_rates: BTreeMap<String, f64>,
    #[serde(default)]
    pub contributions: ContributionParams,
    #[serde(rename = "validator_population")]
    pub population: Vec<PopulationEntry>,
    #[serde(default, rename = "layer_configs")]
    pub layers: LayerTable,
    #[serde(default)]
    pub voting: VotingParams,
    #[serde(default)]
    pub reputation: ReputationParams,
    #[serde(default)]
    pub economy: EconomyParams,
    #[serde(default)]
    pub security: SecurityParams,
    #[serde(default)]
    pub agents: AgentParams,
    #[serde(default)]
    pub growth: GrowthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PopulationEntry {
    pub tier: Tier,
    pub strategy: Strategy,
    #[serde(default = "default_culture")]
    pub culture: String,
    pub count: u32,
}

fn default_culture() -> String {
    "global".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ContributionParams {
    /// Latent quality ~ Beta(quality_alpha, quality_beta).
    pub quality_alpha: f64,
    pub quality_beta: f64,
    pub malicious_fraction: f64,
    pub culturally_sensitive_fraction: f64,
    pub contributors: u32,
}

impl Default for ContributionParams {
    fn default() -> Self {
        ContributionParams {
            quality_alpha: 2.0,
            quality_beta: 2.0,
            malicious_fraction: 0.02,
            culturally_sensitive_fraction: 0.05,
            contributors: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct VotingParams {
    /// Scores at or above this are accepted; latent quality at or above it is "good".
    pub accept_threshold: f64,
    pub honest_noise: f64,
    pub expert_noise: f64,
    pub algorithmic_noise: f64,
    pub colluder_copy_probability: f64,
    /// What sybil identities vote on every contribution.
    pub sybil_vote: f64,
    pub clique_size: u32,
    pub sybil_group_size: u32,
    /// Largest allowed gap between culture means in layer 4.
    pub consensus_gap: f64,
    /// Additive assessment offset per culture name in layer 4.
    pub culture_bias: BTreeMap<String, f64>,
    /// Ticks between a pass and its long-term impact review.
    pub impact_horizon: u32,
    pub impact_followup_fraction: f64,
    pub impact_slope_scale: f64,
    /// Beta prior for the posterior-error metric.
    pub prior_alpha: f64,
    pub prior_beta: f64,
}

impl Default for VotingParams {
    fn default() -> Self {
        VotingParams {
            accept_threshold: 0.5,
            honest_noise: 0.1,
            expert_noise: 0.05,
            algorithmic_noise: 0.05,
            colluder_copy_probability: 0.9,
            sybil_vote: 0.95,
            clique_size: 4,
            sybil_group_size: 5,
            consensus_gap: 0.2,
            culture_bias: BTreeMap::new(),
            impact_horizon: 30,
            impact_followup_fraction: 0.1,
            impact_slope_scale: 0.02,
            prior_alpha: 2.0,
            prior_beta: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ReputationParams {
    pub initial: UnitScore,
    pub weights: DimensionWeights,
    /// Speed dimension is `exp(-latency / latency_scale)`, latency in hours.
    pub latency_scale: f64,
    /// Innovation dimension; the simulator has no signal for it.
    pub innovation: UnitScore,
    /// After each update, reputation drops by `deviation_penalty · (vote - score)²`.
    pub deviation_penalty: f64,
}

impl Default for ReputationParams {
    fn default() -> Self {
        ReputationParams {
            initial: UnitScore::saturate(0.5),
            weights: DimensionWeights::default(),
            latency_scale: 4.0,
            innovation: UnitScore::saturate(0.5),
            deviation_penalty: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct EconomyParams {
    pub enabled: bool,
    pub base_reward: f64,
    /// Daily issuance target for the anti-inflation factor.
    pub target_daily_issuance: f64,
    pub security_bonus: f64,
    /// Paid per flag from the security pool; confirmed flags earn the detection bonus.
    pub detector_reward: f64,
}

impl Default for EconomyParams {
    fn default() -> Self {
        EconomyParams {
            enabled: true,
            base_reward: 100.0,
            target_daily_issuance: 3000.0,
            security_bonus: 1.0,
            detector_reward: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct SecurityParams {
    pub enabled: bool,
    /// Demote and penalize flagged validators.
    pub enforce: bool,
    /// Ticks per detection window.
    pub interval: u32,
    pub collusion_threshold: f64,
    pub similarity_threshold: f64,
    pub sybil_threshold: f64,
    /// Two votes within this distance count as agreeing.
    pub agreement_tolerance: f64,
    /// Pairs need this many shared contributions for correlation signals.
    pub min_co_votes: u32,
    pub background_edge_probability: f64,
    pub background_edge_max: f64,
    /// Social proximity between members of the same clique or sybil group.
    pub group_edge: f64,
    pub authenticity_check: bool,
    pub authenticity_threshold: UnitScore,
    pub authenticity_weights: [f64; 5],
}

impl Default for SecurityParams {
    fn default() -> Self {
        SecurityParams {
            enabled: true,
            enforce: true,
            interval: 10,
            collusion_threshold: crate::security::DEFAULT_COLLUSION_THRESHOLD,
            similarity_threshold: crate::security::DEFAULT_SIMILARITY_THRESHOLD,
            sybil_threshold: crate::security::DEFAULT_SYBIL_THRESHOLD,
            agreement_tolerance: 0.05,
            min_co_votes: 5,
            background_edge_probability: 0.05,
            background_edge_max: 0.3,
            group_edge: 0.9,
            authenticity_check: true,
            authenticity_threshold: UnitScore::saturate(crate::security::DEFAULT_AUTHENTICITY_THRESHOLD),
            authenticity_weights: EQUAL_AUTHENTICITY_WEIGHTS,
        }
    }
}

/// One value per strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PerStrategy {
    pub honest: f64,
    pub lazy: f64,
    pub colluder: f64,
    pub sybil_operator: f64,
}

impl PerStrategy {
    pub fn get(&self, s: Strategy) -> f64 {
        match s {
            Strategy::Honest => self.honest,
            Strategy::Lazy => self.lazy,
            Strategy::Colluder => self.colluder,
            Strategy::SybilOperator => self.sybil_operator,
        }
    }

    fn values(&self) -> [f64; 4] {
        [self.honest, self.lazy, self.colluder, self.sybil_operator]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct AgentParams {
    /// Run strategy dynamics over the community tier.
    pub enabled: bool,
    /// Ticks per strategy period.
    pub period: u32,
    pub learning_rate: f64,
    pub beta: f64,
    pub gamma: f64,
    pub effort: PerStrategy,
    /// Private per-period gain from acting dishonestly.
    pub side_gain: PerStrategy,
    /// `reputation_decay` doubles as the reputation update's alpha.
    pub stability: StabilityParams,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            enabled: true,
            period: 5,
            learning_rate: 1.0,
            beta: 1.0,
            gamma: 1.0,
            effort: PerStrategy {
                honest: 0.6,
                lazy: 0.2,
                colluder: 0.2,
                sybil_operator: 0.1,
            },
            side_gain: PerStrategy {
                honest: 0.0,
                lazy: 0.0,
                colluder: 0.6,
                sybil_operator: 0.6,
            },
            stability: StabilityParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct GrowthConfig {
    pub params: GrowthParams,
    pub initial_users: f64,
    /// Exogenous token price fed to the churn rule.
    pub token_price: f64,
    pub dt: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            params: GrowthParams {
                growth_rate: 0.05,
                churn_rate: 0.02,
                network_gamma: 0.1,
                carrying_capacity: 1_000_000.0,
                min_viable_token_value: 1.0,
                base_churn: UnitScore::saturate(0.5),
            },
            initial_users: 1000.0,
            token_price: 1.2,
            dt: 1.0,
        }
    }
}

fn finite_in(field: &str, x: f64, lo: f64, hi: f64) -> Result<(), ConfigError> {
    if x.is_finite() && (lo..=hi).contains(&x) {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("{x} is outside [{lo}, {hi}]")))
    }
}

fn positive(field: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("{x} must be positive")))
    }
}

impl ScenarioConfig {
    /// Parses and validates a scenario document.
    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same as [`Self::from_json_str`] on an already-parsed value.
    pub fn from_value(v: serde_json::Value) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.horizon < 1 {
            return Err(ConfigError::new("horizon", "must be at least 1"));
        }
        if self.domains.is_empty() {
            return Err(ConfigError::new("domains", "at least one domain is required"));
        }
        let mut names = BTreeSet::new();
        for (i, d) in self.domains.iter().enumerate() {
            if !names.insert(d.name.as_str()) {
                return Err(ConfigError::new(
                    format!("domains[{i}].name"),
                    format!("duplicate domain {:?}", d.name),
                ));
            }
            d.validate()
                .map_err(|e| ConfigError::new(format!("domains[{i}]"), e.to_string()))?;
        }
        for (name, rate) in &self.arrival_rates {
            if !names.contains(name.as_str()) {
                return Err(ConfigError::new(
                    format!("arrival_rates.{name}"),
                    "domain is not defined",
                ));
            }
            if !(rate.is_finite() && *rate >= 0.0) {
                return Err(ConfigError::new(format!("arrival_rates.{name}"), "rate must be >= 0"));
            }
        }

        let c = &self.contributions;
        positive("contributions.quality_alpha", c.quality_alpha)?;
        positive("contributions.quality_beta", c.quality_beta)?;
        finite_in("contributions.malicious_fraction", c.malicious_fraction, 0.0, 1.0)?;
        finite_in(
            "contributions.culturally_sensitive_fraction",
            c.culturally_sensitive_fraction,
            0.0,
            1.0,
        )?;
        if c.contributors == 0 {
            return Err(ConfigError::new("contributions.contributors", "must be at least 1"));
        }

        if self.population.iter().map(|p| p.count).sum::<u32>() == 0 {
            return Err(ConfigError::new("validator_population", "no validators"));
        }
        for (i, p) in self.population.iter().enumerate() {
            if p.culture.is_empty() {
                return Err(ConfigError::new(
                    format!("validator_population[{i}].culture"),
                    "must not be empty",
                ));
            }
        }

        let v = &self.voting;
        finite_in("voting.accept_threshold", v.accept_threshold, 0.0, 1.0)?;
        finite_in("voting.honest_noise", v.honest_noise, 0.0, 1.0)?;
        finite_in("voting.expert_noise", v.expert_noise, 0.0, 1.0)?;
        finite_in("voting.algorithmic_noise", v.algorithmic_noise, 0.0, 1.0)?;
        finite_in(
            "voting.colluder_copy_probability",
            v.colluder_copy_probability,
            0.0,
            1.0,
        )?;
        finite_in("voting.sybil_vote", v.sybil_vote, 0.0, 1.0)?;
        finite_in("voting.consensus_gap", v.consensus_gap, 0.0, 1.0)?;
        finite_in("voting.impact_followup_fraction", v.impact_followup_fraction, 0.0, 1.0)?;
        positive("voting.impact_slope_scale", v.impact_slope_scale)?;
        positive("voting.prior_alpha", v.prior_alpha)?;
        positive("voting.prior_beta", v.prior_beta)?;
        if v.clique_size < 2 {
            return Err(ConfigError::new("voting.clique_size", "must be at least 2"));
        }
        if v.sybil_group_size < 2 {
            return Err(ConfigError::new("voting.sybil_group_size", "must be at least 2"));
        }
        if v.impact_horizon == 0 {
            return Err(ConfigError::new("voting.impact_horizon", "must be at least 1"));
        }
        for (name, b) in &v.culture_bias {
            finite_in(&format!("voting.culture_bias.{name}"), *b, -1.0, 1.0)?;
        }

        self.reputation
            .weights
            .validate()
            .map_err(|e| ConfigError::new("reputation.weights", e.to_string()))?;
        positive("reputation.latency_scale", self.reputation.latency_scale)?;
        finite_in(
            "reputation.deviation_penalty",
            self.reputation.deviation_penalty,
            0.0,
            f64::MAX,
        )?;

        let e = &self.economy;
        positive("economy.base_reward", e.base_reward)?;
        positive("economy.target_daily_issuance", e.target_daily_issuance)?;
        positive("economy.security_bonus", e.security_bonus)?;
        finite_in("economy.detector_reward", e.detector_reward, 0.0, f64::MAX)?;

        let s = &self.security;
        if s.interval == 0 {
            return Err(ConfigError::new("security.interval", "must be at least 1"));
        }
        finite_in("security.collusion_threshold", s.collusion_threshold, 0.0, 1.0)?;
        finite_in("security.similarity_threshold", s.similarity_threshold, -1.0, 1.0)?;
        finite_in("security.sybil_threshold", s.sybil_threshold, 0.0, 1.0)?;
        finite_in("security.agreement_tolerance", s.agreement_tolerance, 0.0, 1.0)?;
        finite_in(
            "security.background_edge_probability",
            s.background_edge_probability,
            0.0,
            1.0,
        )?;
        finite_in("security.background_edge_max", s.background_edge_max, 0.0, 1.0)?;
        finite_in("security.group_edge", s.group_edge, 0.0, 1.0)?;
        crate::error::check_normalized_weights(&s.authenticity_weights)
            .map_err(|e| ConfigError::new("security.authenticity_weights", e.to_string()))?;

        let a = &self.agents;
        if a.period == 0 {
            return Err(ConfigError::new("agents.period", "must be at least 1"));
        }
        finite_in("agents.learning_rate", a.learning_rate, 0.0, f64::MAX)?;
        finite_in("agents.beta", a.beta, 0.0, f64::MAX)?;
        finite_in("agents.gamma", a.gamma, 0.0, f64::MAX)?;
        for x in a.effort.values() {
            finite_in("agents.effort", x, 0.0, 1.0)?;
        }
        for x in a.side_gain.values() {
            finite_in("agents.side_gain", x, f64::MIN, f64::MAX)?;
        }
        positive(
            "agents.stability.penalty_to_reward_ratio",
            a.stability.penalty_to_reward_ratio,
        )?;
        finite_in(
            "agents.stability.reputation_decay",
            a.stability.reputation_decay,
            0.0,
            1.0,
        )?;

        let g = &self.growth;
        g.params
            .validate()
            .map_err(|e| ConfigError::new("growth.params", e.to_string()))?;
        finite_in("growth.initial_users", g.initial_users, 0.0, f64::MAX)?;
        finite_in("growth.token_price", g.token_price, f64::MIN, f64::MAX)?;
        positive("growth.dt", g.dt)?;
        Ok(())
    }

    /// Validators in the given tier.
    pub fn tier_count(&self, tier: Tier) -> u32 {
        self.population.iter().filter(|p| p.tier == tier).map(|p| p.count).sum()
    }

    /// Three domains, a mixed population with two colluding cliques and one
    /// sybil group, every subsystem on.
    pub fn baseline() -> Self {
        let uniform4 = CulturalProfile::uniform(4);
        let domains = vec![
            DomainSpec {
                name: "Technical Implementation".into(),
                objectivity: UnitScore::saturate(0.7),
                verifiable_aspects: 4,
                total_aspects: 5,
                cultures: vec![uniform4.clone(), uniform4.clone()],
                economy_weight: 1.2,
                algorithmic: true,
            },
            DomainSpec {
                name: "Educational Content".into(),
                objectivity: UnitScore::saturate(0.6),
                verifiable_aspects: 3,
                total_aspects: 5,
                cultures: vec![
                    CulturalProfile::new(vec![0.4, 0.3, 0.2, 0.1]).expect("valid"),
                    CulturalProfile::new(vec![0.3, 0.3, 0.2, 0.2]).expect("valid"),
                ],
                economy_weight: 1.0,
                algorithmic: false,
            },
            DomainSpec {
                name: "Cultural Preservation".into(),
                objectivity: UnitScore::saturate(0.4),
                verifiable_aspects: 2,
                total_aspects: 5,
                cultures: vec![
                    CulturalProfile::new(vec![0.7, 0.1, 0.1, 0.1]).expect("valid"),
                    CulturalProfile::new(vec![0.1, 0.1, 0.1, 0.7]).expect("valid"),
                ],
                economy_weight: 0.9,
                algorithmic: false,
            },
        ];
        let arrival_rates = BTreeMap::from([
            ("Technical Implementation".to_string(), 12.0),
            ("Educational Content".to_string(), 10.0),
            ("Cultural Preservation".to_string(), 3.0),
        ]);
        let entry = |tier, strategy, culture: &str, count| PopulationEntry {
            tier,
            strategy,
            culture: culture.into(),
            count,
        };
        let mut population = vec![
            entry(Tier::Community, Strategy::Honest, "north", 20),
            entry(Tier::Community, Strategy::Honest, "south", 20),
            entry(Tier::Community, Strategy::Lazy, "north", 6),
            entry(Tier::Community, Strategy::Colluder, "south", 8),
            entry(Tier::Community, Strategy::SybilOperator, "east", 5),
            entry(Tier::Expert, Strategy::Honest, "global", 12),
            entry(Tier::ImpactAssessor, Strategy::Honest, "global", 4),
        ];
        for culture in ["north", "south", "east", "west"] {
            population.push(entry(Tier::Ambassador, Strategy::Honest, culture, 2));
        }
        ScenarioConfig {
            seed: 42,
            horizon: 100,
            domains,
            arrival_rates,
            contributions: ContributionParams::default(),
            population,
            layers: LayerTable::default(),
            voting: VotingParams::default(),
            reputation: ReputationParams::default(),
            economy: EconomyParams::default(),
            security: SecurityParams::default(),
            agents: AgentParams {
                enabled: false,
                ..AgentParams::default()
            },
            growth: GrowthConfig::default(),
        }
    }

    /// A single community domain served by layer 2 only; nothing malicious,
    /// nothing escalated.
    fn community_only(seed: u64, horizon: u32, rate: f64, population: Vec<PopulationEntry>) -> Self {
        let mut cfg = ScenarioConfig::baseline();
        cfg.seed = seed;
        cfg.horizon = horizon;
        cfg.domains = vec![DomainSpec {
            name: "Community Review".into(),
            objectivity: UnitScore::saturate(0.6),
            verifiable_aspects: 3,
            total_aspects: 5,
            cultures: vec![CulturalProfile::uniform(4), CulturalProfile::uniform(4)],
            economy_weight: 1.0,
            algorithmic: false,
        }];
        cfg.arrival_rates = BTreeMap::from([("Community Review".to_string(), rate)]);
        cfg.contributions.malicious_fraction = 0.0;
        cfg.contributions.culturally_sensitive_fraction = 0.0;
        cfg.voting.impact_followup_fraction = 0.0;
        cfg.security.authenticity_check = false;
        cfg.population = population;
        cfg
    }

    /// Thirty community validators, `colluders` of them in inverting cliques;
    /// detection and strategy dynamics off so only reputation weighting defends.
    pub fn bft(seed: u64, colluders: u32) -> Self {
        let honest = 30u32.saturating_sub(colluders);
        let mut population = vec![PopulationEntry {
            tier: Tier::Community,
            strategy: Strategy::Honest,
            culture: default_culture(),
            count: honest,
        }];
        if colluders > 0 {
            population.push(PopulationEntry {
                tier: Tier::Community,
                strategy: Strategy::Colluder,
                culture: default_culture(),
                count: colluders,
            });
        }
        let mut cfg = ScenarioConfig::community_only(seed, 100, 10.0, population);
        cfg.voting.clique_size = colluders.max(2);
        cfg.security.enabled = false;
        cfg.security.enforce = false;
        cfg.agents.enabled = false;
        cfg.economy.enabled = false;
        cfg
    }

    /// Layers 1 and 2 fed at `multiplier` times their combined capacity,
    /// split in proportion to each layer's capacity.
    pub fn throughput(seed: u64, multiplier: f64) -> Self {
        let population = vec![PopulationEntry {
            tier: Tier::Community,
            strategy: Strategy::Honest,
            culture: default_culture(),
            count: 40,
        }];
        let mut cfg = ScenarioConfig::community_only(seed, 60, 0.0, population);
        let caps = [200u32, 120];
        let mut layers: Vec<LayerConfig> = LayerTable::default().iter().cloned().collect();
        layers[0].daily_capacity = caps[0];
        layers[1].daily_capacity = caps[1];
        cfg.layers = LayerTable::new(layers).expect("valid table");
        cfg.domains.push(DomainSpec {
            name: "Automated Checks".into(),
            objectivity: UnitScore::saturate(0.9),
            verifiable_aspects: 5,
            total_aspects: 5,
            cultures: vec![CulturalProfile::uniform(4), CulturalProfile::uniform(4)],
            economy_weight: 1.2,
            algorithmic: true,
        });
        cfg.arrival_rates = BTreeMap::from([
            ("Automated Checks".to_string(), multiplier * f64::from(caps[0])),
            ("Community Review".to_string(), multiplier * f64::from(caps[1])),
        ]);
        cfg.security.enabled = false;
        cfg.agents.enabled = false;
        cfg
    }

    /// Capacity of the layers that [`Self::throughput`] routes to.
    pub fn routed_capacity(&self, layers: &[Layer]) -> u64 {
        layers
            .iter()
            .map(|l| u64::from(self.layers.get(*l).daily_capacity))
            .sum()
    }

    /// Mixed community population under strategy dynamics.
    pub fn stability(seed: u64, detection: f64, ratio: f64) -> Self {
        let entry = |strategy, count| PopulationEntry {
            tier: Tier::Community,
            strategy,
            culture: default_culture(),
            count,
        };
        let population = vec![
            entry(Strategy::Honest, 20),
            entry(Strategy::Lazy, 8),
            entry(Strategy::Colluder, 8),
            entry(Strategy::SybilOperator, 4),
        ];
        let mut cfg = ScenarioConfig::community_only(seed, 100, 15.0, population);
        cfg.voting.sybil_group_size = 4;
        cfg.security.enabled = false;
        cfg.agents.enabled = true;
        cfg.agents.stability.detection_probability = UnitScore::saturate(detection);
        cfg.agents.stability.penalty_to_reward_ratio = ratio;
        cfg
    }
}
