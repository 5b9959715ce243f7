//! The deterministic event loop.
//!
//! Tick order: arrivals, routing, scoring, reputation, economy, detection,
//! strategy, growth. Each subsystem draws from its own named random stream.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Poisson};
use serde::Serialize;

use crate::agents::{self, StrategyShares};
use crate::analytics::{self, Assessment};
use crate::economy::{self, Account, AntiInflation, IssuanceRequest, Micros, Pool, TokenLedger, DETECTION_BONUS};
use crate::error::{PohcError, Result};
use crate::feasibility::{DomainSpec, FeasibilityBand};
use crate::model::{
    Contribution, ContributionId, EvidenceBundle, Layer, Strategy, Tick, Tier, TrustStatus, UnitScore, ValidatorId,
    ValidatorProfile, Verdict, VerdictFlag,
};
use crate::parallel::Exec;
use crate::pipeline::{self, DayLoad, Escalation, Layer1Observation, Route, RouteRequest, Vote, WeightedVote};
use crate::reputation::{self, PerformanceVector};
use crate::security::{self, AuthenticityAction, AuthenticitySignals, SocialGraph};

use super::behavior::{cast_vote, noisy_reading, std_normal, Behavior, CliqueDraw, Persona};
use super::config::ScenarioConfig;
use super::metrics::MetricsFrame;
use super::window::{BehaviorWindow, VoteRecord};

/// Named random streams.
#[derive(Debug, Clone, Copy)]
enum Stream {
    Population = 0,
    Arrivals = 1,
    Votes = 2,
    Selection = 3,
    Attacks = 4,
    Strategy = 5,
    Observations = 6,
}

fn stream(seed: u64, s: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagKind {
    Collusion,
    Sybil,
}

impl FlagKind {
    pub fn name(self) -> &'static str {
        match self {
            FlagKind::Collusion => "collusion",
            FlagKind::Sybil => "sybil",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagRecord {
    pub tick: Tick,
    pub kind: FlagKind,
    pub members: Vec<ValidatorId>,
    pub score: f64,
    /// Agreement-over-baseline ratio; absent when no baseline exists.
    pub collusion_ratio: Option<f64>,
    /// Every member belongs to the same planted clique or sybil group.
    pub confirmed: bool,
    pub enforced: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub frames: Vec<MetricsFrame>,
    pub flags: Vec<FlagRecord>,
    pub ledger: TokenLedger,
    pub validators: Vec<ValidatorProfile>,
}

#[derive(Debug, Clone)]
struct Item {
    contribution: Contribution,
    band: FeasibilityBand,
    algorithmic: bool,
    escalation: Option<Escalation>,
}

impl Item {
    fn request(&self) -> RouteRequest {
        RouteRequest {
            band: self.band,
            algorithmic: self.algorithmic,
            culturally_sensitive: self.contribution.culturally_sensitive,
            escalation: self.escalation,
        }
    }

    /// Ground truth the verdict is scored against.
    fn is_good(&self, threshold: f64) -> bool {
        !self.contribution.malicious && self.contribution.true_quality.get() >= threshold
    }

    /// What an attentive reviewer perceives; malicious payloads read as poor.
    fn perceived(&self) -> UnitScore {
        let q = self.contribution.true_quality.get();
        UnitScore::saturate(if self.contribution.malicious { 0.3 * q } else { q })
    }
}

#[derive(Debug, Default)]
struct Queues {
    escalated: VecDeque<Item>,
    normal: VecDeque<Item>,
}

impl Queues {
    fn len(&self) -> usize {
        self.escalated.len() + self.normal.len()
    }

    fn pop(&mut self) -> Option<Item> {
        self.escalated.pop_front().or_else(|| self.normal.pop_front())
    }
}

/// Result of one layer handling one item.
struct Outcome {
    item: Item,
    verdict: Option<Verdict>,
    votes: Vec<VoteRecord>,
    escalate: Option<Escalation>,
    tier1_reward: bool,
    posterior_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    votes: u32,
    agreed: u32,
    earned: Micros,
}

/// Coordinated groups derived from the current strategy tags.
#[derive(Debug, Clone, Default)]
struct Groups {
    cliques: Vec<Vec<usize>>,
    sybils: Vec<Vec<usize>>,
    clique_of: BTreeMap<usize, usize>,
    sybil_of: BTreeMap<usize, usize>,
}

impl Groups {
    fn build(validators: &[ValidatorProfile], clique_size: usize, sybil_size: usize) -> Self {
        let chunk = |strategy: Strategy, size: usize| -> Vec<Vec<usize>> {
            let ids: Vec<usize> = validators
                .iter()
                .enumerate()
                .filter(|(_, v)| v.strategy == strategy)
                .map(|(i, _)| i)
                .collect();
            ids.chunks(size).map(|c| c.to_vec()).collect()
        };
        let cliques = chunk(Strategy::Colluder, clique_size);
        let sybils = chunk(Strategy::SybilOperator, sybil_size);
        let mut g = Groups {
            cliques,
            sybils,
            ..Default::default()
        };
        for (k, c) in g.cliques.iter().enumerate() {
            for &i in c {
                g.clique_of.insert(i, k);
            }
        }
        for (k, c) in g.sybils.iter().enumerate() {
            for &i in c {
                g.sybil_of.insert(i, k);
            }
        }
        g
    }

    /// Group tag shared by coordinated members: cliques then sybil groups.
    fn group_tag(&self, i: usize) -> Option<(u8, usize)> {
        self.clique_of
            .get(&i)
            .map(|k| (0, *k))
            .or_else(|| self.sybil_of.get(&i).map(|k| (1, *k)))
    }
}

struct Sim<'a> {
    cfg: &'a ScenarioConfig,
    rng_arrivals: ChaCha8Rng,
    rng_votes: ChaCha8Rng,
    rng_selection: ChaCha8Rng,
    rng_attacks: ChaCha8Rng,
    rng_strategy: ChaCha8Rng,
    rng_obs: ChaCha8Rng,
    domains: BTreeMap<String, (DomainSpec, FeasibilityBand)>,
    validators: Vec<ValidatorProfile>,
    personas: Vec<Persona>,
    consistency: Vec<f64>,
    groups: Groups,
    background: BTreeMap<(usize, usize), UnitScore>,
    window: BehaviorWindow,
    window_tally: Vec<Tally>,
    period_tally: Vec<Tally>,
    period_rep_start: Vec<f64>,
    ledger: TokenLedger,
    anti_inflation: AntiInflation,
    queues: [Queues; 5],
    followups: BTreeMap<Tick, Vec<Item>>,
    next_id: u64,
    shares: StrategyShares,
    users: f64,
    flags: Vec<FlagRecord>,
    flagged_dishonest: BTreeSet<ValidatorId>,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate().map_err(|e| PohcError::InvalidArgument {
        name: "config",
        reason: e.to_string(),
    })?;
    let mut sim = Sim::new(cfg)?;
    let mut frames = Vec::with_capacity(cfg.horizon as usize);
    for tick in 0..cfg.horizon {
        frames.push(sim.step(tick)?);
    }
    Ok(RunOutput {
        frames,
        flags: sim.flags,
        ledger: sim.ledger,
        validators: sim.validators,
    })
}

impl<'a> Sim<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        let mut rng_pop = stream(cfg.seed, Stream::Population);
        let mut domains = BTreeMap::new();
        for d in &cfg.domains {
            domains.insert(d.name.clone(), (d.clone(), d.classify()?.band));
        }

        let mut validators = Vec::new();
        let mut personas = Vec::new();
        for entry in &cfg.population {
            for _ in 0..entry.count {
                let id = ValidatorId(validators.len() as u32);
                let expertise = cfg
                    .domains
                    .iter()
                    .map(|d| {
                        let e = if entry.tier == Tier::Expert {
                            rng_pop.random_range(0.3..1.0)
                        } else {
                            0.3
                        };
                        (d.name.clone(), UnitScore::saturate(e))
                    })
                    .collect();
                validators.push(ValidatorProfile {
                    id,
                    tier: entry.tier,
                    reputation: cfg.reputation.initial,
                    security_score: UnitScore::ONE,
                    trust_status: TrustStatus::Trusted,
                    culture: entry.culture.clone(),
                    expertise,
                    availability: UnitScore::saturate(rng_pop.random_range(0.5..1.0)),
                    strategy: entry.strategy,
                    last_active: 0,
                });
                personas.push(Persona::sample(&mut rng_pop));
            }
        }
        let n = validators.len();

        let mut background = BTreeMap::new();
        let s = &cfg.security;
        for i in 0..n {
            for j in i + 1..n {
                if rng_pop.random::<f64>() < s.background_edge_probability {
                    let p = rng_pop.random::<f64>() * s.background_edge_max;
                    background.insert((i, j), UnitScore::saturate(p));
                }
            }
        }

        let groups = Groups::build(
            &validators,
            cfg.voting.clique_size as usize,
            cfg.voting.sybil_group_size as usize,
        );
        let shares = community_shares(&validators);
        let reps = validators.iter().map(|v| v.reputation.get()).collect();
        Ok(Sim {
            cfg,
            rng_arrivals: stream(cfg.seed, Stream::Arrivals),
            rng_votes: stream(cfg.seed, Stream::Votes),
            rng_selection: stream(cfg.seed, Stream::Selection),
            rng_attacks: stream(cfg.seed, Stream::Attacks),
            rng_strategy: stream(cfg.seed, Stream::Strategy),
            rng_obs: stream(cfg.seed, Stream::Observations),
            domains,
            consistency: vec![0.5; n],
            personas,
            groups,
            background,
            window: BehaviorWindow::new(),
            window_tally: vec![Tally::default(); n],
            period_tally: vec![Tally::default(); n],
            period_rep_start: reps,
            validators,
            ledger: TokenLedger::new(),
            anti_inflation: AntiInflation::new(cfg.economy.target_daily_issuance)?,
            queues: Default::default(),
            followups: BTreeMap::new(),
            next_id: 0,
            shares,
            users: cfg.growth.initial_users,
            flags: Vec::new(),
            flagged_dishonest: BTreeSet::new(),
        })
    }

    fn step(&mut self, tick: Tick) -> Result<MetricsFrame> {
        let mut frame = MetricsFrame {
            tick,
            ..Default::default()
        };

        let arrivals = self.arrivals(tick)?;
        frame.arrivals = arrivals.len() as u32;
        if let Some(due) = self.followups.remove(&tick) {
            self.queues[Layer::Impact.index()].escalated.extend(due);
        }

        let processed = self.route(arrivals);
        for (layer, _) in &processed {
            frame.routed[layer.index()] += 1;
        }

        let mut outcomes = Vec::with_capacity(processed.len());
        for (layer, item) in processed {
            outcomes.push(self.score(layer, item, tick)?);
        }

        let (mut err_sum, mut err_n) = (0.0, 0u32);
        for o in &outcomes {
            if let Some(v) = &o.verdict {
                if v.is_decisive() {
                    let i = v.layer.index();
                    frame.decisive[i] += 1;
                    let passed = v.flag == VerdictFlag::Pass;
                    if passed == o.item.is_good(self.cfg.voting.accept_threshold) {
                        frame.correct[i] += 1;
                    }
                }
            }
            if let Some(e) = o.posterior_error {
                err_sum += e;
                err_n += 1;
            }
        }
        frame.posterior_error = (err_n > 0).then(|| err_sum / f64::from(err_n));

        self.update_reputations(&outcomes, tick)?;
        frame.issued = self.settle(&outcomes, tick)?;

        for o in outcomes {
            if !o.votes.is_empty() {
                self.window.record_panel(o.votes);
            }
            if let Some(esc) = o.escalate {
                let mut item = o.item;
                item.escalation = Some(esc);
                let target = item.request().target();
                self.queues[target.index()].escalated.push_back(item);
            }
        }

        let s = &self.cfg.security;
        if s.enabled && (tick + 1).is_multiple_of(s.interval) {
            let (collusion, sybil, confirmed) = self.detect(tick)?;
            frame.collusion_flags = collusion;
            frame.sybil_flags = sybil;
            frame.confirmed_flags = confirmed;
        }

        let a = &self.cfg.agents;
        if a.enabled && (tick + 1).is_multiple_of(a.period) {
            self.strategy_period()?;
        }

        let g = &self.cfg.growth;
        self.users = analytics::growth_step(self.users, g.token_price, &g.params, g.dt)?;

        self.ledger.check_conservation()?;
        frame.pools = self.ledger.pools();
        frame.total_supply = self.ledger.total_supply();
        frame.depletions = self.ledger.depletions();
        frame.dishonest_flagged = self.flagged_dishonest.len() as u32;
        frame.dishonest_total = self.validators.iter().filter(|v| v.strategy.is_dishonest()).count() as u32;
        frame.shares = self.shares.0;
        frame.mean_reputation =
            self.validators.iter().map(|v| v.reputation.get()).sum::<f64>() / self.validators.len() as f64;
        for (q, out) in self.queues.iter().zip(frame.queued.iter_mut()) {
            *out = q.len() as u32;
        }
        frame.users = self.users;
        Ok(frame)
    }

    fn arrivals(&mut self, tick: Tick) -> Result<Vec<Item>> {
        let c = &self.cfg.contributions;
        let beta = Beta::new(c.quality_alpha, c.quality_beta).map_err(|e| PohcError::InvalidArgument {
            name: "quality",
            reason: e.to_string(),
        })?;
        let mut items = Vec::new();
        for (name, rate) in &self.cfg.arrival_rates {
            let n = if *rate > 0.0 {
                let p = Poisson::new(*rate).map_err(|e| PohcError::InvalidArgument {
                    name: "arrival_rates",
                    reason: e.to_string(),
                })?;
                p.sample(&mut self.rng_arrivals) as u64
            } else {
                0
            };
            let (spec, band) = &self.domains[name];
            for _ in 0..n {
                let rng = &mut self.rng_arrivals;
                let malicious = rng.random::<f64>() < c.malicious_fraction;
                let p_evidence = if malicious { 0.4 } else { 0.8 };
                let evidence = EvidenceBundle {
                    temporal: rng.random::<f64>() < p_evidence,
                    social: rng.random::<f64>() < p_evidence,
                    technical: rng.random::<f64>() < p_evidence,
                    impact: rng.random::<f64>() < p_evidence,
                    authorship_attested: !malicious || rng.random::<f64>() < 0.5,
                };
                let contribution = Contribution {
                    id: ContributionId(self.next_id),
                    domain: name.clone(),
                    contributor: rng.random_range(0..c.contributors),
                    true_quality: UnitScore::saturate(beta.sample(rng)),
                    evidence,
                    submitted_at: tick,
                    complexity: UnitScore::saturate(rng.random::<f64>()),
                    culturally_sensitive: rng.random::<f64>() < c.culturally_sensitive_fraction,
                    malicious,
                };
                self.next_id += 1;
                items.push(Item {
                    contribution,
                    band: *band,
                    algorithmic: spec.algorithmic,
                    escalation: None,
                });
            }
        }
        Ok(items)
    }

    /// Drains queued work first (escalations ahead of ordinary items), then
    /// routes new arrivals; anything over capacity waits in its layer queue.
    fn route(&mut self, arrivals: Vec<Item>) -> Vec<(Layer, Item)> {
        let mut load = DayLoad::default();
        let mut out = Vec::new();
        for layer in Layer::ALL {
            let cap = self.cfg.layers.get(layer).daily_capacity;
            while load.get(layer) < cap {
                let Some(item) = self.queues[layer.index()].pop() else {
                    break;
                };
                load.record(layer);
                out.push((layer, item));
            }
        }
        for item in arrivals {
            match pipeline::route(&item.request(), &self.cfg.layers, &load) {
                Route::Layer(l) => {
                    load.record(l);
                    out.push((l, item));
                }
                Route::Queued(l) => self.queues[l.index()].normal.push_back(item),
            }
        }
        out
    }

    fn behavior(
        &mut self,
        i: usize,
        sigma: f64,
        quality: UnitScore,
        draws: &mut BTreeMap<usize, CliqueDraw>,
    ) -> Behavior {
        let v = &self.cfg.voting;
        match self.validators[i].strategy {
            Strategy::Honest => Behavior::Honest { sigma },
            Strategy::Lazy => Behavior::Lazy {
                sigma,
                effort: self.cfg.agents.effort.lazy,
            },
            Strategy::Colluder => {
                let k = self.groups.clique_of[&i];
                let leader = self.personas[self.groups.cliques[k][0]];
                let rng = &mut self.rng_attacks;
                let clique = *draws
                    .entry(k)
                    .or_insert_with(|| CliqueDraw::sample(quality, sigma, &leader, rng));
                Behavior::Colluder {
                    sigma,
                    copy_probability: v.colluder_copy_probability,
                    clique,
                }
            }
            Strategy::SybilOperator => {
                let k = self.groups.sybil_of[&i];
                Behavior::Sybil {
                    vote: v.sybil_vote,
                    operator: self.personas[self.groups.sybils[k][0]],
                }
            }
        }
    }

    fn panel_votes(&mut self, panel: &[usize], quality: UnitScore, sigma: f64, offsets: &[f64]) -> Vec<VoteRecord> {
        let mut draws = BTreeMap::new();
        let mut votes = Vec::with_capacity(panel.len());
        for (k, &i) in panel.iter().enumerate() {
            let q = UnitScore::saturate(quality.get() + offsets.get(k).copied().unwrap_or(0.0));
            let b = self.behavior(i, sigma, q, &mut draws);
            let persona = self.personas[i];
            votes.push(cast_vote(self.validators[i].id, &persona, q, b, &mut self.rng_votes));
        }
        votes
    }

    /// Reputation-weighted score over a panel. Validation weights are
    /// rescaled so the trust-weighted mass sums to one; `None` when no
    /// trusted weight is left.
    fn weighted_score(
        &self,
        panel: &[usize],
        votes: &[VoteRecord],
        tick: Tick,
    ) -> Result<Option<(UnitScore, Vec<f64>)>> {
        let profiles: Vec<ValidatorProfile> = panel.iter().map(|&i| self.validators[i].clone()).collect();
        let weights = match reputation::validation_weights(&profiles) {
            Ok(w) => w,
            Err(PohcError::NoWeightMass) => return Ok(None),
            Err(e) => return Err(e),
        };
        let mass: f64 = profiles
            .iter()
            .map(|p| weights[&p.id] * pipeline::security_weight(p.trust_status))
            .sum();
        if mass <= 0.0 {
            return Ok(None);
        }
        let wv: Vec<WeightedVote> = profiles
            .iter()
            .zip(votes)
            .map(|(p, v)| WeightedVote {
                vote: Vote {
                    validator_id: p.id,
                    assessment: UnitScore::saturate(v.value),
                    tick,
                },
                weight: weights[&p.id] / mass,
                bias_correction: 0.0,
                status: p.trust_status,
            })
            .collect();
        match pipeline::layer2_score(&wv) {
            Ok(s) => Ok(Some((
                s,
                wv.iter()
                    .map(|w| w.weight * pipeline::security_weight(w.status))
                    .collect(),
            ))),
            Err(PohcError::NoTrustedQuorum) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn posterior_error(&self, item: &Item, votes: &[VoteRecord], weights: &[f64], sigma: f64) -> Result<f64> {
        let variance = (sigma * sigma).max(1e-4);
        let a: Vec<Assessment> = votes
            .iter()
            .zip(weights)
            .map(|(v, w)| Assessment {
                value: UnitScore::saturate(v.value),
                variance,
                reputation_weight: *w,
            })
            .collect();
        let v = &self.cfg.voting;
        let post = analytics::posterior_quality(&a, v.prior_alpha, v.prior_beta)?;
        Ok((post.get() - item.contribution.true_quality.get()).abs())
    }

    fn eligible(&self, tier: Tier) -> Vec<usize> {
        self.validators
            .iter()
            .enumerate()
            .filter(|(_, v)| v.tier == tier && v.trust_status != TrustStatus::FraudSuspect)
            .map(|(i, _)| i)
            .collect()
    }

    fn authenticity(&mut self, item: &Item, cross_validation: f64) -> Result<AuthenticityAction> {
        let e = item.contribution.evidence;
        let penalty = if item.contribution.malicious { 0.4 } else { 0.0 };
        let rng = &mut self.rng_obs;
        let mut sig = |present: bool| {
            let base = if present { 0.8 } else { 0.3 };
            UnitScore::saturate(base - penalty + 0.1 * std_normal(rng))
        };
        let signals = AuthenticitySignals {
            pattern_analysis: sig(e.technical),
            social_graph: sig(e.social),
            temporal_correlation: sig(e.temporal),
            cross_validation: UnitScore::saturate(cross_validation - penalty),
            impact_verification: sig(e.impact),
        };
        let s = &self.cfg.security;
        Ok(security::verify_authenticity(&signals, &s.authenticity_weights, s.authenticity_threshold)?.action)
    }

    fn accept_flag(&self, score: UnitScore) -> VerdictFlag {
        if score.get() >= self.cfg.voting.accept_threshold {
            VerdictFlag::Pass
        } else {
            VerdictFlag::Rejected
        }
    }

    fn score(&mut self, layer: Layer, item: Item, tick: Tick) -> Result<Outcome> {
        let mut out = Outcome {
            item,
            verdict: None,
            votes: Vec::new(),
            escalate: None,
            tier1_reward: false,
            posterior_error: None,
        };
        let v = self.cfg.voting.clone();
        let id = out.item.contribution.id;
        let perceived = out.item.perceived();
        match layer {
            Layer::Algorithmic => {
                let rng = &mut self.rng_obs;
                let mut read = || UnitScore::saturate(noisy_reading(perceived, v.algorithmic_noise, rng));
                let obs = Layer1Observation {
                    correctness: read(),
                    novelty: read(),
                    complexity: read(),
                    authenticity: read(),
                    security: UnitScore::saturate(if out.item.contribution.malicious {
                        rng.random_range(0.2..0.7)
                    } else {
                        rng.random_range(0.95..1.0)
                    }),
                };
                let l1 = pipeline::layer1_verify(id, &obs, v.accept_threshold, tick);
                out.tier1_reward = l1.tier1_reward;
                match l1.verdict.flag {
                    VerdictFlag::SecurityFlagged => out.escalate = Some(Escalation::Security),
                    VerdictFlag::Pass if self.cfg.security.authenticity_check => {
                        let cv = l1.verdict.score.map(|s| s.get()).unwrap_or(0.0);
                        if self.authenticity(&out.item, cv)? == AuthenticityAction::Investigate {
                            out.verdict = Some(Verdict::new(
                                id,
                                layer,
                                l1.verdict.score,
                                VerdictFlag::CollusionFlagged,
                                vec![],
                                tick,
                            )?);
                            out.escalate = Some(Escalation::Investigation);
                            return Ok(out);
                        }
                    }
                    _ => {}
                }
                out.verdict = Some(l1.verdict);
            }
            Layer::Community => {
                let pool = self.eligible(Tier::Community);
                let k = self.cfg.layers.get(layer).min_panel;
                if pool.len() < k {
                    out.escalate = Some(Escalation::Investigation);
                    return Ok(out);
                }
                let panel: Vec<usize> = sample(&mut self.rng_selection, pool.len(), k)
                    .into_iter()
                    .map(|x| pool[x])
                    .collect();
                out.votes = self.panel_votes(&panel, perceived, v.honest_noise, &[]);
                let ids: Vec<ValidatorId> = panel.iter().map(|&i| self.validators[i].id).collect();
                let Some((score, weights)) = self.weighted_score(&panel, &out.votes, tick)? else {
                    out.escalate = Some(Escalation::Investigation);
                    return Ok(out);
                };
                out.posterior_error = Some(self.posterior_error(&out.item, &out.votes, &weights, v.honest_noise)?);
                let mut flag = self.accept_flag(score);
                if flag == VerdictFlag::Pass && self.cfg.security.authenticity_check {
                    let spread = out
                        .votes
                        .iter()
                        .map(|r| r.value)
                        .fold(0.0_f64, |m, x| m.max((x - score.get()).abs()));
                    if self.authenticity(&out.item, 1.0 - spread)? == AuthenticityAction::Investigate {
                        flag = VerdictFlag::CollusionFlagged;
                        out.escalate = Some(Escalation::Investigation);
                    }
                }
                out.verdict = Some(Verdict::new(id, layer, Some(score), flag, ids, tick)?);
            }
            Layer::Expert => {
                let pool_idx = self.eligible(Tier::Expert);
                let k = self.cfg.layers.get(layer).min_panel;
                let pool: Vec<ValidatorProfile> = pool_idx.iter().map(|&i| self.validators[i].clone()).collect();
                let chosen =
                    match pipeline::select_experts(&pool, &out.item.contribution.domain, k, &mut self.rng_selection) {
                        Ok(c) => c,
                        Err(PohcError::NoEligibleExperts | PohcError::PoolTooSmall { .. }) => return Ok(out),
                        Err(e) => return Err(e),
                    };
                let panel: Vec<usize> = chosen.iter().map(|id| id.0 as usize).collect();
                out.votes = self.panel_votes(&panel, perceived, v.expert_noise, &[]);
                let Some((score, weights)) = self.weighted_score(&panel, &out.votes, tick)? else {
                    return Ok(out);
                };
                out.posterior_error = Some(self.posterior_error(&out.item, &out.votes, &weights, v.expert_noise)?);
                out.verdict = Some(Verdict::new(
                    id,
                    layer,
                    Some(score),
                    self.accept_flag(score),
                    chosen,
                    tick,
                )?);
            }
            Layer::CrossCultural => {
                let mut by_culture: BTreeMap<String, Vec<usize>> = BTreeMap::new();
                for i in self.eligible(Tier::Ambassador) {
                    by_culture
                        .entry(self.validators[i].culture.clone())
                        .or_default()
                        .push(i);
                }
                if by_culture.len() < 2 {
                    if out.item.escalation.is_none() {
                        out.escalate = Some(Escalation::Investigation);
                    }
                    return Ok(out);
                }
                let per = self.cfg.layers.get(layer).min_panel.div_ceil(by_culture.len()).max(1);
                let mut panel = Vec::new();
                let mut offsets = Vec::new();
                for (culture, members) in &by_culture {
                    let take = per.min(members.len());
                    for x in sample(&mut self.rng_selection, members.len(), take) {
                        panel.push(members[x]);
                        offsets.push(v.culture_bias.get(culture).copied().unwrap_or(0.0));
                    }
                }
                out.votes = self.panel_votes(&panel, perceived, v.honest_noise, &offsets);
                let mut groups: BTreeMap<String, Vec<UnitScore>> = BTreeMap::new();
                for (&i, r) in panel.iter().zip(&out.votes) {
                    groups
                        .entry(self.validators[i].culture.clone())
                        .or_default()
                        .push(UnitScore::saturate(r.value));
                }
                let res = pipeline::layer4_cross_cultural(&groups, v.consensus_gap)?;
                let flag = if res.consensus {
                    self.accept_flag(res.score)
                } else {
                    VerdictFlag::Rejected
                };
                let ids = panel.iter().map(|&i| self.validators[i].id).collect();
                out.verdict = Some(Verdict::new(id, layer, Some(res.score), flag, ids, tick)?);
            }
            Layer::Impact => {
                let pool = self.eligible(Tier::ImpactAssessor);
                if pool.is_empty() {
                    return Ok(out);
                }
                let k = self.cfg.layers.get(layer).min_panel.min(pool.len());
                let panel: Vec<usize> = sample(&mut self.rng_selection, pool.len(), k)
                    .into_iter()
                    .map(|x| pool[x])
                    .collect();
                let slope = perceived.get() * v.impact_slope_scale;
                let series: Vec<(Tick, f64)> = (0..10u32)
                    .map(|t| {
                        (
                            t,
                            slope * f64::from(t) + 0.05 * v.impact_slope_scale * std_normal(&mut self.rng_obs),
                        )
                    })
                    .collect();
                let score = pipeline::layer5_impact(&series, v.impact_slope_scale)?;
                let ids = panel.iter().map(|&i| self.validators[i].id).collect();
                out.verdict = Some(Verdict::new(
                    id,
                    layer,
                    Some(score),
                    self.accept_flag(score),
                    ids,
                    tick,
                )?);
            }
        }

        if let Some(verdict) = &out.verdict {
            if verdict.flag == VerdictFlag::Pass
                && layer != Layer::Impact
                && v.impact_followup_fraction > 0.0
                && self.rng_obs.random::<f64>() < v.impact_followup_fraction
            {
                let mut follow = out.item.clone();
                follow.escalation = Some(Escalation::ImpactFollowUp);
                self.followups.entry(tick + v.impact_horizon).or_default().push(follow);
            }
        }
        Ok(out)
    }

    fn alpha(&self) -> f64 {
        self.cfg.agents.stability.reputation_decay
    }

    /// Votes on the verdict's side count as accurate.
    fn update_reputations(&mut self, outcomes: &[Outcome], tick: Tick) -> Result<()> {
        let thr = self.cfg.voting.accept_threshold;
        let alpha = self.alpha();
        let r = &self.cfg.reputation;
        for o in outcomes {
            let Some(verdict) = &o.verdict else { continue };
            if !verdict.is_decisive() || o.votes.is_empty() {
                continue;
            }
            let passed = verdict.flag == VerdictFlag::Pass;
            let score = verdict.score.map(|s| s.get()).unwrap_or(0.0);
            for vote in &o.votes {
                let i = vote.validator.0 as usize;
                let agreed = (vote.value >= thr) == passed;
                let acc = if agreed { 1.0 } else { 0.0 };
                self.consistency[i] = alpha * self.consistency[i] + (1.0 - alpha) * acc;
                let perf = PerformanceVector {
                    accuracy: UnitScore::saturate(acc),
                    speed: UnitScore::saturate((-vote.latency / r.latency_scale).exp()),
                    security: self.validators[i].security_score,
                    consistency: UnitScore::saturate(self.consistency[i]),
                    innovation: r.innovation,
                    weights: r.weights,
                };
                let val = &mut self.validators[i];
                let updated = reputation::update_reputation(val.reputation, &perf, alpha)?.get();
                val.reputation = UnitScore::saturate(updated - r.deviation_penalty * (vote.value - score).powi(2));
                val.last_active = tick;
                for t in [&mut self.window_tally[i], &mut self.period_tally[i]] {
                    t.votes += 1;
                    t.agreed += u32::from(agreed);
                }
            }
        }
        Ok(())
    }

    /// Issuance, validator fees and the tier-1 reward. Returns micros issued.
    fn settle(&mut self, outcomes: &[Outcome], tick: Tick) -> Result<Micros> {
        let e = &self.cfg.economy;
        if !e.enabled {
            return Ok(Micros(0));
        }
        let factor = self.anti_inflation.factor();
        let mut issued = Micros(0);
        for o in outcomes {
            if o.tier1_reward {
                let fee = Micros::from_tokens(economy::validation_cost(Layer::Algorithmic))?;
                self.ledger.move_between_pools(Pool::Validator, Pool::System, fee);
            }
            let Some(verdict) = &o.verdict else { continue };
            if !verdict.is_decisive() {
                continue;
            }
            if verdict.flag == VerdictFlag::Pass && verdict.layer != Layer::Impact {
                let score = verdict.score.unwrap_or(UnitScore::ZERO);
                let weight = self.domains[&o.item.contribution.domain].0.economy_weight;
                let ev = self.ledger.issue(IssuanceRequest {
                    tick,
                    contribution: o.item.contribution.id,
                    recipient: o.item.contribution.contributor,
                    base_reward: e.base_reward,
                    quality_multiplier: economy::quality_multiplier(score),
                    domain_weight: weight,
                    anti_inflation_factor: factor,
                    security_bonus: e.security_bonus,
                })?;
                issued.0 += ev.amount.0;
            }
            if !verdict.validators.is_empty() && verdict.layer != Layer::Algorithmic {
                let fee = economy::validation_cost(verdict.layer) / verdict.validators.len() as f64;
                let fee = Micros::from_tokens(fee)?;
                for vid in &verdict.validators {
                    let paid = self
                        .ledger
                        .pay_from_pool(Pool::Validator, Account::Validator(*vid), fee);
                    let i = vid.0 as usize;
                    self.window_tally[i].earned.0 += paid.0;
                    self.period_tally[i].earned.0 += paid.0;
                }
            }
        }
        self.anti_inflation.close_day(issued.tokens());
        Ok(issued)
    }

    fn graph_for(&self, ids: &[ValidatorId]) -> Result<SocialGraph> {
        let mut g = SocialGraph::new(ids.iter().copied());
        let present: BTreeSet<usize> = ids.iter().map(|v| v.0 as usize).collect();
        for (&(i, j), p) in &self.background {
            if present.contains(&i) && present.contains(&j) {
                g.add_edge(ValidatorId(i as u32), ValidatorId(j as u32), *p)?;
            }
        }
        let edge = UnitScore::saturate(self.cfg.security.group_edge);
        for group in self.groups.cliques.iter().chain(&self.groups.sybils) {
            for (x, &i) in group.iter().enumerate() {
                for &j in &group[x + 1..] {
                    if present.contains(&i) && present.contains(&j) {
                        g.add_edge(ValidatorId(i as u32), ValidatorId(j as u32), edge)?;
                    }
                }
            }
        }
        Ok(g)
    }

    fn confirmed(&self, members: &[ValidatorId]) -> bool {
        let tags: BTreeSet<Option<(u8, usize)>> = members.iter().map(|m| self.groups.group_tag(m.0 as usize)).collect();
        tags.len() == 1 && tags.iter().next().is_some_and(|t| t.is_some())
    }

    /// Runs both detectors over the window, then resets it.
    fn detect(&mut self, tick: Tick) -> Result<(u32, u32, u32)> {
        if self.window.is_empty() {
            return Ok((0, 0, 0));
        }
        let s = self.cfg.security.clone();
        let ids = self.window.active();
        let inputs = self.window.detector_inputs(&ids, s.agreement_tolerance, s.min_co_votes);
        let graph = self.graph_for(&ids)?;
        let collusion = security::detect_collusion_with(
            Exec::Serial,
            &graph,
            &inputs.features,
            &inputs.timing,
            &inputs.quality,
            s.collusion_threshold,
        )?;
        let sybil = security::detect_sybil_with(
            Exec::Serial,
            &inputs.features,
            &graph,
            s.similarity_threshold,
            s.sybil_threshold,
        );
        let baseline = security::expected_random_agreement(&inputs.features, &graph);
        let by_id: BTreeMap<ValidatorId, usize> = ids.iter().enumerate().map(|(k, id)| (*id, k)).collect();

        let mut records = Vec::new();
        for f in &collusion {
            let a = &inputs.features[by_id[&f.pair.0]];
            let agreement = a.agreement_with(f.pair.1).unwrap_or(UnitScore::ZERO);
            let ratio = baseline.and_then(|b| security::collusion_score(agreement, f.signals.social_proximity, b).ok());
            let members = vec![f.pair.0, f.pair.1];
            let confirmed = self.confirmed(&members);
            records.push(FlagRecord {
                tick,
                kind: FlagKind::Collusion,
                members,
                score: f.score,
                collusion_ratio: ratio,
                confirmed,
                enforced: s.enforce,
            });
        }
        for c in &sybil {
            let confirmed = self.confirmed(&c.members);
            records.push(FlagRecord {
                tick,
                kind: FlagKind::Sybil,
                members: c.members.clone(),
                score: c.score,
                collusion_ratio: None,
                confirmed,
                enforced: s.enforce,
            });
        }

        let flagged: BTreeSet<ValidatorId> = records.iter().flat_map(|r| r.members.iter().copied()).collect();
        for m in &flagged {
            if self.validators[m.0 as usize].strategy.is_dishonest() {
                self.flagged_dishonest.insert(*m);
            }
        }
        if s.enforce {
            let ratio = self.cfg.agents.stability.penalty_to_reward_ratio;
            for &id in &ids {
                let i = id.0 as usize;
                if flagged.contains(&id) {
                    let v = &mut self.validators[i];
                    v.trust_status = v.trust_status.demoted();
                    let penalty = Micros((self.window_tally[i].earned.0 as f64 * ratio).round() as u64);
                    self.ledger.seize(Account::Validator(id), Pool::System, penalty);
                } else {
                    let v = &mut self.validators[i];
                    v.trust_status = v.trust_status.promoted();
                }
            }
        }
        if self.cfg.economy.enabled {
            for r in &records {
                let bonus = if r.confirmed { DETECTION_BONUS } else { 1.0 };
                let reward = Micros::from_tokens(self.cfg.economy.detector_reward * bonus)?;
                self.ledger.pay_from_pool(Pool::Security, Account::Detector, reward);
            }
        }

        let counts = (
            collusion.len() as u32,
            sybil.len() as u32,
            records.iter().filter(|r| r.confirmed).count() as u32,
        );
        self.flags.extend(records);
        self.window.clear();
        self.window_tally.iter_mut().for_each(|t| *t = Tally::default());
        Ok(counts)
    }

    /// Scores each community validator's period, applies stochastic
    /// detection of dishonest play, steps the replicator and re-tags.
    fn strategy_period(&mut self) -> Result<()> {
        let a = self.cfg.agents.clone();
        let p_detect = a.stability.detection_probability.get();
        let ratio = a.stability.penalty_to_reward_ratio;
        let mut sums = [0.0; 4];
        let mut counts = [0u32; 4];
        for i in 0..self.validators.len() {
            if self.validators[i].tier != Tier::Community {
                continue;
            }
            let s = self.validators[i].strategy;
            let effort = a.effort.get(s);
            let t = self.period_tally[i];
            let acc = if t.votes > 0 {
                f64::from(t.agreed) / f64::from(t.votes)
            } else {
                agents::accuracy_from_effort(UnitScore::saturate(effort))
            };
            let rep_delta = self.validators[i].reputation.get() - self.period_rep_start[i];
            let mut u =
                agents::validator_utility(agents::reward(acc), agents::cost(effort), rep_delta, a.beta, a.gamma)?
                    + a.side_gain.get(s);
            if s.is_dishonest() && self.rng_strategy.random::<f64>() < p_detect {
                u -= ratio * a.beta * agents::reward(acc);
                let v = &mut self.validators[i];
                v.trust_status = v.trust_status.demoted();
                let penalty = Micros((t.earned.0 as f64 * ratio).round() as u64);
                self.ledger.seize(Account::Validator(v.id), Pool::System, penalty);
            }
            sums[s.index()] += u;
            counts[s.index()] += 1;
        }
        let mut payoffs = [0.0; 4];
        for s in Strategy::ALL {
            let k = s.index();
            payoffs[k] = if counts[k] > 0 {
                sums[k] / f64::from(counts[k])
            } else {
                expected_payoff(&a, s, p_detect, ratio)
            };
        }
        self.shares = agents::step_strategies(&self.shares, &payoffs, a.learning_rate)?;
        self.retag();
        self.period_tally.iter_mut().for_each(|t| *t = Tally::default());
        self.period_rep_start = self.validators.iter().map(|v| v.reputation.get()).collect();
        Ok(())
    }

    /// Moves community validators between strategies so counts follow the
    /// shares (largest remainder). Lowest ids keep their strategy.
    fn retag(&mut self) {
        let community: Vec<usize> = (0..self.validators.len())
            .filter(|&i| self.validators[i].tier == Tier::Community)
            .collect();
        let targets = largest_remainder(&self.shares.0, community.len());
        let mut members: [Vec<usize>; 4] = Default::default();
        for &i in &community {
            members[self.validators[i].strategy.index()].push(i);
        }
        let mut released = Vec::new();
        for (k, m) in members.iter_mut().enumerate() {
            while m.len() > targets[k] {
                released.push(m.pop().expect("non-empty"));
            }
        }
        released.sort_unstable();
        let mut released = released.into_iter();
        for s in Strategy::ALL {
            let k = s.index();
            while members[k].len() < targets[k] {
                let Some(i) = released.next() else { break };
                self.validators[i].strategy = s;
                members[k].push(i);
            }
        }
        let v = &self.cfg.voting;
        self.groups = Groups::build(&self.validators, v.clique_size as usize, v.sybil_group_size as usize);
    }
}

fn community_shares(validators: &[ValidatorProfile]) -> StrategyShares {
    let mut counts = [0.0; 4];
    for v in validators.iter().filter(|v| v.tier == Tier::Community) {
        counts[v.strategy.index()] += 1.0;
    }
    let total: f64 = counts.iter().sum();
    if total == 0.0 {
        return StrategyShares::all_honest();
    }
    StrategyShares(counts.map(|c| c / total))
}

/// Closed-form payoff for a strategy nobody currently plays.
fn expected_payoff(a: &super::config::AgentParams, s: Strategy, p_detect: f64, ratio: f64) -> f64 {
    let effort = a.effort.get(s);
    let acc = agents::accuracy_from_effort(UnitScore::saturate(effort));
    let mut u = a.beta * agents::reward(acc) - agents::cost(effort) + a.side_gain.get(s);
    if s.is_dishonest() {
        u -= p_detect * ratio * a.beta * agents::reward(acc);
    }
    u
}

pub fn largest_remainder(shares: &[f64; 4], n: usize) -> [usize; 4] {
    let raw = shares.map(|s| s * n as f64);
    let mut out = raw.map(|x| x.floor() as usize);
    let mut left = n.saturating_sub(out.iter().sum());
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| {
        (raw[b] - raw[b].floor())
            .total_cmp(&(raw[a] - raw[a].floor()))
            .then(a.cmp(&b))
    });
    for k in order {
        if left == 0 {
            break;
        }
        out[k] += 1;
        left -= 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder_sums_to_n() {
        assert_eq!(largest_remainder(&[0.5, 0.25, 0.25, 0.0], 10), [5, 3, 2, 0]);
        assert_eq!(largest_remainder(&[1.0, 0.0, 0.0, 0.0], 7), [7, 0, 0, 0]);
        let t = largest_remainder(&[0.33, 0.33, 0.34, 0.0], 40);
        assert_eq!(t.iter().sum::<usize>(), 40);
    }

    #[test]
    fn baseline_runs_and_conserves() {
        let mut cfg = ScenarioConfig::baseline();
        cfg.horizon = 30;
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.frames.len(), 30);
        out.ledger.check_conservation().unwrap();
        for f in &out.frames {
            for l in Layer::ALL {
                assert!(f.routed[l.index()] <= cfg.layers.get(l).daily_capacity);
            }
        }
    }
}
