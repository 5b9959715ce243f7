//! Token issuance and allocation, fee and reward tables, and the
//! conservation-checked ledger.
//!
//! Amounts on the ledger are fixed-point micro-tokens so the four-way split
//! conserves supply exactly; the rounding remainder of a split always lands
//! in the system pool.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, PohcError, Result};
use crate::model::{ContributionId, Layer, Tick, UnitScore, ValidatorId};

pub const MICROS_PER_TOKEN: u64 = 1_000_000;

/// Allocation shares in percent: contributor, validator, security, system.
pub const ALLOCATION_PERCENT: [u64; 4] = [60, 25, 10, 5];

/// Multiplier on detector rewards for a confirmed detection (a 200% bonus).
pub const DETECTION_BONUS: f64 = 3.0;

pub const ANTI_INFLATION_CAP: f64 = 1.5;
pub const ANTI_INFLATION_WINDOW: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Micros(pub u64);

impl Micros {
    /// Rounds a token amount to the nearest micro-token.
    pub fn from_tokens(tokens: f64) -> Result<Micros> {
        check_finite("token amount", tokens)?;
        if tokens < 0.0 {
            return Err(PohcError::Ledger(format!("negative amount {tokens}")));
        }
        Ok(Micros((tokens * MICROS_PER_TOKEN as f64).round() as u64))
    }

    pub fn tokens(self) -> f64 {
        self.0 as f64 / MICROS_PER_TOKEN as f64
    }
}

impl fmt::Display for Micros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / MICROS_PER_TOKEN, self.0 % MICROS_PER_TOKEN)
    }
}

/// NewTokens = base · quality · domain weight · anti-inflation · security bonus.
pub fn issue_tokens(
    base: f64,
    quality: f64,
    domain_weight: f64,
    anti_inflation: f64,
    security_bonus: f64,
) -> Result<f64> {
    let factors = [
        ("base_reward", base),
        ("quality_multiplier", quality),
        ("domain_weight", domain_weight),
        ("anti_inflation_factor", anti_inflation),
        ("security_bonus", security_bonus),
    ];
    let mut product = 1.0;
    for (name, f) in factors {
        if !(f.is_finite() && f > 0.0) {
            return Err(PohcError::NonPositiveFactor(name));
        }
        product *= f;
    }
    Ok(product)
}

/// Maps a verdict score onto `[0.5, 1.5]`.
pub fn quality_multiplier(score: UnitScore) -> f64 {
    0.5 + score.get()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Allocation {
    pub contributor: Micros,
    pub validator: Micros,
    pub security: Micros,
    pub system: Micros,
}

impl Allocation {
    pub fn total(&self) -> Micros {
        Micros(self.contributor.0 + self.validator.0 + self.security.0 + self.system.0)
    }
}

/// 60 / 25 / 10 / 5 split; floor division with the remainder to the system share.
pub fn allocate(amount: Micros) -> Allocation {
    let share = |pct: u64| Micros(((amount.0 as u128 * pct as u128) / 100) as u64);
    let contributor = share(ALLOCATION_PERCENT[0]);
    let validator = share(ALLOCATION_PERCENT[1]);
    let security = share(ALLOCATION_PERCENT[2]);
    let system = Micros(amount.0 - contributor.0 - validator.0 - security.0);
    Allocation {
        contributor,
        validator,
        security,
        system,
    }
}

/// Domain name to issuance weight. Starts from the default table and can be extended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainWeightTable(BTreeMap<String, f64>);

impl Default for DomainWeightTable {
    fn default() -> Self {
        DomainWeightTable(
            [
                ("Technical Implementation", 1.2),
                ("Scientific Research", 1.1),
                ("Educational Content", 1.0),
                ("Community Projects", 0.9),
                ("Cultural Preservation", 0.8),
                ("Creative Expression", 0.7),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        )
    }
}

impl DomainWeightTable {
    pub fn get(&self, domain: &str) -> Result<f64> {
        self.0
            .get(domain)
            .copied()
            .ok_or_else(|| PohcError::UnknownDomain(domain.to_string()))
    }

    pub fn extend(&mut self, domain: impl Into<String>, weight: f64) -> Result<()> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(PohcError::NonPositiveFactor("domain_weight"));
        }
        self.0.insert(domain.into(), weight);
        Ok(())
    }
}

/// Lookup in the default weight table.
pub fn domain_weight(domain: &str) -> Result<f64> {
    DomainWeightTable::default().get(domain)
}

/// base · threat · prevention / response_time.
pub fn security_reward(base: f64, threat_level: f64, prevention: UnitScore, response_time: f64) -> Result<f64> {
    check_finite("base", base)?;
    check_finite("threat_level", threat_level)?;
    if !(response_time.is_finite() && response_time > 0.0) {
        return Err(PohcError::UndefinedReward);
    }
    if base < 0.0 || threat_level < 0.0 {
        return Err(PohcError::InvalidArgument {
            name: "security_reward",
            reason: "base and threat level must be non-negative".into(),
        });
    }
    Ok(base * threat_level * prevention.get() / response_time)
}

/// Cost per contribution handled at each layer, in currency units.
pub fn validation_cost(layer: Layer) -> f64 {
    match layer {
        Layer::Algorithmic => 0.15,
        Layer::Community => 8.00,
        Layer::Expert => 75.00,
        Layer::CrossCultural => 120.00,
        Layer::Impact => 200.00,
    }
}

/// Discounted value minus discounted cost, periods indexed from 0.
pub fn validator_ltv(values: &[f64], costs: &[f64], rate: f64) -> Result<f64> {
    if values.len() != costs.len() {
        return Err(PohcError::LengthMismatch(values.len(), costs.len()));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(PohcError::InvalidArgument {
            name: "rate",
            reason: "must be >= 0".into(),
        });
    }
    let mut discount = 1.0;
    let mut ltv = 0.0;
    for (v, c) in values.iter().zip(costs) {
        ltv += (v - c) / discount;
        discount *= 1.0 + rate;
    }
    Ok(ltv)
}

pub fn token_revenue(price: f64, issued: f64, demand: f64) -> f64 {
    price * issued * demand
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RevenueStreams {
    pub token: f64,
    pub service: f64,
    pub partnership: f64,
    pub data: f64,
}

pub fn revenue(streams: &RevenueStreams) -> Result<f64> {
    let parts = [streams.token, streams.service, streams.partnership, streams.data];
    if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(PohcError::InvalidArgument {
            name: "revenue",
            reason: "streams must be finite and non-negative".into(),
        });
    }
    Ok(parts.iter().sum())
}

/// Ratio of target daily issuance to the trailing mean, capped at 1.5.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiInflation {
    target_daily: f64,
    history: VecDeque<f64>,
}

impl AntiInflation {
    pub fn new(target_daily: f64) -> Result<Self> {
        if !(target_daily.is_finite() && target_daily > 0.0) {
            return Err(PohcError::NonPositiveFactor("anti_inflation_target"));
        }
        Ok(AntiInflation {
            target_daily,
            history: VecDeque::with_capacity(ANTI_INFLATION_WINDOW),
        })
    }

    /// 1.0 until any issuance has happened.
    pub fn factor(&self) -> f64 {
        let mean = if self.history.is_empty() {
            0.0
        } else {
            self.history.iter().sum::<f64>() / self.history.len() as f64
        };
        if mean <= 0.0 {
            1.0
        } else {
            (self.target_daily / mean).min(ANTI_INFLATION_CAP)
        }
    }

    pub fn close_day(&mut self, issued_tokens: f64) {
        if self.history.len() == ANTI_INFLATION_WINDOW {
            self.history.pop_front();
        }
        self.history.push_back(issued_tokens);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Account {
    Contributor(u32),
    Validator(ValidatorId),
    /// The detector service that runs collusion and sybil scans.
    Detector,
}

impl fmt::Display for Account {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Account::Contributor(c) => write!(f, "contributor:{c}"),
            Account::Validator(v) => write!(f, "validator:{v}"),
            Account::Detector => f.write_str("detector"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pool {
    Validator,
    Security,
    System,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssuanceEvent {
    pub tick: Tick,
    pub contribution: ContributionId,
    pub recipient: u32,
    pub base_reward: f64,
    pub quality_multiplier: f64,
    pub domain_weight: f64,
    pub anti_inflation_factor: f64,
    pub security_bonus: f64,
    pub amount: Micros,
    pub split: Allocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PoolBalances {
    pub validator: Micros,
    pub security: Micros,
    pub system: Micros,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TokenLedger {
    balances: BTreeMap<Account, Micros>,
    pools: PoolBalances,
    /// Cumulative allocations per role: contributor, validator, security, system.
    role_totals: [Micros; 4],
    total_supply: Micros,
    issuance_log: Vec<IssuanceEvent>,
    /// Pool payouts cut short because the pool ran dry.
    depletions: u64,
}

/// Parameters of one issuance, before the amount is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IssuanceRequest {
    pub tick: Tick,
    pub contribution: ContributionId,
    pub recipient: u32,
    pub base_reward: f64,
    pub quality_multiplier: f64,
    pub domain_weight: f64,
    pub anti_inflation_factor: f64,
    pub security_bonus: f64,
}

impl TokenLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mints new tokens and splits them across the contributor and the three pools.
    pub fn issue(&mut self, req: IssuanceRequest) -> Result<&IssuanceEvent> {
        let tokens = issue_tokens(
            req.base_reward,
            req.quality_multiplier,
            req.domain_weight,
            req.anti_inflation_factor,
            req.security_bonus,
        )?;
        let amount = Micros::from_tokens(tokens)?;
        let split = allocate(amount);
        *self.balances.entry(Account::Contributor(req.recipient)).or_default() =
            Micros(self.balance(Account::Contributor(req.recipient)).0 + split.contributor.0);
        self.pools.validator.0 += split.validator.0;
        self.pools.security.0 += split.security.0;
        self.pools.system.0 += split.system.0;
        for (total, part) in
            self.role_totals
                .iter_mut()
                .zip([split.contributor, split.validator, split.security, split.system])
        {
            total.0 += part.0;
        }
        self.total_supply.0 += amount.0;
        self.issuance_log.push(IssuanceEvent {
            tick: req.tick,
            contribution: req.contribution,
            recipient: req.recipient,
            base_reward: req.base_reward,
            quality_multiplier: req.quality_multiplier,
            domain_weight: req.domain_weight,
            anti_inflation_factor: req.anti_inflation_factor,
            security_bonus: req.security_bonus,
            amount,
            split,
        });
        Ok(self.issuance_log.last().expect("just pushed"))
    }

    fn pool_mut(&mut self, pool: Pool) -> &mut Micros {
        match pool {
            Pool::Validator => &mut self.pools.validator,
            Pool::Security => &mut self.pools.security,
            Pool::System => &mut self.pools.system,
        }
    }

    /// Pays up to `amount` from `pool` to `to`; returns what was actually paid.
    pub fn pay_from_pool(&mut self, pool: Pool, to: Account, amount: Micros) -> Micros {
        let available = self.pool_mut(pool);
        let paid = Micros(amount.0.min(available.0));
        available.0 -= paid.0;
        if paid < amount {
            self.depletions += 1;
        }
        self.balances.entry(to).or_default().0 += paid.0;
        paid
    }

    pub fn move_between_pools(&mut self, from: Pool, to: Pool, amount: Micros) -> Micros {
        let src = self.pool_mut(from);
        let moved = Micros(amount.0.min(src.0));
        src.0 -= moved.0;
        if moved < amount {
            self.depletions += 1;
        }
        self.pool_mut(to).0 += moved.0;
        moved
    }

    /// Moves up to `amount` from an account into a pool (penalties).
    pub fn seize(&mut self, from: Account, to: Pool, amount: Micros) -> Micros {
        let bal = self.balances.entry(from).or_default();
        let taken = Micros(amount.0.min(bal.0));
        bal.0 -= taken.0;
        self.pool_mut(to).0 += taken.0;
        taken
    }

    pub fn balance(&self, account: Account) -> Micros {
        self.balances.get(&account).copied().unwrap_or_default()
    }

    pub fn balances(&self) -> &BTreeMap<Account, Micros> {
        &self.balances
    }

    pub fn pools(&self) -> PoolBalances {
        self.pools
    }

    pub fn role_totals(&self) -> [Micros; 4] {
        self.role_totals
    }

    pub fn total_supply(&self) -> Micros {
        self.total_supply
    }

    pub fn issuance_log(&self) -> &[IssuanceEvent] {
        &self.issuance_log
    }

    pub fn depletions(&self) -> u64 {
        self.depletions
    }

    /// Σ balances + unspent pools must equal total supply exactly.
    pub fn check_conservation(&self) -> Result<()> {
        let held: u128 = self.balances.values().map(|m| m.0 as u128).sum::<u128>()
            + self.pools.validator.0 as u128
            + self.pools.security.0 as u128
            + self.pools.system.0 as u128;
        if held != self.total_supply.0 as u128 {
            return Err(PohcError::Ledger(format!(
                "conservation violated: held {held} != supply {}",
                self.total_supply.0
            )));
        }
        for ev in &self.issuance_log {
            if ev.split.total() != ev.amount {
                return Err(PohcError::Ledger(format!("split of {} does not sum", ev.contribution)));
            }
        }
        Ok(())
    }
}
