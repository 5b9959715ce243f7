use thiserror::Error;

/// Errors produced by the scoring, economy, security and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PohcError {
    #[error("non-finite input for {0}")]
    NonFinite(&'static str),
    #[error("{what} = {value} is outside [0, 1]")]
    OutOfUnitRange { what: &'static str, value: f64 },
    #[error("degenerate assessment set")]
    DegenerateAssessments,
    #[error("total aspect count must be at least 1")]
    NoAspects,
    #[error("verifiable aspects ({verifiable}) exceed total aspects ({total})")]
    TooManyVerifiable { verifiable: u32, total: u32 },
    #[error("cultural profile is not normalized (sum = {0})")]
    Unnormalized(f64),
    #[error("cultural profiles have mismatched dimensions")]
    DimensionMismatch,
    #[error("at least {needed} cultures required, got {got}")]
    TooFewCultures { needed: usize, got: usize },
    #[error("no trusted quorum")]
    NoTrustedQuorum,
    #[error("panel has {got} voters, at least {needed} required")]
    PanelTooSmall { needed: usize, got: usize },
    #[error("no eligible experts")]
    NoEligibleExperts,
    #[error("requested {k} experts from a pool of {pool}")]
    PoolTooSmall { k: usize, pool: usize },
    #[error("not a cross-cultural panel")]
    NotCrossCultural,
    #[error("impact series needs at least 2 points with strictly increasing ticks")]
    InvalidSeries,
    #[error("no weight mass")]
    NoWeightMass,
    #[error("weights must be non-negative and sum to 1 (sum = {0})")]
    BadWeights(f64),
    #[error("issuance factor {0} must be positive")]
    NonPositiveFactor(&'static str),
    #[error("undefined reward: response time must be positive")]
    UndefinedReward,
    #[error("series length mismatch ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("undefined baseline")]
    UndefinedBaseline,
    #[error("unstable queue")]
    UnstableQueue,
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("invalid value for {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("ledger: {0}")]
    Ledger(String),
}

pub type Result<T, E = PohcError> = std::result::Result<T, E>;

pub(crate) fn check_finite(what: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(PohcError::NonFinite(what))
    }
}

/// Checks that a weight vector is non-negative and sums to one within `1e-9`.
pub(crate) fn check_normalized_weights(weights: &[f64]) -> Result<()> {
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(PohcError::BadWeights(sum));
    }
    Ok(())
}
