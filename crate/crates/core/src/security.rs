//! Authenticity checks, collusion and sybil detection, fraud scoring and
//! the Byzantine colluder bound.
//!
//! Detectors are pure functions of a behavioral snapshot, so two calls with
//! the same inputs return the same flags in the same order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_normalized_weights, PohcError, Result};
use crate::model::{UnitScore, ValidatorId};
use crate::parallel::Exec;

pub const DEFAULT_COLLUSION_THRESHOLD: f64 = 0.6;
pub const DEFAULT_SYBIL_THRESHOLD: f64 = 0.7;
pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.9;
pub const DEFAULT_AUTHENTICITY_THRESHOLD: f64 = 0.5;
/// A socially linked pair needs `0.1 · proximity` less similarity to be joined.
pub const SOCIAL_LINK_BONUS: f64 = 0.1;
pub const HOURS: usize = 24;

/// Undirected weighted graph of social ties between validators.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SocialGraph {
    nodes: Vec<ValidatorId>,
    edges: BTreeMap<(ValidatorId, ValidatorId), UnitScore>,
}

fn key(a: ValidatorId, b: ValidatorId) -> (ValidatorId, ValidatorId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SocialGraph {
    pub fn new(nodes: impl IntoIterator<Item = ValidatorId>) -> Self {
        let mut nodes: Vec<ValidatorId> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        SocialGraph {
            nodes,
            edges: BTreeMap::new(),
        }
    }

    pub fn add_edge(&mut self, a: ValidatorId, b: ValidatorId, proximity: UnitScore) -> Result<()> {
        if a == b {
            return Err(PohcError::InvalidArgument {
                name: "edge",
                reason: format!("self edge on {a}"),
            });
        }
        for n in [a, b] {
            if let Err(pos) = self.nodes.binary_search(&n) {
                self.nodes.insert(pos, n);
            }
        }
        self.edges.insert(key(a, b), proximity);
        Ok(())
    }

    /// Zero when the two are not linked.
    pub fn proximity(&self, a: ValidatorId, b: ValidatorId) -> UnitScore {
        self.edges.get(&key(a, b)).copied().unwrap_or(UnitScore::ZERO)
    }

    pub fn is_adjacent(&self, a: ValidatorId, b: ValidatorId) -> bool {
        self.edges.contains_key(&key(a, b))
    }

    pub fn nodes(&self) -> &[ValidatorId] {
        &self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Largest proximity among all pairs in `group`.
    pub fn max_proximity_within(&self, group: &[ValidatorId]) -> UnitScore {
        let mut best = UnitScore::ZERO;
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                let p = self.proximity(*a, *b);
                if p > best {
                    best = p;
                }
            }
        }
        best
    }
}

/// Behavioral summary of one validator over an observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatorFeatures {
    pub id: ValidatorId,
    pub mean_vote: f64,
    pub vote_variance: f64,
    pub mean_latency: f64,
    /// Share of votes cast in each hour of the day; sums to 1 (or is all zero
    /// for a validator with no votes).
    pub active_hours: [f64; HOURS],
    /// Agreement rate with each peer the validator shared a panel with.
    pub agreement: BTreeMap<ValidatorId, UnitScore>,
}

impl ValidatorFeatures {
    /// Identity vector used for sybil similarity.
    pub fn identity_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 + HOURS);
        v.push(self.mean_vote);
        v.push(self.vote_variance);
        v.push(self.mean_latency);
        v.extend_from_slice(&self.active_hours);
        v
    }

    pub fn agreement_with(&self, other: ValidatorId) -> Option<UnitScore> {
        self.agreement.get(&other).copied()
    }
}

/// Square matrix indexed by position in a feature list.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    n: usize,
    data: Vec<f64>,
}

impl PairMatrix {
    pub fn zeros(n: usize) -> Self {
        PairMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }
}

/// Pearson correlation; `None` for fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Maps a correlation in `[-1, 1]` onto `[0, 1]`.
pub fn correlation_to_unit(rho: f64) -> UnitScore {
    UnitScore::saturate((rho + 1.0) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuthenticitySignals {
    pub pattern_analysis: UnitScore,
    pub social_graph: UnitScore,
    pub temporal_correlation: UnitScore,
    pub cross_validation: UnitScore,
    pub impact_verification: UnitScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AuthenticityAction {
    Celebrate,
    Investigate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuthenticityOutcome {
    pub score: UnitScore,
    pub action: AuthenticityAction,
}

pub const EQUAL_AUTHENTICITY_WEIGHTS: [f64; 5] = [0.2; 5];

/// Weighted combination of the five signals; investigate strictly below `threshold`.
pub fn verify_authenticity(
    signals: &AuthenticitySignals,
    weights: &[f64; 5],
    threshold: UnitScore,
) -> Result<AuthenticityOutcome> {
    check_normalized_weights(weights)?;
    let s = [
        signals.pattern_analysis,
        signals.social_graph,
        signals.temporal_correlation,
        signals.cross_validation,
        signals.impact_verification,
    ];
    let score = UnitScore::saturate(s.iter().zip(weights).map(|(x, w)| x.get() * w).sum());
    let action = if score.get() < threshold.get() {
        AuthenticityAction::Investigate
    } else {
        AuthenticityAction::Celebrate
    };
    Ok(AuthenticityOutcome { score, action })
}

/// agreement · proximity / expected random agreement.
pub fn collusion_score(
    agreement_rate: UnitScore,
    social_proximity: UnitScore,
    expected_random_rate: f64,
) -> Result<f64> {
    if !(expected_random_rate.is_finite() && expected_random_rate > 0.0) {
        return Err(PohcError::UndefinedBaseline);
    }
    Ok(agreement_rate.get() * social_proximity.get() / expected_random_rate)
}

/// Mean agreement between validators who share a panel but no social tie.
/// `None` when no such pair has been observed.
pub fn expected_random_agreement(features: &[ValidatorFeatures], graph: &SocialGraph) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for f in features {
        for (peer, rate) in &f.agreement {
            if f.id < *peer && !graph.is_adjacent(f.id, *peer) {
                sum += rate.get();
                n += 1;
            }
        }
    }
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollusionSignals {
    pub social_proximity: UnitScore,
    pub pattern_similarity: UnitScore,
    pub timing: UnitScore,
    pub quality: UnitScore,
}

impl CollusionSignals {
    /// Geometric mean: a single zero dimension vetoes the pair.
    pub fn combined(&self) -> f64 {
        let p = self.social_proximity.get() * self.pattern_similarity.get() * self.timing.get() * self.quality.get();
        p.powf(0.25)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollusionFlag {
    pub pair: (ValidatorId, ValidatorId),
    pub score: f64,
    pub signals: CollusionSignals,
}

fn pattern_similarity(a: &ValidatorFeatures, b: &ValidatorFeatures) -> UnitScore {
    match (a.agreement_with(b.id), b.agreement_with(a.id)) {
        (Some(x), Some(y)) => UnitScore::saturate((x.get() + y.get()) / 2.0),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => UnitScore::ZERO,
    }
}

/// Scores every validator pair on four signals and flags pairs whose
/// combined score exceeds `threshold`, highest score first.
///
/// `timing` and `quality` hold Pearson correlations indexed like `features`.
pub fn detect_collusion(
    graph: &SocialGraph,
    features: &[ValidatorFeatures],
    timing: &PairMatrix,
    quality: &PairMatrix,
    threshold: f64,
) -> Result<Vec<CollusionFlag>> {
    detect_collusion_with(Exec::default(), graph, features, timing, quality, threshold)
}

pub fn detect_collusion_with(
    exec: Exec,
    graph: &SocialGraph,
    features: &[ValidatorFeatures],
    timing: &PairMatrix,
    quality: &PairMatrix,
    threshold: f64,
) -> Result<Vec<CollusionFlag>> {
    let n = features.len();
    if timing.dim() != n || quality.dim() != n {
        return Err(PohcError::DimensionMismatch);
    }
    let rows = exec.map_range(n, |i| {
        let mut out = Vec::new();
        for j in i + 1..n {
            let (a, b) = (&features[i], &features[j]);
            let signals = CollusionSignals {
                social_proximity: graph.proximity(a.id, b.id),
                pattern_similarity: pattern_similarity(a, b),
                timing: correlation_to_unit(timing.get(i, j)),
                quality: correlation_to_unit(quality.get(i, j)),
            };
            let score = signals.combined();
            if score > threshold {
                out.push(CollusionFlag {
                    pair: key(a.id, b.id),
                    score,
                    signals,
                });
            }
        }
        out
    });
    let mut flags: Vec<CollusionFlag> = rows.into_iter().flatten().collect();
    flags.sort_by(|x, y| y.score.total_cmp(&x.score).then(x.pair.cmp(&y.pair)));
    Ok(flags)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SybilCluster {
    pub members: Vec<ValidatorId>,
    pub mean_similarity: f64,
    pub score: f64,
}

/// Column-standardized identity vectors (zero-variance columns become 0).
fn standardized_vectors(features: &[ValidatorFeatures]) -> Vec<Vec<f64>> {
    let raw: Vec<Vec<f64>> = features.iter().map(|f| f.identity_vector()).collect();
    if raw.is_empty() {
        return raw;
    }
    let dim = raw[0].len();
    let n = raw.len() as f64;
    let mut out = raw.clone();
    for d in 0..dim {
        let mean = raw.iter().map(|r| r[d]).sum::<f64>() / n;
        let sd = (raw.iter().map(|r| (r[d] - mean).powi(2)).sum::<f64>() / n).sqrt();
        for (o, r) in out.iter_mut().zip(&raw) {
            o[d] = if sd > 1e-12 { (r[d] - mean) / sd } else { 0.0 };
        }
    }
    out
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na <= 0.0 || nb <= 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Pairwise cosine similarity over standardized identity vectors.
pub fn similarity_matrix(exec: Exec, features: &[ValidatorFeatures]) -> PairMatrix {
    let vecs = standardized_vectors(features);
    let n = vecs.len();
    let rows = exec.map_range(n, |i| (0..n).map(|j| cosine(&vecs[i], &vecs[j])).collect::<Vec<f64>>());
    PairMatrix {
        n,
        data: rows.into_iter().flatten().collect(),
    }
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Single-linkage clusters over the similarity matrix, scored by mean
/// intra-cluster similarity times `min(1, (size - 1) / 4)`.
pub fn detect_sybil(
    features: &[ValidatorFeatures],
    graph: &SocialGraph,
    similarity_threshold: f64,
    sybil_threshold: f64,
) -> Vec<SybilCluster> {
    detect_sybil_with(Exec::default(), features, graph, similarity_threshold, sybil_threshold)
}

pub fn detect_sybil_with(
    exec: Exec,
    features: &[ValidatorFeatures],
    graph: &SocialGraph,
    similarity_threshold: f64,
    sybil_threshold: f64,
) -> Vec<SybilCluster> {
    let n = features.len();
    if n < 2 {
        return Vec::new();
    }
    let sim = similarity_matrix(exec, features);
    let mut ds = DisjointSet((0..n).collect());
    for i in 0..n {
        for j in i + 1..n {
            let bonus = SOCIAL_LINK_BONUS * graph.proximity(features[i].id, features[j].id).get();
            if sim.get(i, j) > similarity_threshold - bonus {
                ds.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = ds.find(i);
        groups.entry(root).or_default().push(i);
    }
    let mut clusters = Vec::new();
    for members in groups.into_values().filter(|m| m.len() >= 2) {
        let mut total = 0.0;
        let mut pairs = 0usize;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                total += sim.get(i, j);
                pairs += 1;
            }
        }
        let mean = total / pairs as f64;
        let size_factor = ((members.len() - 1) as f64 / 4.0).min(1.0);
        let score = mean * size_factor;
        if score > sybil_threshold {
            let mut ids: Vec<ValidatorId> = members.iter().map(|&i| features[i].id).collect();
            ids.sort();
            clusters.push(SybilCluster {
                members: ids,
                mean_similarity: mean,
                score,
            });
        }
    }
    clusters.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.members.cmp(&b.members)));
    clusters
}

/// Transparent weighted-feature stand-in for a learned fraud model.
pub fn fraud_score(anomalies: &[f64], weights: &[f64]) -> Result<UnitScore> {
    if anomalies.len() != weights.len() {
        return Err(PohcError::LengthMismatch(anomalies.len(), weights.len()));
    }
    check_normalized_weights(weights)?;
    let mut s = 0.0;
    for (a, w) in anomalies.iter().zip(weights) {
        s += UnitScore::new(*a)?.get() * w;
    }
    Ok(UnitScore::saturate(s))
}

/// True iff `colluders <= floor(n / 3)`.
pub fn bft_safe(n: usize, colluders: usize) -> bool {
    colluders <= n && colluders <= n / 3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(x: f64) -> UnitScore {
        UnitScore::new(x).unwrap()
    }

    fn feat(id: u32, v: &[f64]) -> ValidatorFeatures {
        let mut hours = [0.0; HOURS];
        hours[..v.len() - 3].copy_from_slice(&v[3..]);
        ValidatorFeatures {
            id: ValidatorId(id),
            mean_vote: v[0],
            vote_variance: v[1],
            mean_latency: v[2],
            active_hours: hours,
            agreement: BTreeMap::new(),
        }
    }

    #[test]
    fn authenticity_examples() {
        let sig = |a, b, c, d, e| AuthenticitySignals {
            pattern_analysis: u(a),
            social_graph: u(b),
            temporal_correlation: u(c),
            cross_validation: u(d),
            impact_verification: u(e),
        };
        let w = EQUAL_AUTHENTICITY_WEIGHTS;
        let t = u(0.5);
        let o = verify_authenticity(&sig(1.0, 1.0, 1.0, 1.0, 1.0), &w, t).unwrap();
        assert_eq!((o.score.get(), o.action), (1.0, AuthenticityAction::Celebrate));
        let o = verify_authenticity(&sig(0.0, 0.0, 0.0, 0.0, 0.0), &w, t).unwrap();
        assert_eq!((o.score.get(), o.action), (0.0, AuthenticityAction::Investigate));
        let o = verify_authenticity(&sig(0.9, 0.8, 0.7, 0.6, 0.5), &w, t).unwrap();
        assert!((o.score.get() - 0.7).abs() < 1e-12);
        // Boundary: score equal to the threshold celebrates.
        let o = verify_authenticity(&sig(0.5, 0.5, 0.5, 0.5, 0.5), &w, t).unwrap();
        assert_eq!(o.action, AuthenticityAction::Celebrate);
        assert!(verify_authenticity(&sig(0.5, 0.5, 0.5, 0.5, 0.5), &[0.3; 5], t).is_err());
    }

    #[test]
    fn collusion_score_examples() {
        assert!((collusion_score(u(0.3), u(1.0), 0.3).unwrap() - 1.0).abs() < 1e-12);
        assert!((collusion_score(u(0.9), u(0.8), 0.3).unwrap() - 2.4).abs() < 1e-12);
        assert_eq!(collusion_score(u(0.9), u(0.0), 0.3).unwrap(), 0.0);
        assert_eq!(collusion_score(u(0.9), u(0.5), 0.0), Err(PohcError::UndefinedBaseline));
    }

    #[test]
    fn detect_collusion_on_empty_and_unlinked_inputs() {
        let g = SocialGraph::default();
        let none = detect_collusion(&g, &[], &PairMatrix::zeros(0), &PairMatrix::zeros(0), 0.6).unwrap();
        assert!(none.is_empty());
        let mut fs = vec![feat(0, &[0.5, 0.0, 1.0, 1.0]), feat(1, &[0.5, 0.0, 1.0, 1.0])];
        fs[0].agreement.insert(ValidatorId(1), u(1.0));
        fs[1].agreement.insert(ValidatorId(0), u(1.0));
        let ones = PairMatrix::from_fn(2, |_, _| 1.0);
        for t in [1e-9, 0.1, 0.5] {
            assert!(detect_collusion(&g, &fs, &ones, &ones, t).unwrap().is_empty());
        }
        let mut linked = SocialGraph::default();
        linked.add_edge(ValidatorId(0), ValidatorId(1), u(0.9)).unwrap();
        let flags = detect_collusion(&linked, &fs, &ones, &ones, 0.6).unwrap();
        assert_eq!(flags.len(), 1);
        assert!((flags[0].score - 0.9f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn detect_collusion_rejects_mismatched_matrices() {
        let fs = vec![feat(0, &[0.5, 0.0, 1.0, 1.0])];
        let g = SocialGraph::default();
        assert!(detect_collusion(&g, &fs, &PairMatrix::zeros(2), &PairMatrix::zeros(1), 0.6).is_err());
    }

    #[test]
    fn sybil_trivial_cases() {
        let g = SocialGraph::default();
        assert!(detect_sybil(&[feat(0, &[1.0, 0.0, 0.0, 0.0])], &g, 0.9, 0.7).is_empty());
        // Orthogonal identity vectors.
        let fs: Vec<ValidatorFeatures> = (0..6)
            .map(|i| {
                let mut v = vec![0.0; 9];
                v[i] = 1.0;
                feat(i as u32, &v)
            })
            .collect();
        assert!(detect_sybil(&fs, &g, 0.9, 0.7).is_empty());
    }

    #[test]
    fn sybil_cluster_score_scales_with_size() {
        let g = SocialGraph::default();
        let mut fs = vec![feat(0, &[0.9, 0.0, 0.1, 1.0]), feat(1, &[0.9, 0.0, 0.1, 1.0])];
        let bg = [
            [0.2, 0.1, 3.0, 0.0],
            [0.7, 0.4, 1.0, 0.0],
            [0.4, 0.0, 6.0, 1.0],
            [0.1, 0.3, 2.0, 0.0],
            [0.6, 0.2, 4.5, 0.0],
            [0.3, 0.5, 0.5, 1.0],
        ];
        fs.extend(bg.iter().enumerate().map(|(i, v)| feat(i as u32 + 2, v)));
        // A pair alone scores at most 0.25: never over the default threshold.
        assert!(detect_sybil(&fs, &g, 0.9, 0.7).is_empty());
        let pairs = detect_sybil(&fs, &g, 0.9, 0.2);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].members, vec![ValidatorId(0), ValidatorId(1)]);
    }

    #[test]
    fn fraud_examples() {
        assert_eq!(fraud_score(&[0.0, 0.0], &[0.5, 0.5]).unwrap().get(), 0.0);
        assert_eq!(fraud_score(&[1.0, 1.0, 1.0], &[0.2, 0.3, 0.5]).unwrap().get(), 1.0);
        assert!((fraud_score(&[0.6, 0.2], &[0.75, 0.25]).unwrap().get() - 0.5).abs() < 1e-12);
        assert!(fraud_score(&[0.6], &[0.75, 0.25]).is_err());
        assert!(fraud_score(&[1.6, 0.0], &[0.75, 0.25]).is_err());
    }

    #[test]
    fn bft_examples() {
        assert!(bft_safe(10, 3));
        assert!(bft_safe(9, 3));
        assert!(!bft_safe(9, 4));
        assert!(bft_safe(0, 0));
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[1.0], &[1.0]), None);
        assert_eq!(pearson(&[1.0, 1.0], &[1.0, 2.0]), None);
        assert_eq!(correlation_to_unit(-1.0).get(), 0.0);
        assert_eq!(correlation_to_unit(0.0).get(), 0.5);
    }

    #[test]
    fn graph_rejects_self_edges() {
        let mut g = SocialGraph::new([ValidatorId(0)]);
        assert!(g.add_edge(ValidatorId(0), ValidatorId(0), u(0.5)).is_err());
        g.add_edge(ValidatorId(2), ValidatorId(1), u(0.5)).unwrap();
        assert_eq!(g.proximity(ValidatorId(1), ValidatorId(2)), u(0.5));
        assert_eq!(g.nodes(), &[ValidatorId(0), ValidatorId(1), ValidatorId(2)]);
    }
}
