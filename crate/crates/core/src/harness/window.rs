//! Accumulates votes over a detection window and turns them into detector
//! inputs: per-validator features, pairwise timing/quality correlations and
//! the social graph.

use std::collections::BTreeMap;

use crate::model::{UnitScore, ValidatorId};
use crate::security::{pearson, PairMatrix, ValidatorFeatures, HOURS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoteRecord {
    pub validator: ValidatorId,
    pub value: f64,
    /// Hours between assignment and vote.
    pub latency: f64,
    pub hour: u8,
}

#[derive(Debug, Clone, Default)]
struct Totals {
    n: u32,
    sum: f64,
    sum_sq: f64,
    latency: f64,
    hours: [u32; HOURS],
}

#[derive(Debug, Clone, Default)]
pub struct BehaviorWindow {
    panels: Vec<Vec<VoteRecord>>,
    totals: BTreeMap<ValidatorId, Totals>,
}

#[derive(Debug, Clone, Default)]
struct PairSeries {
    agree: u32,
    a_val: Vec<f64>,
    b_val: Vec<f64>,
    a_lat: Vec<f64>,
    b_lat: Vec<f64>,
}

/// Everything the collusion and sybil detectors need for one window.
#[derive(Debug, Clone)]
pub struct DetectorInputs {
    pub features: Vec<ValidatorFeatures>,
    pub timing: PairMatrix,
    pub quality: PairMatrix,
}

impl BehaviorWindow {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records all votes cast on one contribution.
    pub fn record_panel(&mut self, votes: Vec<VoteRecord>) {
        for v in &votes {
            let t = self.totals.entry(v.validator).or_default();
            t.n += 1;
            t.sum += v.value;
            t.sum_sq += v.value * v.value;
            t.latency += v.latency;
            t.hours[usize::from(v.hour) % HOURS] += 1;
        }
        if votes.len() >= 2 {
            self.panels.push(votes);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.totals.is_empty()
    }

    pub fn clear(&mut self) {
        self.panels.clear();
        self.totals.clear();
    }

    /// Validators who voted at least once in the window, ascending.
    pub fn active(&self) -> Vec<ValidatorId> {
        self.totals.keys().copied().collect()
    }

    /// Builds detector inputs for `ids` (in that order). Pairs with fewer
    /// than `min_co_votes` shared panels get zero correlation and no
    /// agreement entry.
    pub fn detector_inputs(&self, ids: &[ValidatorId], agreement_tolerance: f64, min_co_votes: u32) -> DetectorInputs {
        let index: BTreeMap<ValidatorId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut pairs: BTreeMap<(usize, usize), PairSeries> = BTreeMap::new();
        for panel in &self.panels {
            for (x, a) in panel.iter().enumerate() {
                for b in &panel[x + 1..] {
                    let (Some(&i), Some(&j)) = (index.get(&a.validator), index.get(&b.validator)) else {
                        continue;
                    };
                    if i == j {
                        continue;
                    }
                    let (lo, hi, first, second) = if i < j { (i, j, a, b) } else { (j, i, b, a) };
                    let s = pairs.entry((lo, hi)).or_default();
                    if (first.value - second.value).abs() <= agreement_tolerance {
                        s.agree += 1;
                    }
                    s.a_val.push(first.value);
                    s.b_val.push(second.value);
                    s.a_lat.push(first.latency);
                    s.b_lat.push(second.latency);
                }
            }
        }

        let mut features: Vec<ValidatorFeatures> = ids
            .iter()
            .map(|id| {
                let t = self.totals.get(id).cloned().unwrap_or_default();
                let n = f64::from(t.n.max(1));
                let mean = t.sum / n;
                let mut hours = [0.0; HOURS];
                if t.n > 0 {
                    for (h, c) in hours.iter_mut().zip(t.hours) {
                        *h = f64::from(c) / n;
                    }
                }
                ValidatorFeatures {
                    id: *id,
                    mean_vote: mean,
                    vote_variance: (t.sum_sq / n - mean * mean).max(0.0),
                    mean_latency: t.latency / n,
                    active_hours: hours,
                    agreement: BTreeMap::new(),
                }
            })
            .collect();

        let n = ids.len();
        let mut timing = PairMatrix::zeros(n);
        let mut quality = PairMatrix::zeros(n);
        for ((i, j), s) in &pairs {
            let co = s.a_val.len() as u32;
            if co < min_co_votes {
                continue;
            }
            let rate = UnitScore::saturate(f64::from(s.agree) / f64::from(co));
            features[*i].agreement.insert(ids[*j], rate);
            features[*j].agreement.insert(ids[*i], rate);
            timing.set_sym(*i, *j, pearson(&s.a_lat, &s.b_lat).unwrap_or(0.0));
            quality.set_sym(*i, *j, pearson(&s.a_val, &s.b_val).unwrap_or(0.0));
        }
        DetectorInputs {
            features,
            timing,
            quality,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: u32, value: f64, latency: f64, hour: u8) -> VoteRecord {
        VoteRecord {
            validator: ValidatorId(id),
            value,
            latency,
            hour,
        }
    }

    #[test]
    fn features_and_correlations() {
        let mut w = BehaviorWindow::new();
        for k in 0..10 {
            let x = f64::from(k) / 10.0;
            w.record_panel(vec![
                rec(0, x, 1.0 + x, 3),
                rec(1, x, 2.0 + x, 3),
                rec(2, 1.0 - x, 5.0 - x, 9),
            ]);
        }
        let ids = w.active();
        let inp = w.detector_inputs(&ids, 0.05, 5);
        assert_eq!(inp.features.len(), 3);
        assert!((inp.features[0].mean_vote - 0.45).abs() < 1e-12);
        assert_eq!(inp.features[0].active_hours[3], 1.0);
        assert_eq!(inp.features[0].agreement_with(ValidatorId(1)).unwrap().get(), 1.0);
        assert!((inp.quality.get(0, 1) - 1.0).abs() < 1e-12);
        assert!((inp.quality.get(0, 2) + 1.0).abs() < 1e-12);
        assert!((inp.timing.get(1, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_pairs_get_no_signal() {
        let mut w = BehaviorWindow::new();
        w.record_panel(vec![rec(0, 0.1, 1.0, 0), rec(1, 0.1, 1.0, 0)]);
        let inp = w.detector_inputs(&w.active(), 0.05, 5);
        assert!(inp.features[0].agreement.is_empty());
        assert_eq!(inp.quality.get(0, 1), 0.0);
    }
}
