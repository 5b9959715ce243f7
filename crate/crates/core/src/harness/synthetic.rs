//! Planted-group detection suites: a population of honest validators with
//! either one colluding clique or one sybil group hidden among them, every
//! validator voting on every contribution.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{PohcError, Result};
use crate::model::{UnitScore, ValidatorId};
use crate::parallel::Exec;
use crate::security::{self, SocialGraph};

use super::behavior::{cast_vote, Behavior, CliqueDraw, Persona};
use super::config::SecurityParams;
use super::window::BehaviorWindow;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticParams {
    pub validators: usize,
    pub group_size: usize,
    pub contributions: usize,
    pub honest_noise: f64,
    pub copy_probability: f64,
    pub sybil_vote: f64,
    pub security: SecurityParams,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            validators: 20,
            group_size: 4,
            contributions: 60,
            honest_noise: 0.1,
            copy_probability: 0.9,
            sybil_vote: 0.95,
            security: SecurityParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedOutcome {
    pub planted: Vec<ValidatorId>,
    pub flagged_pairs: Vec<(ValidatorId, ValidatorId)>,
    pub clusters: Vec<Vec<ValidatorId>>,
}

impl PlantedOutcome {
    pub fn planted_pairs(&self) -> BTreeSet<(ValidatorId, ValidatorId)> {
        let mut out = BTreeSet::new();
        for (k, &a) in self.planted.iter().enumerate() {
            for &b in &self.planted[k + 1..] {
                out.insert((a.min(b), a.max(b)));
            }
        }
        out
    }

    /// (true positives, flagged, planted) over pairs.
    pub fn pair_counts(&self) -> (usize, usize, usize) {
        let truth = self.planted_pairs();
        let tp = self.flagged_pairs.iter().filter(|p| truth.contains(p)).count();
        (tp, self.flagged_pairs.len(), truth.len())
    }

    /// Exactly one cluster, equal to the planted group.
    pub fn exact_recovery(&self) -> bool {
        self.clusters.len() == 1 && self.clusters[0] == self.planted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Plant {
    Clique,
    Sybils,
}

pub fn planted_clique(seed: u64, p: &SyntheticParams) -> Result<PlantedOutcome> {
    run(seed, p, Plant::Clique)
}

pub fn planted_sybils(seed: u64, p: &SyntheticParams) -> Result<PlantedOutcome> {
    run(seed, p, Plant::Sybils)
}

fn run(seed: u64, p: &SyntheticParams, plant: Plant) -> Result<PlantedOutcome> {
    if p.group_size < 2 || p.group_size > p.validators {
        return Err(PohcError::InvalidArgument {
            name: "group_size",
            reason: format!("{} of {}", p.group_size, p.validators),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.validators;
    let ids: Vec<ValidatorId> = (0..n as u32).map(ValidatorId).collect();
    let mut planted: Vec<usize> = sample(&mut rng, n, p.group_size).into_vec();
    planted.sort_unstable();
    let in_group: BTreeSet<usize> = planted.iter().copied().collect();
    let personas: Vec<Persona> = (0..n).map(|_| Persona::sample(&mut rng)).collect();
    let leader = personas[planted[0]];

    let s = &p.security;
    let mut graph = SocialGraph::new(ids.iter().copied());
    for i in 0..n {
        for j in i + 1..n {
            if in_group.contains(&i) && in_group.contains(&j) {
                graph.add_edge(ids[i], ids[j], UnitScore::saturate(s.group_edge))?;
            } else if rng.random::<f64>() < s.background_edge_probability {
                let w = rng.random::<f64>() * s.background_edge_max;
                graph.add_edge(ids[i], ids[j], UnitScore::saturate(w))?;
            }
        }
    }

    let quality = Beta::new(2.0, 2.0).map_err(|e| PohcError::InvalidArgument {
        name: "quality",
        reason: e.to_string(),
    })?;
    let mut window = BehaviorWindow::new();
    for _ in 0..p.contributions {
        let q = UnitScore::saturate(quality.sample(&mut rng));
        let clique = CliqueDraw::sample(q, p.honest_noise, &leader, &mut rng);
        let votes = (0..n)
            .map(|i| {
                let behavior = match (in_group.contains(&i), plant) {
                    (false, _) => Behavior::Honest { sigma: p.honest_noise },
                    (true, Plant::Clique) => Behavior::Colluder {
                        sigma: p.honest_noise,
                        copy_probability: p.copy_probability,
                        clique,
                    },
                    (true, Plant::Sybils) => Behavior::Sybil {
                        vote: p.sybil_vote,
                        operator: leader,
                    },
                };
                cast_vote(ids[i], &personas[i], q, behavior, &mut rng)
            })
            .collect();
        window.record_panel(votes);
    }

    let inputs = window.detector_inputs(&ids, s.agreement_tolerance, s.min_co_votes);
    let planted: Vec<ValidatorId> = planted.into_iter().map(|i| ids[i]).collect();
    Ok(match plant {
        Plant::Clique => {
            let flags = security::detect_collusion_with(
                Exec::Serial,
                &graph,
                &inputs.features,
                &inputs.timing,
                &inputs.quality,
                s.collusion_threshold,
            )?;
            let mut flagged_pairs: Vec<_> = flags.into_iter().map(|f| f.pair).collect();
            flagged_pairs.sort();
            PlantedOutcome {
                planted,
                flagged_pairs,
                clusters: Vec::new(),
            }
        }
        Plant::Sybils => {
            let clusters = security::detect_sybil_with(
                Exec::Serial,
                &inputs.features,
                &graph,
                s.similarity_threshold,
                s.sybil_threshold,
            )
            .into_iter()
            .map(|c| c.members)
            .collect();
            PlantedOutcome {
                planted,
                flagged_pairs: Vec::new(),
                clusters,
            }
        }
    })
}
