//! Declared attacker model and per-validator vote generation.
//!
//! Honest: latent quality plus Gaussian noise, clamped. Lazy: a flat 0.5
//! with probability `1 - effort`, otherwise honest. Colluders: each clique
//! shares one inverted reading per contribution, which members copy with a
//! fixed probability at a latency tied to the clique. Sybil identities all
//! cast the operator's vote in the operator's hour at the operator's latency.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::model::UnitScore;
use crate::security::HOURS;

use super::window::VoteRecord;

/// Stable timing habits of one identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Persona {
    pub base_latency: f64,
    pub hour_center: u8,
}

impl Persona {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Persona {
            base_latency: rng.random_range(1.0..8.0),
            hour_center: rng.random_range(0..HOURS as u8),
        }
    }

    pub fn latency<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.base_latency * (0.3 * std_normal(rng)).exp()
    }

    pub fn hour<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        let shift = (2.0 * std_normal(rng)).round() as i32;
        (i32::from(self.hour_center) + shift).rem_euclid(HOURS as i32) as u8
    }
}

pub fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").sample(rng)
}

pub fn noisy_reading<R: Rng + ?Sized>(quality: UnitScore, sigma: f64, rng: &mut R) -> f64 {
    (quality.get() + sigma * std_normal(rng)).clamp(0.0, 1.0)
}

/// Per-contribution state shared by the members of one colluding clique.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliqueDraw {
    pub vote: f64,
    pub latency: f64,
}

impl CliqueDraw {
    pub fn sample<R: Rng + ?Sized>(quality: UnitScore, sigma: f64, leader: &Persona, rng: &mut R) -> Self {
        CliqueDraw {
            vote: 1.0 - noisy_reading(quality, sigma, rng),
            latency: leader.latency(rng),
        }
    }
}

/// How one identity behaves on one contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Behavior {
    Honest {
        sigma: f64,
    },
    Lazy {
        sigma: f64,
        effort: f64,
    },
    Colluder {
        sigma: f64,
        copy_probability: f64,
        clique: CliqueDraw,
    },
    Sybil {
        vote: f64,
        operator: Persona,
    },
}

pub fn cast_vote<R: Rng + ?Sized>(
    validator: crate::model::ValidatorId,
    persona: &Persona,
    quality: UnitScore,
    behavior: Behavior,
    rng: &mut R,
) -> VoteRecord {
    let honest = |rng: &mut R, sigma| VoteRecord {
        validator,
        value: noisy_reading(quality, sigma, rng),
        latency: persona.latency(rng),
        hour: persona.hour(rng),
    };
    match behavior {
        Behavior::Honest { sigma } => honest(rng, sigma),
        Behavior::Lazy { sigma, effort } => {
            if rng.random::<f64>() < 1.0 - effort {
                VoteRecord {
                    validator,
                    value: 0.5,
                    latency: persona.latency(rng),
                    hour: persona.hour(rng),
                }
            } else {
                honest(rng, sigma)
            }
        }
        Behavior::Colluder {
            sigma,
            copy_probability,
            clique,
        } => {
            if rng.random::<f64>() < copy_probability {
                VoteRecord {
                    validator,
                    value: clique.vote,
                    latency: clique.latency * (0.05 * std_normal(rng)).exp(),
                    hour: persona.hour(rng),
                }
            } else {
                honest(rng, sigma)
            }
        }
        Behavior::Sybil { vote, operator } => VoteRecord {
            validator,
            value: vote,
            latency: operator.base_latency,
            hour: operator.hour_center,
        },
    }
}
