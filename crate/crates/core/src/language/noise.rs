use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acts::{Frame, Intent};
use crate::error::{Error, Result};
use crate::ontology::{Database, PRIMARY_KEY};

/// Per-frame and per-slot corruption probabilities for the language channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub p_frame_drop: f64,
    pub p_slot_confusion: f64,
    pub p_value_corruption: f64,
    pub p_value_truncation: f64,
}

impl NoiseConfig {
    pub fn uniform(p: f64) -> Self {
        NoiseConfig {
            p_frame_drop: p,
            p_slot_confusion: p,
            p_value_corruption: p,
            p_value_truncation: p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_frame_drop", self.p_frame_drop),
            ("p_slot_confusion", self.p_slot_confusion),
            ("p_value_corruption", self.p_value_corruption),
            ("p_value_truncation", self.p_value_truncation),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "noise: {name}={p} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn is_lossless(&self) -> bool {
        *self == NoiseConfig::default()
    }
}

/// Value pools and slot-confusion groups the noise draws from.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseContext {
    values: BTreeMap<String, Vec<String>>,
    groups: Vec<Vec<String>>,
}

impl NoiseContext {
    /// Informable values from the domain, other slots from the database
    /// columns. Confusion groups: the informable slots, and the contact
    /// slots (addr, phone, postcode).
    pub fn new(db: &Database) -> Self {
        let domain = db.domain();
        let mut values = BTreeMap::new();
        for slot in domain.all_slots() {
            let pool: Vec<String> = match domain.values(&slot) {
                Some(v) => v.to_vec(),
                None => db.column(&slot).into_iter().map(str::to_string).collect(),
            };
            values.insert(slot, pool);
        }
        let informable: Vec<String> = domain.informable_slots().map(str::to_string).collect();
        let contact: Vec<String> = domain
            .requestable_slots()
            .iter()
            .filter(|s| !domain.is_informable(s) && s.as_str() != PRIMARY_KEY)
            .cloned()
            .collect();
        NoiseContext {
            values,
            groups: vec![informable, contact],
        }
    }

    /// Values the channel may substitute for `slot`.
    pub fn values(&self, slot: &str) -> &[String] {
        self.values.get(slot).map_or(&[], Vec::as_slice)
    }

    pub fn with_groups(mut self, groups: Vec<Vec<String>>) -> Self {
        self.groups = groups;
        self
    }

    fn confusable(&self, slot: &str) -> Vec<&str> {
        self.groups
            .iter()
            .find(|g| g.iter().any(|s| s == slot))
            .map(|g| {
                g.iter()
                    .map(String::as_str)
                    .filter(|s| *s != slot)
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// Corrupts frames independently per frame and per argument: drop, slot
/// confusion within a group, value replacement from the slot's pool, and
/// truncation of multi-token values to their first token.
pub fn apply_noise<R: Rng + ?Sized>(
    frames: &[Frame],
    cfg: &NoiseConfig,
    ctx: &NoiseContext,
    rng: &mut R,
) -> Vec<Frame> {
    if cfg.is_lossless() {
        return frames.to_vec();
    }
    let mut out = Vec::with_capacity(frames.len());
    for frame in frames {
        if rng.random_bool(cfg.p_frame_drop) {
            continue;
        }
        let mut frame = frame.clone();
        let is_request = frame.intent == Intent::Request;
        for arg in &mut frame.args {
            if rng.random_bool(cfg.p_slot_confusion) {
                if let Some(other) = ctx.confusable(&arg.slot).choose(rng) {
                    arg.slot = other.to_string();
                }
            }
            if is_request {
                continue;
            }
            let Some(value) = arg.value.as_mut() else {
                continue;
            };
            if rng.random_bool(cfg.p_value_corruption) {
                if let Some(v) = ctx.values.get(&arg.slot).and_then(|p| p.choose(rng)) {
                    *value = v.clone();
                }
            }
            if rng.random_bool(cfg.p_value_truncation) {
                if let Some(first) = value.split_whitespace().next() {
                    *value = first.to_string();
                }
            }
        }
        out.push(frame);
    }
    out
}
