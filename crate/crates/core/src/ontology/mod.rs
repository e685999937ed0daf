//! Slot-filling domain: slots and values, the item database behind the
//! provider, and seeker goals.

mod database;
mod goal;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use database::{generate_database, Database, QueryResult, BUNDLED_DB_SEED};
pub use goal::{sample_goal, Goal, GoalConfig};

/// Name of the slot that identifies an item.
pub const PRIMARY_KEY: &str = "name";

/// Surface form used when a dontcare value is spoken.
pub const DONTCARE_SURFACE: &str = "any";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    informable: Vec<(String, Vec<String>)>,
    requestable: Vec<String>,
    pub dontcare: String,
}

impl Domain {
    pub fn new(
        name: impl Into<String>,
        informable: Vec<(String, Vec<String>)>,
        requestable: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        let mut seen = std::collections::BTreeSet::new();
        for (slot, values) in &informable {
            if !seen.insert(slot.as_str()) {
                return Err(Error::InvalidDomain(format!(
                    "duplicate informable slot `{slot}`"
                )));
            }
            if values.len() < 2 {
                return Err(Error::InvalidDomain(format!(
                    "informable slot `{slot}` needs at least 2 values"
                )));
            }
        }
        if requestable.is_empty() {
            return Err(Error::InvalidDomain("no requestable slots".into()));
        }
        if !requestable.iter().any(|s| s == PRIMARY_KEY) {
            return Err(Error::InvalidDomain(format!(
                "requestable slots must include `{PRIMARY_KEY}`"
            )));
        }
        Ok(Domain {
            name,
            informable,
            requestable,
            dontcare: "dontcare".to_string(),
        })
    }

    /// The bundled restaurant domain: food (12 values), area (5), pricerange (3).
    pub fn restaurants() -> Self {
        let strings = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Domain::new(
            "restaurants",
            vec![
                (
                    "food".into(),
                    strings(&[
                        "italian", "chinese", "indian", "british", "french", "african", "thai",
                        "european", "spanish", "turkish", "japanese", "korean",
                    ]),
                ),
                (
                    "area".into(),
                    strings(&["centre", "north", "south", "east", "west"]),
                ),
                (
                    "pricerange".into(),
                    strings(&["cheap", "moderate", "expensive"]),
                ),
            ],
            strings(&[
                "name",
                "food",
                "area",
                "pricerange",
                "addr",
                "phone",
                "postcode",
            ]),
        )
        .expect("bundled domain is valid")
    }

    pub fn informable_slots(&self) -> impl Iterator<Item = &str> {
        self.informable.iter().map(|(s, _)| s.as_str())
    }

    pub fn requestable_slots(&self) -> &[String] {
        &self.requestable
    }

    pub fn values(&self, slot: &str) -> Option<&[String]> {
        self.informable
            .iter()
            .find(|(s, _)| s == slot)
            .map(|(_, v)| v.as_slice())
    }

    pub fn is_informable(&self, slot: &str) -> bool {
        self.informable.iter().any(|(s, _)| s == slot)
    }

    pub fn is_requestable(&self, slot: &str) -> bool {
        self.requestable.iter().any(|s| s == slot)
    }

    pub fn has_slot(&self, slot: &str) -> bool {
        self.is_informable(slot) || self.is_requestable(slot)
    }

    pub fn informable_index(&self, slot: &str) -> Option<usize> {
        self.informable.iter().position(|(s, _)| s == slot)
    }

    pub fn requestable_index(&self, slot: &str) -> Option<usize> {
        self.requestable.iter().position(|s| s == slot)
    }

    pub fn n_informable(&self) -> usize {
        self.informable.len()
    }

    /// Every slot an item record carries, informables first, without duplicates.
    pub fn all_slots(&self) -> Vec<String> {
        let mut out: Vec<String> = self.informable_slots().map(str::to_string).collect();
        for s in &self.requestable {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        out
    }

    pub fn is_dontcare(&self, value: &str) -> bool {
        value == self.dontcare
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ItemRecord {
    pub values: BTreeMap<String, String>,
}

impl ItemRecord {
    pub fn get(&self, slot: &str) -> Option<&str> {
        self.values.get(slot).map(String::as_str)
    }

    pub fn name(&self) -> &str {
        self.get(PRIMARY_KEY).unwrap_or_default()
    }

    /// Whether the item satisfies a single constraint; dontcare matches anything.
    pub fn matches(&self, slot: &str, value: &str, dontcare: &str) -> bool {
        value == dontcare || self.get(slot) == Some(value)
    }
}

impl fmt::Display for ItemRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}
