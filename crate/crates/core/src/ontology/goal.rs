use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Database, Domain, PRIMARY_KEY};
use crate::error::{Error, Result};

/// What the seeker wants: constraints it imposes and slots it asks about.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Goal {
    pub constraints: BTreeMap<String, String>,
    pub requests: BTreeSet<String>,
}

impl Goal {
    pub fn new<C, R>(constraints: C, requests: R) -> Self
    where
        C: IntoIterator<Item = (&'static str, &'static str)>,
        R: IntoIterator<Item = &'static str>,
    {
        Goal {
            constraints: constraints
                .into_iter()
                .map(|(s, v)| (s.to_string(), v.to_string()))
                .collect(),
            requests: requests.into_iter().map(str::to_string).collect(),
        }
    }

    pub fn validate(&self, domain: &Domain) -> Result<()> {
        if self.constraints.is_empty() || self.requests.is_empty() {
            return Err(Error::Config("goal needs constraints and requests".into()));
        }
        for (slot, value) in &self.constraints {
            let values = domain.values(slot).ok_or_else(|| Error::DomainMismatch {
                domain: domain.name.clone(),
                slot: slot.clone(),
            })?;
            if !domain.is_dontcare(value) && !values.contains(value) {
                return Err(Error::Config(format!(
                    "`{value}` is not a value of `{slot}`"
                )));
            }
        }
        for slot in &self.requests {
            if !domain.is_requestable(slot) {
                return Err(Error::DomainMismatch {
                    domain: domain.name.clone(),
                    slot: slot.clone(),
                });
            }
            if self.constraints.contains_key(slot) {
                return Err(Error::Config(format!(
                    "`{slot}` is both constrained and requested"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .constraints
            .iter()
            .map(|(s, v)| format!("Constr({s}={v})"))
            .chain(self.requests.iter().map(|r| format!("Req({r})")))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GoalConfig {
    pub min_constraints: usize,
    pub max_constraints: usize,
    pub min_requests: usize,
    pub max_requests: usize,
    /// Probability that the constraints match at least one item.
    pub p_satisfiable: f64,
    /// Probability that a constrained slot is dontcare.
    pub p_dontcare: f64,
    /// Slots requests are drawn from; empty means every requestable slot but the name.
    pub request_pool: Vec<String>,
}

impl Default for GoalConfig {
    fn default() -> Self {
        GoalConfig {
            min_constraints: 1,
            max_constraints: 3,
            min_requests: 1,
            max_requests: 2,
            p_satisfiable: 1.0,
            p_dontcare: 0.1,
            request_pool: Vec::new(),
        }
    }
}

impl GoalConfig {
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("goal: {m}")));
        if self.min_constraints == 0 || self.min_constraints > self.max_constraints {
            return bad("need 1 <= min_constraints <= max_constraints");
        }
        if self.max_constraints > domain.n_informable() {
            return bad("max_constraints exceeds the number of informable slots");
        }
        if self.min_requests == 0 || self.min_requests > self.max_requests {
            return bad("need 1 <= min_requests <= max_requests");
        }
        for p in [self.p_satisfiable, self.p_dontcare] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        for s in &self.request_pool {
            if !domain.is_requestable(s) {
                return bad(&format!("request pool slot `{s}` is not requestable"));
            }
        }
        // Requests must never run out, even when every informable slot in the pool is constrained.
        let pool = self.pool(domain);
        let worst = pool.iter().filter(|s| !domain.is_informable(s)).count();
        if worst < self.max_requests {
            return bad("request pool too small for max_requests");
        }
        Ok(())
    }

    fn pool(&self, domain: &Domain) -> Vec<String> {
        if self.request_pool.is_empty() {
            domain
                .requestable_slots()
                .iter()
                .filter(|s| *s != PRIMARY_KEY)
                .cloned()
                .collect()
        } else {
            self.request_pool.clone()
        }
    }
}

/// Draws a goal. Satisfiable goals copy constrained values from a random
/// item, so they always match it; unsatisfiable goals are searched for by
/// rejection and fall back to satisfiable when the database is too dense.
pub fn sample_goal<R: Rng + ?Sized>(
    domain: &Domain,
    db: &Database,
    rng: &mut R,
    cfg: &GoalConfig,
) -> Result<Goal> {
    cfg.validate(domain)?;
    if db.is_empty() {
        return Err(Error::Config(
            "cannot sample goals from an empty database".into(),
        ));
    }
    let informable: Vec<&str> = domain.informable_slots().collect();
    let n_constraints = rng.random_range(cfg.min_constraints..=cfg.max_constraints);
    let mut slots = informable.clone();
    slots.shuffle(rng);
    slots.truncate(n_constraints);

    let want_satisfiable = rng.random_bool(cfg.p_satisfiable);
    let mut constraints = BTreeMap::new();
    let mut unsatisfiable_found = false;
    if !want_satisfiable {
        for _ in 0..200 {
            let candidate: BTreeMap<String, String> = slots
                .iter()
                .map(|s| {
                    let values = domain.values(s).unwrap_or_default();
                    (
                        s.to_string(),
                        values.choose(rng).cloned().unwrap_or_default(),
                    )
                })
                .collect();
            if db.query(&candidate)?.count() == 0 {
                constraints = candidate;
                unsatisfiable_found = true;
                break;
            }
        }
        if !unsatisfiable_found {
            log::warn!(
                "no unsatisfiable {}-slot goal found in {} items; sampling a satisfiable goal",
                slots.len(),
                db.len()
            );
        }
    }
    if !unsatisfiable_found {
        let item = &db.items()[rng.random_range(0..db.len())];
        for s in &slots {
            let value = if rng.random_bool(cfg.p_dontcare) {
                domain.dontcare.clone()
            } else {
                item.get(s).unwrap_or_default().to_string()
            };
            constraints.insert(s.to_string(), value);
        }
    }

    let mut pool: Vec<String> = cfg
        .pool(domain)
        .into_iter()
        .filter(|s| !constraints.contains_key(s))
        .collect();
    pool.shuffle(rng);
    let n_requests = rng
        .random_range(cfg.min_requests..=cfg.max_requests)
        .min(pool.len());
    let requests = pool.into_iter().take(n_requests).collect();
    Ok(Goal {
        constraints,
        requests,
    })
}
