//! Role-specific dialogue state trackers and their compression into a
//! discrete state id for tabular learning.

mod features;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::acts::{Frame, Intent, THIS_SLOT};
use crate::ontology::{Database, Domain, Goal, ItemRecord, PRIMARY_KEY};

pub use features::{
    ConstraintStatus, DbBucket, Focus, IntentClass, ProviderFeatures, RequestStatus,
    SeekerFeatures, StateId,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeekerState {
    pub goal: Goal,
    pub constraint_status: BTreeMap<String, ConstraintStatus>,
    pub request_status: BTreeMap<String, RequestStatus>,
    /// Values heard from the provider.
    pub received: BTreeMap<String, String>,
    pub last_provider_frames: Vec<Frame>,
    /// Name of the current offer; cleared when the seeker changes its
    /// constraints or asks for alternatives.
    pub offer_on_table: Option<String>,
    /// Name of the most recent offer ever heard.
    pub last_offer: Option<String>,
    pub turn: usize,
}

impl SeekerState {
    pub fn new(goal: Goal) -> Self {
        let constraint_status = goal
            .constraints
            .keys()
            .map(|s| (s.clone(), ConstraintStatus::Unexpressed))
            .collect();
        let request_status = goal
            .requests
            .iter()
            .map(|s| (s.clone(), RequestStatus::Unrequested))
            .collect();
        SeekerState {
            goal,
            constraint_status,
            request_status,
            received: BTreeMap::new(),
            last_provider_frames: Vec::new(),
            offer_on_table: None,
            last_offer: None,
            turn: 0,
        }
    }

    /// Folds in the frames understood from the provider's latest utterance.
    pub fn update(&mut self, frames: &[Frame], domain: &Domain) {
        self.turn += 1;
        self.last_provider_frames = frames.to_vec();
        for frame in frames.iter().filter(|f| f.intent == Intent::Offer) {
            let Some(name) = frame.value_of(PRIMARY_KEY) else {
                continue;
            };
            if self.last_offer.as_deref() != Some(name) {
                for status in self.request_status.values_mut() {
                    if *status == RequestStatus::Answered {
                        *status = RequestStatus::Requested;
                    }
                }
            }
            self.last_offer = Some(name.to_string());
            self.offer_on_table = Some(name.to_string());
            self.hear(PRIMARY_KEY, name);
        }
        for frame in frames.iter().filter(|f| f.intent == Intent::Inform) {
            for arg in &frame.args {
                let Some(value) = arg.value.as_deref() else {
                    continue;
                };
                if !domain.has_slot(&arg.slot) {
                    log::warn!("seeker tracker: ignoring unknown slot `{}`", arg.slot);
                    continue;
                }
                self.hear(&arg.slot, value);
            }
        }
    }

    fn hear(&mut self, slot: &str, value: &str) {
        self.received.insert(slot.to_string(), value.to_string());
        if let Some(status) = self.request_status.get_mut(slot) {
            if *status == RequestStatus::Requested {
                *status = RequestStatus::Answered;
            }
        }
    }

    /// Folds in the seeker's own emitted frames.
    pub fn record_own(&mut self, frames: &[Frame]) {
        for frame in frames {
            match frame.intent {
                Intent::Inform => {
                    for arg in &frame.args {
                        let slot = if arg.slot == THIS_SLOT {
                            match self.last_provider_request() {
                                Some(s)
                                    if self.goal.constraints.get(&s).map(String::as_str)
                                        == arg.value.as_deref() =>
                                {
                                    s
                                }
                                _ => continue,
                            }
                        } else {
                            arg.slot.clone()
                        };
                        if let Some(status) = self.constraint_status.get_mut(&slot) {
                            if *status == ConstraintStatus::Unexpressed {
                                *status = ConstraintStatus::Expressed;
                                self.offer_on_table = None;
                            }
                        }
                    }
                }
                Intent::Request => {
                    for arg in &frame.args {
                        if let Some(status) = self.request_status.get_mut(&arg.slot) {
                            if *status == RequestStatus::Unrequested {
                                *status = RequestStatus::Requested;
                            }
                        }
                    }
                }
                Intent::Reqalts => self.offer_on_table = None,
                Intent::Restart => {
                    *self = SeekerState {
                        turn: self.turn,
                        ..SeekerState::new(self.goal.clone())
                    }
                }
                _ => {}
            }
        }
    }

    fn last_provider_request(&self) -> Option<String> {
        self.last_provider_frames
            .iter()
            .rev()
            .find(|f| f.intent == Intent::Request)
            .and_then(|f| f.args.first())
            .map(|a| a.slot.clone())
    }

    pub fn features(&self, domain: &Domain) -> SeekerFeatures {
        SeekerFeatures {
            constraints: domain
                .informable_slots()
                .map(|s| {
                    self.constraint_status
                        .get(s)
                        .copied()
                        .unwrap_or(ConstraintStatus::Expressed)
                })
                .collect(),
            requests: domain
                .requestable_slots()
                .iter()
                .map(|s| {
                    self.request_status
                        .get(s)
                        .copied()
                        .unwrap_or(RequestStatus::Answered)
                })
                .collect(),
            offer_on_table: self.offer_on_table.is_some(),
            last: IntentClass::of(&self.last_provider_frames),
        }
    }

    pub fn encode(&self, domain: &Domain) -> StateId {
        self.features(domain).encode()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProviderState {
    pub expressed_constraints: BTreeMap<String, String>,
    /// Requested slot → answered for the current item in focus.
    pub requested_slots: BTreeMap<String, bool>,
    pub item_in_focus: Option<ItemRecord>,
    /// Position of the focus item within the current query result.
    pub focus_index: usize,
    pub db_count: usize,
    pub db_count_bucket: DbBucket,
    pub high_entropy_slot: Option<String>,
    /// Whether the item in focus has been offered since it came into focus.
    pub offered: bool,
    pub last_own_request: Option<String>,
    pub last_seeker_frames: Vec<Frame>,
    pub turn: usize,
}

impl ProviderState {
    /// Fresh state; the unconstrained query puts the first database item in focus.
    pub fn new(db: &Database) -> Self {
        let mut state = ProviderState {
            expressed_constraints: BTreeMap::new(),
            requested_slots: BTreeMap::new(),
            item_in_focus: None,
            focus_index: 0,
            db_count: 0,
            db_count_bucket: DbBucket::Zero,
            high_entropy_slot: None,
            offered: false,
            last_own_request: None,
            last_seeker_frames: Vec::new(),
            turn: 0,
        };
        state.requery(db);
        state
    }

    fn matches(&self, db: &Database) -> Vec<ItemRecord> {
        match db.query(&self.expressed_constraints) {
            Ok(result) => result.items.into_iter().cloned().collect(),
            Err(e) => {
                log::warn!("provider tracker: {e}");
                Vec::new()
            }
        }
    }

    fn requery(&mut self, db: &Database) {
        let (count, top, entropy_slot) = match db.query(&self.expressed_constraints) {
            Ok(r) => (
                r.count(),
                r.items.first().map(|i| (*i).clone()),
                r.highest_entropy_slot().map(str::to_string),
            ),
            Err(e) => {
                log::warn!("provider tracker: {e}");
                (0, None, None)
            }
        };
        self.db_count = count;
        self.db_count_bucket = DbBucket::from_count(count);
        self.high_entropy_slot = entropy_slot;
        self.focus_index = 0;
        self.set_focus(top);
    }

    fn set_focus(&mut self, item: Option<ItemRecord>) {
        if item.as_ref().map(ItemRecord::name) != self.item_in_focus.as_ref().map(ItemRecord::name)
        {
            for answered in self.requested_slots.values_mut() {
                *answered = false;
            }
        }
        self.item_in_focus = item;
        self.offered = false;
    }

    /// Folds in the frames understood from the seeker's latest utterance.
    pub fn update(&mut self, frames: &[Frame], db: &Database) {
        self.turn += 1;
        self.last_seeker_frames = frames.to_vec();
        let domain = db.domain();
        let mut changed = false;
        for frame in frames {
            match frame.intent {
                Intent::Inform => {
                    for arg in &frame.args {
                        let slot = if arg.slot == THIS_SLOT {
                            match self.last_own_request.clone() {
                                Some(s) => s,
                                None => continue,
                            }
                        } else {
                            arg.slot.clone()
                        };
                        let Some(value) = arg.value.clone() else {
                            continue;
                        };
                        if !domain.is_informable(&slot) {
                            continue;
                        }
                        if self.expressed_constraints.get(&slot) != Some(&value) {
                            self.expressed_constraints.insert(slot, value);
                            changed = true;
                        }
                    }
                }
                Intent::Request => {
                    for arg in &frame.args {
                        if domain.is_requestable(&arg.slot) {
                            self.requested_slots.insert(arg.slot.clone(), false);
                        }
                    }
                }
                Intent::Reqalts => {
                    let items = self.matches(db);
                    if !items.is_empty() {
                        self.focus_index = (self.focus_index + 1) % items.len();
                        let next = items[self.focus_index].clone();
                        let index = self.focus_index;
                        self.set_focus(Some(next));
                        self.focus_index = index;
                    }
                }
                Intent::Restart => {
                    self.expressed_constraints.clear();
                    self.requested_slots.clear();
                    changed = true;
                }
                _ => {}
            }
        }
        if changed {
            self.requery(db);
        }
    }

    /// Folds in the provider's own emitted frames.
    pub fn record_own(&mut self, frames: &[Frame]) {
        for frame in frames {
            match frame.intent {
                Intent::Inform => {
                    for arg in &frame.args {
                        if let Some(answered) = self.requested_slots.get_mut(&arg.slot) {
                            *answered = true;
                        }
                    }
                }
                Intent::Offer => {
                    self.offered = true;
                    if let Some(answered) = self.requested_slots.get_mut(PRIMARY_KEY) {
                        *answered = true;
                    }
                }
                Intent::Request => {
                    self.last_own_request = frame.args.first().map(|a| a.slot.clone());
                }
                _ => {}
            }
        }
    }

    pub fn features(&self, domain: &Domain) -> ProviderFeatures {
        ProviderFeatures {
            expressed: domain
                .informable_slots()
                .map(|s| self.expressed_constraints.contains_key(s))
                .collect(),
            pending: domain
                .requestable_slots()
                .iter()
                .map(|s| self.requested_slots.get(s) == Some(&false))
                .collect(),
            bucket: self.db_count_bucket,
            focus: match (&self.item_in_focus, self.offered) {
                (None, _) => Focus::None,
                (Some(_), false) => Focus::InFocus,
                (Some(_), true) => Focus::Offered,
            },
            last: IntentClass::of(&self.last_seeker_frames),
        }
    }

    pub fn encode(&self, domain: &Domain) -> StateId {
        self.features(domain).encode()
    }
}
