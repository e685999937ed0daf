use std::fmt;

use serde::{Deserialize, Serialize};

use crate::acts::{Frame, Intent};

/// Discrete state identifier: a mixed-radix packing of a feature tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub u64);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coarse class of the other agent's most recent utterance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntentClass {
    None,
    Greeting,
    Inform,
    Request,
    Offer,
    Confirm,
    Negative,
    Bye,
    Repeat,
    Reqalts,
    Other,
}

impl IntentClass {
    pub const ALL: [IntentClass; 11] = [
        IntentClass::None,
        IntentClass::Greeting,
        IntentClass::Inform,
        IntentClass::Request,
        IntentClass::Offer,
        IntentClass::Confirm,
        IntentClass::Negative,
        IntentClass::Bye,
        IntentClass::Repeat,
        IntentClass::Reqalts,
        IntentClass::Other,
    ];

    pub fn of_intent(intent: Intent) -> Self {
        use Intent::*;
        match intent {
            Hello | Welcomemsg => IntentClass::Greeting,
            Inform => IntentClass::Inform,
            Request => IntentClass::Request,
            Offer => IntentClass::Offer,
            Confirm | ExplConf | Select => IntentClass::Confirm,
            Deny | Negate | Canthelp => IntentClass::Negative,
            Bye => IntentClass::Bye,
            Repeat => IntentClass::Repeat,
            Reqalts | Reqmore => IntentClass::Reqalts,
            Ack | Affirm | Thankyou | Restart => IntentClass::Other,
        }
    }

    /// An offer anywhere in the list dominates; otherwise the last frame decides.
    pub fn of(frames: &[Frame]) -> Self {
        if frames.iter().any(|f| f.intent == Intent::Offer) {
            return IntentClass::Offer;
        }
        frames
            .last()
            .map_or(IntentClass::None, |f| Self::of_intent(f.intent))
    }

    fn index(self) -> u64 {
        Self::ALL.iter().position(|c| *c == self).unwrap() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintStatus {
    Unexpressed,
    Expressed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestStatus {
    Unrequested,
    Requested,
    Answered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DbBucket {
    Zero,
    One,
    /// 2 to 4 matches.
    Few,
    /// 5 or more matches.
    Many,
}

impl DbBucket {
    pub fn from_count(count: usize) -> Self {
        match count {
            0 => DbBucket::Zero,
            1 => DbBucket::One,
            2..=4 => DbBucket::Few,
            _ => DbBucket::Many,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Focus {
    None,
    InFocus,
    /// In focus and already offered.
    Offered,
}

const CONSTRAINT: [ConstraintStatus; 2] =
    [ConstraintStatus::Unexpressed, ConstraintStatus::Expressed];
const REQUEST: [RequestStatus; 3] = [
    RequestStatus::Unrequested,
    RequestStatus::Requested,
    RequestStatus::Answered,
];
const BUCKET: [DbBucket; 4] = [DbBucket::Zero, DbBucket::One, DbBucket::Few, DbBucket::Many];
const FOCUS: [Focus; 3] = [Focus::None, Focus::InFocus, Focus::Offered];

fn pos<T: PartialEq>(all: &[T], x: &T) -> u64 {
    all.iter().position(|a| a == x).unwrap() as u64
}

#[derive(Default)]
struct Packer {
    id: u64,
}

impl Packer {
    fn push(&mut self, digit: u64, radix: u64) {
        debug_assert!(digit < radix);
        self.id = self.id * radix + digit;
    }
}

struct Unpacker {
    id: u64,
}

impl Unpacker {
    /// Digits come out in reverse push order.
    fn pop(&mut self, radix: u64) -> usize {
        let d = self.id % radix;
        self.id /= radix;
        d as usize
    }
}

/// Seeker feature tuple, one entry per informable / requestable slot in
/// domain order. Slots outside the goal read as already expressed or
/// answered: either way nothing is left to do for them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeekerFeatures {
    pub constraints: Vec<ConstraintStatus>,
    pub requests: Vec<RequestStatus>,
    pub offer_on_table: bool,
    pub last: IntentClass,
}

impl SeekerFeatures {
    pub fn cardinality(n_informable: usize, n_requestable: usize) -> u64 {
        2u64.pow(n_informable as u32) * 3u64.pow(n_requestable as u32) * 2 * 11
    }

    pub fn encode(&self) -> StateId {
        let mut p = Packer::default();
        for c in &self.constraints {
            p.push(pos(&CONSTRAINT, c), 2);
        }
        for r in &self.requests {
            p.push(pos(&REQUEST, r), 3);
        }
        p.push(self.offer_on_table as u64, 2);
        p.push(self.last.index(), 11);
        StateId(p.id)
    }

    pub fn decode(id: StateId, n_informable: usize, n_requestable: usize) -> Self {
        let mut u = Unpacker { id: id.0 };
        let last = IntentClass::ALL[u.pop(11)];
        let offer_on_table = u.pop(2) == 1;
        let mut requests: Vec<_> = (0..n_requestable).map(|_| REQUEST[u.pop(3)]).collect();
        requests.reverse();
        let mut constraints: Vec<_> = (0..n_informable).map(|_| CONSTRAINT[u.pop(2)]).collect();
        constraints.reverse();
        SeekerFeatures {
            constraints,
            requests,
            offer_on_table,
            last,
        }
    }
}

/// Provider feature tuple, one entry per informable / requestable slot in domain order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProviderFeatures {
    pub expressed: Vec<bool>,
    /// Requested and not yet answered for the item in focus.
    pub pending: Vec<bool>,
    pub bucket: DbBucket,
    pub focus: Focus,
    pub last: IntentClass,
}

impl ProviderFeatures {
    pub fn cardinality(n_informable: usize, n_requestable: usize) -> u64 {
        2u64.pow((n_informable + n_requestable) as u32) * 4 * 3 * 11
    }

    pub fn encode(&self) -> StateId {
        let mut p = Packer::default();
        for e in &self.expressed {
            p.push(*e as u64, 2);
        }
        for r in &self.pending {
            p.push(*r as u64, 2);
        }
        p.push(pos(&BUCKET, &self.bucket), 4);
        p.push(pos(&FOCUS, &self.focus), 3);
        p.push(self.last.index(), 11);
        StateId(p.id)
    }

    pub fn decode(id: StateId, n_informable: usize, n_requestable: usize) -> Self {
        let mut u = Unpacker { id: id.0 };
        let last = IntentClass::ALL[u.pop(11)];
        let focus = FOCUS[u.pop(3)];
        let bucket = BUCKET[u.pop(4)];
        let mut pending: Vec<_> = (0..n_requestable).map(|_| u.pop(2) == 1).collect();
        pending.reverse();
        let mut expressed: Vec<_> = (0..n_informable).map(|_| u.pop(2) == 1).collect();
        expressed.reverse();
        ProviderFeatures {
            expressed,
            pending,
            bucket,
            focus,
            last,
        }
    }
}
