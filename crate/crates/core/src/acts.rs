//! Dialogue acts, semantic frames, the delexicalized meaning-representation
//! (MR) string format and the per-role policy action spaces.
//!
//! MR grammar: a space-separated token stream where `act_<intent>` opens a
//! frame and each following `<slot>` tag adds an argument to it, e.g.
//! `act_inform <food> act_inform <pricerange> act_offer <name>`. Request
//! frames carry the requested slot as their tag.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ontology::Domain;

/// Pseudo-slot meaning "the slot under discussion"; only ever informed as dontcare.
pub const THIS_SLOT: &str = "this";

pub const DEFAULT_ACTION_SPACE_SIZE: usize = 23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intent {
    Hello,
    Welcomemsg,
    Inform,
    Request,
    Offer,
    Confirm,
    ExplConf,
    Deny,
    Negate,
    Affirm,
    Ack,
    Thankyou,
    Bye,
    Reqalts,
    Reqmore,
    Repeat,
    Restart,
    Canthelp,
    Select,
}

impl Intent {
    pub const ALL: [Intent; 19] = [
        Intent::Hello,
        Intent::Welcomemsg,
        Intent::Inform,
        Intent::Request,
        Intent::Offer,
        Intent::Confirm,
        Intent::ExplConf,
        Intent::Deny,
        Intent::Negate,
        Intent::Affirm,
        Intent::Ack,
        Intent::Thankyou,
        Intent::Bye,
        Intent::Reqalts,
        Intent::Reqmore,
        Intent::Repeat,
        Intent::Restart,
        Intent::Canthelp,
        Intent::Select,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Intent::Hello => "hello",
            Intent::Welcomemsg => "welcomemsg",
            Intent::Inform => "inform",
            Intent::Request => "request",
            Intent::Offer => "offer",
            Intent::Confirm => "confirm",
            Intent::ExplConf => "expl_conf",
            Intent::Deny => "deny",
            Intent::Negate => "negate",
            Intent::Affirm => "affirm",
            Intent::Ack => "ack",
            Intent::Thankyou => "thankyou",
            Intent::Bye => "bye",
            Intent::Reqalts => "reqalts",
            Intent::Reqmore => "reqmore",
            Intent::Repeat => "repeat",
            Intent::Restart => "restart",
            Intent::Canthelp => "canthelp",
            Intent::Select => "select",
        }
    }

    /// The `act_<intent>` token used in MR strings.
    pub fn mr_token(self) -> String {
        format!("act_{}", self.as_str())
    }

    pub fn from_mr_token(token: &str) -> Option<Intent> {
        token.strip_prefix("act_").and_then(|s| s.parse().ok())
    }
}

impl fmt::Display for Intent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Intent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Intent::ALL
            .iter()
            .copied()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown intent `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arg {
    pub slot: String,
    /// `None` for request arguments and for delexicalized frames.
    pub value: Option<String>,
}

/// An intent with its ordered slot arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub intent: Intent,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<Arg>,
}

impl Frame {
    pub fn bare(intent: Intent) -> Self {
        Frame {
            intent,
            args: Vec::new(),
        }
    }

    pub fn with_value(intent: Intent, slot: impl Into<String>, value: impl Into<String>) -> Self {
        Frame {
            intent,
            args: vec![Arg {
                slot: slot.into(),
                value: Some(value.into()),
            }],
        }
    }

    pub fn inform(slot: impl Into<String>, value: impl Into<String>) -> Self {
        Self::with_value(Intent::Inform, slot, value)
    }

    pub fn offer(name: impl Into<String>) -> Self {
        Self::with_value(Intent::Offer, crate::ontology::PRIMARY_KEY, name)
    }

    pub fn request(slot: impl Into<String>) -> Self {
        Frame {
            intent: Intent::Request,
            args: vec![Arg {
                slot: slot.into(),
                value: None,
            }],
        }
    }

    /// Same frame with every value removed.
    pub fn delexicalized(&self) -> Frame {
        Frame {
            intent: self.intent,
            args: self
                .args
                .iter()
                .map(|a| Arg {
                    slot: a.slot.clone(),
                    value: None,
                })
                .collect(),
        }
    }

    pub fn value_of(&self, slot: &str) -> Option<&str> {
        self.args
            .iter()
            .find(|a| a.slot == slot)
            .and_then(|a| a.value.as_deref())
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.intent)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match &a.value {
                Some(v) => write!(f, "{}={}", a.slot, v)?,
                None => f.write_str(&a.slot)?,
            }
        }
        f.write_str(")")
    }
}

pub fn frames_to_mr(frames: &[Frame]) -> String {
    let mut tokens = Vec::new();
    for frame in frames {
        tokens.push(frame.intent.mr_token());
        for arg in &frame.args {
            tokens.push(format!("<{}>", arg.slot));
        }
    }
    tokens.join(" ")
}

pub fn mr_to_frames(mr: &str) -> Result<Vec<Frame>> {
    let mut frames: Vec<Frame> = Vec::new();
    for (position, token) in mr.split_whitespace().enumerate() {
        let err = |message: &str| Error::MrParse {
            position,
            token: token.to_string(),
            message: message.to_string(),
        };
        if let Some(slot) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            if slot.is_empty() {
                return Err(err("empty slot tag"));
            }
            let frame = frames
                .last_mut()
                .ok_or_else(|| err("slot tag before any act"))?;
            frame.args.push(Arg {
                slot: slot.to_string(),
                value: None,
            });
        } else if token.starts_with("act_") {
            let intent = Intent::from_mr_token(token).ok_or_else(|| err("unknown act"))?;
            frames.push(Frame::bare(intent));
        } else {
            return Err(err("expected an act token or a slot tag"));
        }
    }
    Ok(frames)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Seeker,
    Provider,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Seeker => Role::Provider,
            Role::Provider => Role::Seeker,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Seeker => "seeker",
            Role::Provider => "provider",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Role::Seeker => 0,
            Role::Provider => 1,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seeker" => Ok(Role::Seeker),
            "provider" => Ok(Role::Provider),
            _ => Err(Error::Config(format!("unknown role `{s}`"))),
        }
    }
}

/// A policy-level act: an intent and at most one slot. Values are filled
/// from the tracked state when the action is realized.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PolicyAction {
    pub intent: Intent,
    pub slot: Option<String>,
}

impl PolicyAction {
    pub fn bare(intent: Intent) -> Self {
        PolicyAction { intent, slot: None }
    }

    pub fn slotted(intent: Intent, slot: impl Into<String>) -> Self {
        PolicyAction {
            intent,
            slot: Some(slot.into()),
        }
    }
}

impl fmt::Display for PolicyAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.slot {
            Some(s) => write!(f, "{}({})", self.intent, s),
            None => write!(f, "{}", self.intent),
        }
    }
}

impl FromStr for PolicyAction {
    type Err = Error;

    /// Parses `bye` or `inform(food)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('(') {
            Some((intent, rest)) => {
                let slot = rest
                    .strip_suffix(')')
                    .filter(|x| !x.is_empty() && !x.contains(['(', ')', ',']))
                    .ok_or_else(|| Error::Config(format!("malformed action `{s}`")))?;
                Ok(PolicyAction::slotted(intent.parse()?, slot))
            }
            None => Ok(PolicyAction::bare(s.parse()?)),
        }
    }
}

/// Ordered, duplicate-free list of a role's actions. Indices into it are
/// the action ids the learners see.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpace {
    pub role: Role,
    actions: Vec<PolicyAction>,
}

impl ActionSpace {
    pub fn new(role: Role, actions: Vec<PolicyAction>) -> Result<Self> {
        for (i, a) in actions.iter().enumerate() {
            if actions[..i].contains(a) {
                return Err(Error::Config(format!("duplicate action `{a}` for {role}")));
            }
        }
        if actions.is_empty() {
            return Err(Error::Config(format!("empty action space for {role}")));
        }
        Ok(ActionSpace { role, actions })
    }

    pub fn actions(&self) -> &[PolicyAction] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&PolicyAction> {
        self.actions.get(index)
    }

    pub fn index_of(&self, action: &PolicyAction) -> Option<usize> {
        self.actions.iter().position(|a| a == action)
    }

    /// Stable hex digest of the role and the ordered action labels.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.role.as_str().as_bytes());
        for a in &self.actions {
            h.update(b"\n");
            h.update(a.to_string().as_bytes());
        }
        let digest = h.finalize();
        digest.iter().take(12).map(|b| format!("{b:02x}")).collect()
    }
}

/// Default action space for a role, checked against `expected_size` when given.
pub fn build_action_space(
    domain: &Domain,
    role: Role,
    expected_size: Option<usize>,
) -> Result<ActionSpace> {
    use Intent::*;
    let informable: Vec<&str> = domain.informable_slots().collect();
    let requestable = domain.requestable_slots();
    let mut actions = Vec::new();
    match role {
        Role::Seeker => {
            for i in [
                Hello, Ack, Affirm, Negate, Thankyou, Bye, Reqalts, Reqmore, Repeat, Restart, Deny,
                Confirm,
            ] {
                actions.push(PolicyAction::bare(i));
            }
            for s in &informable {
                actions.push(PolicyAction::slotted(Inform, *s));
            }
            actions.push(PolicyAction::slotted(Inform, THIS_SLOT));
            for s in requestable {
                actions.push(PolicyAction::slotted(Request, s.as_str()));
            }
        }
        Role::Provider => {
            for i in [Welcomemsg, Offer, Bye, Repeat, Reqmore, Canthelp] {
                actions.push(PolicyAction::bare(i));
            }
            for s in requestable {
                actions.push(PolicyAction::slotted(Inform, s.as_str()));
            }
            for intent in [Request, ExplConf, Select] {
                for s in &informable {
                    actions.push(PolicyAction::slotted(intent, *s));
                }
            }
            actions.push(PolicyAction::bare(Ack));
        }
    }
    if let Some(expected) = expected_size {
        if actions.len() != expected {
            return Err(Error::ActionSpaceSize {
                role: role.to_string(),
                expected,
                actual: actions.len(),
                actions: actions
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", "),
            });
        }
    }
    ActionSpace::new(role, actions)
}
