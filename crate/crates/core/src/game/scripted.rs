//! Hand-written agents: rule policies over the tracked features, fixed
//! replays, and constant policies.

use rand::RngCore;

use crate::acts::{ActionSpace, Intent, PolicyAction, Role, THIS_SLOT};
use crate::error::{Error, Result};
use crate::marl::{Agent, Observation};
use crate::ontology::Domain;
use crate::tracking::{
    ConstraintStatus, DbBucket, Focus, IntentClass, ProviderFeatures, RequestStatus, SeekerFeatures,
};

fn index(space: &ActionSpace, action: &PolicyAction) -> usize {
    space
        .index_of(action)
        .unwrap_or_else(|| panic!("`{action}` is not in the {} action space", space.role))
}

/// Expresses every constraint, then asks for each request once an offer is
/// on the table, then says goodbye.
#[derive(Clone, Debug)]
pub struct RuleSeeker {
    informable: Vec<String>,
    requestable: Vec<String>,
    space: ActionSpace,
}

impl RuleSeeker {
    pub fn new(domain: &Domain, space: &ActionSpace) -> Self {
        RuleSeeker {
            informable: domain.informable_slots().map(str::to_string).collect(),
            requestable: domain.requestable_slots().to_vec(),
            space: space.clone(),
        }
    }

    pub fn choose(&self, f: &SeekerFeatures) -> PolicyAction {
        if f.last == IntentClass::Bye {
            return PolicyAction::bare(Intent::Bye);
        }
        if let Some(i) = f
            .constraints
            .iter()
            .position(|c| *c == ConstraintStatus::Unexpressed)
        {
            return PolicyAction::slotted(Intent::Inform, &self.informable[i]);
        }
        if !f.offer_on_table {
            return match f.last {
                IntentClass::Negative => PolicyAction::bare(Intent::Bye),
                _ => PolicyAction::slotted(Intent::Inform, THIS_SLOT),
            };
        }
        let open = f
            .requests
            .iter()
            .position(|r| matches!(r, RequestStatus::Unrequested | RequestStatus::Requested));
        match open {
            Some(i) => PolicyAction::slotted(Intent::Request, &self.requestable[i]),
            None => PolicyAction::bare(Intent::Bye),
        }
    }
}

impl Agent for RuleSeeker {
    fn select_action(&mut self, obs: &Observation, _: &mut dyn RngCore) -> Option<usize> {
        let f = SeekerFeatures::decode(obs.state, self.informable.len(), self.requestable.len());
        Some(index(&self.space, &self.choose(&f)))
    }
}

/// Greets, offers the item in focus once constraints arrive, answers
/// requests about it and mirrors goodbyes.
#[derive(Clone, Debug)]
pub struct RuleProvider {
    n_informable: usize,
    requestable: Vec<String>,
    space: ActionSpace,
}

impl RuleProvider {
    pub fn new(domain: &Domain, space: &ActionSpace) -> Self {
        RuleProvider {
            n_informable: domain.n_informable(),
            requestable: domain.requestable_slots().to_vec(),
            space: space.clone(),
        }
    }

    pub fn choose(&self, f: &ProviderFeatures) -> PolicyAction {
        if f.last == IntentClass::Bye {
            return PolicyAction::bare(Intent::Bye);
        }
        if f.focus == Focus::Offered {
            if let Some(i) = f.pending.iter().position(|p| *p) {
                return PolicyAction::slotted(Intent::Inform, &self.requestable[i]);
            }
        }
        let constrained = f.expressed.iter().any(|e| *e);
        if f.last == IntentClass::Inform
            || f.last == IntentClass::Reqalts
            || (constrained && f.focus != Focus::Offered)
        {
            return match f.bucket {
                DbBucket::Zero => PolicyAction::bare(Intent::Canthelp),
                _ => PolicyAction::bare(Intent::Offer),
            };
        }
        match f.last {
            IntentClass::None if !constrained => PolicyAction::bare(Intent::Welcomemsg),
            _ => PolicyAction::bare(Intent::Reqmore),
        }
    }
}

impl Agent for RuleProvider {
    fn select_action(&mut self, obs: &Observation, _: &mut dyn RngCore) -> Option<usize> {
        let f = ProviderFeatures::decode(obs.state, self.n_informable, self.requestable.len());
        Some(index(&self.space, &self.choose(&f)))
    }
}

/// Plays a fixed list of actions (`None` is a silent turn), then stays silent.
#[derive(Clone, Debug, Default)]
pub struct ReplayAgent {
    script: Vec<Option<usize>>,
    cursor: usize,
}

impl ReplayAgent {
    pub fn new(script: Vec<Option<usize>>) -> Self {
        ReplayAgent { script, cursor: 0 }
    }

    /// Parses a script of `intent(slot)` actions; `-` marks a silent turn.
    pub fn parse<S: AsRef<str>>(space: &ActionSpace, script: &[S]) -> Result<Self> {
        let script = script
            .iter()
            .map(|s| match s.as_ref() {
                "-" => Ok(None),
                text => {
                    let action: PolicyAction = text.parse()?;
                    space.index_of(&action).map(Some).ok_or_else(|| {
                        Error::Config(format!(
                            "`{text}` is not in the {} action space",
                            space.role
                        ))
                    })
                }
            })
            .collect::<Result<_>>()?;
        Ok(ReplayAgent::new(script))
    }
}

impl Agent for ReplayAgent {
    fn select_action(&mut self, _: &Observation, _: &mut dyn RngCore) -> Option<usize> {
        let a = self.script.get(self.cursor).copied().flatten();
        self.cursor += 1;
        a
    }
}

/// Always plays the same action.
#[derive(Clone, Copy, Debug)]
pub struct ConstantAgent(pub Option<usize>);

impl ConstantAgent {
    pub fn of(space: &ActionSpace, action: &PolicyAction) -> Self {
        ConstantAgent(Some(index(space, action)))
    }
}

impl Agent for ConstantAgent {
    fn select_action(&mut self, _: &Observation, _: &mut dyn RngCore) -> Option<usize> {
        self.0
    }
}

/// The rule agent for `role`.
pub fn rule_agent(role: Role, domain: &Domain, space: &ActionSpace) -> Box<dyn Agent + Send> {
    match role {
        Role::Seeker => Box::new(RuleSeeker::new(domain, space)),
        Role::Provider => Box::new(RuleProvider::new(domain, space)),
    }
}
