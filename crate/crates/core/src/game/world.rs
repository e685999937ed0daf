use crate::acts::{build_action_space, ActionSpace, Role, DEFAULT_ACTION_SPACE_SIZE};
use crate::error::Result;
use crate::language::{NoiseContext, RuleNlu, TemplateStore};
use crate::ontology::{Database, Domain};

/// Everything an episode needs that stays fixed across episodes.
#[derive(Clone, Debug)]
pub struct World {
    pub db: Database,
    pub seeker_space: ActionSpace,
    pub provider_space: ActionSpace,
    pub seeker_templates: TemplateStore,
    pub provider_templates: TemplateStore,
    /// Reads seeker utterances (used by the provider).
    pub seeker_nlu: RuleNlu,
    /// Reads provider utterances (used by the seeker).
    pub provider_nlu: RuleNlu,
    pub noise: NoiseContext,
}

impl World {
    pub fn new(
        db: Database,
        seeker_templates: TemplateStore,
        provider_templates: TemplateStore,
    ) -> Result<Self> {
        let domain = db.domain().clone();
        let size = is_restaurants(&domain).then_some(DEFAULT_ACTION_SPACE_SIZE);
        Ok(World {
            seeker_space: build_action_space(&domain, Role::Seeker, size)?,
            provider_space: build_action_space(&domain, Role::Provider, size)?,
            seeker_nlu: RuleNlu::new(&seeker_templates, &domain)?,
            provider_nlu: RuleNlu::new(&provider_templates, &domain)?,
            noise: NoiseContext::new(&db),
            seeker_templates,
            provider_templates,
            db,
        })
    }

    /// The bundled restaurant database and templates.
    pub fn bundled() -> Self {
        Self::with_database(Database::bundled()).expect("bundled resources are consistent")
    }

    pub fn with_database(db: Database) -> Result<Self> {
        Self::new(
            db,
            TemplateStore::bundled(Role::Seeker),
            TemplateStore::bundled(Role::Provider),
        )
    }

    pub fn domain(&self) -> &Domain {
        self.db.domain()
    }

    pub fn space(&self, role: Role) -> &ActionSpace {
        match role {
            Role::Seeker => &self.seeker_space,
            Role::Provider => &self.provider_space,
        }
    }

    pub fn templates(&self, role: Role) -> &TemplateStore {
        match role {
            Role::Seeker => &self.seeker_templates,
            Role::Provider => &self.provider_templates,
        }
    }

    /// The NLU that reads utterances spoken by `speaker`.
    pub fn nlu_for(&self, speaker: Role) -> &RuleNlu {
        match speaker {
            Role::Seeker => &self.seeker_nlu,
            Role::Provider => &self.provider_nlu,
        }
    }
}

fn is_restaurants(domain: &Domain) -> bool {
    let reference = Domain::restaurants();
    domain.informable_slots().eq(reference.informable_slots())
        && domain.requestable_slots() == reference.requestable_slots()
}
