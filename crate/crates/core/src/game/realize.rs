//! Turning a policy action into concrete frames from the speaker's state.

use crate::acts::{Arg, Frame, Intent, PolicyAction, THIS_SLOT};
use crate::ontology::{Domain, PRIMARY_KEY};
use crate::tracking::{ProviderState, SeekerState};

/// Seeker informs carry the goal value (dontcare for slots outside the
/// goal, and for `inform(this)`).
pub fn realize_seeker(action: &PolicyAction, state: &SeekerState, domain: &Domain) -> Vec<Frame> {
    match (&action.intent, action.slot.as_deref()) {
        (Intent::Inform, Some(THIS_SLOT)) => {
            vec![Frame::inform(THIS_SLOT, domain.dontcare.clone())]
        }
        (Intent::Inform, Some(slot)) => {
            let value = state
                .goal
                .constraints
                .get(slot)
                .cloned()
                .unwrap_or_else(|| domain.dontcare.clone());
            vec![Frame::inform(slot, value)]
        }
        (Intent::Request, Some(slot)) => vec![Frame::request(slot)],
        (intent, None) => vec![Frame::bare(*intent)],
        (intent, Some(slot)) => vec![slot_only(*intent, slot)],
    }
}

fn slot_only(intent: Intent, slot: &str) -> Frame {
    Frame {
        intent,
        args: vec![Arg {
            slot: slot.to_string(),
            value: None,
        }],
    }
}

/// Provider acts speak about the item in focus and are silent without one.
/// An offer also informs the focus item's values for the constraints the
/// seeker expressed (other than dontcare), then answers every request still
/// pending, as in `offer(name=x), inform(phone=y)`.
pub fn realize_provider(
    action: &PolicyAction,
    state: &ProviderState,
    domain: &Domain,
) -> Vec<Frame> {
    let focus = state.item_in_focus.as_ref();
    match (&action.intent, action.slot.as_deref()) {
        (Intent::Offer, _) => {
            let Some(item) = focus else {
                return Vec::new();
            };
            let mut frames: Vec<Frame> = domain
                .informable_slots()
                .filter(|s| {
                    state
                        .expressed_constraints
                        .get(*s)
                        .is_some_and(|v| !domain.is_dontcare(v))
                })
                .filter_map(|s| item.get(s).map(|v| Frame::inform(s, v)))
                .collect();
            frames.push(Frame::offer(item.name()));
            for (slot, answered) in &state.requested_slots {
                if !answered && slot != PRIMARY_KEY {
                    if let Some(v) = item.get(slot) {
                        frames.push(Frame::inform(slot, v));
                    }
                }
            }
            frames
        }
        (Intent::Inform, Some(slot)) => focus
            .and_then(|item| item.get(slot))
            .map(|v| vec![Frame::inform(slot, v)])
            .unwrap_or_default(),
        (Intent::Request, Some(slot)) => vec![Frame::request(slot)],
        (Intent::ExplConf, Some(slot)) => state
            .expressed_constraints
            .get(slot)
            .map(|v| vec![Frame::with_value(Intent::ExplConf, slot, v.clone())])
            .unwrap_or_default(),
        (Intent::Select, Some(slot)) => focus
            .and_then(|item| item.get(slot))
            .map(|v| vec![Frame::with_value(Intent::Select, slot, v)])
            .unwrap_or_default(),
        (intent, None) => vec![Frame::bare(*intent)],
        (intent, Some(slot)) => vec![slot_only(*intent, slot)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::Role;
    use crate::game::World;
    use crate::ontology::Goal;

    #[test]
    fn seeker_informs_goal_values() {
        let d = Domain::restaurants();
        let s = SeekerState::new(Goal::new([("food", "italian")], ["phone"]));
        let f = realize_seeker(&"inform(food)".parse().unwrap(), &s, &d);
        assert_eq!(f, vec![Frame::inform("food", "italian")]);
        let f = realize_seeker(&"inform(area)".parse().unwrap(), &s, &d);
        assert_eq!(f, vec![Frame::inform("area", "dontcare")]);
        let f = realize_seeker(&"inform(this)".parse().unwrap(), &s, &d);
        assert_eq!(f, vec![Frame::inform("this", "dontcare")]);
        let f = realize_seeker(&"bye".parse().unwrap(), &s, &d);
        assert_eq!(f, vec![Frame::bare(Intent::Bye)]);
    }

    #[test]
    fn provider_offer_carries_expressed_values() {
        let w = World::bundled();
        let d = w.domain();
        let mut p = ProviderState::new(&w.db);
        p.update(
            &[
                Frame::inform("pricerange", "cheap"),
                Frame::inform("area", "dontcare"),
            ],
            &w.db,
        );
        let item = p.item_in_focus.clone().unwrap();
        let f = realize_provider(&"offer".parse().unwrap(), &p, d);
        assert_eq!(
            f,
            vec![
                Frame::inform("pricerange", "cheap"),
                Frame::offer(item.name())
            ]
        );
        let f = realize_provider(&"inform(phone)".parse().unwrap(), &p, d);
        assert_eq!(f, vec![Frame::inform("phone", item.get("phone").unwrap())]);

        p.update(&[Frame::request("phone"), Frame::request("name")], &w.db);
        let f = realize_provider(&"offer".parse().unwrap(), &p, d);
        assert_eq!(
            f,
            vec![
                Frame::inform("pricerange", "cheap"),
                Frame::offer(item.name()),
                Frame::inform("phone", item.get("phone").unwrap()),
            ]
        );
    }

    #[test]
    fn provider_is_silent_without_focus() {
        let w = World::bundled();
        let mut p = ProviderState::new(&w.db);
        p.update(&[Frame::inform("area", "thai")], &w.db);
        for a in ["offer", "inform(phone)", "select(food)"] {
            assert!(realize_provider(&a.parse().unwrap(), &p, w.domain()).is_empty());
        }
        assert!(realize_provider(&"expl_conf(food)".parse().unwrap(), &p, w.domain()).is_empty());
        assert_eq!(
            realize_provider(&"expl_conf(area)".parse().unwrap(), &p, w.domain()),
            vec![Frame::with_value(Intent::ExplConf, "area", "thai")]
        );
    }

    #[test]
    fn every_action_has_template_coverage() {
        let w = World::bundled();
        let d = w.domain();
        let goal = Goal::new(
            [("food", "thai"), ("area", "north"), ("pricerange", "cheap")],
            ["phone"],
        );
        let seeker = SeekerState::new(goal);
        let mut provider = ProviderState::new(&w.db);
        let first = w.db.items()[0].clone();
        let informs: Vec<Frame> = d
            .informable_slots()
            .map(|s| Frame::inform(s, first.get(s).unwrap()))
            .collect();
        provider.update(&informs, &w.db);
        for a in w.space(Role::Seeker).actions() {
            let frames = realize_seeker(a, &seeker, d);
            let mr = crate::acts::frames_to_mr(&frames);
            assert!(w.seeker_templates.contains(&mr), "seeker `{a}` → `{mr}`");
        }
        for a in w.space(Role::Provider).actions() {
            let frames = realize_provider(a, &provider, d);
            let mr = crate::acts::frames_to_mr(&frames);
            assert!(
                w.provider_templates.contains(&mr),
                "provider `{a}` → `{mr}`"
            );
        }
    }
}
