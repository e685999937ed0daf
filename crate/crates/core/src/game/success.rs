use serde::{Deserialize, Serialize};

use super::config::{EpisodeConfig, TurnPenaltyScope};
use crate::acts::Role;
use crate::ontology::{Goal, ItemRecord};
use crate::tracking::{ConstraintStatus, ProviderState, RequestStatus, SeekerState};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Success {
    pub objective: bool,
    pub seeker: bool,
    pub provider: bool,
}

/// Objective success is judged on the ground-truth record behind the last
/// offer: it must satisfy every goal constraint, and every goal request
/// must have reached the seeker with the record's true value.
pub fn evaluate_success(
    goal: &Goal,
    seeker: &SeekerState,
    provider: &ProviderState,
    offered: Option<&ItemRecord>,
    dontcare: &str,
) -> Success {
    let objective = offered.is_some_and(|item| {
        goal.constraints
            .iter()
            .all(|(s, v)| item.matches(s, v, dontcare))
            && goal
                .requests
                .iter()
                .all(|r| seeker.received.get(r).map(String::as_str) == item.get(r))
    });
    let provider_ok = offered.is_some_and(|item| {
        provider
            .expressed_constraints
            .iter()
            .all(|(s, v)| item.matches(s, v, dontcare))
            && provider.requested_slots.values().all(|answered| *answered)
    });
    let seeker_ok = seeker
        .constraint_status
        .values()
        .all(|c| *c == ConstraintStatus::Expressed)
        && seeker
            .request_status
            .values()
            .all(|r| *r == RequestStatus::Answered);
    Success {
        objective,
        seeker: seeker_ok,
        provider: provider_ok,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rewards {
    pub seeker_terminal: f64,
    pub provider_terminal: f64,
    pub seeker_return: f64,
    pub provider_return: f64,
}

/// Turns of a dialogue of `turns` turns charged to `role` (the provider speaks first).
pub fn charged_turns(role: Role, turns: usize, scope: TurnPenaltyScope) -> usize {
    match (scope, role) {
        (TurnPenaltyScope::Dialogue, _) => turns,
        (TurnPenaltyScope::Own, Role::Provider) => turns.div_ceil(2),
        (TurnPenaltyScope::Own, Role::Seeker) => turns / 2,
    }
}

/// Terminal rewards (success or failure plus per-slot penalties) and full
/// returns including the turn penalties of a `turns`-turn dialogue.
pub fn compute_rewards(
    success: &Success,
    seeker: &SeekerState,
    provider: &ProviderState,
    turns: usize,
    cfg: &EpisodeConfig,
) -> Rewards {
    let r = &cfg.reward;
    let outcome = |ok: bool| {
        if ok {
            r.success_reward
        } else {
            r.failure_reward
        }
    };
    let (seeker_ok, provider_ok) = if cfg.subjective_rewards {
        (success.seeker, success.provider)
    } else {
        (success.objective, success.objective)
    };
    let unexpressed = seeker
        .request_status
        .values()
        .filter(|s| **s == RequestStatus::Unrequested)
        .count();
    let unanswered = provider.requested_slots.values().filter(|a| !**a).count();
    let seeker_terminal = outcome(seeker_ok) + r.unexpressed_request_penalty * unexpressed as f64;
    let provider_terminal = outcome(provider_ok) + r.unanswered_request_penalty * unanswered as f64;
    let penalty = |role| r.turn_penalty * charged_turns(role, turns, r.turn_penalty_scope) as f64;
    Rewards {
        seeker_terminal,
        provider_terminal,
        seeker_return: seeker_terminal + penalty(Role::Seeker),
        provider_return: provider_terminal + penalty(Role::Provider),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::Frame;
    use crate::ontology::{Database, Domain};

    fn item(food: &str, area: &str, price: &str, phone: &str) -> ItemRecord {
        ItemRecord {
            values: [
                ("name", "x"),
                ("food", food),
                ("area", area),
                ("pricerange", price),
                ("phone", phone),
                ("addr", "1 road"),
                ("postcode", "c.b 1, 1 a.a"),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        }
    }

    fn answered_seeker(goal: &Goal, it: &ItemRecord) -> SeekerState {
        let d = Domain::restaurants();
        let mut s = SeekerState::new(goal.clone());
        for (slot, v) in &goal.constraints {
            s.record_own(&[Frame::inform(slot, v)]);
        }
        for r in &goal.requests {
            s.record_own(&[Frame::request(r)]);
        }
        let mut frames = vec![Frame::offer(it.name())];
        for r in &goal.requests {
            frames.push(Frame::inform(r, it.get(r).unwrap()));
        }
        s.update(&frames, &d);
        s
    }

    #[test]
    fn matching_offer_with_answers_succeeds_everywhere() {
        let db = Database::bundled();
        let goal = Goal::new(
            [("food", "italian"), ("pricerange", "cheap")],
            ["addr", "phone"],
        );
        let it = item("italian", "centre", "cheap", "01223 323737");
        let seeker = answered_seeker(&goal, &it);
        let mut provider = ProviderState::new(&db);
        provider.expressed_constraints = goal.constraints.clone();
        provider.requested_slots = [("addr".to_string(), true), ("phone".to_string(), true)].into();
        let s = evaluate_success(&goal, &seeker, &provider, Some(&it), "dontcare");
        assert_eq!(
            s,
            Success {
                objective: true,
                seeker: true,
                provider: true
            }
        );
    }

    #[test]
    fn unexpressed_constraint_fails_only_objectively() {
        let db = Database::bundled();
        let goal = Goal::new([("food", "italian"), ("area", "north")], ["phone"]);
        let it = item("italian", "south", "cheap", "1");
        let mut seeker = answered_seeker(&goal, &it);
        seeker
            .constraint_status
            .insert("area".into(), ConstraintStatus::Unexpressed);
        let mut provider = ProviderState::new(&db);
        provider.expressed_constraints = [("food".to_string(), "italian".to_string())].into();
        provider.requested_slots = [("phone".to_string(), true)].into();
        let s = evaluate_success(&goal, &seeker, &provider, Some(&it), "dontcare");
        assert!(s.provider && !s.objective && !s.seeker);
    }

    #[test]
    fn truncated_answer_fails_objectively() {
        let db = Database::bundled();
        let d = Domain::restaurants();
        let goal = Goal::new([("food", "italian")], ["phone"]);
        let it = item("italian", "south", "cheap", "01223 356555");
        let mut seeker = SeekerState::new(goal.clone());
        seeker.record_own(&[Frame::inform("food", "italian"), Frame::request("phone")]);
        seeker.update(&[Frame::offer("x"), Frame::inform("phone", "01223")], &d);
        let provider = ProviderState::new(&db);
        let s = evaluate_success(&goal, &seeker, &provider, Some(&it), "dontcare");
        assert!(!s.objective);
        assert!(s.seeker);
    }

    #[test]
    fn no_offer_no_objective_success() {
        let db = Database::bundled();
        let goal = Goal::new([("food", "dontcare")], ["phone"]);
        let s = evaluate_success(
            &goal,
            &SeekerState::new(goal.clone()),
            &ProviderState::new(&db),
            None,
            "dontcare",
        );
        assert!(!s.objective && !s.provider);
    }

    #[test]
    fn reward_arithmetic() {
        let db = Database::bundled();
        let cfg = EpisodeConfig::default();
        let goal = Goal::new([("food", "italian")], ["phone"]);
        let mut seeker = SeekerState::new(goal);
        seeker.record_own(&[Frame::request("phone")]);
        let provider = ProviderState::new(&db);
        let win = Success {
            objective: true,
            seeker: true,
            provider: true,
        };
        let r = compute_rewards(&win, &seeker, &provider, 8, &cfg);
        assert_eq!(r.seeker_return, 20.0 - 8.0);
        assert_eq!(r.provider_return, 20.0 - 8.0);
        let r = compute_rewards(&win, &seeker, &provider, 0, &cfg);
        assert_eq!(r.seeker_return, 20.0);

        let unexpressed = SeekerState::new(Goal::new([("food", "italian")], ["phone"]));
        let r = compute_rewards(&Success::default(), &unexpressed, &provider, 5, &cfg);
        assert_eq!(r.seeker_return, -10.0 - 5.0 - 2.0);
    }

    #[test]
    fn own_turn_scope() {
        assert_eq!(charged_turns(Role::Provider, 5, TurnPenaltyScope::Own), 3);
        assert_eq!(charged_turns(Role::Seeker, 5, TurnPenaltyScope::Own), 2);
        assert_eq!(
            charged_turns(Role::Seeker, 5, TurnPenaltyScope::Dialogue),
            5
        );
    }
}
