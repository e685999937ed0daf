use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ChannelMode, EpisodeConfig, TurnPenaltyScope};
use super::realize::{realize_provider, realize_seeker};
use super::success::{compute_rewards, evaluate_success, Rewards, Success};
use super::world::World;
use crate::acts::{Frame, Intent, Role};
use crate::error::{Error, Result};
use crate::language::apply_noise;
use crate::marl::{play_episode, Agent, Step, StochasticGame};
use crate::ontology::{Goal, ItemRecord};
use crate::tracking::{ProviderState, RequestStatus, SeekerState, StateId};

/// One turn as seen from both sides of the channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: usize,
    pub speaker: Role,
    pub state: StateId,
    pub action: Option<usize>,
    /// The action in `intent(slot)` form.
    pub act: Option<String>,
    pub emitted: Vec<Frame>,
    pub noisy: Vec<Frame>,
    /// Generated text; absent in acts mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utterance: Option<String>,
    pub understood: Vec<Frame>,
    /// Turn penalties paid by `[seeker, provider]`.
    pub rewards: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub goal: Goal,
    pub objective_success: bool,
    pub seeker_success: bool,
    pub provider_success: bool,
    pub turns: usize,
    pub seeker_return: f64,
    pub provider_return: f64,
    pub seeker_terminal_reward: f64,
    pub provider_terminal_reward: f64,
    /// Name of the last offered item.
    pub offered: Option<String>,
    /// Goal requests the seeker never heard answered.
    pub unanswered_requests: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transcript: Vec<TurnRecord>,
}

impl EpisodeOutcome {
    pub fn return_of(&self, role: Role) -> f64 {
        match role {
            Role::Seeker => self.seeker_return,
            Role::Provider => self.provider_return,
        }
    }
}

/// Independent random streams consumed by one episode.
#[derive(Clone, Debug)]
pub struct EpisodeRngs {
    pub seeker: ChaCha8Rng,
    pub provider: ChaCha8Rng,
    pub noise: ChaCha8Rng,
    pub template: ChaCha8Rng,
}

/// The dialogue as a two-player turn-taking stochastic game. Agent 0 is the
/// seeker and agent 1 the provider, who opens.
pub struct DialogueGame<'a> {
    world: &'a World,
    cfg: &'a EpisodeConfig,
    template_rng: &'a mut dyn RngCore,
    pub seeker: SeekerState,
    pub provider: ProviderState,
    offered: Option<ItemRecord>,
    turn: usize,
    previous: Option<Vec<Frame>>,
    transcript: Vec<TurnRecord>,
    result: Option<(Success, Rewards)>,
}

impl<'a> DialogueGame<'a> {
    pub fn new(
        world: &'a World,
        goal: Goal,
        cfg: &'a EpisodeConfig,
        template_rng: &'a mut dyn RngCore,
    ) -> Self {
        DialogueGame {
            world,
            cfg,
            template_rng,
            seeker: SeekerState::new(goal),
            provider: ProviderState::new(&world.db),
            offered: None,
            turn: 0,
            previous: None,
            transcript: Vec::new(),
            result: None,
        }
    }

    pub fn speaker(&self) -> Role {
        if self.turn.is_multiple_of(2) {
            Role::Provider
        } else {
            Role::Seeker
        }
    }

    pub fn is_over(&self) -> bool {
        self.result.is_some()
    }

    pub fn transcript(&self) -> &[TurnRecord] {
        &self.transcript
    }

    fn state_of(&self, role: Role) -> StateId {
        match role {
            Role::Seeker => self.seeker.encode(self.world.domain()),
            Role::Provider => self.provider.encode(self.world.domain()),
        }
    }

    fn realize(&self, role: Role, action: Option<usize>) -> Result<Vec<Frame>> {
        let Some(a) = action else {
            return Ok(Vec::new());
        };
        let space = self.world.space(role);
        let act = space.get(a).ok_or(Error::ContractViolation {
            agent: role.index(),
            action: a,
            n_actions: space.len(),
        })?;
        let domain = self.world.domain();
        Ok(match role {
            Role::Seeker => realize_seeker(act, &self.seeker, domain),
            Role::Provider => realize_provider(act, &self.provider, domain),
        })
    }

    /// Plays one turn for the current speaker, reading its partner's
    /// understanding off the channel.
    pub fn play_turn(
        &mut self,
        action: Option<usize>,
        noise_rng: &mut dyn RngCore,
    ) -> Result<Step> {
        assert!(!self.is_over(), "episode already terminated");
        let speaker = self.speaker();
        let state = self.state_of(speaker);
        let emitted = self.realize(speaker, action)?;
        match speaker {
            Role::Seeker => self.seeker.record_own(&emitted),
            Role::Provider => {
                if emitted.iter().any(|f| f.intent == Intent::Offer) {
                    self.offered = self.provider.item_in_focus.clone();
                }
                self.provider.record_own(&emitted);
            }
        }
        let noisy = apply_noise(
            &emitted,
            &self.cfg.effective_noise(),
            &self.world.noise,
            noise_rng,
        );
        let (utterance, understood) = match self.cfg.channel_mode {
            ChannelMode::Acts => (None, noisy.clone()),
            ChannelMode::Language => {
                let text = self
                    .world
                    .templates(speaker)
                    .generate(&noisy, &mut *self.template_rng);
                let frames = self.world.nlu_for(speaker).understand(&text);
                (Some(text), frames)
            }
        };
        match speaker {
            Role::Seeker => self.provider.update(&understood, &self.world.db),
            Role::Provider => self.seeker.update(&understood, self.world.domain()),
        }

        let r = &self.cfg.reward;
        let mut rewards = [r.turn_penalty; 2];
        if r.turn_penalty_scope == TurnPenaltyScope::Own {
            rewards[speaker.other().index()] = 0.0;
        }
        let is_bye = |frames: &[Frame]| frames.iter().any(|f| f.intent == Intent::Bye);
        let terminal = match &self.previous {
            Some(prev) => {
                (is_bye(prev) && is_bye(&emitted)) || (prev.is_empty() && emitted.is_empty())
            }
            None => false,
        } || self.turn + 1 >= self.cfg.max_turns;

        self.transcript.push(TurnRecord {
            turn: self.turn,
            speaker,
            state,
            action,
            act: action
                .and_then(|a| self.world.space(speaker).get(a))
                .map(ToString::to_string),
            emitted: emitted.clone(),
            noisy,
            utterance,
            understood,
            rewards,
        });
        self.turn += 1;
        self.previous = Some(emitted);

        let mut step_rewards = rewards.to_vec();
        if terminal {
            let success = evaluate_success(
                &self.seeker.goal,
                &self.seeker,
                &self.provider,
                self.offered.as_ref(),
                &self.world.domain().dontcare,
            );
            let totals =
                compute_rewards(&success, &self.seeker, &self.provider, self.turn, self.cfg);
            step_rewards[Role::Seeker.index()] += totals.seeker_terminal;
            step_rewards[Role::Provider.index()] += totals.provider_terminal;
            self.result = Some((success, totals));
        }
        Ok(Step {
            rewards: step_rewards,
            terminal,
        })
    }

    /// Final outcome; `None` until the episode has terminated.
    pub fn outcome(&self) -> Option<EpisodeOutcome> {
        let (success, rewards) = self.result?;
        Some(EpisodeOutcome {
            goal: self.seeker.goal.clone(),
            objective_success: success.objective,
            seeker_success: success.seeker,
            provider_success: success.provider,
            turns: self.turn,
            seeker_return: rewards.seeker_return,
            provider_return: rewards.provider_return,
            seeker_terminal_reward: rewards.seeker_terminal,
            provider_terminal_reward: rewards.provider_terminal,
            offered: self.offered.as_ref().map(|i| i.name().to_string()),
            unanswered_requests: self
                .seeker
                .request_status
                .iter()
                .filter(|(_, s)| **s != RequestStatus::Answered)
                .map(|(slot, _)| slot.clone())
                .collect(),
            transcript: self.transcript.clone(),
        })
    }
}

impl StochasticGame for DialogueGame<'_> {
    fn n_agents(&self) -> usize {
        2
    }

    fn n_actions(&self, agent: usize) -> usize {
        self.world.space(role_of(agent)).len()
    }

    fn observe(&self, agent: usize) -> StateId {
        self.state_of(role_of(agent))
    }

    fn to_act(&self) -> Vec<usize> {
        if self.is_over() {
            Vec::new()
        } else {
            vec![self.speaker().index()]
        }
    }

    fn step(&mut self, actions: &[Option<usize>], rng: &mut dyn RngCore) -> Result<Step> {
        let action = actions[self.speaker().index()];
        self.play_turn(action, rng)
    }
}

fn role_of(agent: usize) -> Role {
    match agent {
        0 => Role::Seeker,
        1 => Role::Provider,
        _ => panic!("dialogue has two agents, got index {agent}"),
    }
}

/// Runs one dialogue between `seeker` and `provider`. When `learning`, both
/// agents update after each of their own transitions.
pub fn run_episode(
    seeker: &mut dyn Agent,
    provider: &mut dyn Agent,
    world: &World,
    goal: Goal,
    cfg: &EpisodeConfig,
    rngs: &mut EpisodeRngs,
    learning: bool,
) -> Result<EpisodeOutcome> {
    let mut game = DialogueGame::new(world, goal, cfg, &mut rngs.template);
    play_episode(
        &mut game,
        &mut [seeker, provider],
        &mut [&mut rngs.seeker, &mut rngs.provider],
        &mut rngs.noise,
        learning,
    )?;
    Ok(game.outcome().expect("play_episode runs to termination"))
}
