use rand::RngCore;

use super::config::LearnerConfig;
use super::table::{LearnerTable, Transition};
use crate::error::{Error, Result};
use crate::tracking::StateId;

/// Outcome of one joint step.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub rewards: Vec<f64>,
    pub terminal: bool,
}

/// An n-player stochastic game `(n, S, A_1..n, T, R_1..n)` seen through
/// per-agent discrete observations. Turn-taking games report only the
/// agents to move at each step; the others pass `None`.
pub trait StochasticGame {
    fn n_agents(&self) -> usize;
    fn n_actions(&self, agent: usize) -> usize;
    fn observe(&self, agent: usize) -> StateId;
    fn to_act(&self) -> Vec<usize>;
    /// `actions[i]` is the choice of agent `i`; `None` for agents not to
    /// move or choosing to stay silent.
    fn step(&mut self, actions: &[Option<usize>], rng: &mut dyn RngCore) -> Result<Step>;
}

/// What an agent sees when asked to move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub state: StateId,
    pub n_actions: usize,
}

pub trait Agent {
    /// `None` means the agent produces no output this turn.
    fn select_action(&mut self, obs: &Observation, rng: &mut dyn RngCore) -> Option<usize>;

    fn learn(&mut self, _transition: &Transition) {}
}

/// A tabular learner acting with a fixed exploration rate.
#[derive(Clone, Debug)]
pub struct LearningAgent {
    pub table: LearnerTable,
    pub config: LearnerConfig,
    pub epsilon: f64,
}

impl LearningAgent {
    pub fn new(n_actions: usize, config: LearnerConfig) -> Self {
        let epsilon = config.epsilon_start;
        LearningAgent {
            table: LearnerTable::new(n_actions),
            config,
            epsilon,
        }
    }

    /// Frozen copy for evaluation: no exploration.
    pub fn greedy(table: LearnerTable, config: LearnerConfig) -> Self {
        LearningAgent {
            table,
            config,
            epsilon: 0.0,
        }
    }
}

impl Agent for LearningAgent {
    fn select_action(&mut self, obs: &Observation, rng: &mut dyn RngCore) -> Option<usize> {
        Some(self.table.select_action(obs.state, self.epsilon, rng))
    }

    fn learn(&mut self, t: &Transition) {
        self.table.learn(t, &self.config);
    }
}

/// A read-only policy shared across concurrent evaluation episodes.
#[derive(Clone, Copy, Debug)]
pub struct FrozenAgent<'a> {
    pub table: &'a LearnerTable,
}

impl Agent for FrozenAgent<'_> {
    fn select_action(&mut self, obs: &Observation, rng: &mut dyn RngCore) -> Option<usize> {
        Some(self.table.select_action(obs.state, 0.0, rng))
    }
}

struct Pending {
    state: StateId,
    action: usize,
    reward: f64,
}

/// One agent's move within an episode.
#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    pub agent: usize,
    pub state: StateId,
    pub action: Option<usize>,
}

/// Record of a played episode.
#[derive(Clone, Debug, PartialEq)]
pub struct Played {
    pub returns: Vec<f64>,
    pub steps: usize,
    pub moves: Vec<Vec<Move>>,
}

/// Plays one episode to termination. When `learning`, each agent learns
/// from its own transitions: from the state it acted in to the state it
/// next acts in, with every reward received in between.
pub fn play_episode<G: StochasticGame + ?Sized>(
    game: &mut G,
    agents: &mut [&mut dyn Agent],
    rngs: &mut [&mut dyn RngCore],
    env_rng: &mut dyn RngCore,
    learning: bool,
) -> Result<Played> {
    let n = game.n_agents();
    assert_eq!(agents.len(), n, "one agent per player");
    assert_eq!(rngs.len(), n, "one exploration stream per player");
    let mut pending: Vec<Option<Pending>> = (0..n).map(|_| None).collect();
    let mut returns = vec![0.0; n];
    let mut moves = Vec::new();
    loop {
        let acting = game.to_act();
        let mut actions = vec![None; n];
        let mut step_moves = Vec::with_capacity(acting.len());
        for &i in &acting {
            let state = game.observe(i);
            if let Some(p) = pending[i].take() {
                if learning {
                    agents[i].learn(&Transition {
                        state: p.state,
                        action: p.action,
                        reward: p.reward,
                        next_state: state,
                        terminal: false,
                    });
                }
            }
            let n_actions = game.n_actions(i);
            let action = agents[i].select_action(&Observation { state, n_actions }, &mut *rngs[i]);
            if let Some(a) = action {
                if a >= n_actions {
                    return Err(Error::ContractViolation {
                        agent: i,
                        action: a,
                        n_actions,
                    });
                }
                pending[i] = Some(Pending {
                    state,
                    action: a,
                    reward: 0.0,
                });
            }
            actions[i] = action;
            step_moves.push(Move {
                agent: i,
                state,
                action,
            });
        }
        let step = game.step(&actions, env_rng)?;
        moves.push(step_moves);
        for (i, r) in step.rewards.iter().enumerate() {
            returns[i] += r;
            if let Some(p) = pending[i].as_mut() {
                p.reward += r;
            }
        }
        if step.terminal {
            for (i, p) in pending.into_iter().enumerate() {
                if let (Some(p), true) = (p, learning) {
                    agents[i].learn(&Transition {
                        state: p.state,
                        action: p.action,
                        reward: p.reward,
                        next_state: p.state,
                        terminal: true,
                    });
                }
            }
            return Ok(Played {
                returns,
                steps: moves.len(),
                moves,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two-state corridor: agent 0 moves right (action 1) to reach the goal.
    struct Corridor {
        pos: u64,
    }

    impl StochasticGame for Corridor {
        fn n_agents(&self) -> usize {
            1
        }
        fn n_actions(&self, _: usize) -> usize {
            2
        }
        fn observe(&self, _: usize) -> StateId {
            StateId(self.pos)
        }
        fn to_act(&self) -> Vec<usize> {
            vec![0]
        }
        fn step(&mut self, actions: &[Option<usize>], _: &mut dyn RngCore) -> Result<Step> {
            if actions[0] == Some(1) {
                self.pos += 1;
            }
            let done = self.pos == 2;
            Ok(Step {
                rewards: vec![if done { 10.0 } else { -1.0 }],
                terminal: done,
            })
        }
    }

    struct Fixed(usize);

    impl Agent for Fixed {
        fn select_action(&mut self, _: &Observation, _: &mut dyn RngCore) -> Option<usize> {
            Some(self.0)
        }
    }

    #[test]
    fn learner_finds_the_goal() {
        let mut agent = LearningAgent::new(2, LearnerConfig::default());
        agent.epsilon = 0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut env = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let mut game = Corridor { pos: 0 };
            play_episode(
                &mut game,
                &mut [&mut agent],
                &mut [&mut rng],
                &mut env,
                true,
            )
            .unwrap();
        }
        assert!(agent.table.pi(StateId(0))[1] > 0.9);
        assert!(agent.table.q(StateId(1))[1] > agent.table.q(StateId(1))[0]);
    }

    #[test]
    fn returns_sum_rewards() {
        let mut game = Corridor { pos: 0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut env = ChaCha8Rng::seed_from_u64(1);
        let played = play_episode(
            &mut game,
            &mut [&mut Fixed(1)],
            &mut [&mut rng],
            &mut env,
            false,
        )
        .unwrap();
        assert_eq!(played.returns, vec![9.0]);
        assert_eq!(played.steps, 2);
    }

    #[test]
    fn out_of_range_action_is_a_contract_violation() {
        let mut game = Corridor { pos: 0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut env = ChaCha8Rng::seed_from_u64(1);
        let err = play_episode(
            &mut game,
            &mut [&mut Fixed(7)],
            &mut [&mut rng],
            &mut env,
            false,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ContractViolation { action: 7, .. }));
    }
}
