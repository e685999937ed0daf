use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::LearnerConfig;
use super::game::{play_episode, Agent, LearningAgent, Step, StochasticGame};
use crate::error::{Error, Result};
use crate::tracking::StateId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixGameKind {
    MatchingPennies,
    RockPaperScissors,
}

impl FromStr for MatrixGameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matching_pennies" | "mp" => Ok(MatrixGameKind::MatchingPennies),
            "rps" | "rock_paper_scissors" => Ok(MatrixGameKind::RockPaperScissors),
            other => Err(Error::Config(format!("unknown matrix game `{other}`"))),
        }
    }
}

impl fmt::Display for MatrixGameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixGameKind::MatchingPennies => "matching_pennies",
            MatrixGameKind::RockPaperScissors => "rps",
        })
    }
}

/// A repeated two-player zero-sum matrix game with a single state; every
/// play is one terminal step.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGame {
    /// Row player's payoffs; the column player receives the negation.
    pub payoff: Vec<Vec<f64>>,
}

impl MatrixGame {
    pub fn new(kind: MatrixGameKind, scale: f64) -> Self {
        let payoff = match kind {
            MatrixGameKind::MatchingPennies => vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            MatrixGameKind::RockPaperScissors => vec![
                vec![0.0, -1.0, 1.0],
                vec![1.0, 0.0, -1.0],
                vec![-1.0, 1.0, 0.0],
            ],
        };
        MatrixGame {
            payoff: payoff
                .into_iter()
                .map(|row| row.into_iter().map(|x| x * scale).collect())
                .collect(),
        }
    }

    pub fn n_moves(&self) -> usize {
        self.payoff.len()
    }
}

impl StochasticGame for MatrixGame {
    fn n_agents(&self) -> usize {
        2
    }

    fn n_actions(&self, _agent: usize) -> usize {
        self.payoff.len()
    }

    fn observe(&self, _agent: usize) -> StateId {
        StateId(0)
    }

    fn to_act(&self) -> Vec<usize> {
        vec![0, 1]
    }

    fn step(&mut self, actions: &[Option<usize>], _rng: &mut dyn RngCore) -> Result<Step> {
        let (Some(a), Some(b)) = (actions[0], actions[1]) else {
            return Err(Error::Config(
                "both players must move in a matrix game".into(),
            ));
        };
        let r = self.payoff[a][b];
        Ok(Step {
            rewards: vec![r, -r],
            terminal: true,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSnapshot {
    pub step: usize,
    pub pi: [Vec<f64>; 2],
    pub pi_avg: [Vec<f64>; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRun {
    pub game: MatrixGameKind,
    pub steps: usize,
    pub snapshots: Vec<MatrixSnapshot>,
    pub final_pi: [Vec<f64>; 2],
    pub final_pi_avg: [Vec<f64>; 2],
    /// Per player: max over the last 10% of steps of max_a |π(a) − 1/|A||.
    pub tail_pi_deviation: [f64; 2],
}

impl MatrixRun {
    /// Max over players and actions of |π̃(a) − 1/|A|| at the end of the run.
    pub fn final_avg_deviation(&self) -> f64 {
        self.final_pi_avg
            .iter()
            .map(|p| deviation(p))
            .fold(0.0, f64::max)
    }

    pub fn tail_deviation(&self) -> f64 {
        self.tail_pi_deviation[0].max(self.tail_pi_deviation[1])
    }
}

fn deviation(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    p.iter().map(|x| (x - u).abs()).fold(0.0, f64::max)
}

/// Self-play of two learners on a repeated matrix game. Exploration decays
/// over the run per each learner's schedule; `n_snapshots` evenly spaced
/// policy snapshots are recorded.
pub fn run_matrix_game(
    kind: MatrixGameKind,
    scale: f64,
    configs: [&LearnerConfig; 2],
    steps: usize,
    seed: u64,
    n_snapshots: usize,
) -> Result<MatrixRun> {
    for c in configs {
        c.validate()?;
    }
    let mut game = MatrixGame::new(kind, scale);
    let n = game.n_moves();
    let mut a = LearningAgent::new(n, configs[0].clone());
    let mut b = LearningAgent::new(n, configs[1].clone());
    let stream = |k: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(k);
        r
    };
    let (mut ra, mut rb, mut env) = (stream(0), stream(1), stream(2));
    let s = StateId(0);
    let every = (steps / n_snapshots.max(1)).max(1);
    let tail_start = steps - steps / 10;
    let mut snapshots = Vec::new();
    let mut tail = [0.0f64; 2];
    for t in 0..steps {
        let progress = t as f64 / steps as f64;
        a.epsilon = a.config.epsilon_at(progress);
        b.epsilon = b.config.epsilon_at(progress);
        {
            let mut agents: [&mut dyn Agent; 2] = [&mut a, &mut b];
            let mut rngs: [&mut dyn RngCore; 2] = [&mut ra, &mut rb];
            play_episode(&mut game, &mut agents, &mut rngs, &mut env, true)?;
        }
        if t >= tail_start {
            tail[0] = tail[0].max(deviation(a.table.pi(s)));
            tail[1] = tail[1].max(deviation(b.table.pi(s)));
        }
        if (t + 1) % every == 0 {
            snapshots.push(MatrixSnapshot {
                step: t + 1,
                pi: [a.table.pi(s).to_vec(), b.table.pi(s).to_vec()],
                pi_avg: [a.table.pi_avg(s).to_vec(), b.table.pi_avg(s).to_vec()],
            });
        }
    }
    Ok(MatrixRun {
        game: kind,
        steps,
        snapshots,
        final_pi: [a.table.pi(s).to_vec(), b.table.pi(s).to_vec()],
        final_pi_avg: [a.table.pi_avg(s).to_vec(), b.table.pi_avg(s).to_vec()],
        tail_pi_deviation: tail,
    })
}
