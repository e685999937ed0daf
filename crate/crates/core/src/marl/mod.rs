//! Tabular multi-agent reinforcement learning: Q-learning, PHC and WoLF-PHC
//! over per-state tables, the stochastic-game abstraction shared by the
//! dialogue and matrix games, and the matrix-game validation runs.

mod config;
mod game;
mod matrix;
mod policy;
mod table;

pub use config::{Algorithm, LearnerConfig};
pub use game::{
    play_episode, Agent, FrozenAgent, LearningAgent, Move, Observation, Played, Step,
    StochasticGame,
};
pub use matrix::{run_matrix_game, MatrixGame, MatrixGameKind, MatrixRun, MatrixSnapshot};
pub use policy::{PolicyFile, POLICY_FORMAT_VERSION};
pub use table::{argmax, hill_climb, sample, wolf_delta, Entry, LearnerTable, Transition};
