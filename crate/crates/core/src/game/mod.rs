//! The two-player dialogue game: episodes between a seeker and a provider
//! over an acts or language channel, rewards and success.

mod config;
mod episode;
mod realize;
mod scripted;
mod success;
mod transcript;
mod world;

pub use config::{ChannelMode, EpisodeConfig, RewardConfig, TurnPenaltyScope};
pub use episode::{run_episode, DialogueGame, EpisodeOutcome, EpisodeRngs, TurnRecord};
pub use realize::{realize_provider, realize_seeker};
pub use scripted::{rule_agent, ConstantAgent, ReplayAgent, RuleProvider, RuleSeeker};
pub use success::{charged_turns, compute_rewards, evaluate_success, Rewards, Success};
pub use transcript::{
    read_transcripts, write_transcript, TranscriptLine, TRANSCRIPT_FORMAT_VERSION,
};
pub use world::World;
