use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::NoiseConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Frames pass directly between the agents.
    Acts,
    /// Frames are corrupted, generated as text and parsed back.
    Language,
}

impl FromStr for ChannelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acts" => Ok(ChannelMode::Acts),
            "language" => Ok(ChannelMode::Language),
            other => Err(Error::Config(format!(
                "unknown channel mode `{other}` (acts|language)"
            ))),
        }
    }
}

impl fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelMode::Acts => "acts",
            ChannelMode::Language => "language",
        })
    }
}

/// Which turns an agent pays the turn penalty for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnPenaltyScope {
    /// Both agents pay for every turn of the dialogue.
    Dialogue,
    /// Each agent pays only for its own turns.
    Own,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub success_reward: f64,
    pub failure_reward: f64,
    pub turn_penalty: f64,
    pub turn_penalty_scope: TurnPenaltyScope,
    /// Seeker, per goal request never expressed.
    pub unexpressed_request_penalty: f64,
    /// Provider, per received request left unanswered.
    pub unanswered_request_penalty: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            success_reward: 20.0,
            failure_reward: -10.0,
            turn_penalty: -1.0,
            turn_penalty_scope: TurnPenaltyScope::Dialogue,
            unexpressed_request_penalty: -2.0,
            unanswered_request_penalty: -2.0,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.success_reward > 0.0 && self.turn_penalty < 0.0) {
            return Err(Error::Config(
                "reward: need success_reward > 0 > turn_penalty".into(),
            ));
        }
        if self.unexpressed_request_penalty > 0.0 || self.unanswered_request_penalty > 0.0 {
            return Err(Error::Config("reward: slot penalties must be ≤ 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeConfig {
    pub max_turns: usize,
    pub channel_mode: ChannelMode,
    pub noise: NoiseConfig,
    /// Apply `noise` to frames in acts mode as well.
    pub acts_noise: bool,
    pub reward: RewardConfig,
    /// Reward each agent by its own perceived success instead of the objective one.
    pub subjective_rewards: bool,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            max_turns: 30,
            channel_mode: ChannelMode::Language,
            noise: NoiseConfig::uniform(0.05),
            acts_noise: false,
            reward: RewardConfig::default(),
            subjective_rewards: false,
        }
    }
}

impl EpisodeConfig {
    /// Acts channel without noise.
    pub fn acts() -> Self {
        EpisodeConfig {
            channel_mode: ChannelMode::Acts,
            noise: NoiseConfig::default(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_turns < 2 {
            return Err(Error::Config(format!(
                "episode: max_turns={} < 2",
                self.max_turns
            )));
        }
        self.noise.validate()?;
        self.reward.validate()
    }

    /// Noise actually applied to frames on this channel.
    pub fn effective_noise(&self) -> NoiseConfig {
        match self.channel_mode {
            ChannelMode::Language => self.noise,
            ChannelMode::Acts if self.acts_noise => self.noise,
            ChannelMode::Acts => NoiseConfig::default(),
        }
    }
}
