use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Epsilon-greedy Q-learning; the policy is the greedy one-hot.
    Qlearning,
    /// Policy hill climbing with a single step size (`delta_w`).
    Phc,
    WolfPhc,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Qlearning => "qlearning",
            Algorithm::Phc => "phc",
            Algorithm::WolfPhc => "wolf_phc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qlearning" | "q_learning" => Ok(Algorithm::Qlearning),
            "phc" => Ok(Algorithm::Phc),
            "wolf_phc" | "wolf-phc" => Ok(Algorithm::WolfPhc),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    pub gamma: f64,
    /// Initial Q learning rate; decays per state as `alpha / (1 + visits / alpha_decay_visits)`.
    pub alpha: f64,
    pub alpha_decay_visits: f64,
    pub delta_w: f64,
    pub delta_l: f64,
    /// When set, both hill-climbing rates decay per state as
    /// `delta / (1 + visits / delta_decay_visits)`.
    pub delta_decay_visits: Option<f64>,
    /// Exploration decays exponentially from `epsilon_start` to `epsilon_end`
    /// over the training run.
    pub epsilon_start: f64,
    pub epsilon_end: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            algorithm: Algorithm::WolfPhc,
            gamma: 0.95,
            alpha: 0.25,
            alpha_decay_visits: 1000.0,
            delta_w: 0.01,
            delta_l: 0.04,
            delta_decay_visits: None,
            epsilon_start: 0.95,
            epsilon_end: 0.05,
        }
    }
}

impl LearnerConfig {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        LearnerConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(format!("learner: {m}")));
        if !(0.0..=1.0).contains(&self.gamma) {
            return fail(format!("gamma={} is outside [0, 1]", self.gamma));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail(format!("alpha={} is outside (0, 1]", self.alpha));
        }
        if self.alpha_decay_visits.is_nan() || self.alpha_decay_visits <= 0.0 {
            return fail("alpha_decay_visits must be positive".into());
        }
        if self
            .delta_decay_visits
            .is_some_and(|d| d.is_nan() || d <= 0.0)
        {
            return fail("delta_decay_visits must be positive".into());
        }
        for (name, e) in [
            ("epsilon_start", self.epsilon_start),
            ("epsilon_end", self.epsilon_end),
        ] {
            if !(0.0..=1.0).contains(&e) {
                return fail(format!("{name}={e} is outside [0, 1]"));
            }
        }
        match self.algorithm {
            Algorithm::WolfPhc if !(0.0 < self.delta_w && self.delta_w < self.delta_l) => {
                fail(format!(
                    "need 0 < delta_w < delta_l, got {} and {}",
                    self.delta_w, self.delta_l
                ))
            }
            Algorithm::Phc if self.delta_w.is_nan() || self.delta_w <= 0.0 => {
                fail("phc needs delta_w > 0".into())
            }
            _ => Ok(()),
        }
    }

    /// Learning rate for a state already visited `visits` times.
    pub fn alpha_at(&self, visits: u64) -> f64 {
        self.alpha / (1.0 + visits as f64 / self.alpha_decay_visits)
    }

    /// Scale applied to `delta_w` and `delta_l` for a state already visited `visits` times.
    pub fn delta_scale_at(&self, visits: u64) -> f64 {
        self.delta_decay_visits
            .map_or(1.0, |d| 1.0 / (1.0 + visits as f64 / d))
    }

    /// Exploration rate at `progress` ∈ [0, 1] through training.
    pub fn epsilon_at(&self, progress: f64) -> f64 {
        let p = progress.clamp(0.0, 1.0);
        if self.epsilon_start <= 0.0 {
            return 0.0;
        }
        self.epsilon_start * (self.epsilon_end / self.epsilon_start).powf(p)
    }
}
