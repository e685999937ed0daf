use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::acts::Role;
use crate::error::{Error, Result};
use crate::game::{ChannelMode, EpisodeConfig, World};
use crate::language::{NoiseConfig, TemplateStore};
use crate::marl::LearnerConfig;
use crate::ontology::{Database, Domain, GoalConfig};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "DUOLOGUE_OUT";

/// Matrix-game validation settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub steps: usize,
    /// Pass threshold on max |π̃(a) − 1/|A|| at the end of a run.
    pub tolerance: f64,
    /// Payoff multiplier of the scaled matching-pennies run.
    pub scaled_payoff: f64,
    /// Per-state decay of the hill-climbing rates in the matrix games.
    pub delta_decay_visits: Option<f64>,
    pub n_snapshots: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            steps: 500_000,
            tolerance: 0.05,
            scaled_payoff: 10.0,
            delta_decay_visits: Some(100.0),
            n_snapshots: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_train_dialogues: usize,
    pub n_eval_dialogues: usize,
    pub n_repetitions: usize,
    /// Learning-curve rows are written every this many training dialogues.
    pub checkpoint_every: usize,
    /// Width of the moving window behind each curve row.
    pub curve_window: usize,
    /// Full learner state is saved for resumption every this many dialogues.
    pub resume_every: usize,
    /// Write evaluation transcripts next to the report.
    pub transcripts: bool,
    pub out_dir: PathBuf,
    /// Domain definition (JSON); the bundled restaurant domain when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<PathBuf>,
    /// Tab-separated item file; the bundled database when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub database: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeker_templates: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provider_templates: Option<PathBuf>,
    pub seeker: LearnerConfig,
    pub provider: LearnerConfig,
    pub episode: EpisodeConfig,
    pub goal: GoalConfig,
    pub validate: ValidateConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            n_train_dialogues: 20_000,
            n_eval_dialogues: 1_000,
            n_repetitions: 3,
            checkpoint_every: 200,
            curve_window: 200,
            resume_every: 2_000,
            transcripts: true,
            out_dir: PathBuf::from("runs/default"),
            domain: None,
            database: None,
            seeker_templates: None,
            provider_templates: None,
            seeker: LearnerConfig::default(),
            provider: LearnerConfig::default(),
            episode: EpisodeConfig::default(),
            goal: GoalConfig {
                request_pool: vec!["addr".into(), "phone".into(), "postcode".into()],
                ..GoalConfig::default()
            },
            validate: ValidateConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads a TOML config. Relative resource paths are resolved against
    /// the config file's directory; `out_dir` stays relative to the
    /// working directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.domain,
            &mut cfg.database,
            &mut cfg.seeker_templates,
            &mut cfg.provider_templates,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() as u64 + 1),
            message: e.message().to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn learner(&self, role: Role) -> &LearnerConfig {
        match role {
            Role::Seeker => &self.seeker,
            Role::Provider => &self.provider,
        }
    }

    pub fn set_mode(&mut self, mode: ChannelMode) {
        self.episode.channel_mode = mode;
    }

    /// Sets all four channel noise probabilities to `p`.
    pub fn set_noise(&mut self, p: f64) {
        self.episode.noise = NoiseConfig::uniform(p);
    }

    /// Applies the output-directory override from the environment, if set.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.out_dir = PathBuf::from(dir);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_train_dialogues == 0 || self.n_eval_dialogues == 0 || self.n_repetitions == 0 {
            return bad("dialogue and repetition counts must be at least 1");
        }
        if self.checkpoint_every == 0 || self.curve_window == 0 || self.resume_every == 0 {
            return bad("checkpoint_every, curve_window and resume_every must be at least 1");
        }
        if self.validate.steps < 10
            || self.validate.tolerance.is_nan()
            || self.validate.tolerance <= 0.0
        {
            return bad("validate: need steps >= 10 and tolerance > 0");
        }
        for p in [
            &self.domain,
            &self.database,
            &self.seeker_templates,
            &self.provider_templates,
        ]
        .into_iter()
        .flatten()
        {
            if !p.is_file() {
                return Err(Error::Config(format!("{} does not exist", p.display())));
            }
        }
        self.seeker.validate()?;
        self.provider.validate()?;
        self.episode.validate()
    }

    /// Validates the config and builds the world it describes.
    pub fn world(&self) -> Result<World> {
        self.validate()?;
        let domain = match &self.domain {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str::<Domain>(&text)?
            }
            None => Domain::restaurants(),
        };
        let db = match &self.database {
            Some(p) => Database::load(p, domain)?,
            None if self.domain.is_none() => Database::bundled(),
            None => return Err(Error::Config("a custom domain needs a database".into())),
        };
        let templates = |role, path: &Option<PathBuf>| match path {
            Some(p) => TemplateStore::load(role, p),
            None => Ok(TemplateStore::bundled(role)),
        };
        let world = World::new(
            db,
            templates(Role::Seeker, &self.seeker_templates)?,
            templates(Role::Provider, &self.provider_templates)?,
        )?;
        self.goal.validate(world.domain())?;
        Ok(world)
    }

    /// Digest of everything that shapes a training run.
    pub fn training_digest(&self) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        c.n_eval_dialogues = 1;
        c.n_repetitions = 1;
        c.transcripts = false;
        c.validate = ValidateConfig::default();
        hex(&Sha256::digest(c.to_toml().as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::parse(&cfg.to_toml(), "mem").unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn shipped_config_spells_out_the_defaults() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml");
        let cfg = ExperimentConfig::load(path).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let err =
            ExperimentConfig::parse("seed = 1\n\n[seeker]\nalhpa = 0.1\n", "x.toml").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn invalid_counts_fail_validation() {
        let cfg = ExperimentConfig {
            n_train_dialogues: 0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = ExperimentConfig {
            database: Some("/nonexistent/items.tsv".into()),
            ..Default::default()
        };
        assert!(cfg.world().is_err());
    }

    #[test]
    fn digest_ignores_output_location() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.out_dir = "elsewhere".into();
        assert_eq!(a.training_digest(), b.training_digest());
        b.seed = 2;
        assert_ne!(a.training_digest(), b.training_digest());
    }
}
