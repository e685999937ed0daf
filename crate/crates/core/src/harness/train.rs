use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::metrics::{write_curve, CurveRow, DialogueStats, MetricsReport, Window};
use super::seeds::Seeds;
use crate::acts::Role;
use crate::error::{Error, Result};
use crate::game::{run_episode, EpisodeOutcome, World};
use crate::marl::{LearnerTable, LearningAgent, PolicyFile};
use crate::ontology::sample_goal;

pub const CURVE_FILE: &str = "curve.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const TRAIN_REPORT_FILE: &str = "train_report.json";
const CHECKPOINT_VERSION: u32 = 1;

pub fn policy_file_name(role: Role) -> String {
    format!("{role}.policy.json")
}

/// Learner state that lets an interrupted run continue bit-identically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub digest: String,
    pub completed: usize,
    pub seeker: LearnerTable,
    pub provider: LearnerTable,
    pub window: Window,
    pub curve: Vec<CurveRow>,
}

/// Concurrent self-play training of a seeker and a provider. Episode `i`
/// draws every random number from streams keyed by `i`, so resuming needs
/// only the learner tables.
pub struct Trainer<'w> {
    cfg: &'w ExperimentConfig,
    world: &'w World,
    seeds: Seeds,
    pub seeker: LearningAgent,
    pub provider: LearningAgent,
    pub window: Window,
    pub curve: Vec<CurveRow>,
    pub completed: usize,
}

impl<'w> Trainer<'w> {
    pub fn new(cfg: &'w ExperimentConfig, world: &'w World) -> Result<Self> {
        cfg.validate()?;
        Ok(Trainer {
            cfg,
            world,
            seeds: Seeds::new(cfg.seed),
            seeker: LearningAgent::new(world.seeker_space.len(), cfg.seeker.clone()),
            provider: LearningAgent::new(world.provider_space.len(), cfg.provider.clone()),
            window: Window::new(cfg.curve_window),
            curve: Vec::new(),
            completed: 0,
        })
    }

    pub fn resume(cfg: &'w ExperimentConfig, world: &'w World, ck: Checkpoint) -> Result<Self> {
        if ck.version != CHECKPOINT_VERSION {
            return Err(Error::Version {
                what: "checkpoint",
                expected: CHECKPOINT_VERSION,
                found: ck.version,
            });
        }
        if ck.digest != cfg.training_digest() {
            return Err(Error::Config(
                "checkpoint was written under a different configuration".into(),
            ));
        }
        let mut t = Trainer::new(cfg, world)?;
        t.seeker.table = ck.seeker;
        t.provider.table = ck.provider;
        t.window = ck.window;
        t.curve = ck.curve;
        t.completed = ck.completed;
        Ok(t)
    }

    pub fn is_done(&self) -> bool {
        self.completed >= self.cfg.n_train_dialogues
    }

    /// Plays the next training dialogue.
    pub fn step(&mut self) -> Result<EpisodeOutcome> {
        let i = self.completed;
        let n = self.cfg.n_train_dialogues;
        let progress = i as f64 / n as f64;
        self.seeker.epsilon = self.seeker.config.epsilon_at(progress);
        self.provider.epsilon = self.provider.config.epsilon_at(progress);
        let (mut goal_rng, mut rngs) = self.seeds.episode("train", &[i as u64]);
        let goal = sample_goal(
            self.world.domain(),
            &self.world.db,
            &mut goal_rng,
            &self.cfg.goal,
        )?;
        let mut outcome = run_episode(
            &mut self.seeker,
            &mut self.provider,
            self.world,
            goal,
            &self.cfg.episode,
            &mut rngs,
            true,
        )?;
        outcome.transcript.clear();
        self.window.push(DialogueStats::from(&outcome));
        self.completed += 1;
        if self.completed.is_multiple_of(self.cfg.checkpoint_every) || self.completed == n {
            let row = self.window.row(self.completed);
            log::info!(
                "dialogue {}: success {:.3}, turns {:.1}",
                row.dialogue,
                row.success_rate,
                row.avg_turns
            );
            self.curve.push(row);
        }
        Ok(outcome)
    }

    pub fn run_until(&mut self, dialogues: usize) -> Result<()> {
        while self.completed < dialogues.min(self.cfg.n_train_dialogues) {
            self.step()?;
        }
        Ok(())
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            digest: self.cfg.training_digest(),
            completed: self.completed,
            seeker: self.seeker.table.clone(),
            provider: self.provider.table.clone(),
            window: self.window.clone(),
            curve: self.curve.clone(),
        }
    }

    pub fn policy(&self, role: Role) -> PolicyFile {
        let agent = match role {
            Role::Seeker => &self.seeker,
            Role::Provider => &self.provider,
        };
        PolicyFile::new(
            self.world.space(role),
            agent.config.clone(),
            agent.table.clone(),
        )
    }

    /// Metrics of the last window, with the full curve attached.
    pub fn report(&self) -> MetricsReport {
        MetricsReport {
            curve: self.curve.clone(),
            ..MetricsReport::aggregate(&self.window.recent)
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutput {
    /// Windowed metrics at the point training stopped.
    pub report: MetricsReport,
    pub completed: usize,
    /// Policies are written only once every dialogue has been played.
    pub finished: bool,
    pub seeker_policy: PathBuf,
    pub provider_policy: PathBuf,
    pub curve: PathBuf,
    /// Dialogues already done by an earlier, interrupted run.
    pub resumed_from: Option<usize>,
}

/// Trains into `out`, resuming from a checkpoint there if one exists.
/// With `stop_after`, training halts after that many dialogues in total,
/// leaving a checkpoint as an interrupted run would.
pub fn train(
    cfg: &ExperimentConfig,
    world: &World,
    out: &Path,
    stop_after: Option<usize>,
) -> Result<TrainOutput> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let ck_path = out.join(CHECKPOINT_FILE);
    let mut trainer = if ck_path.is_file() {
        let text = fs::read_to_string(&ck_path).map_err(|e| Error::io(&ck_path, e))?;
        Trainer::resume(cfg, world, serde_json::from_str(&text)?)?
    } else {
        Trainer::new(cfg, world)?
    };
    let resumed_from = (trainer.completed > 0).then_some(trainer.completed);
    if let Some(done) = resumed_from {
        log::info!("resuming from dialogue {done}");
    }
    let limit = stop_after.unwrap_or(usize::MAX).min(cfg.n_train_dialogues);
    while trainer.completed < limit {
        trainer.step()?;
        if trainer.completed.is_multiple_of(cfg.resume_every) && !trainer.is_done() {
            save_checkpoint(&ck_path, &trainer)?;
        }
    }
    let seeker_policy = out.join(policy_file_name(Role::Seeker));
    let provider_policy = out.join(policy_file_name(Role::Provider));
    if !trainer.is_done() {
        save_checkpoint(&ck_path, &trainer)?;
        return Ok(TrainOutput {
            report: trainer.report(),
            completed: trainer.completed,
            finished: false,
            seeker_policy,
            provider_policy,
            curve: write_curve_file(out, &trainer.curve)?,
            resumed_from,
        });
    }
    trainer.policy(Role::Seeker).save(&seeker_policy)?;
    trainer.policy(Role::Provider).save(&provider_policy)?;
    let curve = write_curve_file(out, &trainer.curve)?;
    let report = trainer.report();
    write_json(&out.join(TRAIN_REPORT_FILE), &report)?;
    if ck_path.exists() {
        fs::remove_file(&ck_path).map_err(|e| Error::io(&ck_path, e))?;
    }
    Ok(TrainOutput {
        report,
        completed: trainer.completed,
        finished: true,
        seeker_policy,
        provider_policy,
        curve,
        resumed_from,
    })
}

fn save_checkpoint(path: &Path, trainer: &Trainer<'_>) -> Result<()> {
    write_atomic(path, &serde_json::to_string(&trainer.checkpoint())?)
}

fn write_curve_file(out: &Path, rows: &[CurveRow]) -> Result<PathBuf> {
    let path = out.join(CURVE_FILE);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_curve(BufWriter::new(file), rows)?;
    Ok(path)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, &text)
}

/// Writes through a temporary file so a crash never leaves a torn file.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
