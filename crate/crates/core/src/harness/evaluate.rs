use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::metrics::{DialogueStats, MetricsReport};
use super::seeds::Seeds;
use super::train::write_json;
use crate::acts::Role;
use crate::error::{Error, Result};
use crate::game::{rule_agent, run_episode, write_transcript, ChannelMode, EpisodeOutcome, World};
use crate::language::NoiseConfig;
use crate::marl::{Agent, FrozenAgent, PolicyFile};
use crate::ontology::sample_goal;

pub const EVAL_REPORT_FILE: &str = "eval_report.json";
pub const TRANSCRIPT_DIR: &str = "transcripts";

/// Who plays a role during evaluation.
#[derive(Clone, Debug)]
pub enum AgentSpec {
    Policy(Box<PolicyFile>),
    Rule,
}

impl AgentSpec {
    /// Loads a policy file, refusing one trained for another role or action space.
    pub fn load(path: impl AsRef<Path>, world: &World, role: Role) -> Result<Self> {
        let file = PolicyFile::load(path, world.space(role))?;
        Ok(AgentSpec::Policy(Box::new(file)))
    }

    fn agent<'a>(&'a self, role: Role, world: &World) -> Box<dyn Agent + Send + 'a> {
        match self {
            AgentSpec::Policy(p) => Box::new(FrozenAgent { table: &p.table }),
            AgentSpec::Rule => rule_agent(role, world.domain(), world.space(role)),
        }
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Policy(p) => write!(f, "{} policy", p.config.algorithm),
            AgentSpec::Rule => f.write_str("rule"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub seeker: String,
    pub provider: String,
    pub channel_mode: ChannelMode,
    pub noise: NoiseConfig,
    pub seed: u64,
    pub repetitions: Vec<MetricsReport>,
    pub mean: MetricsReport,
    /// Population standard deviation across repetitions.
    pub spread: MetricsReport,
}

/// Plays `n_eval_dialogues` greedy dialogues per repetition, without
/// learning. Episode `(r, i)` uses streams keyed by both, so any two pairs
/// evaluated under the same config meet the same goals and channel draws.
/// Episodes run in parallel and are reduced in index order.
pub fn evaluate(
    cfg: &ExperimentConfig,
    world: &World,
    seeker: &AgentSpec,
    provider: &AgentSpec,
) -> Result<(EvaluationReport, Vec<Vec<EpisodeOutcome>>)> {
    cfg.validate()?;
    let seeds = Seeds::new(cfg.seed);
    let mut reps = Vec::with_capacity(cfg.n_repetitions);
    let mut outcomes = Vec::with_capacity(cfg.n_repetitions);
    for r in 0..cfg.n_repetitions {
        let batch: Vec<EpisodeOutcome> = (0..cfg.n_eval_dialogues)
            .into_par_iter()
            .map(|i| {
                let (mut goal_rng, mut rngs) = seeds.episode("eval", &[r as u64, i as u64]);
                let goal = sample_goal(world.domain(), &world.db, &mut goal_rng, &cfg.goal)?;
                let mut s = seeker.agent(Role::Seeker, world);
                let mut p = provider.agent(Role::Provider, world);
                run_episode(
                    &mut *s,
                    &mut *p,
                    world,
                    goal,
                    &cfg.episode,
                    &mut rngs,
                    false,
                )
            })
            .collect::<Result<_>>()?;
        let stats: Vec<DialogueStats> = batch.iter().map(DialogueStats::from).collect();
        reps.push(MetricsReport::aggregate(&stats));
        outcomes.push(batch);
    }
    let (mean, spread) = MetricsReport::mean_and_spread(&reps);
    let report = EvaluationReport {
        seeker: seeker.to_string(),
        provider: provider.to_string(),
        channel_mode: cfg.episode.channel_mode,
        noise: cfg.episode.effective_noise(),
        seed: cfg.seed,
        repetitions: reps,
        mean,
        spread,
    };
    Ok((report, outcomes))
}

/// Evaluates and writes the report, plus one transcript file per
/// repetition when the config asks for transcripts.
pub fn evaluate_to_dir(
    cfg: &ExperimentConfig,
    world: &World,
    seeker: &AgentSpec,
    provider: &AgentSpec,
    out: &Path,
) -> Result<EvaluationReport> {
    let (report, outcomes) = evaluate(cfg, world, seeker, provider)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    if cfg.transcripts {
        let dir = out.join(TRANSCRIPT_DIR);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (r, batch) in outcomes.iter().enumerate() {
            let path = transcript_path(out, r);
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            for (i, o) in batch.iter().enumerate() {
                write_transcript(&mut w, i as u64, o)?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
    }
    write_json(&out.join(EVAL_REPORT_FILE), &report)?;
    Ok(report)
}

pub fn transcript_path(out: &Path, repetition: usize) -> PathBuf {
    out.join(TRANSCRIPT_DIR)
        .join(format!("eval-{repetition}.jsonl"))
}
