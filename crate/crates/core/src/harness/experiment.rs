use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::evaluate::{evaluate_to_dir, AgentSpec};
use super::metrics::MetricsReport;
use super::seeds::Seeds;
use super::train::{train, write_json};
use crate::acts::Role;
use crate::error::{Error, Result};
use crate::game::World;

pub const EXPERIMENT_REPORT_FILE: &str = "experiment_report.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub seed: u64,
    pub train: MetricsReport,
    pub eval: MetricsReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub cycles: Vec<Cycle>,
    pub mean: MetricsReport,
    pub spread: MetricsReport,
}

/// Training seed of cycle `r`.
pub fn cycle_seed(root: u64, r: usize) -> u64 {
    Seeds::new(root).stream("cycle", &[r as u64]).next_u64()
}

/// `n_repetitions` independent train-then-evaluate cycles, each in its own
/// `cycle-r` directory. Every cycle trains under its own derived seed and
/// evaluates once under the root seed, so all cycles (and any two
/// experiments sharing a root seed) are judged on the same dialogues.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    world: &World,
    out: &Path,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut cycles = Vec::new();
    for r in 0..cfg.n_repetitions {
        let dir = out.join(format!("cycle-{r}"));
        let seed = cycle_seed(cfg.seed, r);
        let trained = train(
            &ExperimentConfig {
                seed,
                ..cfg.clone()
            },
            world,
            &dir,
            None,
        )?;
        if !trained.finished {
            return Err(Error::Config("training did not finish".into()));
        }
        let eval_cfg = ExperimentConfig {
            n_repetitions: 1,
            ..cfg.clone()
        };
        let seeker = AgentSpec::load(&trained.seeker_policy, world, Role::Seeker)?;
        let provider = AgentSpec::load(&trained.provider_policy, world, Role::Provider)?;
        let report = evaluate_to_dir(&eval_cfg, world, &seeker, &provider, &dir)?;
        log::info!("cycle {r}: success {:.3}", report.mean.success_rate);
        cycles.push(Cycle {
            seed,
            train: MetricsReport {
                curve: Vec::new(),
                ..trained.report
            },
            eval: report.mean,
        });
    }
    let evals: Vec<MetricsReport> = cycles.iter().map(|c| c.eval.clone()).collect();
    let (mean, spread) = MetricsReport::mean_and_spread(&evals);
    let report = ExperimentReport {
        seed: cfg.seed,
        cycles,
        mean,
        spread,
    };
    write_json(&out.join(EXPERIMENT_REPORT_FILE), &report)?;
    Ok(report)
}
