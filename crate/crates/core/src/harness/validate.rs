use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::seeds::Seeds;
use crate::error::Result;
use crate::marl::{run_matrix_game, Algorithm, LearnerConfig, MatrixGameKind, MatrixRun};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `value ≤ threshold` or `value > threshold`.
    pub comparison: String,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            comparison: "<=".into(),
            pass: value <= threshold,
        }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            comparison: ">".into(),
            pass: value > threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedRun {
    pub name: String,
    pub algorithm: Algorithm,
    pub scale: f64,
    pub run: MatrixRun,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub steps: usize,
    pub checks: Vec<Check>,
    pub runs: Vec<NamedRun>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn run(&self, name: &str) -> Option<&MatrixRun> {
        self.runs.iter().find(|r| r.name == name).map(|r| &r.run)
    }
}

pub fn matrix_learner(cfg: &ExperimentConfig, algorithm: Algorithm) -> LearnerConfig {
    LearnerConfig {
        delta_decay_visits: cfg.validate.delta_decay_visits,
        ..LearnerConfig::with_algorithm(algorithm)
    }
}

/// Self-play on matching pennies (WoLF-PHC, plain PHC, and WoLF-PHC with
/// scaled payoffs) and rock-paper-scissors. WoLF runs pass when the average
/// policies end within tolerance of uniform; PHC must end further from
/// uniform in its current policy than WoLF does.
pub fn validate(cfg: &ExperimentConfig) -> Result<ValidationReport> {
    let v = &cfg.validate;
    let seeds = Seeds::new(cfg.seed);
    let wolf = matrix_learner(cfg, Algorithm::WolfPhc);
    let phc = matrix_learner(cfg, Algorithm::Phc);
    let plan = [
        ("mp_wolf", MatrixGameKind::MatchingPennies, &wolf, 1.0),
        ("mp_phc", MatrixGameKind::MatchingPennies, &phc, 1.0),
        (
            "mp_wolf_scaled",
            MatrixGameKind::MatchingPennies,
            &wolf,
            v.scaled_payoff,
        ),
        ("rps_wolf", MatrixGameKind::RockPaperScissors, &wolf, 1.0),
    ];
    let mut runs = Vec::new();
    for (name, kind, learner, scale) in plan {
        let seed = seeds.stream(&format!("validate/{name}"), &[]).next_u64();
        let run = run_matrix_game(
            kind,
            scale,
            [learner, learner],
            v.steps,
            seed,
            v.n_snapshots,
        )?;
        runs.push(NamedRun {
            name: name.into(),
            algorithm: learner.algorithm,
            scale,
            run,
        });
    }
    let get = |n: &str| &runs.iter().find(|r| r.name == n).expect("planned").run;
    let checks = vec![
        Check::at_most(
            "mp_wolf_avg_policy",
            get("mp_wolf").final_avg_deviation(),
            v.tolerance,
        ),
        Check::above(
            "mp_phc_tail_deviation_exceeds_wolf",
            get("mp_phc").tail_deviation(),
            get("mp_wolf").tail_deviation(),
        ),
        Check::at_most(
            "mp_wolf_scaled_avg_policy",
            get("mp_wolf_scaled").final_avg_deviation(),
            v.tolerance,
        ),
        Check::at_most(
            "rps_wolf_avg_policy",
            get("rps_wolf").final_avg_deviation(),
            v.tolerance,
        ),
    ];
    for c in &checks {
        log::info!(
            "{}: {} {} {} → {}",
            c.name,
            c.value,
            c.comparison,
            c.threshold,
            c.pass
        );
    }
    Ok(ValidationReport {
        seed: cfg.seed,
        steps: v.steps,
        checks,
        runs,
    })
}
