//! Experiment driver: configuration, seeding, training, evaluation,
//! matrix-game validation, channel metric runs and interactive chat.

mod channel;
mod chat;
mod config;
mod evaluate;
mod experiment;
mod metrics;
mod seeds;
mod train;
mod validate;

pub use channel::{
    nlg_eval, nlg_self_eval, nlu_eval, parse_candidates, random_frames, NlgEvalReport,
    NluEvalReport,
};
pub use chat::{chat, ChatSession, ChatSummary, QUIT};
pub use config::{ExperimentConfig, ValidateConfig, OUT_DIR_ENV};
pub use evaluate::{
    evaluate, evaluate_to_dir, transcript_path, AgentSpec, EvaluationReport, EVAL_REPORT_FILE,
    TRANSCRIPT_DIR,
};
pub use experiment::{cycle_seed, run_experiment, Cycle, ExperimentReport, EXPERIMENT_REPORT_FILE};
pub use metrics::{
    read_curve, write_curve, CurveRow, DialogueStats, MetricsReport, RoleReturns, Window,
};
pub use seeds::Seeds;
pub use train::{
    policy_file_name, train, Checkpoint, TrainOutput, Trainer, CHECKPOINT_FILE, CURVE_FILE,
    TRAIN_REPORT_FILE,
};
pub use validate::{matrix_learner, validate, Check, NamedRun, ValidationReport};
