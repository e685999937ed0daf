use std::fs;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use duologue::acts::Role;
use duologue::game::{ChannelMode, World};
use duologue::harness::{
    self, AgentSpec, ExperimentConfig, EVAL_REPORT_FILE, EXPERIMENT_REPORT_FILE, TRAIN_REPORT_FILE,
};
use duologue::language::{NoiseConfig, TemplateStore};
use duologue::marl::PolicyFile;
use duologue::Error;

const VALIDATION_REPORT_FILE: &str = "validation_report.json";
const NLU_REPORT_FILE: &str = "nlu_eval.json";
const NLG_REPORT_FILE: &str = "nlg_eval.json";
const CHAT_TRANSCRIPT_FILE: &str = "chat.jsonl";

/// Two-agent dialogue learning with WoLF-PHC.
#[derive(Parser, Debug)]
#[command(name = "duologue", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML experiment config; built-in defaults when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the config's root seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory; beats $DUOLOGUE_OUT and the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the channel mode.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Acts,
    Language,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RoleArg {
    Seeker,
    Provider,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Role {
        match r {
            RoleArg::Seeker => Role::Seeker,
            RoleArg::Provider => Role::Provider,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a seeker and a provider against each other.
    Train {
        /// Stop after this many dialogues in total, leaving a checkpoint.
        #[arg(long, value_name = "N")]
        stop_after: Option<usize>,
    },
    /// Evaluate a seeker and a provider with learning off.
    Evaluate {
        /// Seeker then provider policy file; `rule` selects the scripted agent.
        #[arg(long, num_args = 2, value_names = ["SEEKER", "PROVIDER"], required = true)]
        policies: Vec<String>,
    },
    /// Repeated train-then-evaluate cycles.
    Experiment,
    /// Talk to a trained agent in the terminal.
    Chat {
        /// The agent's policy file; the human plays the other role.
        #[arg(long, num_args = 1, value_name = "PATH", required = true)]
        policies: Vec<PathBuf>,
    },
    /// Matrix-game convergence checks.
    Validate,
    /// Max-reference BLEU over a template corpus.
    NlgEval {
        #[arg(long, value_enum, default_value = "provider")]
        role: RoleArg,
        /// Reference templates; the configured or bundled corpus when absent.
        #[arg(long, value_name = "PATH")]
        templates: Option<PathBuf>,
        /// `mr<TAB>candidate` lines; leave-one-out over the references when absent.
        #[arg(long, value_name = "PATH")]
        candidates: Option<PathBuf>,
    },
    /// NLU precision, recall and F1 on generated utterances.
    NluEval {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Sets all four noise probabilities; the configured noise when absent.
        #[arg(long, value_name = "P")]
        noise: Option<f64>,
    },
}

enum Failure {
    Setup(Error),
    Run(Error),
    Checks,
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply_env();
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = common.mode {
        cfg.set_mode(match mode {
            Mode::Acts => ChannelMode::Acts,
            Mode::Language => ChannelMode::Language,
        });
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_report<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, Error> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::io(path, source)
}

fn agent_spec(arg: &str, world: &World, role: Role) -> Result<AgentSpec, Error> {
    if arg == "rule" {
        Ok(AgentSpec::Rule)
    } else {
        AgentSpec::load(arg, world, role)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli.common).map_err(Failure::Setup)?;
    let out = cfg.out_dir.clone();
    match cli.command {
        Command::Validate => {
            let report = harness::validate(&cfg).map_err(Failure::Run)?;
            for c in &report.checks {
                let tag = if c.pass { "pass" } else { "FAIL" };
                println!(
                    "{tag} {}: {:.4} {} {}",
                    c.name, c.value, c.comparison, c.threshold
                );
            }
            let path = write_report(&out, VALIDATION_REPORT_FILE, &report).map_err(Failure::Run)?;
            println!("report: {}", path.display());
            if !report.passed() {
                return Err(Failure::Checks);
            }
        }
        Command::NluEval { n, noise } => {
            let world = cfg.world().map_err(Failure::Setup)?;
            let noise = noise.map_or(cfg.episode.noise, NoiseConfig::uniform);
            let report = harness::nlu_eval(&world, n, &noise, cfg.seed).map_err(Failure::Run)?;
            for (role, s) in [("seeker", &report.seeker), ("provider", &report.provider)] {
                println!(
                    "{role}: intent F1 {:.4}, slot F1 {:.4}, frame F1 {:.4}",
                    s.intent_f1, s.slot_f1, s.frame_f1
                );
            }
            write_report(&out, NLU_REPORT_FILE, &report).map_err(Failure::Run)?;
        }
        Command::NlgEval {
            role,
            templates,
            candidates,
        } => {
            let role = Role::from(role);
            let references = match templates {
                Some(p) => TemplateStore::load(role, p).map_err(Failure::Setup)?,
                None => cfg.world().map_err(Failure::Setup)?.templates(role).clone(),
            };
            let report = match candidates {
                Some(p) => {
                    let text =
                        fs::read_to_string(&p).map_err(|e| Failure::Setup(io_error(&p, e)))?;
                    let pairs = harness::parse_candidates(&text, &p.display().to_string())
                        .map_err(Failure::Setup)?;
                    harness::nlg_eval(&references, &pairs)
                }
                None => harness::nlg_self_eval(&references),
            }
            .map_err(Failure::Run)?;
            println!(
                "{} candidates: mean BLEU {:.4}, min {:.4}",
                report.n_candidates, report.mean_bleu, report.min_bleu
            );
            write_report(&out, NLG_REPORT_FILE, &report).map_err(Failure::Run)?;
        }
        Command::Train { stop_after } => {
            let world = cfg.world().map_err(Failure::Setup)?;
            let t = harness::train(&cfg, &world, &out, stop_after).map_err(Failure::Run)?;
            if t.finished {
                println!(
                    "trained {} dialogues: windowed success {:.3}, turns {:.2}",
                    t.completed, t.report.success_rate, t.report.avg_turns
                );
                println!(
                    "policies: {} {}",
                    t.seeker_policy.display(),
                    t.provider_policy.display()
                );
                println!("report: {}", out.join(TRAIN_REPORT_FILE).display());
            } else {
                println!("stopped after {} dialogues; rerun to resume", t.completed);
            }
        }
        Command::Evaluate { policies } => {
            let world = cfg.world().map_err(Failure::Setup)?;
            let seeker = agent_spec(&policies[0], &world, Role::Seeker).map_err(Failure::Setup)?;
            let provider =
                agent_spec(&policies[1], &world, Role::Provider).map_err(Failure::Setup)?;
            let report = harness::evaluate_to_dir(&cfg, &world, &seeker, &provider, &out)
                .map_err(Failure::Run)?;
            println!(
                "success {:.3} (± {:.3}), seeker return {:.2}, provider return {:.2}, turns {:.2}",
                report.mean.success_rate,
                report.spread.success_rate,
                report.mean.avg_return.seeker,
                report.mean.avg_return.provider,
                report.mean.avg_turns
            );
            println!("report: {}", out.join(EVAL_REPORT_FILE).display());
        }
        Command::Experiment => {
            let world = cfg.world().map_err(Failure::Setup)?;
            let report = harness::run_experiment(&cfg, &world, &out).map_err(Failure::Run)?;
            for (r, c) in report.cycles.iter().enumerate() {
                println!("cycle {r}: success {:.3}", c.eval.success_rate);
            }
            println!(
                "mean success {:.3} (± {:.3})",
                report.mean.success_rate, report.spread.success_rate
            );
            println!("report: {}", out.join(EXPERIMENT_REPORT_FILE).display());
        }
        Command::Chat { policies } => {
            let world = cfg.world().map_err(Failure::Setup)?;
            let policy = PolicyFile::read(&policies[0]).map_err(Failure::Setup)?;
            fs::create_dir_all(&out).map_err(|e| Failure::Setup(io_error(&out, e)))?;
            let path = out.join(CHAT_TRANSCRIPT_FILE);
            let file = fs::File::create(&path).map_err(|e| Failure::Setup(io_error(&path, e)))?;
            let stdin = io::stdin();
            harness::chat(
                &cfg,
                &world,
                &policy,
                stdin.lock(),
                io::stdout(),
                BufWriter::new(file),
            )
            .map_err(Failure::Run)?;
            println!("transcript: {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Setup(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Checks) => {
            eprintln!("error: validation checks failed");
            ExitCode::from(2)
        }
    }
}
