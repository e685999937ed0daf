use std::fs;
use std::io::BufReader;
use std::path::Path;

use sha2::{Digest, Sha256};

use duologue::acts::{Frame, Intent, PolicyAction, Role};
use duologue::game::{read_transcripts, TranscriptLine, World};
use duologue::harness::{
    chat, evaluate, evaluate_to_dir, run_experiment, train, transcript_path, validate, AgentSpec,
    ExperimentConfig, CHECKPOINT_FILE, CURVE_FILE, EVAL_REPORT_FILE, QUIT,
};
use duologue::marl::{LearnerConfig, LearnerTable, PolicyFile};
use duologue::tracking::ProviderState;
use duologue::Error;

fn small() -> ExperimentConfig {
    ExperimentConfig {
        n_train_dialogues: 600,
        n_eval_dialogues: 100,
        n_repetitions: 2,
        checkpoint_every: 100,
        curve_window: 100,
        resume_every: 150,
        ..Default::default()
    }
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

#[test]
fn training_is_reproducible() {
    let cfg = small();
    let world = cfg.world().unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ta = train(&cfg, &world, a.path(), None).unwrap();
    let tb = train(&cfg, &world, b.path(), None).unwrap();
    assert!(ta.finished && tb.finished);
    for f in [CURVE_FILE, "seeker.policy.json", "provider.policy.json"] {
        assert_eq!(digest(&a.path().join(f)), digest(&b.path().join(f)), "{f}");
    }
    assert!(!a.path().join(CHECKPOINT_FILE).exists());
}

#[test]
fn curve_rows_advance_monotonically() {
    let cfg = small();
    let world = cfg.world().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let t = train(&cfg, &world, dir.path(), None).unwrap();
    let rows = duologue::harness::read_curve(&fs::read_to_string(t.curve).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.windows(2).all(|w| w[0].dialogue < w[1].dialogue));
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.success_rate)));
}

#[test]
fn interrupted_training_resumes_to_the_same_result() {
    let cfg = small();
    let world = cfg.world().unwrap();
    let (full, split) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    train(&cfg, &world, full.path(), None).unwrap();
    let partial = train(&cfg, &world, split.path(), Some(320)).unwrap();
    assert!(!partial.finished);
    assert!(split.path().join(CHECKPOINT_FILE).exists());
    let resumed = train(&cfg, &world, split.path(), None).unwrap();
    assert_eq!(resumed.resumed_from, Some(320));
    assert!(resumed.finished);
    for f in [
        CURVE_FILE,
        "seeker.policy.json",
        "provider.policy.json",
        "train_report.json",
    ] {
        assert_eq!(
            digest(&full.path().join(f)),
            digest(&split.path().join(f)),
            "{f}"
        );
    }
}

#[test]
fn resuming_under_a_different_config_is_refused() {
    let cfg = small();
    let world = cfg.world().unwrap();
    let dir = tempfile::tempdir().unwrap();
    train(&cfg, &world, dir.path(), Some(200)).unwrap();
    let other = ExperimentConfig {
        seed: 99,
        ..small()
    };
    assert!(train(&other, &world, dir.path(), None).is_err());
}

#[test]
fn evaluation_leaves_policy_files_untouched_and_reports_consistent_returns() {
    let cfg = small();
    let world = cfg.world().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let t = train(&cfg, &world, &dir.path().join("train"), None).unwrap();
    let before = (digest(&t.seeker_policy), digest(&t.provider_policy));
    let s = AgentSpec::load(&t.seeker_policy, &world, Role::Seeker).unwrap();
    let p = AgentSpec::load(&t.provider_policy, &world, Role::Provider).unwrap();
    let out = dir.path().join("eval");
    let report = evaluate_to_dir(&cfg, &world, &s, &p, &out).unwrap();
    assert_eq!(
        before,
        (digest(&t.seeker_policy), digest(&t.provider_policy))
    );
    assert!(out.join(EVAL_REPORT_FILE).is_file());

    for (r, rep) in report.repetitions.iter().enumerate() {
        let file = fs::File::open(transcript_path(&out, r)).unwrap();
        let episodes = read_transcripts(BufReader::new(file)).unwrap();
        assert_eq!(episodes.len(), cfg.n_eval_dialogues);
        let n = episodes.len() as f64;
        let rebuilt = |role: Role| {
            episodes
                .iter()
                .map(|(_, o)| {
                    let turns: f64 = o.transcript.iter().map(|t| t.rewards[role.index()]).sum();
                    turns
                        + match role {
                            Role::Seeker => o.seeker_terminal_reward,
                            Role::Provider => o.provider_terminal_reward,
                        }
                })
                .sum::<f64>()
                / n
        };
        assert!((rebuilt(Role::Seeker) - rep.avg_return.seeker).abs() < 1e-9);
        assert!((rebuilt(Role::Provider) - rep.avg_return.provider).abs() < 1e-9);
        let successes = episodes.iter().filter(|(_, o)| o.objective_success).count() as f64;
        assert!((successes / n - rep.success_rate).abs() < 1e-12);
    }
}

#[test]
fn policies_for_the_wrong_role_are_refused() {
    let cfg = small();
    let world = cfg.world().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let t = train(&cfg, &world, dir.path(), None).unwrap();
    let err = AgentSpec::load(&t.seeker_policy, &world, Role::Provider).unwrap_err();
    assert!(matches!(err, Error::FingerprintMismatch { .. }), "{err}");
}

#[test]
fn rule_pair_evaluates_perfectly_on_a_clean_channel() {
    let mut cfg = small();
    cfg.set_noise(0.0);
    let world = cfg.world().unwrap();
    let (report, _) = evaluate(&cfg, &world, &AgentSpec::Rule, &AgentSpec::Rule).unwrap();
    assert_eq!(report.mean.success_rate, 1.0);
    assert_eq!(report.spread.success_rate, 0.0);
}

#[test]
fn evaluation_is_identical_across_reruns() {
    let cfg = small();
    let world = cfg.world().unwrap();
    let (a, _) = evaluate(&cfg, &world, &AgentSpec::Rule, &AgentSpec::Rule).unwrap();
    let (b, _) = evaluate(&cfg, &world, &AgentSpec::Rule, &AgentSpec::Rule).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn experiment_runs_one_directory_per_cycle() {
    let cfg = ExperimentConfig {
        n_train_dialogues: 200,
        transcripts: false,
        ..small()
    };
    let world = cfg.world().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&cfg, &world, dir.path()).unwrap();
    assert_eq!(report.cycles.len(), 2);
    assert_ne!(report.cycles[0].seed, report.cycles[1].seed);
    for r in 0..2 {
        assert!(dir
            .path()
            .join(format!("cycle-{r}/seeker.policy.json"))
            .is_file());
    }
}

#[test]
fn validation_reports_are_reproducible() {
    let mut cfg = ExperimentConfig::default();
    cfg.validate.steps = 20_000;
    let a = validate(&cfg).unwrap();
    let b = validate(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.checks.len(), 4);
}

/// A provider that greets, then asks for the area.
fn scripted_provider(world: &World) -> PolicyFile {
    let space = world.space(Role::Provider);
    let mut table = LearnerTable::new(space.len());
    let mut state = ProviderState::new(&world.db);
    let one_hot = |table: &mut LearnerTable, s, action: PolicyAction| {
        let a = space.index_of(&action).unwrap();
        let e = table.entry_mut(s);
        e.pi = (0..space.len())
            .map(|i| if i == a { 1.0 } else { 0.0 })
            .collect();
    };
    one_hot(
        &mut table,
        state.encode(world.domain()),
        PolicyAction::bare(Intent::Welcomemsg),
    );
    state.record_own(&[Frame::bare(Intent::Welcomemsg)]);
    state.update(&[Frame::inform("pricerange", "cheap")], &world.db);
    one_hot(
        &mut table,
        state.encode(world.domain()),
        PolicyAction::slotted(Intent::Request, "area"),
    );
    PolicyFile::new(space, LearnerConfig::default(), table)
}

fn transcript_lines(bytes: &[u8]) -> Vec<TranscriptLine> {
    String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn chat_answers_a_cheap_restaurant_with_an_area_request() {
    let cfg = ExperimentConfig::default();
    let world = World::bundled();
    let policy = scripted_provider(&world);
    let (mut out, mut log) = (Vec::new(), Vec::new());
    let input = format!("cheap restaurant\n{QUIT}\n");
    let summary = chat(&cfg, &world, &policy, input.as_bytes(), &mut out, &mut log).unwrap();
    assert!(summary.quit);
    assert_eq!(summary.not_understood, 0);
    let text = String::from_utf8(out).unwrap();
    assert!(
        text.contains("provider> what part of town do you have in mind ?"),
        "{text}"
    );
    let lines = transcript_lines(&log);
    assert!(matches!(lines[0], TranscriptLine::Header { .. }));
    assert_eq!(lines.len(), 4);
    let TranscriptLine::Turn(human) = &lines[2] else {
        panic!()
    };
    assert_eq!(human.speaker, Role::Seeker);
    assert_eq!(human.understood, vec![Frame::inform("pricerange", "cheap")]);
}

#[test]
fn chat_logs_gibberish_as_not_understood() {
    let cfg = ExperimentConfig::default();
    let world = World::bundled();
    let policy = scripted_provider(&world);
    let (mut out, mut log) = (Vec::new(), Vec::new());
    let summary = chat(
        &cfg,
        &world,
        &policy,
        "qwzx blorp\n".as_bytes(),
        &mut out,
        &mut log,
    )
    .unwrap();
    assert_eq!(summary.not_understood, 1);
    assert!(summary.quit);
    assert!(String::from_utf8(out).unwrap().contains("(not understood)"));
    let lines = transcript_lines(&log);
    let TranscriptLine::Turn(t) = &lines[2] else {
        panic!()
    };
    assert!(t.understood.is_empty());
    assert_eq!(t.utterance.as_deref(), Some("qwzx blorp"));
}

#[test]
fn chat_refuses_a_policy_for_another_action_space() {
    let cfg = ExperimentConfig::default();
    let world = World::bundled();
    let mut policy = scripted_provider(&world);
    policy.action_space_fingerprint = "0000".into();
    let err = chat(&cfg, &world, &policy, "".as_bytes(), Vec::new(), Vec::new()).unwrap_err();
    assert!(matches!(err, Error::FingerprintMismatch { .. }));
}
