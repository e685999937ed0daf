use std::io::{BufRead, Write};

use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::seeds::Seeds;
use crate::acts::{Frame, Intent, Role};
use crate::error::{Error, Result};
use crate::game::{
    realize_provider, realize_seeker, TranscriptLine, TurnRecord, World, TRANSCRIPT_FORMAT_VERSION,
};
use crate::marl::PolicyFile;
use crate::ontology::sample_goal;
use crate::tracking::{ProviderState, SeekerState, StateId};

pub const QUIT: &str = "/quit";

enum Tracker {
    Seeker(SeekerState),
    Provider(ProviderState),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChatSummary {
    pub turns: usize,
    pub not_understood: usize,
    /// The human typed `/quit` or closed the input.
    pub quit: bool,
}

/// A terminal session between a human and a trained agent. The agent plays
/// the policy's role; the human plays the other. Human lines pass through
/// the rule NLU; the agent answers greedily through the template NLG.
///
/// Transcript lines follow the episode format without an outcome line.
/// Human turns carry no state or action, and their emitted frames are the
/// ones the NLU read.
pub struct ChatSession<'a> {
    world: &'a World,
    policy: &'a PolicyFile,
    max_turns: usize,
    tracker: Tracker,
    explore: ChaCha8Rng,
    template: ChaCha8Rng,
    turn: usize,
    previous: Option<Vec<Frame>>,
    over: bool,
}

impl<'a> ChatSession<'a> {
    pub fn new(cfg: &ExperimentConfig, world: &'a World, policy: &'a PolicyFile) -> Result<Self> {
        policy.check(world.space(policy.role))?;
        let (mut goal_rng, rngs) = Seeds::new(cfg.seed).episode("chat", &[0]);
        let tracker = match policy.role {
            Role::Seeker => {
                let goal = sample_goal(world.domain(), &world.db, &mut goal_rng, &cfg.goal)?;
                Tracker::Seeker(SeekerState::new(goal))
            }
            Role::Provider => Tracker::Provider(ProviderState::new(&world.db)),
        };
        let explore = match policy.role {
            Role::Seeker => rngs.seeker,
            Role::Provider => rngs.provider,
        };
        Ok(ChatSession {
            world,
            policy,
            max_turns: cfg.episode.max_turns,
            tracker,
            explore,
            template: rngs.template,
            turn: 0,
            previous: None,
            over: false,
        })
    }

    pub fn agent_role(&self) -> Role {
        self.policy.role
    }

    /// The agent's goal, when it plays the seeker.
    pub fn goal(&self) -> Option<String> {
        match &self.tracker {
            Tracker::Seeker(s) => Some(s.goal.to_string()),
            Tracker::Provider(_) => None,
        }
    }

    pub fn is_over(&self) -> bool {
        self.over
    }

    pub fn agent_to_move(&self) -> bool {
        let speaker = if self.turn.is_multiple_of(2) {
            Role::Provider
        } else {
            Role::Seeker
        };
        speaker == self.agent_role()
    }

    fn state(&self) -> StateId {
        let d = self.world.domain();
        match &self.tracker {
            Tracker::Seeker(s) => s.encode(d),
            Tracker::Provider(p) => p.encode(d),
        }
    }

    fn close_turn(&mut self, frames: &[Frame]) {
        let bye = |f: &[Frame]| f.iter().any(|x| x.intent == Intent::Bye);
        if let Some(prev) = &self.previous {
            if (bye(prev) && bye(frames)) || (prev.is_empty() && frames.is_empty()) {
                self.over = true;
            }
        }
        self.turn += 1;
        if self.turn >= self.max_turns {
            self.over = true;
        }
        self.previous = Some(frames.to_vec());
    }

    /// The agent's move: its record and the text it says.
    pub fn agent_turn(&mut self) -> Result<TurnRecord> {
        let role = self.agent_role();
        let state = self.state();
        let space = self.world.space(role);
        let a = self
            .policy
            .table
            .select_action(state, 0.0, &mut self.explore);
        let act = space.get(a).ok_or(Error::ContractViolation {
            agent: role.index(),
            action: a,
            n_actions: space.len(),
        })?;
        let d = self.world.domain();
        let frames = match &mut self.tracker {
            Tracker::Seeker(s) => {
                let f = realize_seeker(act, s, d);
                s.record_own(&f);
                f
            }
            Tracker::Provider(p) => {
                let f = realize_provider(act, p, d);
                p.record_own(&f);
                f
            }
        };
        let text = self
            .world
            .templates(role)
            .generate(&frames, &mut self.template);
        let record = TurnRecord {
            turn: self.turn,
            speaker: role,
            state,
            action: Some(a),
            act: Some(act.to_string()),
            emitted: frames.clone(),
            noisy: frames.clone(),
            utterance: Some(text),
            understood: frames.clone(),
            rewards: [0.0; 2],
        };
        self.close_turn(&frames);
        Ok(record)
    }

    /// The human's move; empty `understood` means the line was not understood.
    pub fn human_turn(&mut self, text: &str) -> TurnRecord {
        let human = self.agent_role().other();
        let understood = self.world.nlu_for(human).understand(text);
        match &mut self.tracker {
            Tracker::Seeker(s) => s.update(&understood, self.world.domain()),
            Tracker::Provider(p) => p.update(&understood, &self.world.db),
        }
        let record = TurnRecord {
            turn: self.turn,
            speaker: human,
            state: StateId(0),
            action: None,
            act: None,
            emitted: understood.clone(),
            noisy: understood.clone(),
            utterance: Some(text.to_string()),
            understood: understood.clone(),
            rewards: [0.0; 2],
        };
        self.close_turn(&understood);
        record
    }
}

/// Runs a session over line-based input and output, appending each turn
/// to `transcript` as it happens.
pub fn chat<R: BufRead, W: Write, T: Write>(
    cfg: &ExperimentConfig,
    world: &World,
    policy: &PolicyFile,
    input: R,
    mut output: W,
    mut transcript: T,
) -> Result<ChatSummary> {
    let mut session = ChatSession::new(cfg, world, policy)?;
    let io = |e| Error::io("<chat>", e);
    let mut log_line = |l: &TranscriptLine| -> Result<()> {
        serde_json::to_writer(&mut transcript, l)?;
        transcript.write_all(b"\n").map_err(io)?;
        transcript.flush().map_err(io)
    };
    log_line(&TranscriptLine::Header {
        version: TRANSCRIPT_FORMAT_VERSION,
        episode: 0,
    })?;
    let agent = session.agent_role();
    writeln!(
        output,
        "You are the {}. Type {QUIT} to leave.",
        agent.other()
    )
    .map_err(io)?;
    if let Some(goal) = session.goal() {
        writeln!(output, "({agent} goal: {goal})").map_err(io)?;
    }
    let mut summary = ChatSummary {
        turns: 0,
        not_understood: 0,
        quit: false,
    };
    let mut lines = input.lines();
    while !session.is_over() {
        if session.agent_to_move() {
            let record = session.agent_turn()?;
            let text = record.utterance.as_deref().unwrap_or_default();
            writeln!(
                output,
                "{agent}> {}",
                if text.is_empty() { "..." } else { text }
            )
            .map_err(io)?;
            log_line(&TranscriptLine::Turn(record))?;
        } else {
            output.flush().map_err(io)?;
            let Some(line) = lines.next() else {
                summary.quit = true;
                break;
            };
            let line = line.map_err(io)?;
            if line.trim() == QUIT {
                summary.quit = true;
                break;
            }
            let record = session.human_turn(line.trim());
            if record.understood.is_empty() && !line.trim().is_empty() {
                summary.not_understood += 1;
                log::warn!("not understood: {line:?}");
                writeln!(output, "(not understood)").map_err(io)?;
            }
            log_line(&TranscriptLine::Turn(record))?;
        }
        summary.turns += 1;
    }
    output.flush().map_err(io)?;
    Ok(summary)
}
