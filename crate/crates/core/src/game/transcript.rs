//! JSON-lines transcripts: a header line, one line per turn, and a final
//! outcome line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::episode::{EpisodeOutcome, TurnRecord};
use crate::error::{Error, Result};

pub const TRANSCRIPT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TranscriptLine {
    Header { version: u32, episode: u64 },
    Turn(TurnRecord),
    Outcome(EpisodeOutcome),
}

/// Writes `outcome` as a transcript: its turns, then the outcome without them.
pub fn write_transcript<W: Write>(
    out: &mut W,
    episode: u64,
    outcome: &EpisodeOutcome,
) -> Result<()> {
    let mut line = |l: &TranscriptLine| -> Result<()> {
        serde_json::to_writer(&mut *out, l)?;
        out.write_all(b"\n")
            .map_err(|e| Error::io("<transcript>", e))
    };
    line(&TranscriptLine::Header {
        version: TRANSCRIPT_FORMAT_VERSION,
        episode,
    })?;
    for turn in &outcome.transcript {
        line(&TranscriptLine::Turn(turn.clone()))?;
    }
    line(&TranscriptLine::Outcome(EpisodeOutcome {
        transcript: Vec::new(),
        ..outcome.clone()
    }))
}

/// Reads every episode from a transcript stream, reattaching turns to their outcome.
pub fn read_transcripts<R: BufRead>(input: R) -> Result<Vec<(u64, EpisodeOutcome)>> {
    let mut episodes = Vec::new();
    let mut current: Option<(u64, Vec<TurnRecord>)> = None;
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<transcript>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: "<transcript>".into(),
            line: n as u64 + 1,
            message,
        };
        let parsed: TranscriptLine =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        match (parsed, current.as_mut()) {
            (TranscriptLine::Header { version, episode }, _) => {
                if version != TRANSCRIPT_FORMAT_VERSION {
                    return Err(Error::Version {
                        what: "transcript",
                        expected: TRANSCRIPT_FORMAT_VERSION,
                        found: version,
                    });
                }
                current = Some((episode, Vec::new()));
            }
            (TranscriptLine::Turn(t), Some((_, turns))) => turns.push(t),
            (TranscriptLine::Outcome(o), Some(_)) => {
                let (episode, turns) = current.take().expect("checked above");
                episodes.push((
                    episode,
                    EpisodeOutcome {
                        transcript: turns,
                        ..o
                    },
                ));
            }
            (_, None) => return Err(parse_err("turn or outcome before a header".into())),
        }
    }
    Ok(episodes)
}
