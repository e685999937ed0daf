//! Channel-level utilities: random frame lists, and NLU and NLG metric runs.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::seeds::Seeds;
use crate::acts::{mr_to_frames, Frame, Intent, Role, THIS_SLOT};
use crate::error::{Error, Result};
use crate::game::World;
use crate::language::{
    apply_noise, bleu_max, score_predictions, NluScores, NoiseConfig, TemplateStore,
};

/// A frame list `role` can say: a random covered MR filled with random
/// values from the channel's pools. Seeker informs may be dontcare.
pub fn random_frames<R: Rng + ?Sized>(world: &World, role: Role, rng: &mut R) -> Vec<Frame> {
    let mrs: Vec<&str> = world.templates(role).entries().map(|(mr, _)| mr).collect();
    let mr = mrs.choose(rng).expect("template store is non-empty");
    let mut frames = mr_to_frames(mr).expect("stored MRs parse");
    let domain = world.domain();
    for frame in &mut frames {
        let intent = frame.intent;
        for arg in &mut frame.args {
            if intent == Intent::Request {
                continue;
            }
            let dontcare_ok = role == Role::Seeker && intent == Intent::Inform;
            let dontcare = arg.slot == THIS_SLOT
                || (dontcare_ok && domain.is_informable(&arg.slot) && rng.random_bool(0.1));
            arg.value = Some(if dontcare {
                domain.dontcare.clone()
            } else {
                world
                    .noise
                    .values(&arg.slot)
                    .choose(rng)
                    .cloned()
                    .unwrap_or_else(|| domain.dontcare.clone())
            });
        }
    }
    frames
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NluEvalReport {
    pub n_utterances: usize,
    pub noise: NoiseConfig,
    /// Scores on utterances spoken by the seeker.
    pub seeker: NluScores,
    /// Scores on utterances spoken by the provider.
    pub provider: NluScores,
}

/// Scores the rule NLU on generated utterances: gold is what the speaker
/// meant, the prediction is what the listener read after the noisy channel.
pub fn nlu_eval(world: &World, n: usize, noise: &NoiseConfig, seed: u64) -> Result<NluEvalReport> {
    noise.validate()?;
    if n == 0 {
        return Err(Error::Config(
            "nlu-eval needs at least one utterance".into(),
        ));
    }
    let seeds = Seeds::new(seed);
    let score = |role: Role| {
        let mut frames_rng = seeds.stream(&format!("nlu/{role}/frames"), &[]);
        let mut noise_rng = seeds.stream(&format!("nlu/{role}/noise"), &[]);
        let mut template_rng = seeds.stream(&format!("nlu/{role}/template"), &[]);
        let rows: Vec<(Vec<Frame>, Vec<Frame>)> = (0..n)
            .map(|_| {
                let gold = random_frames(world, role, &mut frames_rng);
                let noisy = apply_noise(&gold, noise, &world.noise, &mut noise_rng);
                let text = world.templates(role).generate(&noisy, &mut template_rng);
                (gold, world.nlu_for(role).understand(&text))
            })
            .collect();
        score_predictions(&rows)
    };
    Ok(NluEvalReport {
        n_utterances: n,
        noise: *noise,
        seeker: score(Role::Seeker)?,
        provider: score(Role::Provider)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlgEvalReport {
    pub n_candidates: usize,
    pub mean_bleu: f64,
    pub min_bleu: f64,
}

fn summarize(scores: &[f64]) -> Result<NlgEvalReport> {
    if scores.is_empty() {
        return Err(Error::UndefinedMetric("no candidates to score".into()));
    }
    Ok(NlgEvalReport {
        n_candidates: scores.len(),
        mean_bleu: scores.iter().sum::<f64>() / scores.len() as f64,
        min_bleu: scores.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Max-reference BLEU of delexicalized `(mr, candidate)` pairs against `references`.
pub fn nlg_eval(
    references: &TemplateStore,
    candidates: &[(String, String)],
) -> Result<NlgEvalReport> {
    let scores = candidates
        .iter()
        .map(|(mr, text)| bleu_max(text, mr, references))
        .collect::<Result<Vec<_>>>()?;
    summarize(&scores)
}

/// Leave-one-out BLEU of a template corpus: each template is scored
/// against the other templates sharing its MR. MRs with a single template
/// are skipped.
pub fn nlg_self_eval(store: &TemplateStore) -> Result<NlgEvalReport> {
    let mut scores = Vec::new();
    for (mr, templates) in store.entries() {
        if templates.len() < 2 {
            continue;
        }
        for (i, candidate) in templates.iter().enumerate() {
            let mut others = TemplateStore::parse(store.role, "", "leave-one-out")?;
            for (j, t) in templates.iter().enumerate() {
                if j != i {
                    others.insert(mr.to_string(), t.clone());
                }
            }
            scores.push(bleu_max(candidate, mr, &others)?);
        }
    }
    summarize(&scores)
}

/// Reads `mr<TAB>candidate` lines; blank lines and `#` comments are skipped.
pub fn parse_candidates(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, line)| {
            let (mr, cand) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: n as u64 + 1,
                message: "expected `mr<TAB>candidate`".into(),
            })?;
            Ok((mr.trim().to_string(), cand.trim().to_string()))
        })
        .collect()
}
