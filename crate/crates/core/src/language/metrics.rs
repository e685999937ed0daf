use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::nlu::RuleNlu;
use crate::acts::{Frame, Intent};
use crate::error::{Error, Result};

/// An utterance paired with its gold frames.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedUtterance {
    pub text: String,
    pub frames: Vec<Frame>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NluScores {
    pub intent_f1: f64,
    pub slot_f1: f64,
    pub frame_f1: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

impl Counts {
    fn add<T: Eq + Hash>(&mut self, gold: Vec<T>, pred: Vec<T>) {
        let mut remaining: HashMap<T, usize> = HashMap::new();
        for g in gold {
            *remaining.entry(g).or_default() += 1;
        }
        for p in pred {
            match remaining.get_mut(&p) {
                Some(k) if *k > 0 => {
                    *k -= 1;
                    self.tp += 1;
                }
                _ => self.fp += 1,
            }
        }
        self.fn_ += remaining.values().sum::<usize>();
    }

    fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            1.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }
}

/// Intent labels of a frame set; requests are labelled per requested slot.
fn intent_labels(frames: &[Frame]) -> Vec<String> {
    let mut labels: Vec<String> = frames
        .iter()
        .flat_map(|f| {
            if f.intent == Intent::Request && !f.args.is_empty() {
                f.args
                    .iter()
                    .map(|a| format!("request_{}", a.slot))
                    .collect::<Vec<_>>()
            } else {
                vec![f.intent.as_str().to_string()]
            }
        })
        .collect();
    labels.sort();
    labels.dedup();
    labels
}

fn slot_items(frames: &[Frame]) -> Vec<(Intent, String, String)> {
    frames
        .iter()
        .flat_map(|f| {
            f.args.iter().filter_map(move |a| {
                a.value
                    .as_ref()
                    .map(|v| (f.intent, a.slot.clone(), v.clone()))
            })
        })
        .collect()
}

/// Micro-averaged F1 over intents (multi-label), valued slot arguments
/// (intent, slot, value) and whole frames.
pub fn score_predictions(rows: &[(Vec<Frame>, Vec<Frame>)]) -> Result<NluScores> {
    if rows.is_empty() {
        return Err(Error::UndefinedMetric("F1 over an empty corpus".into()));
    }
    let (mut intents, mut slots, mut frames) =
        (Counts::default(), Counts::default(), Counts::default());
    for (gold, pred) in rows {
        intents.add(intent_labels(gold), intent_labels(pred));
        slots.add(slot_items(gold), slot_items(pred));
        frames.add(gold.clone(), pred.clone());
    }
    Ok(NluScores {
        intent_f1: intents.f1(),
        slot_f1: slots.f1(),
        frame_f1: frames.f1(),
    })
}

pub fn evaluate_nlu(nlu: &RuleNlu, corpus: &[AnnotatedUtterance]) -> Result<NluScores> {
    let rows: Vec<(Vec<Frame>, Vec<Frame>)> = corpus
        .iter()
        .map(|row| (row.frames.clone(), nlu.understand(&row.text)))
        .collect();
    score_predictions(&rows)
}

/// IOB tags naming both intent and slot (`B-deny_area`) for every valued
/// argument found as a contiguous token span; other tokens are `O`.
pub fn frames_to_tags(utterance: &str, frames: &[Frame]) -> Result<Vec<String>> {
    let tokens: Vec<&str> = utterance.split_whitespace().collect();
    let mut tags = vec!["O".to_string(); tokens.len()];
    for frame in frames {
        for arg in &frame.args {
            let Some(value) = arg.value.as_deref().filter(|v| *v != "dontcare") else {
                continue;
            };
            let span: Vec<&str> = value.split_whitespace().collect();
            let start = (0..=tokens.len().saturating_sub(span.len()))
                .filter(|&i| i + span.len() <= tokens.len() && !span.is_empty())
                .find(|&i| {
                    tokens[i..i + span.len()] == span[..]
                        && tags[i..i + span.len()].iter().all(|t| t == "O")
                })
                .ok_or_else(|| Error::Tagging {
                    intent: frame.intent.to_string(),
                    slot: arg.slot.clone(),
                    value: value.to_string(),
                })?;
            let label = format!("{}_{}", frame.intent, arg.slot);
            for (k, tag) in tags[start..start + span.len()].iter_mut().enumerate() {
                *tag = format!("{}-{label}", if k == 0 { 'B' } else { 'I' });
            }
        }
    }
    Ok(tags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::{Arg, Role};
    use crate::language::templates::TemplateStore;
    use crate::ontology::Domain;

    #[test]
    fn perfect_predictions_score_one() {
        let rows = vec![
            (vec![Frame::request("phone")], vec![Frame::request("phone")]),
            (
                vec![Frame::inform("food", "thai")],
                vec![Frame::inform("food", "thai")],
            ),
        ];
        let s = score_predictions(&rows).unwrap();
        assert_eq!((s.intent_f1, s.slot_f1, s.frame_f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn one_spurious_intent_in_two_rows() {
        // TP = 2, FP = 1, FN = 0 -> 2*2 / (2*2 + 1) = 0.8
        let rows = vec![
            (
                vec![Frame::bare(Intent::Bye)],
                vec![Frame::bare(Intent::Bye), Frame::bare(Intent::Thankyou)],
            ),
            (
                vec![Frame::bare(Intent::Hello)],
                vec![Frame::bare(Intent::Hello)],
            ),
        ];
        assert_eq!(score_predictions(&rows).unwrap().intent_f1, 0.8);
    }

    #[test]
    fn empty_corpus_is_undefined() {
        assert!(matches!(
            score_predictions(&[]),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn row_order_does_not_matter() {
        let a = (
            vec![Frame::inform("food", "thai")],
            vec![Frame::inform("food", "thai"), Frame::request("addr")],
        );
        let b = (vec![Frame::request("phone")], vec![]);
        let x = score_predictions(&[a.clone(), b.clone()]).unwrap();
        let y = score_predictions(&[b, a]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn evaluate_rule_nlu_on_its_own_templates() {
        let store = TemplateStore::bundled(Role::Seeker);
        let nlu = RuleNlu::new(&store, &Domain::restaurants()).unwrap();
        let corpus = vec![
            AnnotatedUtterance {
                text: "cheap restaurant".into(),
                frames: vec![Frame::inform("pricerange", "cheap")],
            },
            AnnotatedUtterance {
                text: "what is the phone".into(),
                frames: vec![Frame::request("phone")],
            },
        ];
        let s = evaluate_nlu(&nlu, &corpus).unwrap();
        assert_eq!(s.frame_f1, 1.0);
    }

    #[test]
    fn multi_intent_tags() {
        let text = "there are no italian restaurants in the south part of the city , but one is available in the west side";
        let frames = vec![
            Frame {
                intent: Intent::Deny,
                args: vec![
                    Arg {
                        slot: "food".into(),
                        value: Some("italian".into()),
                    },
                    Arg {
                        slot: "area".into(),
                        value: Some("south".into()),
                    },
                ],
            },
            Frame::inform("area", "west"),
        ];
        let tags = frames_to_tags(text, &frames).unwrap();
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let tag_of = |w: &str| tags[tokens.iter().position(|t| *t == w).unwrap()].as_str();
        assert_eq!(tag_of("south"), "B-deny_area");
        assert_eq!(tag_of("west"), "B-inform_area");
        assert_eq!(tag_of("italian"), "B-deny_food");
        assert_eq!(tags.iter().filter(|t| *t != "O").count(), 3);
    }

    #[test]
    fn no_values_all_outside() {
        let tags = frames_to_tags("what is the phone", &[Frame::request("phone")]).unwrap();
        assert!(tags.iter().all(|t| t == "O"));
    }

    #[test]
    fn multi_token_value_gets_inside_tag() {
        let tags = frames_to_tags(
            "the phone number is 01223 356555 .",
            &[Frame::inform("phone", "01223 356555")],
        )
        .unwrap();
        assert_eq!(tags[4], "B-inform_phone");
        assert_eq!(tags[5], "I-inform_phone");
    }

    #[test]
    fn missing_value_is_tagging_error() {
        let err = frames_to_tags("hello", &[Frame::inform("food", "thai")]).unwrap_err();
        assert!(matches!(err, Error::Tagging { .. }));
    }
}
