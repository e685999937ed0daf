use std::collections::HashMap;

use regex::Regex;

use super::templates::{normalize, TemplateStore, SEGMENT_SEPARATOR};
use crate::acts::{mr_to_frames, Frame, Intent, Role};
use crate::error::Result;
use crate::ontology::{Domain, DONTCARE_SURFACE};

#[derive(Clone, Debug)]
struct Pattern {
    regex: Regex,
    frames: Vec<Frame>,
    captures: Vec<String>,
    literal_tokens: usize,
}

/// Rule-based understanding: the inverse of one role's template store.
///
/// An utterance is matched in full against every template; the most
/// specific match (most literal tokens, then earliest in the store) wins and
/// slot values are read from the tag positions. Informable tags only accept
/// that slot's values (or the dontcare surface form).
#[derive(Clone, Debug)]
pub struct RuleNlu {
    /// Role whose utterances this NLU reads.
    pub role: Role,
    patterns: Vec<Pattern>,
    dontcare: String,
}

fn strip_terminal(text: &str) -> &str {
    text.trim_end_matches(|c: char| c == '?' || c == '.' || c == '!' || c.is_whitespace())
}

impl RuleNlu {
    pub fn new(store: &TemplateStore, domain: &Domain) -> Result<Self> {
        let mut slot_patterns: HashMap<String, String> = HashMap::new();
        for slot in domain.informable_slots() {
            let mut values: Vec<String> = domain.values(slot).unwrap_or_default().to_vec();
            values.push(DONTCARE_SURFACE.to_string());
            values.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
            let alternation: Vec<String> = values.iter().map(|v| regex::escape(v)).collect();
            slot_patterns.insert(slot.to_string(), format!("({})", alternation.join("|")));
        }

        let mut patterns = Vec::new();
        for (mr, templates) in store.entries() {
            let frames = mr_to_frames(mr)?;
            for template in templates {
                let mut parts = Vec::new();
                let mut captures = Vec::new();
                let mut literal_tokens = 0;
                for token in strip_terminal(template).split_whitespace() {
                    match token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
                        Some(slot) => {
                            parts.push(
                                slot_patterns
                                    .get(slot)
                                    .cloned()
                                    .unwrap_or_else(|| "([^;]+?)".to_string()),
                            );
                            captures.push(slot.to_string());
                        }
                        None => {
                            literal_tokens += 1;
                            parts.push(regex::escape(token));
                        }
                    }
                }
                let regex = Regex::new(&format!("^{}$", parts.join(" ")))
                    .expect("escaped template compiles");
                patterns.push(Pattern {
                    regex,
                    frames: frames.clone(),
                    captures,
                    literal_tokens,
                });
            }
        }
        Ok(RuleNlu {
            role: store.role,
            patterns,
            dontcare: domain.dontcare.clone(),
        })
    }

    /// Frames conveyed by an utterance; empty when nothing matches.
    pub fn understand(&self, text: &str) -> Vec<Frame> {
        let text = normalize(text);
        if text.is_empty() {
            return Vec::new();
        }
        if let Some(frames) = self.match_full(strip_terminal(&text)) {
            return frames;
        }
        if text.contains(SEGMENT_SEPARATOR) {
            return text
                .split(SEGMENT_SEPARATOR)
                .filter_map(|seg| self.match_full(strip_terminal(seg)))
                .flatten()
                .collect();
        }
        Vec::new()
    }

    fn match_full(&self, text: &str) -> Option<Vec<Frame>> {
        let mut best: Option<(&Pattern, regex::Captures<'_>)> = None;
        for p in &self.patterns {
            if best
                .as_ref()
                .is_some_and(|(b, _)| b.literal_tokens >= p.literal_tokens)
            {
                continue;
            }
            if let Some(caps) = p.regex.captures(text) {
                best = Some((p, caps));
            }
        }
        let (pattern, caps) = best?;
        let captured: Vec<(&str, &str)> = pattern
            .captures
            .iter()
            .enumerate()
            .map(|(i, slot)| (slot.as_str(), caps.get(i + 1).map_or("", |m| m.as_str())))
            .collect();

        let mut used: HashMap<&str, usize> = HashMap::new();
        let mut frames = pattern.frames.clone();
        for frame in &mut frames {
            let is_request = frame.intent == Intent::Request;
            for arg in &mut frame.args {
                if is_request {
                    continue;
                }
                let k = used.entry(arg.slot.as_str()).or_default();
                let value = captured
                    .iter()
                    .filter(|(s, _)| *s == arg.slot)
                    .nth(*k)
                    .map(|(_, v)| *v);
                *k += 1;
                arg.value = Some(match value {
                    Some(v) if v != DONTCARE_SURFACE => v.to_string(),
                    _ => self.dontcare.clone(),
                });
            }
        }
        Some(frames)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::Domain;

    fn nlu(role: Role) -> RuleNlu {
        RuleNlu::new(&TemplateStore::bundled(role), &Domain::restaurants()).unwrap()
    }

    #[test]
    fn understands_phone_request() {
        assert_eq!(
            nlu(Role::Seeker).understand("what is the phone"),
            vec![Frame::request("phone")]
        );
    }

    #[test]
    fn understands_post_code_with_punctuation_in_value() {
        assert_eq!(
            nlu(Role::Provider).understand("the post code is c.b 4, 1 u.y ."),
            vec![Frame::inform("postcode", "c.b 4, 1 u.y")]
        );
    }

    #[test]
    fn sample_dialogue_surface_forms() {
        let seeker = nlu(Role::Seeker);
        assert_eq!(
            seeker.understand("cheap restaurant"),
            vec![Frame::inform("pricerange", "cheap")]
        );
        assert_eq!(
            seeker.understand("italian food"),
            vec![Frame::inform("food", "italian")]
        );
        assert_eq!(
            seeker.understand("phone number"),
            vec![Frame::request("phone")]
        );
        assert_eq!(
            seeker.understand("good bye"),
            vec![Frame::bare(Intent::Bye)]
        );
        assert_eq!(
            seeker.understand("i do not care"),
            vec![Frame::inform("this", "dontcare")]
        );
        assert_eq!(
            seeker.understand("any part of town"),
            vec![Frame::inform("area", "dontcare")]
        );
        let provider = nlu(Role::Provider);
        assert_eq!(
            provider.understand("what part of town do you have in mind?"),
            vec![Frame::request("area")]
        );
        assert_eq!(
            provider.understand("the phone number is 01223 323737 ."),
            vec![Frame::inform("phone", "01223 323737")]
        );
    }

    #[test]
    fn gibberish_yields_nothing() {
        assert!(nlu(Role::Seeker)
            .understand("colourless green ideas")
            .is_empty());
        assert!(nlu(Role::Seeker).understand("   ").is_empty());
        // a food value in an area slot does not parse
        assert!(nlu(Role::Seeker)
            .understand("italian part of town")
            .is_empty());
    }

    #[test]
    fn specific_template_beats_generic_one() {
        // "<name> is in the <pricerange> price range" also matches with name = "it"
        assert_eq!(
            nlu(Role::Provider).understand("it is in the cheap price range"),
            vec![Frame::inform("pricerange", "cheap")]
        );
    }

    #[test]
    fn segments_are_understood_separately() {
        assert_eq!(
            nlu(Role::Provider)
                .understand("the phone number is 01223 1 . ; sure , it is on 1 mill road"),
            vec![
                Frame::inform("phone", "01223 1"),
                Frame::inform("addr", "1 mill road")
            ]
        );
    }
}
