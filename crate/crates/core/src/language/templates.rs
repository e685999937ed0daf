use std::collections::HashMap;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::acts::{frames_to_mr, mr_to_frames, Frame, Role};
use crate::error::{Error, Result};
use crate::ontology::DONTCARE_SURFACE;

const SEEKER_TSV: &str = include_str!("../../data/seeker_templates.tsv");
const PROVIDER_TSV: &str = include_str!("../../data/provider_templates.tsv");

/// Joins per-frame realizations when an MR has no template of its own.
pub const SEGMENT_SEPARATOR: &str = " ; ";

/// Delexicalized templates of one role, keyed by MR string, in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateStore {
    pub role: Role,
    entries: Vec<(String, Vec<String>)>,
    index: HashMap<String, usize>,
}

/// Tokens of a template: literal words and `<slot>` tags.
pub(crate) fn template_tags(template: &str) -> impl Iterator<Item = &str> {
    template
        .split_whitespace()
        .filter_map(|t| t.strip_prefix('<').and_then(|t| t.strip_suffix('>')))
}

impl TemplateStore {
    pub fn bundled(role: Role) -> Self {
        let text = match role {
            Role::Seeker => SEEKER_TSV,
            Role::Provider => PROVIDER_TSV,
        };
        Self::parse(role, text, "<bundled>").expect("bundled templates parse")
    }

    pub fn load(role: Role, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(role, &text, &path.display().to_string())
    }

    /// One `MR<TAB>template` record per line; `#` starts a comment line.
    pub fn parse(role: Role, text: &str, origin: &str) -> Result<Self> {
        let mut store = TemplateStore {
            role,
            entries: Vec::new(),
            index: HashMap::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            let err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: line_no,
                message,
            };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (mr, template) = line
                .split_once('\t')
                .ok_or_else(|| err("expected `MR<TAB>template`".into()))?;
            let frames = mr_to_frames(mr).map_err(|e| err(e.to_string()))?;
            if frames.is_empty() {
                return Err(err("empty MR".into()));
            }
            let template = normalize(template);
            if template.contains(SEGMENT_SEPARATOR.trim()) {
                return Err(err(format!(
                    "templates may not contain `{}`",
                    SEGMENT_SEPARATOR.trim()
                )));
            }
            let mr_slots: Vec<&str> = frames
                .iter()
                .flat_map(|f| f.args.iter().map(|a| a.slot.as_str()))
                .collect();
            for tag in template_tags(&template) {
                let in_mr = mr_slots.iter().filter(|s| **s == tag).count();
                let in_template = template_tags(&template).filter(|t| *t == tag).count();
                if in_template > in_mr {
                    return Err(err(format!("template tag <{tag}> is not in the MR")));
                }
            }
            store.insert(frames_to_mr(&frames), template);
        }
        Ok(store)
    }

    pub fn insert(&mut self, mr: String, template: String) {
        match self.index.get(&mr) {
            Some(&i) => {
                if !self.entries[i].1.contains(&template) {
                    self.entries[i].1.push(template);
                }
            }
            None => {
                self.index.insert(mr.clone(), self.entries.len());
                self.entries.push((mr, vec![template]));
            }
        }
    }

    pub fn templates(&self, mr: &str) -> Option<&[String]> {
        self.index.get(mr).map(|&i| self.entries[i].1.as_slice())
    }

    pub fn contains(&self, mr: &str) -> bool {
        self.index.contains_key(mr)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(m, t)| (m.as_str(), t.as_slice()))
    }

    /// Realizes frames as text: a uniformly chosen template for their MR,
    /// lexicalized with the frame values. Uncovered MRs fall back to
    /// per-frame realizations joined by [`SEGMENT_SEPARATOR`]. Empty frames
    /// give empty text.
    pub fn generate<R: Rng + ?Sized>(&self, frames: &[Frame], rng: &mut R) -> String {
        if frames.is_empty() {
            return String::new();
        }
        let mr = frames_to_mr(frames);
        if let Some(templates) = self.templates(&mr) {
            let template = templates.choose(rng).expect("entries are non-empty");
            return lexicalize(template, frames);
        }
        log::debug!("{} NLG coverage miss: {mr}", self.role);
        frames
            .iter()
            .map(|f| {
                let single = std::slice::from_ref(f);
                match self.templates(&frames_to_mr(single)) {
                    Some(templates) => {
                        lexicalize(templates.choose(rng).expect("non-empty"), single)
                    }
                    None => generic(f),
                }
            })
            .collect::<Vec<_>>()
            .join(SEGMENT_SEPARATOR)
    }
}

/// Lowercases and collapses whitespace.
pub fn normalize(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Substitutes the k-th `<slot>` tag with the value of the k-th argument
/// naming that slot.
pub fn lexicalize(template: &str, frames: &[Frame]) -> String {
    let mut used: HashMap<&str, usize> = HashMap::new();
    template
        .split_whitespace()
        .map(
            |token| match token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
                Some(slot) => {
                    let k = used.entry(slot).or_default();
                    let arg = frames
                        .iter()
                        .flat_map(|f| f.args.iter())
                        .filter(|a| a.slot == slot)
                        .nth(*k);
                    *k += 1;
                    match arg.and_then(|a| a.value.as_deref()) {
                        Some("dontcare") => DONTCARE_SURFACE.to_string(),
                        Some(v) => v.to_string(),
                        None => slot.to_string(),
                    }
                }
                None => token.to_string(),
            },
        )
        .collect::<Vec<_>>()
        .join(" ")
}

fn generic(frame: &Frame) -> String {
    let mut parts = vec![frame.intent.as_str().to_string()];
    for a in &frame.args {
        parts.push(a.slot.clone());
        if let Some(v) = &a.value {
            parts.push(v.clone());
        }
    }
    parts.join(" ")
}
