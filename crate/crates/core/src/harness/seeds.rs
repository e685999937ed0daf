use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::game::EpisodeRngs;

/// Named random streams derived from one root seed. A stream is keyed by a
/// name and an index path, so draws from one never shift another.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seeds {
    pub root: u64,
}

impl Seeds {
    pub fn new(root: u64) -> Self {
        Seeds { root }
    }

    pub fn stream(&self, name: &str, index: &[u64]) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(self.root.to_le_bytes());
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        for i in index {
            h.update(i.to_le_bytes());
        }
        ChaCha8Rng::from_seed(h.finalize().into())
    }

    /// The goal, exploration, noise and template streams of one episode.
    pub fn episode(&self, phase: &str, index: &[u64]) -> (ChaCha8Rng, EpisodeRngs) {
        let s = |name: &str| self.stream(&format!("{phase}/{name}"), index);
        (
            s("goal"),
            EpisodeRngs {
                seeker: s("explore/seeker"),
                provider: s("explore/provider"),
                noise: s("noise"),
                template: s("template"),
            },
        )
    }
}
