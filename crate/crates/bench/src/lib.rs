//! Shared fixtures for the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use duologue::game::{EpisodeRngs, World};
use duologue::ontology::{sample_goal, Goal, GoalConfig};

/// Episode streams derived from a single integer.
pub fn rngs(seed: u64) -> EpisodeRngs {
    EpisodeRngs {
        seeker: ChaCha8Rng::seed_from_u64(seed),
        provider: ChaCha8Rng::seed_from_u64(seed ^ 0x9e37),
        noise: ChaCha8Rng::seed_from_u64(seed ^ 0x7f4a),
        template: ChaCha8Rng::seed_from_u64(seed ^ 0x2c1b),
    }
}

pub fn goals(world: &World, n: usize) -> Vec<Goal> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..n)
        .map(|_| {
            sample_goal(world.domain(), &world.db, &mut rng, &GoalConfig::default())
                .expect("bundled goals")
        })
        .collect()
}
