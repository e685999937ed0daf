use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use duologue::acts::Role;
use duologue::game::{rule_agent, run_episode, ChannelMode, EpisodeConfig, World};
use duologue::harness::random_frames;
use duologue::language::NoiseConfig;
use duologue::marl::{LearnerConfig, LearnerTable, LearningAgent, Transition};
use duologue::tracking::StateId;
use duologue_bench::{goals, rngs};

fn wolf_update(c: &mut Criterion) {
    let cfg = LearnerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let transitions: Vec<Transition> = (0..4096)
        .map(|_| Transition {
            state: StateId(rng.random_range(0..500)),
            action: rng.random_range(0..23),
            reward: rng.random_range(-30.0..20.0),
            next_state: StateId(rng.random_range(0..500)),
            terminal: rng.random_bool(0.1),
        })
        .collect();
    c.bench_function("wolf_phc_learn_4096", |b| {
        b.iter_batched(
            || LearnerTable::new(23),
            |mut t| {
                for tr in &transitions {
                    t.learn(tr, &cfg);
                }
                t
            },
            BatchSize::SmallInput,
        )
    });
}

fn episodes(c: &mut Criterion) {
    let world = World::bundled();
    let goals = goals(&world, 64);
    let mut group = c.benchmark_group("episode");
    for mode in [ChannelMode::Acts, ChannelMode::Language] {
        let cfg = EpisodeConfig {
            channel_mode: mode,
            noise: NoiseConfig::uniform(0.05),
            ..EpisodeConfig::default()
        };
        group.bench_function(format!("rule_pair_{mode}"), |b| {
            let mut i = 0;
            b.iter(|| {
                let mut s = rule_agent(Role::Seeker, world.domain(), world.space(Role::Seeker));
                let mut p = rule_agent(Role::Provider, world.domain(), world.space(Role::Provider));
                let goal = goals[i % goals.len()].clone();
                i += 1;
                run_episode(
                    &mut *s,
                    &mut *p,
                    &world,
                    goal,
                    &cfg,
                    &mut rngs(i as u64),
                    false,
                )
                .unwrap()
            })
        });
        group.bench_function(format!("learning_pair_{mode}"), |b| {
            let mut s =
                LearningAgent::new(world.space(Role::Seeker).len(), LearnerConfig::default());
            let mut p =
                LearningAgent::new(world.space(Role::Provider).len(), LearnerConfig::default());
            let mut i = 0;
            b.iter(|| {
                let goal = goals[i % goals.len()].clone();
                i += 1;
                run_episode(
                    &mut s,
                    &mut p,
                    &world,
                    goal,
                    &cfg,
                    &mut rngs(i as u64),
                    true,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn channel(c: &mut Criterion) {
    let world = World::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let utterances: Vec<(Role, String)> = (0..256)
        .map(|i| {
            let role = if i % 2 == 0 {
                Role::Seeker
            } else {
                Role::Provider
            };
            let frames = random_frames(&world, role, &mut rng);
            (role, world.templates(role).generate(&frames, &mut rng))
        })
        .collect();
    c.bench_function("nlu_understand_256", |b| {
        b.iter(|| {
            utterances
                .iter()
                .map(|(role, text)| world.nlu_for(*role).understand(text).len())
                .sum::<usize>()
        })
    });
}

criterion_group!(benches, wolf_update, episodes, channel);
criterion_main!(benches);
