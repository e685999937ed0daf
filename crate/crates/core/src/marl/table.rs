use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, LearnerConfig};
use crate::tracking::StateId;

/// Per-state learner record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub q: Vec<f64>,
    pub pi: Vec<f64>,
    pub pi_avg: Vec<f64>,
    /// C(s): number of learning visits.
    pub visits: u64,
}

impl Entry {
    fn fresh(n_actions: usize) -> Self {
        let u = 1.0 / n_actions as f64;
        Entry {
            q: vec![0.0; n_actions],
            pi: vec![u; n_actions],
            pi_avg: vec![u; n_actions],
            visits: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TableRepr {
    n_actions: usize,
    states: Vec<(StateId, Entry)>,
}

/// Q-values, current policy, average policy and visit counts for every
/// visited state. Unvisited states read as zero Q and uniform policies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "TableRepr", into = "TableRepr")]
pub struct LearnerTable {
    n_actions: usize,
    states: BTreeMap<StateId, Entry>,
    default: Entry,
}

impl From<TableRepr> for LearnerTable {
    fn from(r: TableRepr) -> Self {
        LearnerTable {
            n_actions: r.n_actions,
            states: r.states.into_iter().collect(),
            default: Entry::fresh(r.n_actions),
        }
    }
}

impl From<LearnerTable> for TableRepr {
    fn from(t: LearnerTable) -> Self {
        TableRepr {
            n_actions: t.n_actions,
            states: t.states.into_iter().collect(),
        }
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Moves up to `delta` of probability mass onto the argmax of `q`: every
/// other action loses `min(pi[a], delta / (|A| - 1))`.
pub fn hill_climb(q: &[f64], pi: &mut [f64], delta: f64) {
    let n = pi.len();
    if n < 2 {
        return;
    }
    let best = argmax(q);
    let step = delta / (n - 1) as f64;
    let mut rest = 0.0;
    for (a, p) in pi.iter_mut().enumerate() {
        if a != best {
            *p -= p.min(step);
            rest += *p;
        }
    }
    pi[best] = (1.0 - rest).max(0.0);
}

/// The WoLF step size: `delta_w` when the current policy's expected value
/// strictly beats the average policy's, else `delta_l`.
pub fn wolf_delta(q: &[f64], pi: &[f64], pi_avg: &[f64], delta_w: f64, delta_l: f64) -> f64 {
    let current: f64 = pi.iter().zip(q).map(|(p, v)| p * v).sum();
    let average: f64 = pi_avg.iter().zip(q).map(|(p, v)| p * v).sum();
    if current > average {
        delta_w
    } else {
        delta_l
    }
}

/// One experienced transition of a single agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: StateId,
    pub action: usize,
    pub reward: f64,
    pub next_state: StateId,
    pub terminal: bool,
}

impl LearnerTable {
    pub fn new(n_actions: usize) -> Self {
        assert!(n_actions > 0, "a learner needs at least one action");
        LearnerTable {
            n_actions,
            states: BTreeMap::new(),
            default: Entry::fresh(n_actions),
        }
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = (&StateId, &Entry)> {
        self.states.iter()
    }

    /// The entry for `s`, or the fresh defaults when unvisited.
    pub fn get(&self, s: StateId) -> &Entry {
        self.states.get(&s).unwrap_or(&self.default)
    }

    pub fn entry_mut(&mut self, s: StateId) -> &mut Entry {
        let n = self.n_actions;
        self.states.entry(s).or_insert_with(|| Entry::fresh(n))
    }

    pub fn q(&self, s: StateId) -> &[f64] {
        &self.get(s).q
    }

    pub fn pi(&self, s: StateId) -> &[f64] {
        &self.get(s).pi
    }

    pub fn pi_avg(&self, s: StateId) -> &[f64] {
        &self.get(s).pi_avg
    }

    pub fn visits(&self, s: StateId) -> u64 {
        self.get(s).visits
    }

    /// `Q(s,a) ← (1−α)Q(s,a) + α(r + γ max Q(s′,·))`, bootstrapping 0 at terminals.
    #[allow(clippy::too_many_arguments)]
    pub fn q_update(
        &mut self,
        s: StateId,
        a: usize,
        r: f64,
        s_next: StateId,
        terminal: bool,
        alpha: f64,
        gamma: f64,
    ) {
        let future = if terminal {
            0.0
        } else {
            self.q(s_next)
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let q = &mut self.entry_mut(s).q[a];
        *q = (1.0 - alpha) * *q + alpha * (r + gamma * future);
    }

    /// Increments C(s) and returns the new count.
    pub fn visit(&mut self, s: StateId) -> u64 {
        let e = self.entry_mut(s);
        e.visits += 1;
        e.visits
    }

    /// `π̃(s,·) ← π̃(s,·) + (π(s,·) − π̃(s,·)) / C(s)`.
    pub fn avg_policy_update(&mut self, s: StateId) {
        let e = self.entry_mut(s);
        let c = e.visits.max(1) as f64;
        for (avg, p) in e.pi_avg.iter_mut().zip(&e.pi) {
            *avg += (p - *avg) / c;
        }
    }

    pub fn wolf_phc_policy_update(&mut self, s: StateId, delta_w: f64, delta_l: f64) {
        let e = self.entry_mut(s);
        let delta = wolf_delta(&e.q, &e.pi, &e.pi_avg, delta_w, delta_l);
        hill_climb(&e.q, &mut e.pi, delta);
    }

    pub fn phc_policy_update(&mut self, s: StateId, delta: f64) {
        let e = self.entry_mut(s);
        hill_climb(&e.q, &mut e.pi, delta);
    }

    /// Sets π(s) to the one-hot greedy policy.
    pub fn greedy_policy_update(&mut self, s: StateId) {
        let e = self.entry_mut(s);
        let best = argmax(&e.q);
        for (a, p) in e.pi.iter_mut().enumerate() {
            *p = if a == best { 1.0 } else { 0.0 };
        }
    }

    /// Uniform with probability `epsilon`, otherwise a draw from π(s).
    pub fn select_action<R: RngCore + ?Sized>(
        &self,
        s: StateId,
        epsilon: f64,
        rng: &mut R,
    ) -> usize {
        if rng.random::<f64>() < epsilon {
            return rng.random_range(0..self.n_actions);
        }
        sample(self.pi(s), rng)
    }

    /// Full learning step: Q update, visit count, average policy, policy.
    pub fn learn(&mut self, t: &Transition, cfg: &LearnerConfig) {
        let visits = self.visits(t.state);
        let alpha = cfg.alpha_at(visits);
        let scale = cfg.delta_scale_at(visits);
        self.q_update(
            t.state,
            t.action,
            t.reward,
            t.next_state,
            t.terminal,
            alpha,
            cfg.gamma,
        );
        self.visit(t.state);
        self.avg_policy_update(t.state);
        match cfg.algorithm {
            Algorithm::Qlearning => self.greedy_policy_update(t.state),
            Algorithm::Phc => self.phc_policy_update(t.state, cfg.delta_w * scale),
            Algorithm::WolfPhc => {
                self.wolf_phc_policy_update(t.state, cfg.delta_w * scale, cfg.delta_l * scale)
            }
        }
    }
}

/// Draws an index from a probability vector.
pub fn sample<R: RngCore + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}
