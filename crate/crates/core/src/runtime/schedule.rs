//! Activation schedulers.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScheduleMode {
    /// Every particle in every tick.
    Synchronous,
    /// One particle per tick, in index order.
    SequentialRoundRobin,
    /// One uniformly random particle per tick, with a fairness window of
    /// `3n` ticks.
    SequentialRandom,
    /// Each particle independently with probability 1/2 per tick, never an
    /// empty set, with the given fairness window.
    AsyncRandomSubset(usize),
}

impl ScheduleMode {
    pub const NAMES: [&'static str; 4] = ["sync", "seqrr", "seqrand", "async"];

    pub fn short_name(&self) -> &'static str {
        match self {
            ScheduleMode::Synchronous => "sync",
            ScheduleMode::SequentialRoundRobin => "seqrr",
            ScheduleMode::SequentialRandom => "seqrand",
            ScheduleMode::AsyncRandomSubset(_) => "async",
        }
    }

    /// Parses a short name; `async` gets a window of `3n`.
    pub fn parse(name: &str, n: usize) -> Result<Self, ModeError> {
        Ok(match name {
            "sync" => ScheduleMode::Synchronous,
            "seqrr" => ScheduleMode::SequentialRoundRobin,
            "seqrand" => ScheduleMode::SequentialRandom,
            "async" => ScheduleMode::AsyncRandomSubset(3 * n.max(1)),
            other => return Err(ModeError(other.to_string())),
        })
    }

    /// Every particle is activated at least once in any window this long.
    pub fn fairness_window(&self, n: usize) -> usize {
        match self {
            ScheduleMode::Synchronous => 1,
            ScheduleMode::SequentialRoundRobin => n.max(1),
            ScheduleMode::SequentialRandom => 3 * n.max(1),
            ScheduleMode::AsyncRandomSubset(f) => (*f).max(1),
        }
    }
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown mode {0:?}; expected one of sync, seqrr, seqrand, async")]
pub struct ModeError(pub String);

impl FromStr for ScheduleMode {
    type Err = ModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScheduleMode::parse(s, 1)
    }
}

/// Chooses the activation set of each tick.
#[derive(Clone, Debug)]
pub struct Scheduler {
    mode: ScheduleMode,
    n: usize,
    window: usize,
    rng: ChaCha8Rng,
    /// Tick of each particle's latest activation; `-1` before the first.
    last: Vec<i64>,
    /// Particles by increasing `(last, index)`, most starved first.
    urgency: Vec<usize>,
    tick: i64,
}

impl Scheduler {
    pub fn new(mode: ScheduleMode, n: usize, seed: u64) -> Self {
        Self {
            mode,
            n,
            window: mode.fairness_window(n),
            rng: ChaCha8Rng::seed_from_u64(seed),
            last: vec![-1; n],
            urgency: (0..n).collect(),
            tick: 0,
        }
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Whether the most starved particle must run now for every particle to
    /// still meet its deadline with one activation per tick.
    fn must_serve_now(&self) -> bool {
        self.urgency
            .iter()
            .enumerate()
            .any(|(k, &i)| self.tick + k as i64 >= self.last[i] + self.window as i64)
    }

    /// Activation set for the next tick, in increasing index order.
    pub fn next_set(&mut self) -> Vec<usize> {
        let n = self.n;
        let set = match self.mode {
            ScheduleMode::Synchronous => (0..n).collect(),
            ScheduleMode::SequentialRoundRobin => vec![self.tick as usize % n],
            ScheduleMode::SequentialRandom => {
                if self.must_serve_now() {
                    vec![self.urgency[0]]
                } else {
                    vec![self.rng.gen_range(0..n)]
                }
            }
            ScheduleMode::AsyncRandomSubset(_) => {
                let mut set: Vec<usize> = (0..n)
                    .filter(|&i| {
                        let coin = self.rng.gen_bool(0.5);
                        coin || self.tick >= self.last[i] + self.window as i64
                    })
                    .collect();
                if set.is_empty() {
                    let all: Vec<usize> = (0..n).collect();
                    set.push(*all.choose(&mut self.rng).expect("at least one particle"));
                }
                set
            }
        };
        for &i in &set {
            self.last[i] = self.tick;
        }
        if self.mode == ScheduleMode::SequentialRandom {
            // the one activated particle becomes the least urgent
            let pos = self.urgency.iter().position(|&j| j == set[0]).expect("every particle is listed");
            let i = self.urgency.remove(pos);
            self.urgency.push(i);
        }
        self.tick += 1;
        set
    }
}
