//! Label forwarding along the virtual ring.
//!
//! Labels only ever move from an agent to its ring predecessor, oldest
//! first, so the cyclic order of labels is preserved. The initiator sends
//! its current label backwards whenever its successor holds one; the
//! resulting hole travels forwards and the surplus travels backwards until
//! they cancel.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::label::NeighborLabel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LfcItem {
    pub label: NeighborLabel,
    /// Set on the root's first agent.
    pub root_mark: bool,
    /// Set on the root's last agent.
    pub last_mark: bool,
}

/// Per-agent, per-channel holding register.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LfcCell {
    pub held: VecDeque<LfcItem>,
    /// A termination token waiting to move on.
    pub term: bool,
}

impl LfcCell {
    pub fn with(item: LfcItem) -> Self {
        Self {
            held: VecDeque::from([item]),
            term: false,
        }
    }
}

/// What an agent hands to its predecessor in one activation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RelayOutput {
    pub label: Option<LfcItem>,
    pub term: bool,
}

/// Rule for every agent except the initiator. `pre_holding` is the visible
/// count at the predecessor, `None` when it is not on the same channel epoch.
pub fn relay_step(cell: &mut LfcCell, pre_holding: Option<usize>) -> RelayOutput {
    let mut out = RelayOutput::default();
    let Some(pre) = pre_holding else {
        return out;
    };
    if cell.held.len() >= 2 || (cell.held.len() == 1 && pre == 0) {
        out.label = cell.held.pop_front();
    }
    if cell.term && cell.held.len() == 1 {
        cell.term = false;
        out.term = true;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InitiatorPhase {
    Aligning,
    Terminating,
    Ready,
}

/// The agent that pulls labels until the root label reaches it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Initiator {
    pub phase: InitiatorPhase,
    sent_any: bool,
    single: bool,
}

impl Initiator {
    /// `single` marks a one-agent ring, where no label ever moves.
    pub fn new(single: bool) -> Self {
        Self {
            phase: InitiatorPhase::Aligning,
            sent_any: false,
            single,
        }
    }

    pub fn is_ready(&self) -> bool {
        self.phase == InitiatorPhase::Ready
    }

    pub fn step(&mut self, cell: &mut LfcCell, next_holding: Option<usize>) -> RelayOutput {
        let mut out = RelayOutput::default();
        match self.phase {
            InitiatorPhase::Aligning => {
                let Some(front) = cell.held.front() else {
                    return out;
                };
                if front.root_mark && (self.sent_any || self.single) {
                    if self.single {
                        self.phase = InitiatorPhase::Ready;
                    } else {
                        self.phase = InitiatorPhase::Terminating;
                        out.term = true;
                    }
                } else {
                    out.label = self.advance(cell, next_holding);
                }
            }
            InitiatorPhase::Terminating => {
                if cell.term {
                    cell.term = false;
                    self.phase = InitiatorPhase::Ready;
                }
            }
            InitiatorPhase::Ready => {}
        }
        out
    }

    /// Gives up the current label once the successor has one to refill with.
    pub fn advance(&mut self, cell: &mut LfcCell, next_holding: Option<usize>) -> Option<LfcItem> {
        if self.single || next_holding.unwrap_or(0) == 0 {
            return None;
        }
        self.sent_any = true;
        cell.held.pop_front()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingSchedule {
    /// One agent at a time in a seeded random order; deliveries are immediate.
    Sequential(u64),
    /// All agents read the same snapshot; deliveries land after the tick.
    Synchronous,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LfcError {
    #[error("no progress for {0} consecutive ticks")]
    Stall(usize),
}

/// A standalone ring of agents indexed in ring order, used to drive the
/// forwarding rules without a lattice around them.
#[derive(Clone, Debug)]
pub struct RingSim {
    pub cells: Vec<LfcCell>,
    pub initiator_at: usize,
    pub initiator: Initiator,
    /// Labels the initiator has received, in arrival order.
    pub received: Vec<LfcItem>,
    pub transfers: usize,
}

impl RingSim {
    /// `labels[0]` carries the root mark, the final entry the last mark.
    pub fn new(labels: &[NeighborLabel], initiator_at: usize) -> Self {
        let m = labels.len();
        let cells = labels
            .iter()
            .enumerate()
            .map(|(i, &label)| {
                LfcCell::with(LfcItem {
                    label,
                    root_mark: i == 0,
                    last_mark: i + 1 == m,
                })
            })
            .collect();
        Self {
            cells,
            initiator_at,
            initiator: Initiator::new(m == 1),
            received: Vec::new(),
            transfers: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn pre(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    /// Runs one agent's rule against the given visible counts.
    pub fn act(&mut self, i: usize, pre_holding: usize, next_holding: usize) -> RelayOutput {
        if i == self.initiator_at {
            let mut init = self.initiator.clone();
            let out = init.step(&mut self.cells[i], Some(next_holding));
            self.initiator = init;
            out
        } else {
            relay_step(&mut self.cells[i], Some(pre_holding))
        }
    }

    pub fn deliver(&mut self, from: usize, out: RelayOutput) {
        let to = self.pre(from);
        if let Some(item) = out.label {
            self.transfers += 1;
            if to == self.initiator_at {
                self.received.push(item);
            }
            self.cells[to].held.push_back(item);
        }
        if out.term {
            self.cells[to].term = true;
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.held.len()).collect()
    }

    /// One tick under `schedule`; returns whether anything moved.
    pub fn tick(&mut self, schedule: RingSchedule, rng: &mut ChaCha8Rng) -> bool {
        let mut moved = false;
        match schedule {
            RingSchedule::Sequential(_) => {
                let mut order: Vec<usize> = (0..self.len()).collect();
                order.shuffle(rng);
                for i in order {
                    let (p, n) = (self.pre(i), self.next(i));
                    let (ph, nh) = (self.cells[p].held.len(), self.cells[n].held.len());
                    let before = self.initiator.phase;
                    let out = self.act(i, ph, nh);
                    moved |= out != RelayOutput::default() || before != self.initiator.phase;
                    self.deliver(i, out);
                }
            }
            RingSchedule::Synchronous => {
                let counts = self.counts();
                let before = self.initiator.phase;
                let outs: Vec<RelayOutput> = (0..self.len())
                    .map(|i| self.act(i, counts[self.pre(i)], counts[self.next(i)]))
                    .collect();
                moved |= before != self.initiator.phase;
                for (i, out) in outs.into_iter().enumerate() {
                    moved |= out != RelayOutput::default();
                    self.deliver(i, out);
                }
            }
        }
        moved
    }

    /// Runs until the initiator is ready, returning the labels it received.
    pub fn run_until_ready(&mut self, schedule: RingSchedule) -> Result<Vec<LfcItem>, LfcError> {
        let seed = match schedule {
            RingSchedule::Sequential(s) => s,
            RingSchedule::Synchronous => 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idle = 0;
        let window = 4 * self.len() + 8;
        while !self.initiator.is_ready() {
            if self.tick(schedule, &mut rng) {
                idle = 0;
            } else {
                idle += 1;
                if idle > window {
                    return Err(LfcError::Stall(idle));
                }
            }
        }
        Ok(self.received.clone())
    }
}

/// Labels an initiator at `initiator_at` must receive: everything after it
/// in ring order up to and including the root label. Empty for agent 0 of a
/// one-agent ring; a full circle for agent 0 otherwise.
pub fn expected_delivery(labels: &[NeighborLabel], initiator_at: usize) -> Vec<NeighborLabel> {
    let m = labels.len();
    if m == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut i = (initiator_at + 1) % m;
    loop {
        out.push(labels[i]);
        if i == 0 {
            break;
        }
        i = (i + 1) % m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(s: &str) -> NeighborLabel {
        NeighborLabel::parse(s).unwrap()
    }

    fn labels3() -> Vec<NeighborLabel> {
        vec![lab("CCEEEE"), lab("PEEEEE"), lab("PNEEEE")]
    }

    #[test]
    fn three_agent_ring_from_middle() {
        for schedule in [RingSchedule::Synchronous, RingSchedule::Sequential(3)] {
            let mut sim = RingSim::new(&labels3(), 1);
            let got: Vec<_> = sim.run_until_ready(schedule).unwrap().iter().map(|i| i.label).collect();
            assert_eq!(got, vec![labels3()[2], labels3()[0]]);
            assert_eq!(sim.cells[1].held.front().unwrap().label, labels3()[0]);
        }
    }

    #[test]
    fn root_initiator_goes_full_circle() {
        let mut sim = RingSim::new(&labels3(), 0);
        let got: Vec<_> = sim
            .run_until_ready(RingSchedule::Synchronous)
            .unwrap()
            .iter()
            .map(|i| i.label)
            .collect();
        assert_eq!(got, expected_delivery(&labels3(), 0));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn single_agent_ring_is_immediately_ready() {
        let mut sim = RingSim::new(&[lab("EEEEEE")], 0);
        assert!(sim.run_until_ready(RingSchedule::Synchronous).unwrap().is_empty());
        assert_eq!(sim.transfers, 0);
    }

    #[test]
    fn every_agent_ends_with_one_label() {
        let labels: Vec<_> = (0..9).map(|i| if i % 2 == 0 { lab("PEEEEE") } else { lab("CNEEEE") }).collect();
        for start in 0..9 {
            let mut sim = RingSim::new(&labels, start);
            sim.run_until_ready(RingSchedule::Sequential(start as u64)).unwrap();
            assert!(sim.counts().iter().all(|&c| c == 1), "start {start}: {:?}", sim.counts());
        }
    }
}
