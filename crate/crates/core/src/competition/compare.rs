//! Lockstep comparison of two label streams across a dark-blue edge.

use std::cmp::Ordering;
use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::tree_engine::label::NeighborLabel;
use crate::tree_engine::lfc::{
    relay_step, Initiator, LfcCell, LfcError, RelayOutput, RingSchedule, RingSim,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Win,
    Lose,
    Draw,
}

impl Outcome {
    pub fn dual(self) -> Self {
        match self {
            Outcome::Win => Outcome::Lose,
            Outcome::Lose => Outcome::Win,
            Outcome::Draw => Outcome::Draw,
        }
    }
}

/// Messages exchanged by the two endpoints of a compared edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PartnerMsg {
    Ready,
    Label { k: u32, label: NeighborLabel, last: bool },
}

/// Decision for position `k` given both sides' label and last-mark.
/// `None` means equal so far and neither stream has ended.
pub fn judge(own: (NeighborLabel, bool), theirs: (NeighborLabel, bool)) -> Option<Outcome> {
    match own.0.cmp(&theirs.0) {
        Ordering::Greater => Some(Outcome::Win),
        Ordering::Less => Some(Outcome::Lose),
        Ordering::Equal => match (own.1, theirs.1) {
            (true, true) => Some(Outcome::Draw),
            (true, false) => Some(Outcome::Lose),
            (false, true) => Some(Outcome::Win),
            (false, false) => None,
        },
    }
}

/// Global reference: compare the full streams, a proper prefix loses.
pub fn oracle_compare(own: &[NeighborLabel], theirs: &[NeighborLabel]) -> Outcome {
    match own.cmp(theirs) {
        Ordering::Greater => Outcome::Win,
        Ordering::Less => Outcome::Lose,
        Ordering::Equal => Outcome::Draw,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EndpointPhase {
    Forwarding,
    Ready,
    Compete { k: u32, shown: Option<(NeighborLabel, bool)> },
    Done(Outcome),
}

/// One side of a comparison. It owns the initiator role of its channel and
/// talks to the partner endpoint across the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub initiator: Initiator,
    pub phase: EndpointPhase,
    partner_ready: bool,
    partner_labels: VecDeque<(u32, NeighborLabel, bool)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EndpointStep {
    pub relay: RelayOutput,
    pub to_partner: Vec<PartnerMsg>,
    pub outcome: Option<Outcome>,
}

impl Endpoint {
    pub fn new(single_agent_ring: bool) -> Self {
        Self {
            initiator: Initiator::new(single_agent_ring),
            phase: EndpointPhase::Forwarding,
            partner_ready: false,
            partner_labels: VecDeque::new(),
        }
    }

    pub fn receive(&mut self, msg: PartnerMsg) {
        match msg {
            PartnerMsg::Ready => self.partner_ready = true,
            PartnerMsg::Label { k, label, last } => self.partner_labels.push_back((k, label, last)),
        }
    }

    pub fn outcome(&self) -> Option<Outcome> {
        match self.phase {
            EndpointPhase::Done(o) => Some(o),
            _ => None,
        }
    }

    pub fn step(&mut self, cell: &mut LfcCell, next_holding: Option<usize>) -> EndpointStep {
        let mut out = EndpointStep::default();
        match &mut self.phase {
            EndpointPhase::Forwarding => {
                out.relay = self.initiator.step(cell, next_holding);
                if self.initiator.is_ready() {
                    self.phase = EndpointPhase::Ready;
                    out.to_partner.push(PartnerMsg::Ready);
                }
            }
            EndpointPhase::Ready => {
                if self.partner_ready {
                    self.phase = EndpointPhase::Compete { k: 0, shown: None };
                    self.show(cell, &mut out);
                }
            }
            EndpointPhase::Compete { .. } => self.compete(cell, next_holding, &mut out),
            EndpointPhase::Done(_) => {}
        }
        out
    }

    fn show(&mut self, cell: &LfcCell, out: &mut EndpointStep) {
        if let EndpointPhase::Compete { k, shown } = &mut self.phase {
            if shown.is_none() {
                if let Some(front) = cell.held.front() {
                    *shown = Some((front.label, front.last_mark));
                    out.to_partner.push(PartnerMsg::Label {
                        k: *k,
                        label: front.label,
                        last: front.last_mark,
                    });
                }
            }
        }
    }

    fn compete(&mut self, cell: &mut LfcCell, next_holding: Option<usize>, out: &mut EndpointStep) {
        let EndpointPhase::Compete { k, shown } = self.phase.clone() else {
            return;
        };
        let Some(own) = shown else {
            self.show(cell, out);
            return;
        };
        let Some(&(pk, label, last)) = self.partner_labels.front() else {
            return;
        };
        debug_assert_eq!(pk, k, "partner labels arrive in order");
        if let Some(result) = judge(own, (label, last)) {
            self.partner_labels.pop_front();
            self.phase = EndpointPhase::Done(result);
            out.outcome = Some(result);
            return;
        }
        // equal so far: pull the next label
        if let Some(item) = self.initiator.advance(cell, next_holding) {
            self.partner_labels.pop_front();
            out.relay.label = Some(item);
            self.phase = EndpointPhase::Compete { k: k + 1, shown: None };
            self.show(cell, out);
        }
    }
}

/// Two independent rings joined by one compared edge. Each side's endpoint
/// is the initiator of its own ring. Partner messages take one tick.
pub struct PairSim {
    pub rings: [RingSim; 2],
    pub endpoints: [Endpoint; 2],
    pub ticks: usize,
}

impl PairSim {
    pub fn new(a: (&[NeighborLabel], usize), b: (&[NeighborLabel], usize)) -> Self {
        let rings = [RingSim::new(a.0, a.1), RingSim::new(b.0, b.1)];
        let endpoints = [Endpoint::new(a.0.len() == 1), Endpoint::new(b.0.len() == 1)];
        Self {
            rings,
            endpoints,
            ticks: 0,
        }
    }

    pub fn run(&mut self, schedule: RingSchedule) -> Result<[Outcome; 2], LfcError> {
        let seed = match schedule {
            RingSchedule::Sequential(s) => s,
            RingSchedule::Synchronous => 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget = 16 * (self.rings[0].len() + self.rings[1].len()) + 64;
        let mut idle = 0;
        loop {
            if let [Some(x), Some(y)] = [self.endpoints[0].outcome(), self.endpoints[1].outcome()] {
                return Ok([x, y]);
            }
            self.ticks += 1;
            let mut mail: [Vec<PartnerMsg>; 2] = [Vec::new(), Vec::new()];
            let mut moved = false;
            for side in 0..2 {
                let ring = &mut self.rings[side];
                let endpoint = &mut self.endpoints[side];
                let at = ring.initiator_at;
                let snapshot = ring.counts();
                let mut order: Vec<usize> = (0..ring.len()).collect();
                if schedule != RingSchedule::Synchronous {
                    order.shuffle(&mut rng);
                }
                let mut deferred = Vec::new();
                for i in order {
                    let counts = if schedule == RingSchedule::Synchronous {
                        (snapshot[ring.pre(i)], snapshot[ring.next(i)])
                    } else {
                        (ring.cells[ring.pre(i)].held.len(), ring.cells[ring.next(i)].held.len())
                    };
                    let out = if i == at {
                        let before = endpoint.phase.clone();
                        let step = endpoint.step(&mut ring.cells[at], Some(counts.1));
                        moved |= before != endpoint.phase;
                        mail[1 - side].extend(step.to_partner);
                        step.relay
                    } else {
                        relay_step(&mut ring.cells[i], Some(counts.0))
                    };
                    moved |= out != RelayOutput::default();
                    if schedule == RingSchedule::Synchronous {
                        deferred.push((i, out));
                    } else {
                        ring.deliver(i, out);
                    }
                }
                for (i, out) in deferred {
                    ring.deliver(i, out);
                }
            }
            for (side, msgs) in mail.into_iter().enumerate() {
                for m in msgs {
                    moved = true;
                    self.endpoints[side].receive(m);
                }
            }
            idle = if moved { 0 } else { idle + 1 };
            if idle > budget {
                return Err(LfcError::Stall(idle));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(s: &str) -> NeighborLabel {
        NeighborLabel::parse(s).unwrap()
    }

    #[test]
    fn judge_rules() {
        let (c, d) = (lab("CEEEEE"), lab("DEEEEE"));
        assert_eq!(judge((c, false), (d, false)), Some(Outcome::Win));
        assert_eq!(judge((c, true), (c, false)), Some(Outcome::Lose));
        assert_eq!(judge((c, true), (c, true)), Some(Outcome::Draw));
        assert_eq!(judge((c, false), (c, false)), None);
    }

    #[test]
    fn identical_streams_draw() {
        let ring = vec![lab("CCEEEE"), lab("PEEEEE"), lab("PNEEEE")];
        for (a, b) in [(0, 0), (1, 2), (2, 0)] {
            let mut sim = PairSim::new((&ring, a), (&ring, b));
            assert_eq!(sim.run(RingSchedule::Synchronous).unwrap(), [Outcome::Draw; 2]);
        }
    }

    #[test]
    fn shorter_prefix_loses() {
        let big = vec![lab("CEEEEE"), lab("PEEEEE"), lab("CEEEEE")];
        let small = vec![lab("CEEEEE")];
        assert_eq!(oracle_compare(&small, &big), Outcome::Lose);
        let mut sim = PairSim::new((&small, 0), (&big, 2));
        assert_eq!(sim.run(RingSchedule::Sequential(1)).unwrap(), [Outcome::Lose, Outcome::Win]);
    }
}
