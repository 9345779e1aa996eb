//! What a particle can see and do during one activation.

use std::collections::VecDeque;

use crate::boundary_comm::NeighborhoodView;
use crate::competition::Outcome;
use crate::grey_election::{Census, Standing};
use crate::lattice::PortId;

use super::message::{Channel, Envelope, Message};
use super::state::ParticleState;

/// How far the pipeline runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Stage {
    Grey,
    Tree,
    Full,
}

/// Observer-side events. Particles emit them but never read them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Census {
        sense: i8,
        port: PortId,
        census: Census,
        standing: Standing,
    },
    Outcome {
        chan: Channel,
        outcome: Outcome,
    },
    /// A root gave up its leadership by merging across `chan`.
    Merged { chan: Channel },
    /// The losing endpoint adopted the winner across `chan`.
    MergeEdge { chan: Channel },
    Violation(String),
}

/// Read-only view of a neighbour, as of the start of the tick.
pub struct Peer<'a> {
    pub state: &'a ParticleState,
    pub inbox: &'a VecDeque<Envelope>,
    pub view: &'a NeighborhoodView,
}

pub struct Ctx<'a> {
    pub(crate) index: usize,
    views: &'a [NeighborhoodView],
    states: &'a [ParticleState],
    inboxes: &'a [VecDeque<Envelope>],
    pub(crate) stage: Stage,
    pub(crate) outbox: Vec<Envelope>,
    pub(crate) deferred: Vec<Envelope>,
    pub(crate) events: Vec<Event>,
    pub(crate) next_lineage: u64,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(
        index: usize,
        views: &'a [NeighborhoodView],
        states: &'a [ParticleState],
        inboxes: &'a [VecDeque<Envelope>],
        stage: Stage,
        next_lineage: u64,
    ) -> Self {
        Self {
            index,
            views,
            states,
            inboxes,
            stage,
            outbox: Vec::new(),
            deferred: Vec::new(),
            events: Vec::new(),
            next_lineage,
        }
    }

    pub fn view(&self) -> &'a NeighborhoodView {
        &self.views[self.index]
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn peer(&self, port: PortId) -> Option<Peer<'a>> {
        let idx = self.view().port(port).neighbor?;
        Some(Peer {
            state: &self.states[idx],
            inbox: &self.inboxes[idx],
            view: &self.views[idx],
        })
    }

    pub fn fresh_lineage(&mut self) -> u64 {
        self.next_lineage += 1;
        self.next_lineage
    }

    fn envelope(&self, port: PortId, msg: Message) -> Envelope {
        let info = self.view().port(port);
        Envelope {
            from: self.index,
            to: info.neighbor.expect("sending to an occupied port"),
            via_port: port,
            recv_port: info.back_port.expect("occupied ports have a back port"),
            boundary_label: None,
            msg,
            lineage: 0,
        }
    }

    pub fn send(&mut self, port: PortId, msg: Message) {
        let env = self.envelope(port, msg);
        self.outbox.push(env);
    }

    pub fn send_boundary(&mut self, port: PortId, label: PortId, msg: Message, lineage: u64) {
        let mut env = self.envelope(port, msg);
        env.boundary_label = Some(label);
        env.lineage = lineage;
        self.outbox.push(env);
    }

    /// Leave a message in the inbox for a later activation.
    pub fn defer(&mut self, env: Envelope) {
        self.deferred.push(env);
    }

    pub fn event(&mut self, e: Event) {
        self.events.push(e);
    }
}
