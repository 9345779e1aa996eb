//! Wire messages between neighbouring particles.

use serde::Serialize;

use crate::competition::{Outcome, PartnerMsg};
use crate::lattice::PortId;
use crate::tree_engine::{AgentSlot, LfcItem};

/// Which of a component's two comparison channels a message belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Channel {
    /// Comparison on an incoming dark-blue edge (port 3 side).
    In,
    /// Comparison on an outgoing dark-blue edge (port 0 side).
    Out,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::In, Channel::Out];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The dark-blue port this channel compares across.
    pub fn port(self) -> PortId {
        match self {
            Channel::In => PortId::WEST,
            Channel::Out => PortId::EAST,
        }
    }

    pub fn of_port(p: PortId) -> Option<Channel> {
        match p.value() {
            0 => Some(Channel::Out),
            3 => Some(Channel::In),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Message {
    /// Census probe: turn codes so far, displacement and heading in the
    /// origin's frame.
    BoundaryProbe { word: Vec<u8>, pos: (i32, i32), heading: u8 },
    Competition,
    LeaderMsg,
    FollowerMsg,
    DoneConvergecast,
    StartPhase { rank: u8 },
    LabelTransfer { chan: Channel, slot: AgentSlot, epoch: u32, item: LfcItem },
    TerminationMsg { chan: Channel, slot: AgentSlot, epoch: u32 },
    /// Round walk along the ring; `chosen` once an outgoing edge was picked.
    Walk { slot: AgentSlot, chosen: bool },
    Choose,
    IncomingRequest { path: Vec<PortId> },
    IncomingVerdict { accept: bool, path: Vec<PortId> },
    Activate,
    NotParticipating,
    OutAnswer { active: bool },
    StartCompare { epoch: u32, chans: [bool; 2] },
    Partner(PartnerMsg),
    CompareResult { chan: Channel, outcome: Outcome },
    InMerge { chan: Channel },
    MergeDown { chan: Channel },
    MergeComplete,
    AbortMerge { chan: Channel },
    NotMerging,
    Rebuild { rank: u8 },
    RebuildDone { epoch: u32 },
    Uncompare,
    Wake,
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::BoundaryProbe { .. } => "BoundaryProbe",
            Message::Competition => "Competition",
            Message::LeaderMsg => "LeaderMsg",
            Message::FollowerMsg => "FollowerMsg",
            Message::DoneConvergecast => "DoneConvergecast",
            Message::StartPhase { .. } => "StartPhase",
            Message::LabelTransfer { .. } => "LabelTransfer",
            Message::TerminationMsg { .. } => "TerminationMsg",
            Message::Walk { .. } => "Walk",
            Message::Choose => "Choose",
            Message::IncomingRequest { .. } => "IncomingRequest",
            Message::IncomingVerdict { .. } => "IncomingVerdict",
            Message::Activate => "Activate",
            Message::NotParticipating => "NotParticipating",
            Message::OutAnswer { .. } => "OutAnswer",
            Message::StartCompare { .. } => "StartCompare",
            Message::Partner(_) => "Partner",
            Message::CompareResult { .. } => "CompareResult",
            Message::InMerge { .. } => "InMerge",
            Message::MergeDown { .. } => "MergeDown",
            Message::MergeComplete => "MergeComplete",
            Message::AbortMerge { .. } => "AbortMerge",
            Message::NotMerging => "NotMerging",
            Message::Rebuild { .. } => "Rebuild",
            Message::RebuildDone { .. } => "RebuildDone",
            Message::Uncompare => "Uncompare",
            Message::Wake => "Wake",
        }
    }

    pub fn is_tree(&self) -> bool {
        matches!(self, Message::DoneConvergecast | Message::StartPhase { .. })
    }

    /// Part of a merge or abort still under way.
    pub fn is_merge(&self) -> bool {
        matches!(
            self,
            Message::InMerge { .. }
                | Message::MergeDown { .. }
                | Message::MergeComplete
                | Message::AbortMerge { .. }
                | Message::NotMerging
        )
    }

    /// Boundary messages travel with a boundary label.
    pub fn is_boundary(&self) -> bool {
        matches!(
            self,
            Message::BoundaryProbe { .. }
                | Message::Competition
                | Message::LeaderMsg
                | Message::FollowerMsg
        )
    }
}

/// A message in flight, with both port numbers of the link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Envelope {
    pub from: usize,
    pub to: usize,
    pub via_port: PortId,
    pub recv_port: PortId,
    pub boundary_label: Option<PortId>,
    pub msg: Message,
    /// Observer-only id shared by a boundary message and its forwards.
    #[serde(skip)]
    pub lineage: u64,
}
