//! Per-particle registers.

use serde::{Deserialize, Serialize};

use crate::competition::round::CompState;
use crate::grey_election::GreyState;
use crate::tree_engine::build::TreeRegs;
use crate::tree_engine::lfc::InitiatorPhase;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    #[default]
    Undecided,
    Leader,
    Follower,
}

/// Coarse phase, for traces and snapshots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    BoundaryElect,
    Head,
    NotHead,
    MovingInformation,
    CompetingHead,
    Leader,
    Follower,
    TreeBuild,
    OutgoingEdge,
    IncomingEdge,
    BeginCompetition,
    Initiator,
    NotInitiator,
    Termination,
    Ready,
    NotActive,
    Compete,
    WinningMerge,
    LosingMerge,
    InMerge,
    MergeComplete,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParticleState {
    pub role: Role,
    pub grey: GreyState,
    pub tree: TreeRegs,
    pub comp: CompState,
}

impl ParticleState {
    pub fn phase(&self) -> Phase {
        if self.role == Role::Undecided {
            let g = &self.grey;
            if !g.started || g.agents.iter().any(|a| a.standing.iter().any(Option::is_none)) {
                return Phase::BoundaryElect;
            }
            if g.agents.iter().any(|a| a.own_travel.is_some()) {
                return Phase::CompetingHead;
            }
            if g.agents.iter().any(|a| a.tokens.iter().any(|t| !t.resolved)) {
                return Phase::MovingInformation;
            }
            let head = g
                .agents
                .iter()
                .any(|a| a.standing.iter().flatten().any(|s| s.head));
            return if head { Phase::Head } else { Phase::NotHead };
        }
        if self.tree.in_tree && self.tree.ring.is_none() {
            return Phase::TreeBuild;
        }
        let c = &self.comp;
        if c.inmerge_from.iter().any(Option::is_some) {
            return Phase::InMerge;
        }
        if c.dbe.iter().any(|d| d.pending_lose) {
            return Phase::LosingMerge;
        }
        if c.dbe.iter().any(|d| d.pending_win) {
            return Phase::WinningMerge;
        }
        if let Some(ep) = c.endpoints.iter().flatten().next() {
            use crate::competition::compare::EndpointPhase;
            return match ep.phase {
                EndpointPhase::Forwarding => match ep.initiator.phase {
                    InitiatorPhase::Terminating => Phase::Termination,
                    _ => Phase::Initiator,
                },
                EndpointPhase::Ready => Phase::Ready,
                EndpointPhase::Compete { .. } => Phase::Compete,
                EndpointPhase::Done(_) => Phase::NotActive,
            };
        }
        if c.epoch_live.iter().any(|&on| on) {
            return Phase::NotInitiator;
        }
        if c.dbe.iter().any(|d| d.chosen) {
            return Phase::OutgoingEdge;
        }
        if c.dbe.iter().any(|d| d.request_held) {
            return Phase::IncomingEdge;
        }
        if c.dbe.iter().any(|d| d.merged) && self.role == Role::Follower {
            return Phase::MergeComplete;
        }
        match self.role {
            Role::Leader => Phase::Leader,
            _ => Phase::Follower,
        }
    }
}
