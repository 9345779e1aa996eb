//! Spanning-tree construction inside a grey component.
//!
//! The leader roots the tree; every other particle adopts the in-tree
//! neighbour behind its smallest linked port. A particle reports done to
//! its parent once all its linked neighbours joined and all its children
//! reported; the root then hands out ring positions top-down.

use serde::Serialize;

use crate::boundary_comm::NeighborhoodView;
use crate::lattice::PortId;
use crate::runtime::context::Ctx;
use crate::runtime::message::{Channel, Envelope, Message};
use crate::runtime::state::Role;

use super::label::{NeighborLabel, Symbol};
use super::ring::RingPosition;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeRegs {
    pub in_tree: bool,
    pub parent: Option<PortId>,
    /// Child ports in increasing order.
    pub children: Vec<PortId>,
    /// Ports whose subtree reported done, as a bit mask.
    pub done_from: u8,
    pub reported: bool,
    /// Ring links in force for the current round.
    pub ring: Option<RingPosition>,
}

impl TreeRegs {
    pub fn is_root(&self) -> bool {
        self.in_tree && self.parent.is_none()
    }

    pub fn add_child(&mut self, p: PortId) {
        if let Err(at) = self.children.binary_search(&p) {
            self.children.insert(at, p);
        }
    }

    pub fn remove_child(&mut self, p: PortId) {
        self.children.retain(|&c| c != p);
    }
}

/// The label a particle shows, from its live tree links and which of its
/// dark-blue ports host a comparison.
pub fn neighborhood_label(
    view: &NeighborhoodView,
    parent: Option<PortId>,
    children: &[PortId],
    active: [bool; 2],
) -> NeighborLabel {
    NeighborLabel(std::array::from_fn(|q| {
        let p = PortId::new(q as u8).unwrap();
        let info = view.port(p);
        if parent == Some(p) {
            Symbol::P
        } else if children.contains(&p) {
            Symbol::C
        } else if info.is_dark_blue() {
            match Channel::of_port(p) {
                Some(ch) if active[ch.index()] => Symbol::DActive,
                _ => Symbol::D,
            }
        } else if info.occupied {
            Symbol::N
        } else {
            Symbol::E
        }
    }))
}

pub(crate) fn activate(ctx: &mut Ctx<'_>, role: &mut Role, tree: &mut TreeRegs, inbox: &[Envelope]) {
    for env in inbox {
        match env.msg {
            Message::DoneConvergecast => tree.done_from |= 1 << env.recv_port.index(),
            Message::StartPhase { rank } if tree.ring.is_none() => {
                tree.ring = Some(RingPosition {
                    parent: tree.parent,
                    rank,
                    children: tree.children.clone(),
                });
                broadcast_start(ctx, tree);
            }
            _ => {}
        }
    }

    let view = ctx.view();
    if !tree.in_tree {
        if *role == Role::Leader {
            tree.in_tree = true;
        } else if let Some(p) = PortId::all()
            .filter(|&p| view.linked(p))
            .find(|&p| ctx.peer(p).is_some_and(|peer| peer.state.tree.in_tree))
        {
            tree.in_tree = true;
            tree.parent = Some(p);
            if *role == Role::Undecided {
                *role = Role::Follower;
            }
        }
        if !tree.in_tree {
            return;
        }
    }

    if !tree.reported {
        let linked: Vec<PortId> = PortId::all().filter(|&p| view.linked(p)).collect();
        let peers_in: Vec<_> = linked
            .iter()
            .filter_map(|&p| ctx.peer(p).filter(|peer| peer.state.tree.in_tree).map(|peer| (p, peer)))
            .collect();
        if peers_in.len() < linked.len() {
            return;
        }
        let children: Vec<PortId> = peers_in
            .iter()
            .filter(|(p, peer)| peer.state.tree.parent == view.port(*p).back_port)
            .map(|(p, _)| *p)
            .collect();
        if children.iter().any(|c| tree.done_from & (1 << c.index()) == 0) {
            return;
        }
        tree.children = children;
        tree.reported = true;
        match tree.parent {
            Some(p) => ctx.send(p, Message::DoneConvergecast),
            None => {
                tree.ring = Some(RingPosition {
                    parent: None,
                    rank: 0,
                    children: tree.children.clone(),
                });
                broadcast_start(ctx, tree);
            }
        }
    }
}

fn broadcast_start(ctx: &mut Ctx<'_>, tree: &TreeRegs) {
    for (i, &c) in tree.children.iter().enumerate() {
        ctx.send(c, Message::StartPhase { rank: i as u8 + 1 });
    }
}
