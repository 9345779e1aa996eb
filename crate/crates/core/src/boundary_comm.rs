//! Chirality detection between neighbours and boundary-preserving forwarding.
//!
//! A boundary message travels with a *boundary label*: the receiver's port
//! that points at the unoccupied node shared with the sender. The receiver
//! rotates from the arrival port through that label until it meets an
//! occupied port, which is the next hop.

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{port_between, Chirality, Configuration, NodeCoord, PortId};
use crate::topology::{classify_unchecked, common_neighbors, EdgeClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ChiralityRelation {
    Same,
    Different,
}

impl ChiralityRelation {
    pub fn compose(self, other: Self) -> Self {
        if self == other {
            Self::Same
        } else {
            Self::Different
        }
    }

    pub fn of(a: Chirality, b: Chirality) -> Self {
        if a == b {
            Self::Same
        } else {
            Self::Different
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundaryCommError {
    #[error("port {0} is horizontal; chirality is not visible through it")]
    HorizontalPort(PortId),
    #[error("edge {0}-{1} has no occupied common neighbour")]
    NoMediator(NodeCoord, NodeCoord),
    #[error("nodes {0} and {1} are not adjacent occupied nodes")]
    NotAnEdge(NodeCoord, NodeCoord),
    #[error("boundary label {label} does not point to an unoccupied node next to port {port}")]
    NotOnBoundary { port: PortId, label: PortId },
}

/// Chirality relation across a non-horizontal edge, from the two port
/// numbers the endpoints use for each other.
pub fn detect_common_chirality_grey(
    i: PortId,
    i_prime: PortId,
) -> Result<ChiralityRelation, BoundaryCommError> {
    for q in [i, i_prime] {
        if q.is_horizontal() {
            return Err(BoundaryCommError::HorizontalPort(q));
        }
    }
    if i.rotate(3) == i_prime && i_prime.rotate(3) == i {
        Ok(ChiralityRelation::Same)
    } else {
        Ok(ChiralityRelation::Different)
    }
}

/// Chirality relation across a horizontal edge, relayed through an occupied
/// common neighbour. Both legs to the mediator are non-horizontal.
pub fn detect_common_chirality_lbe(
    config: &Configuration,
    p: NodeCoord,
    p_prime: NodeCoord,
) -> Result<ChiralityRelation, BoundaryCommError> {
    let dir = p
        .direction_to(p_prime)
        .filter(|_| config.is_occupied(p) && config.is_occupied(p_prime))
        .ok_or(BoundaryCommError::NotAnEdge(p, p_prime))?;
    let mediator = common_neighbors(p, dir)
        .into_iter()
        .find(|q| config.is_occupied(*q))
        .ok_or(BoundaryCommError::NoMediator(p, p_prime))?;
    let first = grey_leg(config, p, mediator)?;
    let second = grey_leg(config, mediator, p_prime)?;
    Ok(first.compose(second))
}

fn grey_leg(
    config: &Configuration,
    a: NodeCoord,
    b: NodeCoord,
) -> Result<ChiralityRelation, BoundaryCommError> {
    let (ca, cb) = chiralities(config, a, b)?;
    let i = port_between(a, b, ca).map_err(|_| BoundaryCommError::NotAnEdge(a, b))?;
    let i_prime = port_between(b, a, cb).map_err(|_| BoundaryCommError::NotAnEdge(a, b))?;
    detect_common_chirality_grey(i, i_prime)
}

fn chiralities(
    config: &Configuration,
    a: NodeCoord,
    b: NodeCoord,
) -> Result<(Chirality, Chirality), BoundaryCommError> {
    match (config.chirality_of(a), config.chirality_of(b)) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(BoundaryCommError::NotAnEdge(a, b)),
    }
}

/// What the endpoints of an edge can learn about each other's chirality.
/// Dark-blue edges yield `None`: there is no mediator and the ports are
/// horizontal.
pub fn local_relation(config: &Configuration, u: NodeCoord, v: NodeCoord) -> Option<ChiralityRelation> {
    let dir = u.direction_to(v)?;
    if dir % 3 != 0 {
        grey_leg(config, u, v).ok()
    } else {
        detect_common_chirality_lbe(config, u, v).ok()
    }
}

/// Static knowledge a particle has about one of its ports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PortInfo {
    pub occupied: bool,
    pub class: Option<EdgeClass>,
    /// The neighbour's port pointing back here.
    pub back_port: Option<PortId>,
    pub relation: Option<ChiralityRelation>,
    /// Simulator routing index of the neighbour; never read by protocol logic.
    pub neighbor: Option<usize>,
}

impl PortInfo {
    const EMPTY: PortInfo = PortInfo {
        occupied: false,
        class: None,
        back_port: None,
        relation: None,
        neighbor: None,
    };

    /// Occupied and not across a dark-blue edge.
    pub fn linked(&self) -> bool {
        self.occupied && self.class != Some(EdgeClass::DarkBlue)
    }

    pub fn is_dark_blue(&self) -> bool {
        self.class == Some(EdgeClass::DarkBlue)
    }
}

/// A particle's view of its six ports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodView {
    pub ports: [PortInfo; 6],
}

impl NeighborhoodView {
    pub fn build(config: &Configuration, u: NodeCoord) -> Self {
        let c = config.chirality_of(u).expect("node is occupied");
        let ports = std::array::from_fn(|q| {
            let port = PortId::new(q as u8).unwrap();
            let dir = port.direction(c);
            let v = u.step(dir);
            match config.index_of(v) {
                None => PortInfo::EMPTY,
                Some(idx) => {
                    let cv = config.chiralities()[idx];
                    let class = classify_unchecked(config, u, dir);
                    PortInfo {
                        occupied: true,
                        class: Some(class),
                        back_port: Some(port_between(v, u, cv).expect("adjacent")),
                        relation: if class == EdgeClass::DarkBlue {
                            None
                        } else {
                            local_relation(config, u, v)
                        },
                        neighbor: Some(idx),
                    }
                }
            }
        });
        Self { ports }
    }

    pub fn port(&self, p: PortId) -> &PortInfo {
        &self.ports[p.index()]
    }

    pub fn linked(&self, p: PortId) -> bool {
        self.ports[p.index()].linked()
    }

    pub fn linked_count(&self) -> usize {
        self.ports.iter().filter(|p| p.linked()).count()
    }

    /// Whether the particle sits on some boundary: it has a linked neighbour
    /// and an unlinked port.
    pub fn on_boundary(&self) -> bool {
        (1..6).contains(&self.linked_count())
    }
}

/// One boundary step decided locally: leave through `exit`, tagging the
/// message with `label` (the receiver's port to the shared empty node).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForwardStep {
    pub exit: PortId,
    pub label: PortId,
    /// Unoccupied ports swept between the entry and `exit`.
    pub swept: u8,
    /// Local rotation sense of the sweep, `+1` or `-1`.
    pub sense: i8,
}

/// Receiver's outgoing boundary label from the next hop's back port `y`,
/// own exit port `x`, own port `i` to the shared unoccupied node, and the
/// chirality relation with the next hop.
pub fn next_boundary_label(
    relation: ChiralityRelation,
    x: PortId,
    i: PortId,
    y: PortId,
) -> PortId {
    let towards_lower = i == x.rotate(-1);
    let up = match relation {
        ChiralityRelation::Same => towards_lower,
        ChiralityRelation::Different => !towards_lower,
    };
    y.rotate(if up { 1 } else { -1 })
}

/// Sweep from the linked port `entry` in local sense `sense` until the next
/// linked port, and compute the label for that hop.
pub fn sweep_from(view: &NeighborhoodView, entry: PortId, sense: i8) -> ForwardStep {
    let mut x = entry.rotate(sense as i32);
    let mut swept = 0;
    while !view.linked(x) {
        swept += 1;
        x = x.rotate(sense as i32);
    }
    let i = x.rotate(-(sense as i32));
    let info = view.port(x);
    let y = info.back_port.expect("linked port has a neighbour");
    let relation = info
        .relation
        .expect("linked neighbours always know their chirality relation");
    ForwardStep {
        exit: x,
        label: next_boundary_label(relation, x, i, y),
        swept,
        sense,
    }
}

/// Forwarding rule for a boundary message that arrived through `z` with
/// `boundary_label`.
pub fn forward_on_boundary(
    view: &NeighborhoodView,
    z: PortId,
    boundary_label: PortId,
) -> Result<ForwardStep, BoundaryCommError> {
    let err = BoundaryCommError::NotOnBoundary {
        port: z,
        label: boundary_label,
    };
    let sense = match (boundary_label.value() + 6 - z.value()) % 6 {
        1 => 1,
        5 => -1,
        _ => return Err(err),
    };
    if view.linked(boundary_label) || !view.linked(z) {
        return Err(err);
    }
    Ok(sweep_from(view, z, sense))
}

/// A message hop as seen by an observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryHop {
    pub from: NodeCoord,
    pub to: NodeCoord,
    pub boundary_label: PortId,
}

impl BoundaryHop {
    /// The unoccupied node the label points at.
    pub fn witness(&self, config: &Configuration) -> Option<NodeCoord> {
        let c = config.chirality_of(self.to)?;
        Some(crate::lattice::neighbor_of(self.to, self.boundary_label, c))
    }
}
