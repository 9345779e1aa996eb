//! Serializable picture of a world, written as `final.json`.

use serde::{Deserialize, Serialize};

use crate::lattice::{Chirality, Configuration, NodeCoord};
use crate::runtime::{Phase, Role, World};
use crate::topology::{classify_edge, EdgeClass};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSnapshot {
    pub x: i32,
    pub y: i32,
    pub chirality: Chirality,
    pub role: Role,
    pub phase: Phase,
    /// Coordinates of the tree parent, if any.
    pub parent: Option<[i32; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSnapshot {
    pub a: [i32; 2],
    pub b: [i32; 2],
    pub class: EdgeClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub n: usize,
    pub mode: String,
    pub seed: u64,
    /// Ticks and activation units up to the last activity.
    pub ticks: u64,
    pub activation_units: u64,
    pub leaders: Vec<[i32; 2]>,
    pub nodes: Vec<NodeSnapshot>,
    pub edges: Vec<EdgeSnapshot>,
}

fn xy(v: NodeCoord) -> [i32; 2] {
    [v.x, v.y]
}

/// Every occupied edge once, oriented along directions 0, 1 and 2.
pub fn edges_of(config: &Configuration) -> Vec<EdgeSnapshot> {
    let mut out = Vec::new();
    for &u in config.nodes() {
        for dir in 0..3 {
            let v = u.step(dir);
            if config.is_occupied(v) {
                let class = classify_edge(config, u, v).expect("both ends occupied");
                out.push(EdgeSnapshot { a: xy(u), b: xy(v), class });
            }
        }
    }
    out
}

impl Snapshot {
    /// Configuration only, every particle undecided.
    pub fn of_configuration(config: &Configuration) -> Self {
        let nodes = config
            .nodes()
            .iter()
            .zip(config.chiralities())
            .map(|(&v, &chirality)| NodeSnapshot {
                x: v.x,
                y: v.y,
                chirality,
                role: Role::Undecided,
                phase: Phase::BoundaryElect,
                parent: None,
            })
            .collect();
        Self {
            n: config.len(),
            mode: String::new(),
            seed: config.seed(),
            ticks: 0,
            activation_units: 0,
            leaders: Vec::new(),
            nodes,
            edges: edges_of(config),
        }
    }

    pub fn capture(world: &World) -> Self {
        let config = world.config();
        let mut snap = Self::of_configuration(config);
        snap.mode = world.mode().to_string();
        snap.seed = world.seed();
        snap.ticks = world.metrics().ticks;
        snap.activation_units = world.metrics().activation_units;
        for (i, node) in snap.nodes.iter_mut().enumerate() {
            let state = &world.states()[i];
            node.role = state.role;
            node.phase = state.phase();
            node.parent = state
                .tree
                .parent
                .and_then(|p| world.views()[i].port(p).neighbor)
                .map(|j| xy(config.nodes()[j]));
        }
        snap.leaders = world.leaders().into_iter().map(|i| xy(config.nodes()[i])).collect();
        snap
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn configuration(&self) -> Configuration {
        let nodes = self.nodes.iter().map(|v| NodeCoord::new(v.x, v.y)).collect();
        let chirality = self.nodes.iter().map(|v| v.chirality).collect();
        Configuration::new(nodes, Some(chirality), self.seed).expect("snapshots hold valid configurations")
    }
}
