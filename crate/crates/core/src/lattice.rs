//! Triangular-grid geometry: coordinates, ports, chirality and validated
//! particle configurations.
//!
//! Nodes use doubled x coordinates: East/West neighbours differ by 2 in `x`,
//! the four diagonal neighbours differ by 1 in both `x` and `y`. Every node
//! therefore satisfies `x + y` even.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeCoord {
    pub x: i32,
    pub y: i32,
}

impl NodeCoord {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, d: (i32, i32)) -> Self {
        Self::new(self.x + d.0, self.y + d.1)
    }

    pub fn has_valid_parity(self) -> bool {
        (self.x + self.y).rem_euclid(2) == 0
    }

    /// Node one step away in geometric direction `dir` (0 = East, counted
    /// counter-clockwise).
    pub fn step(self, dir: u8) -> Self {
        self.offset(DIRECTIONS[(dir % 6) as usize])
    }

    /// The six lattice neighbours in geometric counter-clockwise order from East.
    pub fn neighbors(self) -> [NodeCoord; 6] {
        std::array::from_fn(|d| self.step(d as u8))
    }

    /// Geometric direction from `self` to an adjacent `other`.
    pub fn direction_to(self, other: NodeCoord) -> Option<u8> {
        let d = (other.x - self.x, other.y - self.y);
        DIRECTIONS.iter().position(|&v| v == d).map(|i| i as u8)
    }
}

impl fmt::Display for NodeCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Unit displacements in geometric counter-clockwise order starting East.
pub const DIRECTIONS: [(i32, i32); 6] = [(2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chirality {
    Standard,
    Flipped,
}

impl Chirality {
    pub fn as_char(self) -> char {
        match self {
            Chirality::Standard => 'S',
            Chirality::Flipped => 'F',
        }
    }
}

/// A local port number in `0..6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PortId(u8);

impl PortId {
    pub const EAST: PortId = PortId(0);
    pub const WEST: PortId = PortId(3);

    pub fn new(value: u8) -> Option<Self> {
        (value < 6).then_some(Self(value))
    }

    /// Wraps any integer into `0..6`.
    pub fn wrapping(value: i32) -> Self {
        Self(value.rem_euclid(6) as u8)
    }

    pub fn all() -> impl Iterator<Item = PortId> {
        (0..6).map(PortId)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn rotate(self, by: i32) -> Self {
        Self::wrapping(self.0 as i32 + by)
    }

    pub fn is_right(self) -> bool {
        matches!(self.0, 0 | 1 | 5)
    }

    pub fn is_left(self) -> bool {
        !self.is_right()
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self.0, 0 | 3)
    }

    /// Geometric direction this port points to under chirality `c`.
    pub fn direction(self, c: Chirality) -> u8 {
        match c {
            Chirality::Standard => self.0,
            Chirality::Flipped => (6 - self.0) % 6,
        }
    }

    /// Port pointing in geometric direction `dir` under chirality `c`.
    pub fn from_direction(dir: u8, c: Chirality) -> Self {
        // the flip is an involution
        Self(Self(dir % 6).direction(c))
    }
}

impl fmt::Display for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn displacement(p: PortId, c: Chirality) -> (i32, i32) {
    DIRECTIONS[p.direction(c) as usize]
}

pub fn neighbor_of(u: NodeCoord, p: PortId, c: Chirality) -> NodeCoord {
    u.offset(displacement(p, c))
}

pub fn port_between(u: NodeCoord, v: NodeCoord, c: Chirality) -> Result<PortId, LatticeError> {
    u.direction_to(v)
        .map(|d| PortId::from_direction(d, c))
        .ok_or(LatticeError::NotAdjacent { u, v })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("nodes {u} and {v} are not adjacent")]
    NotAdjacent { u: NodeCoord, v: NodeCoord },
    #[error("configuration is empty")]
    Empty,
    #[error("duplicate node {0}")]
    Duplicate(NodeCoord),
    #[error("node {0} violates the lattice parity (x + y must be even)")]
    ParityViolation(NodeCoord),
    #[error("configuration is disconnected: {0} is unreachable from {1}")]
    Disconnected(NodeCoord, NodeCoord),
    #[error("chirality list has {got} entries for {expected} nodes")]
    ChiralityLength { expected: usize, got: usize },
    #[error("bad chirality tag {0:?} (expected \"S\" or \"F\")")]
    BadChirality(String),
    #[error("malformed configuration file: {0}")]
    Json(String),
}

/// A validated, connected set of occupied nodes with per-particle chirality.
///
/// Particles are indexed by their position in `nodes()`; that order is the
/// order they were supplied in and is used for every deterministic iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    nodes: Vec<NodeCoord>,
    chirality: Vec<Chirality>,
    seed: u64,
    index: HashMap<NodeCoord, usize>,
}

impl Configuration {
    /// Builds and validates a configuration. Without an explicit chirality
    /// list each particle's chirality is drawn from `seed`.
    pub fn new(
        nodes: Vec<NodeCoord>,
        chirality: Option<Vec<Chirality>>,
        seed: u64,
    ) -> Result<Self, LatticeError> {
        let chirality = match chirality {
            Some(c) if c.len() != nodes.len() => {
                return Err(LatticeError::ChiralityLength {
                    expected: nodes.len(),
                    got: c.len(),
                })
            }
            Some(c) => c,
            None => seeded_chirality(nodes.len(), seed),
        };
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, &u) in nodes.iter().enumerate() {
            if index.insert(u, i).is_some() {
                return Err(LatticeError::Duplicate(u));
            }
        }
        let config = Self {
            nodes,
            chirality,
            seed,
            index,
        };
        validate(&config)?;
        Ok(config)
    }

    /// Same nodes, every particle Standard.
    pub fn uniform(nodes: Vec<NodeCoord>) -> Result<Self, LatticeError> {
        let n = nodes.len();
        Self::new(nodes, Some(vec![Chirality::Standard; n]), 0)
    }

    pub fn nodes(&self) -> &[NodeCoord] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn chiralities(&self) -> &[Chirality] {
        &self.chirality
    }

    pub fn index_of(&self, u: NodeCoord) -> Option<usize> {
        self.index.get(&u).copied()
    }

    pub fn is_occupied(&self, u: NodeCoord) -> bool {
        self.index.contains_key(&u)
    }

    pub fn chirality_of(&self, u: NodeCoord) -> Option<Chirality> {
        self.index_of(u).map(|i| self.chirality[i])
    }

    /// Occupied lattice neighbours of `u` in geometric order.
    pub fn occupied_neighbors(&self, u: NodeCoord) -> impl Iterator<Item = NodeCoord> + '_ {
        u.neighbors().into_iter().filter(|v| self.is_occupied(*v))
    }

    /// Replaces the chirality assignment, keeping nodes and seed.
    pub fn with_chirality(&self, chirality: Vec<Chirality>) -> Result<Self, LatticeError> {
        Self::new(self.nodes.clone(), Some(chirality), self.seed)
    }

    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| LatticeError::Json(e.to_string()))?;
        file.into_configuration()
    }

    pub fn to_json(&self) -> String {
        let file = ConfigFile {
            nodes: self.nodes.iter().map(|u| [u.x, u.y]).collect(),
            chirality: Some(
                self.chirality
                    .iter()
                    .map(|c| c.as_char().to_string())
                    .collect(),
            ),
            seed: Some(self.seed),
        };
        serde_json::to_string_pretty(&file).expect("configuration serializes")
    }
}

fn seeded_chirality(n: usize, seed: u64) -> Vec<Chirality> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            if rng.gen::<bool>() {
                Chirality::Flipped
            } else {
                Chirality::Standard
            }
        })
        .collect()
}

/// On-disk configuration format.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub nodes: Vec<[i32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chirality: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn into_configuration(self) -> Result<Configuration, LatticeError> {
        let nodes = self
            .nodes
            .iter()
            .map(|&[x, y]| NodeCoord::new(x, y))
            .collect();
        let chirality = self
            .chirality
            .map(|tags| {
                tags.into_iter()
                    .map(|t| match t.as_str() {
                        "S" => Ok(Chirality::Standard),
                        "F" => Ok(Chirality::Flipped),
                        _ => Err(LatticeError::BadChirality(t)),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Configuration::new(nodes, chirality, self.seed.unwrap_or(0))
    }
}

pub fn validate(config: &Configuration) -> Result<(), LatticeError> {
    let first = *config.nodes.first().ok_or(LatticeError::Empty)?;
    if let Some(&bad) = config.nodes.iter().find(|u| !u.has_valid_parity()) {
        return Err(LatticeError::ParityViolation(bad));
    }
    if config.index.len() != config.nodes.len() {
        let mut seen = std::collections::HashSet::new();
        let dup = config.nodes.iter().find(|u| !seen.insert(**u)).copied();
        return Err(LatticeError::Duplicate(dup.unwrap_or(first)));
    }
    let mut reached = vec![false; config.len()];
    reached[0] = true;
    let mut queue = VecDeque::from([first]);
    while let Some(u) = queue.pop_front() {
        for v in config.occupied_neighbors(u) {
            let i = config.index[&v];
            if !reached[i] {
                reached[i] = true;
                queue.push_back(v);
            }
        }
    }
    match reached.iter().position(|r| !r) {
        Some(i) => Err(LatticeError::Disconnected(config.nodes[i], first)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: Chirality = Chirality::Standard;
    const F: Chirality = Chirality::Flipped;

    fn p(v: u8) -> PortId {
        PortId::new(v).unwrap()
    }

    fn n(x: i32, y: i32) -> NodeCoord {
        NodeCoord::new(x, y)
    }

    #[test]
    fn neighbor_examples() {
        assert_eq!(neighbor_of(n(0, 0), p(0), S), n(2, 0));
        assert_eq!(neighbor_of(n(0, 0), p(3), F), n(-2, 0));
        assert_eq!(neighbor_of(n(0, 0), p(1), S), n(1, 1));
        assert_eq!(neighbor_of(n(0, 0), p(1), F), n(1, -1));
    }

    #[test]
    fn port_tables() {
        let standard: Vec<_> = PortId::all().map(|q| displacement(q, S)).collect();
        let flipped: Vec<_> = PortId::all().map(|q| displacement(q, F)).collect();
        assert_eq!(standard, [(2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1)]);
        assert_eq!(flipped, [(2, 0), (1, -1), (-1, -1), (-2, 0), (-1, 1), (1, 1)]);
    }

    #[test]
    fn port_between_examples() {
        assert_eq!(port_between(n(0, 0), n(2, 0), S), Ok(p(0)));
        assert_eq!(port_between(n(0, 0), n(1, 1), F), Ok(p(5)));
        for c in [S, F] {
            assert_eq!(
                port_between(n(0, 0), n(3, 0), c),
                Err(LatticeError::NotAdjacent { u: n(0, 0), v: n(3, 0) })
            );
        }
    }

    #[test]
    fn validate_examples() {
        assert!(Configuration::uniform(vec![n(0, 0), n(2, 0)]).is_ok());
        assert!(matches!(
            Configuration::uniform(vec![n(0, 0), n(4, 0)]),
            Err(LatticeError::Disconnected(..))
        ));
        assert_eq!(
            Configuration::uniform(vec![n(0, 0), n(1, 0)]),
            Err(LatticeError::ParityViolation(n(1, 0)))
        );
        assert_eq!(Configuration::uniform(vec![]), Err(LatticeError::Empty));
        assert_eq!(
            Configuration::uniform(vec![n(0, 0), n(0, 0)]),
            Err(LatticeError::Duplicate(n(0, 0)))
        );
    }

    #[test]
    fn right_port_faces_left_port() {
        for q in PortId::all() {
            for cu in [S, F] {
                for cv in [S, F] {
                    let v = neighbor_of(n(0, 0), q, cu);
                    let back = port_between(v, n(0, 0), cv).unwrap();
                    assert_eq!(q.is_horizontal(), back.is_horizontal());
                    assert_ne!(q.is_right(), back.is_right());
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let text = r#"{"nodes": [[0,0],[2,0],[1,1]], "chirality": ["S","F","S"], "seed": 4}"#;
        let config = Configuration::from_json(text).unwrap();
        assert_eq!(config.chiralities(), &[S, F, S]);
        assert_eq!(Configuration::from_json(&config.to_json()).unwrap(), config);
        let bad = r#"{"nodes": [[0,0]], "colour": 1}"#;
        assert!(matches!(Configuration::from_json(bad), Err(LatticeError::Json(_))));
    }

    #[test]
    fn seeded_chirality_is_reproducible() {
        let nodes: Vec<_> = (0..20).map(|i| n(2 * i, 0)).collect();
        let a = Configuration::new(nodes.clone(), None, 9).unwrap();
        let b = Configuration::new(nodes, None, 9).unwrap();
        assert_eq!(a.chiralities(), b.chiralities());
    }
}
