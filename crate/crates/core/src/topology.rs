//! Observer-side structure of a configuration: edge classes, grey
//! components, boundaries with turn codes, and the minimal-rotation oracle.
//!
//! Dark-blue neighbours are masked: inside a grey component a node reached
//! only through a dark-blue edge counts as unoccupied.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Configuration, NodeCoord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    Grey,
    LightBlue,
    DarkBlue,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("nodes {0} and {1} are not adjacent")]
    NotAdjacent(NodeCoord, NodeCoord),
    #[error("node {0} is not occupied")]
    NotOccupied(NodeCoord),
}

/// The two nodes adjacent to both ends of the edge `u`–`u.step(dir)`.
pub fn common_neighbors(u: NodeCoord, dir: u8) -> [NodeCoord; 2] {
    [u.step(dir + 1), u.step(dir + 5)]
}

pub fn classify_edge(
    config: &Configuration,
    u: NodeCoord,
    v: NodeCoord,
) -> Result<EdgeClass, TopologyError> {
    for w in [u, v] {
        if !config.is_occupied(w) {
            return Err(TopologyError::NotOccupied(w));
        }
    }
    let dir = u.direction_to(v).ok_or(TopologyError::NotAdjacent(u, v))?;
    Ok(classify_unchecked(config, u, dir))
}

pub(crate) fn classify_unchecked(config: &Configuration, u: NodeCoord, dir: u8) -> EdgeClass {
    if dir % 3 != 0 {
        return EdgeClass::Grey;
    }
    let shared = common_neighbors(u, dir)
        .iter()
        .filter(|w| config.is_occupied(**w))
        .count();
    match shared {
        0 => EdgeClass::DarkBlue,
        1 => EdgeClass::LightBlue,
        _ => EdgeClass::Grey,
    }
}

/// Whether `u` and its neighbour in direction `dir` are both occupied and not
/// separated by a dark-blue edge.
pub fn grey_linked(config: &Configuration, u: NodeCoord, dir: u8) -> bool {
    config.is_occupied(u.step(dir)) && classify_unchecked(config, u, dir) != EdgeClass::DarkBlue
}

/// Connected components under grey and light-blue edges. Components are
/// ordered by their first node in configuration order; nodes inside a
/// component keep configuration order.
pub fn grey_components(config: &Configuration) -> Vec<Vec<NodeCoord>> {
    let mut label = vec![usize::MAX; config.len()];
    let mut count = 0;
    for start in 0..config.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        let mut stack = vec![config.nodes()[start]];
        while let Some(u) = stack.pop() {
            for dir in 0..6 {
                if grey_linked(config, u, dir) {
                    let v = u.step(dir);
                    let i = config.index_of(v).expect("occupied");
                    if label[i] == usize::MAX {
                        label[i] = count;
                        stack.push(v);
                    }
                }
            }
        }
        count += 1;
    }
    let mut out = vec![Vec::new(); count];
    for (i, &u) in config.nodes().iter().enumerate() {
        out[label[i]].push(u);
    }
    out
}

/// Number of dark-blue edges in the configuration.
pub fn dark_blue_edges(config: &Configuration) -> Vec<(NodeCoord, NodeCoord)> {
    config
        .nodes()
        .iter()
        .filter(|u| grey_or_blue(config, **u, 0) == Some(EdgeClass::DarkBlue))
        .map(|&u| (u, u.step(0)))
        .collect()
}

fn grey_or_blue(config: &Configuration, u: NodeCoord, dir: u8) -> Option<EdgeClass> {
    config
        .is_occupied(u.step(dir))
        .then(|| classify_unchecked(config, u, dir))
}

/// An occupied edge `u`–`v` witnessing the unoccupied common neighbour `o`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LocalBoundary {
    pub u: NodeCoord,
    pub v: NodeCoord,
    pub o: NodeCoord,
}

/// One visit of a particle on a boundary walk. The walk enters from the
/// neighbour in direction `from_dir`, sweeps `turn_code` unoccupied
/// directions counter-clockwise, and leaves towards `to_dir`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryAgent {
    pub node: NodeCoord,
    pub turn_code: u8,
    pub from_dir: u8,
    pub to_dir: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryKind {
    Outer,
    Inner,
}

/// A cyclic agent sequence; agent `i + 1` is the successor of agent `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Boundary {
    pub agents: Vec<BoundaryAgent>,
    pub kind: BoundaryKind,
}

impl Boundary {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn word(&self) -> Vec<u8> {
        self.agents.iter().map(|a| a.turn_code).collect()
    }

    /// Turn codes read in the opposite orientation, starting at agent 0.
    pub fn reversed_word(&self) -> Vec<u8> {
        let m = self.len();
        (0..m).map(|i| self.agents[(m - i) % m].turn_code).collect()
    }

    /// Local boundary crossed between agent `i` and its successor.
    pub fn local(&self, i: usize) -> LocalBoundary {
        let a = self.agents[i];
        let b = self.agents[(i + 1) % self.len()];
        LocalBoundary {
            u: a.node,
            v: b.node,
            o: a.node.step(a.to_dir + 5),
        }
    }

    pub fn ring(&self) -> Vec<LocalBoundary> {
        (0..self.len()).map(|i| self.local(i)).collect()
    }
}

pub fn turning_sum_of(word: &[u8]) -> i32 {
    word.iter().map(|&c| 2 - c as i32).sum()
}

pub fn turning_sum(b: &Boundary) -> i32 {
    turning_sum_of(&b.word())
}

/// How neighbours inside the node set are counted as occupied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Masking {
    /// Dark-blue neighbours count as unoccupied (what particles see).
    DarkBlue,
    /// Every member counts as occupied (pure lattice geometry).
    MembershipOnly,
}

/// Occupancy seen from inside one grey component.
pub struct MaskedView<'a> {
    config: &'a Configuration,
    members: HashSet<NodeCoord>,
    masking: Masking,
}

impl<'a> MaskedView<'a> {
    pub fn new(config: &'a Configuration, component: &[NodeCoord]) -> Self {
        Self::with_masking(config, component, Masking::DarkBlue)
    }

    pub fn with_masking(config: &'a Configuration, component: &[NodeCoord], masking: Masking) -> Self {
        Self {
            config,
            members: component.iter().copied().collect(),
            masking,
        }
    }

    pub fn contains(&self, u: NodeCoord) -> bool {
        self.members.contains(&u)
    }

    pub fn occupied(&self, u: NodeCoord, dir: u8) -> bool {
        self.members.contains(&u.step(dir))
            && (self.masking == Masking::MembershipOnly || grey_linked(self.config, u, dir))
    }

    /// Gaps around `u` as `(start, end)` geometric directions: `start` and
    /// `end` are occupied, everything strictly between them counter-clockwise
    /// is not. A node with one neighbour has a single gap with `start == end`.
    pub fn gaps(&self, u: NodeCoord) -> Vec<(u8, u8)> {
        let occ: [bool; 6] = std::array::from_fn(|d| self.occupied(u, d as u8));
        let occupied_dirs: Vec<u8> = (0..6).filter(|&d| occ[d as usize]).collect();
        if occupied_dirs.is_empty() || occupied_dirs.len() == 6 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for &s in &occupied_dirs {
            let mut e = (s + 1) % 6;
            while !occ[e as usize] {
                e = (e + 1) % 6;
            }
            if e != (s + 1) % 6 {
                out.push((s, e));
            }
        }
        out
    }
}

fn gap_size(s: u8, e: u8) -> u8 {
    match (e + 6 - s) % 6 {
        0 => 5,
        d => d - 1,
    }
}

/// Boundaries of one grey component, each in the orientation that sweeps
/// counter-clockwise around every visited particle. Singletons have none.
pub fn extract_boundaries(config: &Configuration, component: &[NodeCoord]) -> Vec<Boundary> {
    extract_boundaries_with(config, component, Masking::DarkBlue)
}

pub fn extract_boundaries_with(
    config: &Configuration,
    component: &[NodeCoord],
    masking: Masking,
) -> Vec<Boundary> {
    let view = MaskedView::with_masking(config, component, masking);
    let mut agents: Vec<BoundaryAgent> = Vec::new();
    let mut by_entry: HashMap<(NodeCoord, u8), usize> = HashMap::new();
    for &u in component {
        for (s, e) in view.gaps(u) {
            by_entry.insert((u, s), agents.len());
            agents.push(BoundaryAgent {
                node: u,
                turn_code: gap_size(s, e),
                from_dir: s,
                to_dir: e,
            });
        }
    }
    let mut seen = vec![false; agents.len()];
    let mut out = Vec::new();
    for start in 0..agents.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            let a = agents[i];
            cycle.push(a);
            let next = (a.node.step(a.to_dir), (a.to_dir + 3) % 6);
            i = by_entry[&next];
        }
        debug_assert_eq!(i, start, "boundary walk must close on its start");
        let kind = if turning_sum_of(&cycle.iter().map(|a| a.turn_code).collect::<Vec<_>>()) < 0 {
            BoundaryKind::Outer
        } else {
            BoundaryKind::Inner
        };
        out.push(Boundary {
            agents: cycle,
            kind,
        });
    }
    out
}

/// Start indices whose rotation of `word` is lexicographically smallest.
pub fn minimal_rotations(word: &[u8]) -> Vec<usize> {
    let m = word.len();
    let rotation = |i: usize| word[i..].iter().chain(&word[..i]).copied();
    let best = (0..m)
        .min_by(|&a, &b| rotation(a).cmp(rotation(b)))
        .unwrap_or(0);
    (0..m).filter(|&i| rotation(i).eq(rotation(best))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: i32, y: i32) -> NodeCoord {
        NodeCoord::new(x, y)
    }

    fn cfg(nodes: &[(i32, i32)]) -> Configuration {
        Configuration::uniform(nodes.iter().map(|&(x, y)| n(x, y)).collect()).unwrap()
    }

    fn sorted(mut w: Vec<u8>) -> Vec<u8> {
        w.sort();
        w
    }

    #[test]
    fn classify_examples() {
        let c = cfg(&[(0, 0), (2, 0), (1, 1)]);
        assert_eq!(classify_edge(&c, n(0, 0), n(2, 0)), Ok(EdgeClass::LightBlue));
        assert_eq!(classify_edge(&c, n(0, 0), n(1, 1)), Ok(EdgeClass::Grey));
        let pair = cfg(&[(0, 0), (2, 0)]);
        assert_eq!(classify_edge(&pair, n(0, 0), n(2, 0)), Ok(EdgeClass::DarkBlue));
        let diamond = cfg(&[(0, 0), (2, 0), (1, 1), (1, -1)]);
        assert_eq!(classify_edge(&diamond, n(2, 0), n(0, 0)), Ok(EdgeClass::Grey));
        assert_eq!(
            classify_edge(&pair, n(0, 0), n(4, 0)),
            Err(TopologyError::NotOccupied(n(4, 0)))
        );
    }

    #[test]
    fn components_split_on_dark_blue() {
        assert_eq!(grey_components(&cfg(&[(0, 0)])), vec![vec![n(0, 0)]]);
        assert_eq!(grey_components(&cfg(&[(0, 0), (2, 0)])).len(), 2);
    }

    #[test]
    fn triangle_ring() {
        let c = cfg(&[(0, 0), (2, 0), (1, 1)]);
        let comps = grey_components(&c);
        let b = extract_boundaries(&c, &comps[0]);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].word(), vec![4, 4, 4]);
        assert_eq!(turning_sum(&b[0]), -6);
        assert_eq!(b[0].kind, BoundaryKind::Outer);
    }

    #[test]
    fn hexagon_ring_has_inner_boundary() {
        let ring: Vec<(i32, i32)> = crate::lattice::DIRECTIONS.to_vec();
        let c = cfg(&ring);
        let all: Vec<_> = c.nodes().to_vec();
        // top and bottom edges are dark blue, so the masked view splits the ring
        assert_eq!(grey_components(&c).len(), 2);
        let b = extract_boundaries_with(&c, &all, Masking::MembershipOnly);
        let words: Vec<_> = b.iter().map(|x| (x.kind, sorted(x.word()))).collect();
        assert!(words.contains(&(BoundaryKind::Outer, vec![3; 6])));
        assert!(words.contains(&(BoundaryKind::Inner, vec![1; 6])));
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn vertical_pair() {
        let c = cfg(&[(0, 0), (1, 1)]);
        let b = extract_boundaries(&c, c.nodes());
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].word(), vec![5, 5]);
        assert_eq!(turning_sum(&b[0]), -6);
    }

    #[test]
    fn local_boundaries_have_unoccupied_witness() {
        let c = cfg(&[(0, 0), (2, 0), (1, 1), (3, 1), (4, 2)]);
        for comp in grey_components(&c) {
            let view = MaskedView::new(&c, &comp);
            for b in extract_boundaries(&c, &comp) {
                for lb in b.ring() {
                    let du = lb.u.direction_to(lb.o).unwrap();
                    assert!(!view.occupied(lb.u, du));
                    assert!(lb.v.direction_to(lb.o).is_some());
                }
            }
        }
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(minimal_rotations(&[1, 2, 1, 2]), vec![0, 2]);
        assert_eq!(minimal_rotations(&[3, 4, 3, 2]), vec![3]);
        assert_eq!(minimal_rotations(&[4, 4, 4]), vec![0, 1, 2]);
        assert_eq!(turning_sum_of(&[1; 6]), 6);
        assert_eq!(turning_sum_of(&[5, 5]), -6);
    }
}
