//! Helpers shared by the integration tests. The oracles here work from raw
//! coordinates and do not call into the library's topology code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use pm_elect::harness::generators::random_nodes;
use pm_elect::lattice::{Configuration, NodeCoord};
use pm_elect::runtime::{RunOptions, ScheduleMode, World};

pub const MODES: [&str; 4] = ["sync", "seqrr", "seqrand", "async"];

pub const STEPS: [(i32, i32); 6] = [(2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1)];

pub fn node(x: i32, y: i32) -> NodeCoord {
    NodeCoord::new(x, y)
}

pub fn add(u: NodeCoord, d: (i32, i32)) -> NodeCoord {
    node(u.x + d.0, u.y + d.1)
}

/// Shape `shape_seed`, chiralities drawn from `chirality_seed`.
pub fn random_config(n: usize, shape_seed: u64, chirality_seed: u64) -> Configuration {
    Configuration::new(random_nodes(n, shape_seed), None, chirality_seed).unwrap()
}

/// The `c`-th configuration of a deterministic corpus with sizes in 1..=40.
pub fn corpus(c: u64) -> Configuration {
    let n = 1 + (c as usize * 7919) % 40;
    random_config(n, 1000 + c, c)
}

pub fn run(config: Configuration, mode: &str, seed: u64, options: RunOptions) -> World {
    let m = ScheduleMode::parse(mode, config.len()).unwrap();
    let mut w = World::new(config, m, seed, options);
    w.run_to_quiescence().expect("run quiesces");
    w
}

/// Occupied common neighbours of the horizontal edge `u`, `u + (2, 0)`.
fn horizontal_support(occ: &HashSet<NodeCoord>, u: NodeCoord) -> usize {
    [add(u, (1, 1)), add(u, (1, -1))]
        .iter()
        .filter(|v| occ.contains(v))
        .count()
}

/// Horizontal occupied edges with no occupied common neighbour, as
/// (west end, east end).
pub fn oracle_dark_blue(nodes: &[NodeCoord]) -> BTreeSet<(NodeCoord, NodeCoord)> {
    let occ: HashSet<NodeCoord> = nodes.iter().copied().collect();
    nodes
        .iter()
        .filter(|&&u| occ.contains(&add(u, (2, 0))) && horizontal_support(&occ, u) == 0)
        .map(|&u| (u, add(u, (2, 0))))
        .collect()
}

/// Components of the graph without dark-blue edges, as sorted node sets.
pub fn oracle_components(nodes: &[NodeCoord]) -> BTreeSet<BTreeSet<NodeCoord>> {
    let occ: HashSet<NodeCoord> = nodes.iter().copied().collect();
    let dark = oracle_dark_blue(nodes);
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    for &s in nodes {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for d in STEPS {
                let v = add(u, d);
                if !occ.contains(&v) || dark.contains(&(u, v)) || dark.contains(&(v, u)) {
                    continue;
                }
                if seen.insert(v) {
                    comp.insert(v);
                    stack.push(v);
                }
            }
        }
        out.insert(comp);
    }
    out
}

/// Component index of every node under `oracle_components`.
pub fn component_map(nodes: &[NodeCoord]) -> BTreeMap<NodeCoord, usize> {
    oracle_components(nodes)
        .into_iter()
        .enumerate()
        .flat_map(|(i, c)| c.into_iter().map(move |u| (u, i)))
        .collect()
}

/// Random parent vector over `n` nodes rooted at 0; children are listed in
/// index order.
pub fn random_parents(n: usize, rng: &mut impl rand::Rng) -> Vec<Option<usize>> {
    let mut parent = vec![None];
    for i in 1..n {
        parent.push(Some(rng.gen_range(0..i)));
    }
    parent
}

/// Depth-first visit sequence (the Euler tour) by plain recursion.
pub fn dfs_visits(parent: &[Option<usize>]) -> Vec<usize> {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(i);
        }
    }
    fn go(v: usize, children: &[Vec<usize>], out: &mut Vec<usize>) {
        out.push(v);
        for &c in &children[v] {
            go(c, children, out);
            out.push(v);
        }
    }
    let root = parent.iter().position(Option::is_none).unwrap();
    let mut out = Vec::new();
    go(root, &children, &mut out);
    out
}
