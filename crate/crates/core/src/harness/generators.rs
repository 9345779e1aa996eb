//! Configuration families.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{Configuration, LatticeError, NodeCoord};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("unknown family {0:?}; expected s1, path, fig1, fig5, fig6 or random")]
    UnknownFamily(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn build(nodes: Vec<NodeCoord>, seed: u64) -> Result<Configuration, GenError> {
    Ok(Configuration::new(nodes, None, seed)?)
}

fn coords(points: &[(i32, i32)]) -> Vec<NodeCoord> {
    points.iter().map(|&(x, y)| NodeCoord::new(x, y)).collect()
}

/// Six particles around one empty node.
pub fn s1_nodes() -> Vec<NodeCoord> {
    coords(&[(0, 0), (2, 0), (3, 1), (2, 2), (0, 2), (-1, 1)])
}

/// The first `k` particles of a path that winds upwards with period six.
pub fn path_nodes(k: usize) -> Vec<NodeCoord> {
    const PERIOD: [(i32, i32); 6] = [(0, 0), (2, 0), (3, 1), (2, 2), (0, 2), (-1, 3)];
    (0..k)
        .map(|i| {
            let (x, y) = PERIOD[i % 6];
            NodeCoord::new(x, y + 4 * (i / 6) as i32)
        })
        .collect()
}

/// Two grey components with three dark-blue edges among them.
pub fn fig1_nodes() -> Vec<NodeCoord> {
    coords(&[
        (5, 1),
        (7, 1),
        (8, 2),
        (4, 2),
        (3, 3),
        (5, 3),
        (7, 3),
        (9, 3),
        (10, 4),
        (6, 4),
        (2, 4),
        (3, 5),
        (5, 5),
        (7, 5),
        (9, 5),
        (8, 6),
        (4, 6),
        (5, 7),
        (7, 7),
        (15, 1),
        (14, 2),
        (13, 3),
        (12, 4),
        (13, 5),
        (14, 6),
    ])
}

/// `r` diamond blocks in a row, neighbours sharing a corner; each block
/// encloses one dark-blue edge.
pub fn fig6_nodes(r: usize) -> Vec<NodeCoord> {
    let mut out: Vec<NodeCoord> = Vec::new();
    for t in 0..r as i32 {
        let o = 4 * t;
        for (x, y) in [(o + 1, 1), (o, 2), (o + 1, 3), (o + 2, 4), (o + 3, 3), (o + 4, 2), (o + 3, 1)] {
            let v = NodeCoord::new(x, y);
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// One big component of `s` particles whose rightmost particle sits at
/// height 2: diamond blocks plus a zigzag tail.
fn fig5_component(s: usize) -> Vec<NodeCoord> {
    let r = (s - 1) / 6;
    if r == 0 {
        return (0..s as i32).map(|i| NodeCoord::new(-(i % 2), 2 + i)).collect();
    }
    let mut nodes = fig6_nodes(r);
    let tail = s - nodes.len();
    nodes.extend((1..=tail as i32).map(|i| NodeCoord::new(2 - (i % 2), 4 + i)));
    nodes
}

/// Two components of `n/4` particles joined by a horizontal chain of `n/2`
/// single particles.
pub fn fig5_nodes(n: usize) -> Result<Vec<NodeCoord>, GenError> {
    if n == 0 || n % 4 != 0 {
        return Err(GenError::BadParams(format!("fig5 needs n divisible by 4, got {n}")));
    }
    let left = fig5_component(n / 4);
    let right_x = left.iter().filter(|v| v.y == 2).map(|v| v.x).max().expect("a node at height 2");
    let chain = n / 2;
    let mirror = 2 * right_x + 2 * (chain as i32 + 1);
    let mut nodes = left.clone();
    nodes.extend((1..=chain as i32).map(|k| NodeCoord::new(right_x + 2 * k, 2)));
    nodes.extend(left.iter().map(|v| NodeCoord::new(mirror - v.x, v.y)));
    Ok(nodes)
}

/// Grows a connected set from the origin by attaching a uniformly chosen
/// empty neighbour.
pub fn random_nodes(n: usize, seed: u64) -> Vec<NodeCoord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(n);
    let mut set = BTreeSet::new();
    if n == 0 {
        return nodes;
    }
    nodes.push(NodeCoord::new(0, 0));
    set.insert(NodeCoord::new(0, 0));
    while nodes.len() < n {
        let frontier: BTreeSet<NodeCoord> = nodes
            .iter()
            .flat_map(|v| v.neighbors())
            .filter(|v| !set.contains(v))
            .collect();
        let frontier: Vec<NodeCoord> = frontier.into_iter().collect();
        let v = *frontier.choose(&mut rng).expect("frontier is never empty");
        set.insert(v);
        nodes.push(v);
    }
    nodes
}

fn param<T: std::str::FromStr>(params: &BTreeMap<String, String>, key: &str) -> Result<T, GenError> {
    let raw = params
        .get(key)
        .ok_or_else(|| GenError::BadParams(format!("missing parameter {key}")))?;
    raw.parse()
        .map_err(|_| GenError::BadParams(format!("parameter {key}={raw} is not a number")))
}

/// Builds a family member. Chiralities are drawn from `seed`; `random`
/// takes its own `seed` parameter for the shape and falls back to `seed`.
pub fn generate(family: &str, params: &BTreeMap<String, String>, seed: u64) -> Result<Configuration, GenError> {
    let nodes = match family {
        "s1" => s1_nodes(),
        "path" => {
            let k: usize = param(params, "k")?;
            if k == 0 {
                return Err(GenError::BadParams("path needs k >= 1".into()));
            }
            path_nodes(k)
        }
        "fig1" => fig1_nodes(),
        "fig5" => fig5_nodes(param(params, "n")?)?,
        "fig6" => {
            let r: usize = param(params, "r")?;
            if r == 0 {
                return Err(GenError::BadParams("fig6 needs r >= 1".into()));
            }
            fig6_nodes(r)
        }
        "random" => {
            let n: usize = param(params, "n")?;
            if n == 0 {
                return Err(GenError::BadParams("random needs n >= 1".into()));
            }
            let shape_seed = if params.contains_key("seed") { param(params, "seed")? } else { seed };
            random_nodes(n, shape_seed)
        }
        other => return Err(GenError::UnknownFamily(other.to_string())),
    };
    build(nodes, seed)
}

/// Parses `k=v` pairs.
pub fn parse_params<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<BTreeMap<String, String>, GenError> {
    pairs
        .into_iter()
        .flat_map(|s| s.split(','))
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| GenError::BadParams(format!("expected k=v, got {kv:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}
