mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use common::{add, node, oracle_components, oracle_dark_blue, STEPS};
use pm_elect::harness::generators::{fig1_nodes, fig5_nodes, fig6_nodes, s1_nodes};
use pm_elect::lattice::{Chirality, Configuration, NodeCoord};
use pm_elect::topology::{
    classify_edge, dark_blue_edges, extract_boundaries, extract_boundaries_with, grey_components,
    minimal_rotations, turning_sum, turning_sum_of, Boundary, BoundaryKind, EdgeClass, Masking,
};
use proptest::prelude::*;

fn as_sets(comps: Vec<Vec<NodeCoord>>) -> BTreeSet<BTreeSet<NodeCoord>> {
    comps.into_iter().map(|c| c.into_iter().collect()).collect()
}

/// Unordered edge plus witness, the identity of a local boundary.
fn triple(u: NodeCoord, v: NodeCoord, o: NodeCoord) -> (NodeCoord, NodeCoord, NodeCoord) {
    (u.min(v), u.max(v), o)
}

/// Whether `u` sees `v` as occupied: same component and not across a
/// dark-blue edge.
fn linked(comp: &BTreeSet<NodeCoord>, dark: &BTreeSet<(NodeCoord, NodeCoord)>, u: NodeCoord, v: NodeCoord) -> bool {
    comp.contains(&v) && !dark.contains(&(u.min(v), u.max(v)))
}

/// Every (linked edge, empty common neighbour) pair inside a component.
fn oracle_local_boundaries(
    comp: &BTreeSet<NodeCoord>,
    dark: &BTreeSet<(NodeCoord, NodeCoord)>,
) -> BTreeSet<(NodeCoord, NodeCoord, NodeCoord)> {
    let mut out = BTreeSet::new();
    for &u in comp {
        for (k, d) in STEPS.iter().enumerate() {
            let v = add(u, *d);
            if !linked(comp, dark, u, v) {
                continue;
            }
            for side in [STEPS[(k + 1) % 6], STEPS[(k + 5) % 6]] {
                let o = add(u, side);
                if !comp.contains(&o) {
                    out.insert(triple(u, v, o));
                }
            }
        }
    }
    out
}

/// Structural checks of one component's boundaries against raw geometry.
fn check_component(all: &[NodeCoord], comp_nodes: &[NodeCoord], boundaries: &[Boundary]) {
    let comp: BTreeSet<NodeCoord> = comp_nodes.iter().copied().collect();
    // (west, east) pairs, which is also (min, max) under the coordinate order
    let dark = oracle_dark_blue(all);
    let link = |u: NodeCoord, v: NodeCoord| linked(&comp, &dark, u, v);
    if comp.len() == 1 {
        assert!(boundaries.is_empty());
        return;
    }
    let mut seen = BTreeMap::new();
    let mut per_particle: BTreeMap<NodeCoord, BTreeSet<usize>> = BTreeMap::new();
    for (bi, b) in boundaries.iter().enumerate() {
        let m = b.len();
        for (i, a) in b.agents.iter().enumerate() {
            per_particle.entry(a.node).or_default().insert(bi);
            let next = b.agents[(i + 1) % m];
            assert_eq!(next.node, add(a.node, STEPS[a.to_dir as usize]));
            assert_eq!(next.from_dir, (a.to_dir + 3) % 6);
            // the swept sector holds only empty nodes, and exactly turn_code of them
            let mut swept = 0;
            for j in 1..6 {
                let d = (a.from_dir as usize + j) % 6;
                if d == a.to_dir as usize {
                    break;
                }
                assert!(!link(a.node, add(a.node, STEPS[d])), "occupied node swept at {}", a.node);
                swept += 1;
            }
            assert_eq!(a.turn_code, swept, "turn code at {}", a.node);
            assert!(link(a.node, add(a.node, STEPS[a.from_dir as usize])));
            assert!(link(a.node, add(a.node, STEPS[a.to_dir as usize])));
        }
        for lb in b.ring() {
            *seen.entry(triple(lb.u, lb.v, lb.o)).or_insert(0) += 1;
        }
        let t = turning_sum(b);
        assert!(t == -6 || t == 6, "turning sum {t}");
        assert_eq!(turning_sum_of(&b.reversed_word()), t);
        let mut w = b.word();
        let mut r = b.reversed_word();
        w.sort();
        r.sort();
        assert_eq!(w, r);
        assert_eq!(b.kind == BoundaryKind::Outer, t == -6);
        let k = minimal_rotations(&b.word()).len();
        assert!([1, 2, 3, 6].contains(&k), "k = {k}");
        assert_eq!(k, minimal_rotations(&b.reversed_word()).len());
    }
    let expected = oracle_local_boundaries(&comp, &dark);
    assert_eq!(seen.keys().copied().collect::<BTreeSet<_>>(), expected);
    assert!(seen.values().all(|&c| c == 1), "a local boundary appears twice");
    assert_eq!(boundaries.iter().filter(|b| b.kind == BoundaryKind::Outer).count(), 1);
    assert!(per_particle.values().all(|s| s.len() <= 2), "particle on three boundaries");
    for &u in &comp {
        let exposed = STEPS.iter().any(|&d| !link(u, add(u, d)));
        assert_eq!(per_particle.contains_key(&u), exposed, "{u}");
    }
}

fn check_configuration(config: &Configuration) {
    for comp in grey_components(config) {
        check_component(config.nodes(), &comp, &extract_boundaries(config, &comp));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn components_match_raw_geometry(n in 1usize..60, seed: u64) {
        let config = common::random_config(n, seed, seed);
        prop_assert_eq!(as_sets(grey_components(&config)), oracle_components(config.nodes()));
        let dark: BTreeSet<_> = dark_blue_edges(&config).into_iter().collect();
        prop_assert_eq!(dark, oracle_dark_blue(config.nodes()));
    }

    #[test]
    fn classification_is_symmetric_and_chirality_free(n in 2usize..40, seed: u64) {
        let config = common::random_config(n, seed, seed);
        let flipped = config.with_chirality(
            config.chiralities().iter().map(|c| match c {
                Chirality::Standard => Chirality::Flipped,
                Chirality::Flipped => Chirality::Standard,
            }).collect(),
        ).unwrap();
        let occ: HashSet<NodeCoord> = config.nodes().iter().copied().collect();
        for &u in config.nodes() {
            for d in STEPS {
                let v = add(u, d);
                if !occ.contains(&v) {
                    continue;
                }
                let c = classify_edge(&config, u, v).unwrap();
                prop_assert_eq!(classify_edge(&config, v, u).unwrap(), c);
                prop_assert_eq!(classify_edge(&flipped, u, v).unwrap(), c);
                if d.1 != 0 {
                    prop_assert_eq!(c, EdgeClass::Grey);
                }
            }
        }
    }

    #[test]
    fn boundaries_are_sound(n in 1usize..60, seed: u64) {
        check_configuration(&common::random_config(n, seed, 0));
    }

    #[test]
    fn minimal_rotations_match_brute_force(word in prop::collection::vec(1u8..=5, 1..14)) {
        let m = word.len();
        let rot = |i: usize| -> Vec<u8> { word[i..].iter().chain(&word[..i]).copied().collect() };
        let least = (0..m).map(rot).min().unwrap();
        let expected: Vec<usize> = (0..m).filter(|&i| rot(i) == least).collect();
        let got = minimal_rotations(&word);
        prop_assert_eq!(&got, &expected);
        let k = got.len();
        prop_assert_eq!(m % k, 0);
        let period = m / k;
        prop_assert!((0..m).all(|i| word[i] == word[(i + period) % m]));
    }
}

#[test]
fn family_boundaries_are_sound() {
    let nodes = [
        s1_nodes(),
        fig1_nodes(),
        fig5_nodes(16).unwrap(),
        fig5_nodes(64).unwrap(),
        fig6_nodes(1),
        fig6_nodes(4),
    ];
    for ns in nodes {
        check_configuration(&Configuration::uniform(ns).unwrap());
    }
}

#[test]
fn classify_examples() {
    let cfg = |pts: &[(i32, i32)]| Configuration::uniform(pts.iter().map(|&(x, y)| node(x, y)).collect()).unwrap();
    let (a, b) = (node(0, 0), node(2, 0));
    assert_eq!(classify_edge(&cfg(&[(0, 0), (2, 0)]), a, b), Ok(EdgeClass::DarkBlue));
    assert_eq!(classify_edge(&cfg(&[(0, 0), (2, 0), (1, 1)]), a, b), Ok(EdgeClass::LightBlue));
    assert_eq!(classify_edge(&cfg(&[(0, 0), (2, 0), (1, 1), (1, -1)]), a, b), Ok(EdgeClass::Grey));
    assert_eq!(classify_edge(&cfg(&[(0, 0), (1, 1)]), a, node(1, 1)), Ok(EdgeClass::Grey));
}

#[test]
fn boundary_word_examples() {
    let cfg = |pts: &[(i32, i32)]| Configuration::uniform(pts.iter().map(|&(x, y)| node(x, y)).collect()).unwrap();
    let tri = cfg(&[(0, 0), (2, 0), (1, 1)]);
    let b = extract_boundaries(&tri, tri.nodes());
    assert_eq!((b.len(), b[0].word(), turning_sum(&b[0])), (1, vec![4, 4, 4], -6));

    let pair = cfg(&[(0, 0), (1, 1)]);
    let b = extract_boundaries(&pair, pair.nodes());
    assert_eq!((b.len(), b[0].word(), turning_sum(&b[0])), (1, vec![5, 5], -6));

    // a hole ringed by six particles, read without dark-blue masking
    let ring = Configuration::uniform(s1_nodes()).unwrap();
    let b = extract_boundaries_with(&ring, ring.nodes(), Masking::MembershipOnly);
    let mut kinds: Vec<_> = b.iter().map(|x| (x.kind == BoundaryKind::Outer, x.word(), turning_sum(x))).collect();
    kinds.sort();
    assert_eq!(kinds, vec![(false, vec![1; 6], 6), (true, vec![3; 6], -6)]);
}

#[test]
fn fig1_has_two_components_and_three_dark_edges() {
    let c = Configuration::uniform(fig1_nodes()).unwrap();
    assert_eq!(grey_components(&c).len(), 2);
    assert_eq!(dark_blue_edges(&c).len(), 3);
}

#[test]
fn fig5_chain() {
    for n in [16usize, 32, 64] {
        let c = Configuration::uniform(fig5_nodes(n).unwrap()).unwrap();
        let comps = grey_components(&c);
        assert_eq!(comps.len(), n / 2 + 2, "n = {n}");
        assert_eq!(comps.iter().filter(|x| x.len() == 1).count(), n / 2);
        assert!(comps.iter().filter(|x| x.len() > 1).all(|x| x.len() == n / 4));
    }
}

/// Dark-blue edges with both ends in one grey component.
fn internal_dark_blue(c: &Configuration) -> usize {
    let comp = common::component_map(c.nodes());
    oracle_dark_blue(c.nodes())
        .iter()
        .filter(|(u, v)| comp[u] == comp[v])
        .count()
}

#[test]
fn fig6_internal_dark_edges_grow_linearly() {
    let counts: Vec<(usize, usize)> = (1..=6)
        .map(|r| {
            let c = Configuration::uniform(fig6_nodes(r)).unwrap();
            (c.len(), internal_dark_blue(&c))
        })
        .collect();
    assert_eq!(grey_components(&Configuration::uniform(fig6_nodes(3)).unwrap()).len(), 1);
    let step = counts[1].1 - counts[0].1;
    assert!(step > 0);
    for w in counts.windows(2) {
        assert_eq!(w[1].1 - w[0].1, step, "{counts:?}");
    }
    // at least one internal dark-blue edge per ten particles
    assert!(counts.iter().all(|&(n, d)| 10 * d >= n), "{counts:?}");
}
