mod common;

use common::{node, STEPS};
use pm_elect::lattice::{
    neighbor_of, port_between, validate, Chirality, Configuration, LatticeError, NodeCoord, PortId,
};
use proptest::prelude::*;

const CHIRALITIES: [Chirality; 2] = [Chirality::Standard, Chirality::Flipped];

fn lattice_node() -> impl Strategy<Value = NodeCoord> {
    (-50i32..50, -50i32..50).prop_map(|(x, y)| node(2 * x + (y & 1), y))
}

fn chirality() -> impl Strategy<Value = Chirality> {
    prop_oneof![Just(Chirality::Standard), Just(Chirality::Flipped)]
}

proptest! {
    #[test]
    fn port_between_inverts_neighbor_of(u in lattice_node(), p in 0u8..6, c in chirality()) {
        let p = PortId::new(p).unwrap();
        prop_assert_eq!(port_between(u, neighbor_of(u, p, c), c), Ok(p));
    }

    #[test]
    fn flipped_mirrors_standard(u in lattice_node(), p in prop::sample::select(vec![1u8, 2, 4, 5])) {
        let p = PortId::new(p).unwrap();
        let s = neighbor_of(u, p, Chirality::Standard);
        let f = neighbor_of(u, p, Chirality::Flipped);
        prop_assert_eq!(f.x, s.x);
        prop_assert_eq!(f.y - u.y, -(s.y - u.y));
    }

    #[test]
    fn horizontal_ports_are_global(u in lattice_node(), c in chirality()) {
        prop_assert_eq!(neighbor_of(u, PortId::new(0).unwrap(), c), node(u.x + 2, u.y));
        prop_assert_eq!(neighbor_of(u, PortId::new(3).unwrap(), c), node(u.x - 2, u.y));
    }

    #[test]
    fn non_unit_offsets_are_rejected(u in lattice_node(), dx in -4i32..=4, dy in -2i32..=2, c in chirality()) {
        let v = node(u.x + dx, u.y + dy);
        let unit = STEPS.contains(&(dx, dy));
        prop_assert_eq!(port_between(u, v, c).is_ok(), unit);
    }

    #[test]
    fn random_shapes_validate(n in 1usize..60, seed: u64) {
        let nodes = pm_elect::harness::generators::random_nodes(n, seed);
        let config = Configuration::new(nodes, None, seed).unwrap();
        prop_assert!(validate(&config).is_ok());
        prop_assert_eq!(config.len(), n);
    }

    #[test]
    fn json_round_trip(n in 1usize..30, seed: u64) {
        let config = common::random_config(n, seed, seed ^ 0x5a5a);
        let back = Configuration::from_json(&config.to_json()).unwrap();
        prop_assert_eq!(back, config);
    }
}

/// Every pair of adjacent particles, every direction and chirality pair:
/// the horizontal axis is shared, and right ports face left ports.
#[test]
fn facing_ports_exhaustive() {
    let u = node(0, 0);
    let mut cases = 0;
    for d in STEPS {
        let v = node(d.0, d.1);
        for cu in CHIRALITIES {
            for cv in CHIRALITIES {
                let pu = port_between(u, v, cu).unwrap();
                let pv = port_between(v, u, cv).unwrap();
                assert_eq!(pu.is_horizontal(), pv.is_horizontal(), "{d:?} {cu:?} {cv:?}");
                assert_eq!(pu.is_right(), pv.is_left(), "{d:?} {cu:?} {cv:?}");
                if pu.is_horizontal() {
                    assert_eq!((pu.value() + 3) % 6, pv.value());
                }
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 24);
}

#[test]
fn right_and_left_port_sets() {
    for c in CHIRALITIES {
        for p in PortId::all() {
            let east = neighbor_of(node(0, 0), p, c).x > 0;
            assert_eq!(p.is_right(), east, "{p} {c:?}");
            assert_eq!(p.is_left(), !east);
        }
    }
}

#[test]
fn validation_errors_name_the_node() {
    let cfg = |pts: &[(i32, i32)]| Configuration::uniform(pts.iter().map(|&(x, y)| node(x, y)).collect());
    assert_eq!(cfg(&[]), Err(LatticeError::Empty));
    assert_eq!(cfg(&[(0, 0), (1, 0)]), Err(LatticeError::ParityViolation(node(1, 0))));
    assert_eq!(cfg(&[(0, 0), (2, 0), (0, 0)]), Err(LatticeError::Duplicate(node(0, 0))));
    assert!(matches!(cfg(&[(0, 0), (4, 0)]), Err(LatticeError::Disconnected(..))));
    assert!(cfg(&[(0, 0), (2, 0)]).is_ok());
}

#[test]
fn config_file_rejects_unknown_fields_and_bad_tags() {
    assert!(Configuration::from_json(r#"{"nodes": [[0,0]], "colour": 1}"#).is_err());
    assert_eq!(
        Configuration::from_json(r#"{"nodes": [[0,0]], "chirality": ["Q"]}"#),
        Err(LatticeError::BadChirality("Q".into()))
    );
    let c = Configuration::from_json(r#"{"nodes": [[0,0],[1,1]], "chirality": ["S","F"]}"#).unwrap();
    assert_eq!(c.chiralities(), &[Chirality::Standard, Chirality::Flipped]);
}
