mod common;

use common::node;
use pm_elect::boundary_comm::{
    detect_common_chirality_grey, forward_on_boundary, BoundaryCommError, BoundaryHop, ChiralityRelation,
    NeighborhoodView,
};
use pm_elect::lattice::{Configuration, NodeCoord, PortId};
use pm_elect::topology::{extract_boundaries, grey_components, Boundary};
use proptest::prelude::*;

fn truth(config: &Configuration, u: NodeCoord, v: NodeCoord) -> ChiralityRelation {
    if config.chirality_of(u) == config.chirality_of(v) {
        ChiralityRelation::Same
    } else {
        ChiralityRelation::Different
    }
}

/// Drives a message around `b` from agent `start` using only local views,
/// until the arrival state at the start repeats. Returns the hops.
fn circulate(config: &Configuration, views: &[NeighborhoodView], b: &Boundary, start: usize) -> Vec<BoundaryHop> {
    let a = b.agents[start];
    let c = config.chirality_of(a.node).unwrap();
    let initial = (
        a.node,
        PortId::from_direction(a.from_dir, c),
        PortId::from_direction((a.from_dir + 1) % 6, c),
    );
    let (mut at, mut z, mut label) = initial;
    let mut hops = Vec::new();
    while hops.len() <= 2 * b.len() {
        let view = &views[config.index_of(at).unwrap()];
        let step = forward_on_boundary(view, z, label).expect("message stays on a boundary");
        let info = view.port(step.exit);
        let next = config.nodes()[info.neighbor.unwrap()];
        hops.push(BoundaryHop { from: at, to: next, boundary_label: step.label });
        (at, z, label) = (next, info.back_port.unwrap(), step.label);
        if (at, z, label) == initial {
            break;
        }
    }
    hops
}

fn check_circulation(config: &Configuration) {
    let views: Vec<NeighborhoodView> = config.nodes().iter().map(|&u| NeighborhoodView::build(config, u)).collect();
    for comp in grey_components(config) {
        for b in extract_boundaries(config, &comp) {
            let m = b.len();
            for start in 0..m {
                let hops = circulate(config, &views, &b, start);
                assert_eq!(hops.len(), m, "circulation length");
                let forward: Vec<NodeCoord> = (0..m).map(|i| b.agents[(start + 1 + i) % m].node).collect();
                let backward: Vec<NodeCoord> = (0..m).map(|i| b.agents[(start + m - 1 - i) % m].node).collect();
                let got: Vec<NodeCoord> = hops.iter().map(|h| h.to).collect();
                assert!(got == forward || got == backward, "circulation left the boundary");
                for h in &hops {
                    let w = h.witness(config).unwrap();
                    assert!(!config.is_occupied(w) || !comp.contains(&w));
                    assert!(h.from.direction_to(w).is_some() && h.to.direction_to(w).is_some());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn views_know_the_true_relation_except_across_dark_blue(n in 2usize..40, seed: u64) {
        let config = common::random_config(n, seed, seed.rotate_left(7));
        for &u in config.nodes() {
            let view = NeighborhoodView::build(&config, u);
            for p in PortId::all() {
                let info = view.port(p);
                let Some(j) = info.neighbor else {
                    prop_assert!(info.relation.is_none());
                    continue;
                };
                let v = config.nodes()[j];
                if info.is_dark_blue() {
                    prop_assert_eq!(info.relation, None);
                } else {
                    prop_assert_eq!(info.relation, Some(truth(&config, u, v)));
                }
            }
        }
    }

    #[test]
    fn circulation_closes_on_its_boundary(n in 2usize..35, seed: u64) {
        check_circulation(&common::random_config(n, seed, seed ^ 0xabcdef));
    }
}

#[test]
fn circulation_on_families() {
    use pm_elect::harness::generators::{fig1_nodes, fig6_nodes, s1_nodes};
    for (nodes, seed) in [(s1_nodes(), 3), (fig1_nodes(), 5), (fig6_nodes(2), 9)] {
        check_circulation(&Configuration::new(nodes, None, seed).unwrap());
    }
}

#[test]
fn grey_ports_must_not_be_horizontal() {
    let p = |v| PortId::new(v).unwrap();
    assert_eq!(detect_common_chirality_grey(p(3), p(1)), Err(BoundaryCommError::HorizontalPort(p(3))));
    assert_eq!(detect_common_chirality_grey(p(1), p(4)), Ok(ChiralityRelation::Same));
    assert_eq!(detect_common_chirality_grey(p(1), p(2)), Ok(ChiralityRelation::Different));
}

#[test]
fn forwarding_rejects_labels_off_the_boundary() {
    let config = Configuration::uniform(vec![node(0, 0), node(2, 0), node(1, 1)]).unwrap();
    let view = NeighborhoodView::build(&config, node(0, 0));
    let p = |v| PortId::new(v).unwrap();
    // port 1 leads to (1,1), which is occupied
    assert!(forward_on_boundary(&view, p(0), p(1)).is_err());
    // label two steps away from the entry port
    assert!(forward_on_boundary(&view, p(0), p(2)).is_err());
    let step = forward_on_boundary(&view, p(1), p(2)).unwrap();
    assert_eq!(step.exit, p(0));
}
