//! Local chirality agreement and boundary forwarding from one particle's view.

use pm_elect::boundary_comm::{
    detect_common_chirality_lbe, forward_on_boundary, local_relation, NeighborhoodView,
};
use pm_elect::lattice::{Chirality, Configuration, NodeCoord, PortId};

fn main() {
    let (u, v, m) = (NodeCoord::new(0, 0), NodeCoord::new(2, 0), NodeCoord::new(1, 1));
    let config =
        Configuration::new(vec![u, v, m], Some(vec![Chirality::Standard, Chirality::Flipped, Chirality::Flipped]), 0)
            .unwrap();
    println!("{u}-{m}: {:?}", local_relation(&config, u, m));
    println!("{u}-{v} through {m}: {:?}", detect_common_chirality_lbe(&config, u, v));

    let lone = Configuration::new(vec![u, v], None, 0).unwrap();
    println!("{u}-{v} with no mediator: {:?}", detect_common_chirality_lbe(&lone, u, v));

    let view = NeighborhoodView::build(&config, u);
    for p in PortId::all() {
        let info = view.port(p);
        println!("port {}: occupied={} class={:?} relation={:?}", p.value(), info.occupied, info.class, info.relation);
    }
    // a message arriving from the mediator with the empty node next to it
    let entry = PortId::new(1).unwrap();
    let label = PortId::new(2).unwrap();
    match forward_on_boundary(&view, entry, label) {
        Ok(step) => println!("forward: exit {} label {} swept {}", step.exit.value(), step.label.value(), step.swept),
        Err(e) => println!("forward failed: {e}"),
    }
}
