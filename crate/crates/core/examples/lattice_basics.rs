//! Coordinates, ports and chirality on a three-particle triangle.

use pm_elect::lattice::{neighbor_of, port_between, Chirality, Configuration, NodeCoord, PortId};

fn main() {
    let nodes = vec![NodeCoord::new(0, 0), NodeCoord::new(2, 0), NodeCoord::new(1, 1)];
    let config = Configuration::new(nodes, Some(vec![Chirality::Standard, Chirality::Flipped, Chirality::Standard]), 0)
        .expect("a connected triangle");

    for &u in config.nodes() {
        let c = config.chirality_of(u).unwrap();
        print!("{u} {c:?}:");
        for p in PortId::all() {
            let v = neighbor_of(u, p, c);
            let mark = if config.is_occupied(v) { "*" } else { "" };
            print!(" {}->{v}{mark}", p.value());
        }
        println!();
    }

    // East and West are shared; the diagonals depend on chirality
    let (a, b) = (NodeCoord::new(0, 0), NodeCoord::new(1, 1));
    for c in [Chirality::Standard, Chirality::Flipped] {
        println!("{a} sees {b} on port {} when {c:?}", port_between(a, b, c).unwrap().value());
    }

    println!("{}", config.to_json());
}
