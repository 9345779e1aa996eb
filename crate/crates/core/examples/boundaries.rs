//! Grey components, dark-blue edges and boundary words of a small shape.

use pm_elect::harness::generators::fig1_nodes;
use pm_elect::lattice::Configuration;
use pm_elect::topology::{dark_blue_edges, extract_boundaries, grey_components, minimal_rotations, turning_sum};

fn main() {
    let config = Configuration::new(fig1_nodes(), None, 1).unwrap();
    println!("{} particles", config.len());
    for (u, v) in dark_blue_edges(&config) {
        println!("dark-blue edge {u}-{v}");
    }
    for (i, comp) in grey_components(&config).iter().enumerate() {
        println!("component {i}: {} particles", comp.len());
        for b in extract_boundaries(&config, comp) {
            let word = b.word();
            println!(
                "  {:?} boundary, {} agents, word {:?}, turning sum {}, {} minimal rotation(s)",
                b.kind,
                b.len(),
                word,
                turning_sum(&b),
                minimal_rotations(&word).len()
            );
        }
    }
}
