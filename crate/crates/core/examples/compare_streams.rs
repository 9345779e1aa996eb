//! Comparing two label streams, by reference and by lockstep simulation.

use pm_elect::competition::{oracle_compare, PairSim};
use pm_elect::tree_engine::{NeighborLabel, RingSchedule};

fn stream(labels: &[&str]) -> Vec<NeighborLabel> {
    labels.iter().map(|s| NeighborLabel::parse(s).unwrap()).collect()
}

fn main() {
    let a = stream(&["CEEEEE", "PEEEEE", "CEEEEE"]);
    let b = stream(&["CEEEEE", "PCEEEE", "PEEEEE", "PCEEEE", "CEEEEE"]);
    for (x, y, name) in [(&a, &b, "a vs b"), (&b, &a, "b vs a"), (&a, &a, "a vs a")] {
        let reference = oracle_compare(x, y);
        let simulated = PairSim::new((x, 0), (y, 1)).run(RingSchedule::Sequential(3)).unwrap();
        println!("{name}: reference {reference:?}, simulated {simulated:?}");
    }
}
