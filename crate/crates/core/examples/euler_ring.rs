//! Euler tour of a small tree and label delivery around it.

use pm_elect::tree_engine::{euler_ring, NeighborLabel, RingSchedule, RingSim, Tree};

fn main() {
    let names = ["root", "B", "C", "D", "E"];
    let tree = Tree::from_parents(vec![None, Some(0), Some(1), Some(1), Some(0)]).unwrap();
    let ring = euler_ring(&tree);
    let order: Vec<&str> = ring.nodes().iter().map(|&v| names[v]).collect();
    println!("visit order: {}", order.join(","));

    let per_node = ["CCEEEE", "PCCEEE", "PEEEEE", "PEEEEE", "PEEEEE"];
    let labels: Vec<NeighborLabel> = ring.nodes().iter().map(|&v| NeighborLabel::parse(per_node[v]).unwrap()).collect();
    for schedule in [RingSchedule::Synchronous, RingSchedule::Sequential(7)] {
        let mut sim = RingSim::new(&labels, 3);
        let got = sim.run_until_ready(schedule).unwrap();
        let shown: Vec<String> = got.iter().map(|x| x.label.to_string()).collect();
        println!("{schedule:?}: {} transfers, delivered {}", sim.transfers, shown.join(" "));
    }
}
