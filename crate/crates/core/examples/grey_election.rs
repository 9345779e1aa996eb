//! Head election on boundary words and the grey stage on a hexagonal ring.

use pm_elect::grey_election::{elect_heads, select_survivor, Direction, HeadRecord};
use pm_elect::harness::generators::s1_nodes;
use pm_elect::lattice::{Configuration, PortId};
use pm_elect::runtime::{Role, RunOptions, ScheduleMode, Stage, World};

fn main() {
    let word = [3u8, 1, 3, 1, 3, 1];
    for off in 0..word.len() {
        let e = elect_heads(&word, off);
        println!("offset {off}: head={} k={}", e.is_head, e.k);
    }
    for port in 0..6 {
        let record = HeadRecord::new(Direction::D1, PortId::new(port).unwrap(), 3);
        println!("port {port} ids {:?}: {:?}", record.computed_ids, select_survivor(&record));
    }

    let config = Configuration::new(s1_nodes(), None, 5).unwrap();
    let options = RunOptions { stage: Stage::Grey, ..RunOptions::default() };
    let mut world = World::new(config, ScheduleMode::Synchronous, 0, options);
    world.run_to_quiescence().expect("grey stage settles");
    for (i, s) in world.states().iter().enumerate() {
        if s.role == Role::Leader {
            println!("leader at {}", world.config().nodes()[i]);
        }
    }
}
