//! A small parameter sweep over sizes and modes, written as CSV to stdout.

use pm_elect::harness::experiment::{run_seed, ExperimentSpec, METRICS_HEADER};
use pm_elect::harness::generators::parse_params;

fn main() {
    println!("{},leaders", METRICS_HEADER.join(","));
    for n in [8, 16, 32] {
        for mode in ["sync", "seqrr", "seqrand", "async"] {
            let spec = ExperimentSpec {
                family: Some("random".into()),
                params: parse_params([format!("n={n}").as_str()]).unwrap(),
                config: None,
                mode: mode.into(),
                seeds: vec![0, 1],
                stability_window: None,
                tick_budget: None,
                out: std::env::temp_dir(),
                render: None,
            };
            for &seed in &spec.seeds {
                let r = run_seed(&spec, seed).expect("run settles");
                let row = &r.row;
                println!(
                    "{},{},{},{},{},{},{},{}",
                    row.n, row.mode, row.seed, row.ticks, row.activation_units, row.merges, row.comparisons, r.leaders
                );
            }
        }
    }
}
