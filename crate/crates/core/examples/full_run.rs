//! Full election on a generated shape, with metrics and drawings.
//!
//!     cargo run --example full_run -- fig5 n=32 seqrand 4

use pm_elect::harness::generators::{generate, parse_params};
use pm_elect::harness::render::{render_ascii, render_svg, RenderOptions};
use pm_elect::harness::snapshot::Snapshot;
use pm_elect::runtime::{RunOptions, ScheduleMode, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family = args.first().map_or("fig1", String::as_str);
    let params = parse_params(args.get(1).map(String::as_str))?;
    let mode = args.get(2).map_or("async", String::as_str);
    let seed: u64 = args.get(3).map_or(Ok(0), |s| s.parse())?;

    let config = generate(family, &params, seed)?;
    let mode = ScheduleMode::parse(mode, config.len())?;
    let mut world = World::new(config, mode, seed, RunOptions { check_merges: true, ..RunOptions::default() });
    let m = world.run_to_quiescence()?.clone();
    println!(
        "n={} ticks={} activation_units={} merges={} comparisons={} leaders={:?}",
        world.len(),
        m.ticks,
        m.activation_units,
        m.merges,
        m.comparisons,
        world.leaders()
    );
    let snap = Snapshot::capture(&world);
    println!("{}", render_ascii(&snap));
    let path = std::env::temp_dir().join("pm-elect-full-run.svg");
    std::fs::write(&path, render_svg(&snap, RenderOptions { boundaries: true }))?;
    println!("drawing written to {}", path.display());
    Ok(())
}
