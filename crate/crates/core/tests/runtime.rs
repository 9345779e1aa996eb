mod common;

use std::collections::HashMap;

use common::{node, MODES};
use pm_elect::harness::generators::s1_nodes;
use pm_elect::lattice::{port_between, Configuration, NodeCoord, PortId};
use pm_elect::runtime::{Role, RunOptions, RuntimeError, ScheduleMode, World};
use proptest::prelude::*;

fn parse_node(s: &str) -> NodeCoord {
    let (x, y) = s.trim_matches(|c| c == '(' || c == ')').split_once(',').unwrap();
    node(x.parse().unwrap(), y.parse().unwrap())
}

/// Activation sets and message hops read back from a trace.
struct TraceLine {
    active: Vec<NodeCoord>,
    sends: Vec<(NodeCoord, PortId, NodeCoord, PortId)>,
}

fn parse_trace(trace: &str) -> Vec<TraceLine> {
    trace
        .lines()
        .map(|line| {
            let mut parts = line.split(" | ");
            let head = parts.next().unwrap();
            let act = &head[head.find("act=[").unwrap() + 5..head.len() - 1];
            let active = act.split_whitespace().map(parse_node).collect();
            let port = |s: &str| PortId::new(s.parse().unwrap()).unwrap();
            let sends = parts
                .filter(|p| p.contains(':'))
                .map(|p| {
                    let (_, hop) = p.split_once(' ').unwrap();
                    let (a, b) = hop.split_once("->").unwrap();
                    let (from, via) = a.rsplit_once(':').unwrap();
                    let (to, recv) = b.rsplit_once(':').unwrap();
                    (parse_node(from), port(via), parse_node(to), port(recv))
                })
                .collect();
            TraceLine { active, sends }
        })
        .collect()
}

fn traced(config: Configuration, mode: &str, seed: u64) -> World {
    common::run(config, mode, seed, RunOptions { record_trace: true, ..RunOptions::default() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Fairness windows and port consistency of every sent message, checked
    /// from the trace alone.
    #[test]
    fn traces_are_fair_and_port_safe(n in 1usize..25, seed in 0u64..1000, m in 0usize..4) {
        let config = common::random_config(n, seed, seed + 1);
        let mode = ScheduleMode::parse(MODES[m], n).unwrap();
        let window = mode.fairness_window(n);
        let w = traced(config.clone(), MODES[m], seed);
        let lines = parse_trace(w.trace());
        prop_assert!(n == 1 || lines.iter().any(|l| !l.sends.is_empty()));
        let mut last: HashMap<NodeCoord, i64> = config.nodes().iter().map(|&u| (u, -1)).collect();
        for (t, line) in lines.iter().enumerate() {
            prop_assert!(!line.active.is_empty());
            for u in &line.active {
                last.insert(*u, t as i64);
            }
            for (&u, &l) in &last {
                prop_assert!(t as i64 - l < window as i64, "{} starved at tick {}", u, t);
            }
            for &(from, via, to, recv) in &line.sends {
                let cf = config.chirality_of(from).unwrap();
                let ct = config.chirality_of(to).unwrap();
                prop_assert_eq!(port_between(from, to, cf), Ok(via));
                prop_assert_eq!(port_between(to, from, ct), Ok(recv));
            }
        }
    }
}

#[test]
fn synchronous_tick_is_one_activation_unit() {
    let config = common::random_config(12, 4, 4);
    let mut w = World::new(config, ScheduleMode::Synchronous, 0, RunOptions::default());
    for k in 1..=7 {
        w.step();
        assert_eq!(w.activation_units(), k);
    }
}

#[test]
fn round_robin_unit_closes_every_n_ticks() {
    let n = 9;
    let config = common::random_config(n, 8, 8);
    let mut w = World::new(config, ScheduleMode::SequentialRoundRobin, 0, RunOptions::default());
    for t in 1..=4 * n {
        w.step();
        assert_eq!(w.activation_units(), (t / n) as u64);
    }
}

#[test]
fn identical_inputs_give_identical_traces() {
    for mode in MODES {
        let run = |seed| {
            let w = traced(common::random_config(20, 77, 5), mode, seed);
            (w.trace().to_string(), w.metrics().clone())
        };
        let a = run(3);
        assert_eq!(a, run(3), "{mode}");
        if mode == "seqrand" || mode == "async" {
            assert_ne!(a.0, run(4).0, "{mode}: seed has no effect");
        }
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let config = common::random_config(100, 1, 1);
    let options = RunOptions { tick_budget: Some(10), ..RunOptions::default() };
    let mut w = World::new(config, ScheduleMode::Synchronous, 0, options);
    assert_eq!(w.run_to_quiescence().unwrap_err(), RuntimeError::NonQuiescent { budget: 10 });
}

#[test]
fn single_particle_becomes_leader() {
    for mode in MODES {
        let w = common::run(Configuration::uniform(vec![node(0, 0)]).unwrap(), mode, 0, RunOptions::default());
        assert_eq!(w.states()[0].role, Role::Leader);
    }
}

#[test]
fn six_ring_elects_one_leader() {
    for mode in MODES {
        for seed in 0..3 {
            let w = common::run(Configuration::new(s1_nodes(), None, seed).unwrap(), mode, seed, RunOptions::default());
            assert_eq!(w.leaders().len(), 1, "{mode} {seed}");
            w.check_forest().unwrap();
        }
    }
}

/// Once quiescent, nothing changes however long the run continues.
#[test]
fn quiescence_is_stable() {
    for c in 0..12u64 {
        let config = common::corpus(c);
        let n = config.len() as u64;
        let mut w = common::run(config, MODES[c as usize % 4], c, RunOptions::default());
        assert_eq!(w.stability_window(), 10 * n);
        let before = w.states().to_vec();
        let units = w.activation_units();
        while w.activation_units() < units + 10 * n {
            w.step();
        }
        assert_eq!(w.states(), &before[..]);
        assert_eq!(w.messages_in_flight(), 0);
    }
}
