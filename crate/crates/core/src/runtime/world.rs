//! The simulated particle system and its observer.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::boundary_comm::NeighborhoodView;
use crate::competition::round;
use crate::grey_election;
use crate::lattice::{Configuration, PortId};
use crate::tree_engine::build;

use super::context::{Ctx, Event, Stage};
use super::message::{Channel, Envelope};
use super::schedule::{ScheduleMode, Scheduler};
use super::state::{ParticleState, Phase, Role};

pub const TICK_BUDGET_ENV: &str = "PM_ELECT_TICK_BUDGET";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Metrics {
    /// Ticks up to the last one with any activity.
    pub ticks: u64,
    /// Activation units up to and including the last one with activity.
    pub activation_units: u64,
    pub messages_sent: u64,
    pub merges: u64,
    pub comparisons: u64,
    /// Rounds started by each particle that was ever a root, by index.
    pub rounds_per_component: BTreeMap<usize, u32>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuntimeError {
    #[error("no quiescence within {budget} ticks")]
    NonQuiescent { budget: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub stage: Stage,
    /// Quiet activation units required; `None` means `10 n`.
    pub stability_window: Option<u64>,
    /// `None` reads the environment override, then falls back to a size-based default.
    pub tick_budget: Option<u64>,
    pub record_trace: bool,
    pub record_hops: bool,
    pub check_merges: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            stage: Stage::Full,
            stability_window: None,
            tick_budget: None,
            record_trace: false,
            record_hops: false,
            check_merges: false,
        }
    }
}

/// One hop of a boundary message, as recorded by the observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HopRecord {
    pub lineage: u64,
    pub from: usize,
    pub to: usize,
    pub label: PortId,
}

/// Observer-side record of an event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRecord {
    pub tick: u64,
    pub particle: usize,
    pub event: Event,
}

/// A merge whose outcome is checked once the system is settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PendingMerge {
    endpoint: usize,
    winner: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

pub struct World {
    config: Configuration,
    views: Vec<NeighborhoodView>,
    states: Vec<ParticleState>,
    inboxes: Vec<VecDeque<Envelope>>,
    neighbors: Vec<Vec<usize>>,
    /// The particle's last activation changed nothing and nothing it can
    /// read has changed since, so activating it again is a no-op.
    idle: Vec<bool>,
    scheduler: Scheduler,
    options: RunOptions,
    seed: u64,
    tick: u64,
    next_lineage: u64,
    in_flight: usize,
    merge_in_flight: usize,
    activated: Vec<bool>,
    activated_count: usize,
    au_closed: u64,
    au_busy: bool,
    quiet_aus: u64,
    metrics: Metrics,
    trace: String,
    hops: Vec<HopRecord>,
    events: Vec<EventRecord>,
    pending_merges: Vec<PendingMerge>,
    merge_report: MergeReport,
}

impl World {
    pub fn new(config: Configuration, mode: ScheduleMode, seed: u64, options: RunOptions) -> Self {
        let n = config.len();
        let views: Vec<NeighborhoodView> = config
            .nodes()
            .iter()
            .map(|&u| NeighborhoodView::build(&config, u))
            .collect();
        let neighbors = views
            .iter()
            .map(|v| PortId::all().filter_map(|p| v.port(p).neighbor).collect())
            .collect();
        Self {
            views,
            neighbors,
            idle: vec![false; n],
            states: vec![ParticleState::default(); n],
            inboxes: vec![VecDeque::new(); n],
            scheduler: Scheduler::new(mode, n, seed),
            options,
            seed,
            tick: 0,
            next_lineage: 0,
            in_flight: 0,
            merge_in_flight: 0,
            activated: vec![false; n],
            activated_count: 0,
            au_closed: 0,
            au_busy: false,
            quiet_aus: 0,
            metrics: Metrics::default(),
            trace: String::new(),
            hops: Vec::new(),
            events: Vec::new(),
            pending_merges: Vec::new(),
            merge_report: MergeReport::default(),
            config,
        }
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn mode(&self) -> ScheduleMode {
        self.scheduler.mode()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn states(&self) -> &[ParticleState] {
        &self.states
    }

    pub fn views(&self) -> &[NeighborhoodView] {
        &self.views
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn trace(&self) -> &str {
        &self.trace
    }

    pub fn hops(&self) -> &[HopRecord] {
        &self.hops
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn merge_report(&self) -> &MergeReport {
        &self.merge_report
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn activation_units(&self) -> u64 {
        self.au_closed
    }

    pub fn messages_in_flight(&self) -> usize {
        self.in_flight
    }

    pub fn leaders(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.states[i].role == Role::Leader).collect()
    }

    pub fn stability_window(&self) -> u64 {
        self.options
            .stability_window
            .unwrap_or(10 * self.len() as u64)
            .max(1)
    }

    /// Environment override, else a ceiling generous enough for cubic runs.
    pub fn tick_budget(&self) -> u64 {
        if let Some(b) = self.options.tick_budget {
            return b;
        }
        if let Some(b) = std::env::var(TICK_BUDGET_ENV).ok().and_then(|v| v.parse().ok()) {
            return b;
        }
        let n = self.len() as u64 + 1;
        let per_au = match self.mode() {
            ScheduleMode::Synchronous => 1,
            ScheduleMode::AsyncRandomSubset(_) => 4,
            _ => 3 * n,
        };
        (20_000 + 300 * n * n * n) * per_au
    }

    /// One tick: activate the scheduled set against the pre-tick snapshot,
    /// then commit states and deliver messages.
    pub fn step(&mut self) {
        let set = self.scheduler.next_set();
        let mut results = Vec::with_capacity(set.len());
        for &i in &set {
            if self.idle[i] {
                continue;
            }
            let inbox: Vec<Envelope> = self.inboxes[i].iter().cloned().collect();
            let mut state = self.states[i].clone();
            let mut ctx = Ctx::new(
                i,
                &self.views,
                &self.states,
                &self.inboxes,
                self.options.stage,
                self.next_lineage,
            );
            transition(&mut ctx, &mut state, &inbox);
            self.next_lineage = ctx.next_lineage;
            results.push((i, state, inbox, ctx.outbox, ctx.deferred, ctx.events));
        }

        let mut busy = false;
        let mut line = String::new();
        if self.options.record_trace {
            let coords: Vec<String> = set.iter().map(|&i| self.config.nodes()[i].to_string()).collect();
            let _ = write!(line, "t={} act=[{}]", self.tick, coords.join(" "));
        }
        let mut outgoing = Vec::new();
        let mut touched = Vec::new();
        for (i, state, inbox, outbox, deferred, events) in results {
            let consumed = inbox.len();
            let no_op = state == self.states[i] && outbox.is_empty() && events.is_empty() && deferred == inbox;
            if no_op {
                self.idle[i] = true;
            } else {
                touched.push(i);
            }
            if state != self.states[i] {
                busy = true;
                if self.options.record_trace {
                    let (a, b) = (self.states[i].phase(), state.phase());
                    if a != b {
                        let _ = write!(line, " | {} {:?}->{:?}", self.config.nodes()[i], a, b);
                    }
                }
            }
            for env in self.inboxes[i].iter().take(consumed) {
                if env.msg.is_merge() {
                    self.merge_in_flight -= 1;
                }
            }
            self.in_flight -= consumed;
            self.in_flight += deferred.len();
            self.merge_in_flight += deferred.iter().filter(|e| e.msg.is_merge()).count();
            let rest: Vec<Envelope> = self.inboxes[i].drain(..).skip(consumed).collect();
            self.inboxes[i] = deferred.into_iter().chain(rest).collect();
            self.states[i] = state;
            for event in events {
                self.observe(i, event);
            }
            outgoing.extend(outbox);
        }
        for env in outgoing {
            if self.options.record_trace {
                let _ = write!(
                    line,
                    " | {} {}:{}->{}:{}",
                    env.msg.kind(),
                    self.config.nodes()[env.from],
                    env.via_port,
                    self.config.nodes()[env.to],
                    env.recv_port
                );
            }
            if self.options.record_hops {
                if let Some(label) = env.boundary_label {
                    self.hops.push(HopRecord {
                        lineage: env.lineage,
                        from: env.from,
                        to: env.to,
                        label,
                    });
                }
            }
            if env.msg.is_merge() {
                self.merge_in_flight += 1;
            }
            touched.push(env.to);
            self.metrics.messages_sent += 1;
            self.in_flight += 1;
            self.inboxes[env.to].push_back(env);
        }
        if self.options.record_trace {
            self.trace.push_str(&line);
            self.trace.push('\n');
        }

        for t in touched {
            self.idle[t] = false;
            for &j in &self.neighbors[t] {
                self.idle[j] = false;
            }
        }

        busy |= self.in_flight > 0;
        if busy {
            self.au_busy = true;
            self.metrics.ticks = self.tick + 1;
            self.metrics.activation_units = self.au_closed + 1;
        }
        for &i in &set {
            if !self.activated[i] {
                self.activated[i] = true;
                self.activated_count += 1;
            }
        }
        if self.activated_count == self.len() {
            self.au_closed += 1;
            self.quiet_aus = if self.au_busy { 0 } else { self.quiet_aus + 1 };
            self.au_busy = false;
            self.activated.iter_mut().for_each(|a| *a = false);
            self.activated_count = 0;
        }
        if self.options.check_merges && !self.pending_merges.is_empty() {
            self.check_settled_merges();
        }
        self.tick += 1;
    }

    fn observe(&mut self, i: usize, event: Event) {
        match &event {
            Event::Outcome { chan: Channel::Out, .. } => self.metrics.comparisons += 1,
            Event::Merged { .. } => self.metrics.merges += 1,
            Event::MergeEdge { chan } if self.options.check_merges => {
                let winner = self.views[i].port(chan.port()).neighbor.expect("merge across an edge");
                self.pending_merges.push(PendingMerge { endpoint: i, winner });
            }
            _ => {}
        }
        self.events.push(EventRecord {
            tick: self.tick,
            particle: i,
            event,
        });
    }

    /// Root of `i`'s tree following parent ports, `None` on a cycle.
    pub fn root_of(&self, i: usize) -> Option<usize> {
        let mut cur = i;
        for _ in 0..=self.len() {
            match self.states[cur].tree.parent {
                None => return Some(cur),
                Some(p) => cur = self.views[cur].port(p).neighbor?,
            }
        }
        None
    }

    fn check_settled_merges(&mut self) {
        let building = self.states.iter().any(|s| s.tree.ring.is_none());
        if building || self.merge_in_flight > 0 || self.states.iter().any(|s| !s.comp.settled()) {
            return;
        }
        if let Err(e) = self.check_forest() {
            self.merge_report.violations.push(format!("t={}: {e}", self.tick));
        }
        for m in std::mem::take(&mut self.pending_merges) {
            self.merge_report.checked += 1;
            let (a, b) = (self.root_of(m.endpoint), self.root_of(m.winner));
            if a.is_none() || a != b {
                self.merge_report.violations.push(format!(
                    "t={}: merged particle {} ended under {:?}, winner under {:?}",
                    self.tick, m.endpoint, a, b
                ));
            }
        }
    }

    /// Tree axioms over all particles that joined a tree: parent and child
    /// ports agree, no cycles, every tree has one root and it is the only
    /// leader in it.
    pub fn check_forest(&self) -> Result<(), String> {
        let n = self.len();
        let mut edges = 0;
        let mut in_tree = 0;
        for i in 0..n {
            let t = &self.states[i].tree;
            if !t.in_tree {
                continue;
            }
            in_tree += 1;
            if let Some(p) = t.parent {
                edges += 1;
                let j = self.views[i].port(p).neighbor.ok_or(format!("{i}: parent port {p} is empty"))?;
                let back = self.views[i].port(p).back_port.expect("occupied");
                if !self.states[j].tree.children.contains(&back) {
                    return Err(format!("{i}: parent {j} does not list it as a child"));
                }
            }
            for &c in &t.children {
                let j = self.views[i].port(c).neighbor.ok_or(format!("{i}: child port {c} is empty"))?;
                if self.states[j].tree.parent != self.views[i].port(c).back_port {
                    return Err(format!("{i}: child {j} points elsewhere"));
                }
            }
        }
        let mut roots = std::collections::BTreeSet::new();
        for i in (0..n).filter(|&i| self.states[i].tree.in_tree) {
            let r = self.root_of(i).ok_or(format!("{i} lies on a parent cycle"))?;
            roots.insert(r);
        }
        if edges + roots.len() != in_tree {
            return Err(format!("{in_tree} nodes, {edges} edges, {} trees", roots.len()));
        }
        for &r in &roots {
            if self.states[r].role != Role::Leader {
                return Err(format!("root {r} is not a leader"));
            }
        }
        let leaders = self.leaders();
        if leaders.iter().any(|l| !roots.contains(l)) {
            return Err("a leader is not a root".to_string());
        }
        Ok(())
    }

    /// Steps until `stability_window` activation units pass with no state
    /// change and no message in flight.
    pub fn run_to_quiescence(&mut self) -> Result<&Metrics, RuntimeError> {
        let window = self.stability_window();
        let budget = self.tick_budget();
        if self.is_empty() {
            return Ok(&self.metrics);
        }
        while self.quiet_aus < window {
            if self.tick >= budget {
                return Err(RuntimeError::NonQuiescent { budget });
            }
            self.step();
        }
        if self.options.check_merges && !self.pending_merges.is_empty() {
            self.check_settled_merges();
        }
        self.metrics.rounds_per_component = (0..self.len())
            .filter(|&i| self.states[i].comp.root.rounds > 0)
            .map(|i| (i, self.states[i].comp.root.rounds))
            .collect();
        Ok(&self.metrics)
    }

    pub fn phases(&self) -> Vec<Phase> {
        self.states.iter().map(ParticleState::phase).collect()
    }
}

fn transition(ctx: &mut Ctx<'_>, state: &mut ParticleState, inbox: &[Envelope]) {
    let ParticleState { role, grey, tree, comp } = state;
    grey_election::activate(ctx, role, grey, inbox);
    let stage = ctx.stage();
    if stage >= Stage::Tree {
        let tree_msgs: Vec<Envelope> = inbox.iter().filter(|e| e.msg.is_tree()).cloned().collect();
        build::activate(ctx, role, tree, &tree_msgs);
    }
    if stage == Stage::Full {
        let comp_msgs: Vec<Envelope> = inbox
            .iter()
            .filter(|e| !e.msg.is_tree() && !e.msg.is_boundary())
            .cloned()
            .collect();
        round::activate(ctx, role, tree, comp, &comp_msgs);
    }
}
