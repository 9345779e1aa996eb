//! Component rounds on the live particle system.
//!
//! A round starts at the root: a walk along the ring picks the first
//! outgoing dark-blue edge that has not been compared yet, while requests
//! from neighbouring components that chose one of our incoming edges climb
//! the parent chain and the first one is accepted. The root then starts
//! one forwarding cycle per active channel. Endpoints compare their label
//! streams across the edge and report to the root, which merges the
//! component into a winner, rebuilds after a win, or starts the next round.

use serde::Serialize;

use crate::lattice::PortId;
use crate::runtime::context::{Ctx, Event, Peer};
use crate::runtime::message::{Channel, Envelope, Message};
use crate::runtime::state::Role;
use crate::tree_engine::build::{neighborhood_label, TreeRegs};
use crate::tree_engine::lfc::{relay_step, LfcCell, LfcItem, RelayOutput};
use crate::tree_engine::ring::{AgentRef, AgentSlot, RingPosition};

use super::compare::{Endpoint, EndpointPhase, Outcome};

/// Flags of one dark-blue port.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DbeEnd {
    pub present: bool,
    pub compared: bool,
    /// The edge became a tree edge.
    pub merged: bool,
    pub active: bool,
    /// Outgoing side: `Choose` sent, answer pending.
    pub chosen: bool,
    /// Incoming side: a `Choose` arrived and is not yet forwarded.
    pub request_held: bool,
    pub pending_win: bool,
    pub pending_lose: bool,
}

impl DbeEnd {
    fn busy(&self) -> bool {
        self.active || self.chosen || self.pending_win || self.pending_lose
    }

    fn choosable(&self) -> bool {
        self.present && !self.merged && !self.compared && !self.busy()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum RoundPhase {
    #[default]
    Idle,
    Walking,
    Comparing,
    Rebuilding,
}

/// Registers only the root uses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RootState {
    pub started: bool,
    pub phase: RoundPhase,
    pub walk_done: bool,
    pub out_chosen: bool,
    pub out_answer: Option<bool>,
    pub in_accepted: bool,
    /// Some edge was uncompared while a round was running.
    pub dirty: bool,
    pub expected: [bool; 2],
    pub results: [Option<Outcome>; 2],
    pub rounds: u32,
}

/// Convergecast bookkeeping of a rebuild wave.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RebuildWait {
    pub pending: Vec<PortId>,
    pub max_epoch: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompState {
    pub initialised: bool,
    pub dbe: [DbeEnd; 2],
    pub epoch: u32,
    /// Whether the channel runs a forwarding cycle in `epoch`.
    pub epoch_live: [bool; 2],
    /// Per channel, one cell per local ring agent.
    pub cells: [Vec<LfcCell>; 2],
    pub endpoints: [Option<Endpoint>; 2],
    /// Child port an in-merge report came through, per channel.
    pub inmerge_from: [Option<PortId>; 2],
    pub root: RootState,
    pub rebuild: Option<RebuildWait>,
    /// A rebuild wave reached this particle before it settled.
    pub rebuild_waiting: Option<u8>,
}

impl CompState {
    /// No merge or abort is still on its way through this particle.
    pub fn settled(&self) -> bool {
        self.dbe.iter().all(|d| !d.pending_win && !d.pending_lose)
            && self.inmerge_from.iter().all(Option::is_none)
    }

    fn active_flags(&self) -> [bool; 2] {
        [self.dbe[0].active, self.dbe[1].active]
    }
}

fn ring_of(tree: &TreeRegs) -> &RingPosition {
    tree.ring.as_ref().expect("competition runs on a built ring")
}

/// Labels an agent would see at a neighbour's agent, counting transfers
/// already in its inbox. `None` if that agent is not in the same cycle.
fn visible_at(peer: &Peer<'_>, chan: Channel, slot: AgentSlot, epoch: u32) -> Option<usize> {
    let comp = &peer.state.comp;
    let ring = peer.state.tree.ring.as_ref()?;
    if comp.epoch != epoch || !comp.epoch_live[chan.index()] {
        return None;
    }
    let idx = ring.resolve(slot).checked_sub(1)?;
    let held = comp.cells[chan.index()].get(idx)?.held.len();
    let in_flight = peer
        .inbox
        .iter()
        .filter(|env| match env.msg {
            Message::LabelTransfer { chan: c, slot: s, epoch: e, .. } => {
                c == chan && e == epoch && ring.resolve(s) == idx + 1
            }
            _ => false,
        })
        .count();
    Some(held + in_flight)
}

fn visible(ctx: &Ctx<'_>, comp: &CompState, ring: &RingPosition, chan: Channel, at: AgentRef) -> Option<usize> {
    match at.port {
        None => Some(comp.cells[chan.index()][ring.resolve(at.slot) - 1].held.len()),
        Some(p) => visible_at(&ctx.peer(p)?, chan, at.slot, comp.epoch),
    }
}

pub(crate) fn activate(
    ctx: &mut Ctx<'_>,
    role: &mut Role,
    tree: &mut TreeRegs,
    comp: &mut CompState,
    inbox: &[Envelope],
) {
    if !comp.initialised {
        comp.initialised = true;
        for ch in Channel::BOTH {
            comp.dbe[ch.index()].present = ctx.view().port(ch.port()).is_dark_blue();
        }
    }
    let ready = tree.ring.is_some();
    for env in inbox {
        if !ready {
            match env.msg {
                Message::Uncompare => {
                    if let Some(ch) = Channel::of_port(env.recv_port) {
                        comp.dbe[ch.index()].compared = false;
                    }
                }
                _ => ctx.defer(env.clone()),
            }
            continue;
        }
        handle(ctx, tree, comp, env);
    }
    if !ready {
        return;
    }

    if tree.is_root() && !comp.root.started {
        comp.root.started = true;
        new_round(ctx, tree, comp);
    }

    let incoming = &mut comp.dbe[Channel::In.index()];
    if incoming.request_held {
        incoming.request_held = false;
        request_up(ctx, tree, comp, Vec::new());
    }

    if let Some(rank) = comp.rebuild_waiting {
        if comp.settled() {
            comp.rebuild_waiting = None;
            rebuild_here(ctx, tree, comp, rank);
        }
    }

    run_cycles(ctx, tree, comp);

    if tree.is_root() {
        advance_root(ctx, role, tree, comp);
    }
}

fn handle(ctx: &mut Ctx<'_>, tree: &mut TreeRegs, comp: &mut CompState, env: &Envelope) {
    let z = env.recv_port;
    match &env.msg {
        Message::Walk { slot, chosen } => {
            let j = ring_of(tree).resolve(*slot);
            walk_at(ctx, tree, comp, j, *chosen);
        }
        Message::Choose => comp.dbe[Channel::In.index()].request_held = true,
        Message::IncomingRequest { path } => {
            let mut path = path.clone();
            path.push(z);
            request_up(ctx, tree, comp, path);
        }
        Message::IncomingVerdict { accept, path } => verdict_down(ctx, comp, *accept, path.clone()),
        Message::Activate | Message::NotParticipating => {
            let active = matches!(env.msg, Message::Activate);
            let out = &mut comp.dbe[Channel::Out.index()];
            out.chosen = false;
            out.active = active;
            out_answer(ctx, tree, comp, active);
        }
        Message::OutAnswer { active } => out_answer(ctx, tree, comp, *active),
        Message::StartCompare { epoch, chans } => start_compare(ctx, tree, comp, *epoch, *chans),
        Message::LabelTransfer { chan, slot, epoch, item } => {
            if *epoch == comp.epoch && comp.epoch_live[chan.index()] {
                let j = ring_of(tree).resolve(*slot);
                comp.cells[chan.index()][j - 1].held.push_back(*item);
            }
        }
        Message::TerminationMsg { chan, slot, epoch } => {
            if *epoch == comp.epoch && comp.epoch_live[chan.index()] {
                let j = ring_of(tree).resolve(*slot);
                comp.cells[chan.index()][j - 1].term = true;
            }
        }
        Message::Partner(msg) => {
            let ch = Channel::of_port(z).expect("partners talk across ports 0 and 3");
            match comp.endpoints[ch.index()].as_mut() {
                Some(ep) if !matches!(ep.phase, EndpointPhase::Done(_)) => ep.receive(*msg),
                _ => ctx.defer(env.clone()),
            }
        }
        Message::CompareResult { chan, outcome } => {
            report_up(ctx, tree, comp, Message::CompareResult { chan: *chan, outcome: *outcome })
        }
        Message::InMerge { chan } => {
            comp.inmerge_from[chan.index()] = Some(z);
            report_up(ctx, tree, comp, Message::InMerge { chan: *chan });
        }
        Message::MergeDown { chan } => {
            tree.add_child(z);
            merge_down(ctx, tree, comp, *chan);
        }
        Message::MergeComplete | Message::NotMerging if !decided(comp, z) => ctx.defer(env.clone()),
        Message::MergeComplete => {
            let ch = Channel::of_port(z).expect("merges cross dark-blue ports");
            let d = &mut comp.dbe[ch.index()];
            d.pending_win = false;
            d.active = false;
            d.merged = true;
            tree.add_child(z);
        }
        Message::AbortMerge { chan } => abort_down(ctx, comp, *chan),
        Message::NotMerging => {
            let ch = Channel::of_port(z).expect("merges cross dark-blue ports");
            let d = &mut comp.dbe[ch.index()];
            d.pending_win = false;
            d.active = false;
            d.compared = false;
        }
        Message::Rebuild { rank } => comp.rebuild_waiting = Some(*rank),
        Message::RebuildDone { epoch } => {
            if let Some(wait) = comp.rebuild.as_mut() {
                wait.pending.retain(|&p| p != z);
                wait.max_epoch = wait.max_epoch.max(*epoch);
            }
            finish_rebuild(ctx, tree, comp);
        }
        Message::Uncompare => {
            if let Some(ch) = Channel::of_port(z) {
                let d = &mut comp.dbe[ch.index()];
                d.compared = false;
                if !d.busy() {
                    wake(ctx, tree, comp);
                }
            }
        }
        Message::Wake => wake(ctx, tree, comp),
        _ => {}
    }
}

/// The partner may finish first and answer before our endpoint has decided.
fn decided(comp: &CompState, z: PortId) -> bool {
    let ch = Channel::of_port(z).expect("merges cross dark-blue ports");
    let d = &comp.dbe[ch.index()];
    d.pending_win || !d.active
}

fn send_or_local(ctx: &mut Ctx<'_>, port: Option<PortId>, msg: Message) -> Option<Message> {
    match port {
        Some(p) => {
            ctx.send(p, msg);
            None
        }
        None => Some(msg),
    }
}

fn walk_at(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState, j: usize, mut chosen: bool) {
    let out = &mut comp.dbe[Channel::Out.index()];
    if j == 1 && !chosen && out.choosable() {
        chosen = true;
        out.chosen = true;
        ctx.send(Channel::Out.port(), Message::Choose);
    }
    let next = ring_of(tree).next(j);
    match next.port {
        Some(p) => ctx.send(p, Message::Walk { slot: next.slot, chosen }),
        None => {
            comp.root.walk_done = true;
            comp.root.out_chosen = chosen;
        }
    }
}

fn new_round(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState) {
    let r = &mut comp.root;
    r.phase = RoundPhase::Walking;
    r.walk_done = false;
    r.out_chosen = false;
    r.out_answer = None;
    r.in_accepted = false;
    r.dirty = false;
    r.expected = [false; 2];
    r.results = [None; 2];
    r.rounds += 1;
    walk_at(ctx, tree, comp, 1, false);
}

fn request_up(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState, path: Vec<PortId>) {
    if let Some(p) = tree.parent {
        ctx.send(p, Message::IncomingRequest { path });
        return;
    }
    let r = &mut comp.root;
    let open = matches!(r.phase, RoundPhase::Idle | RoundPhase::Walking);
    let accept = open && !r.in_accepted;
    if accept {
        r.in_accepted = true;
        if r.phase == RoundPhase::Idle {
            new_round(ctx, tree, comp);
            comp.root.in_accepted = true;
        }
    }
    verdict_down(ctx, comp, accept, path);
}

fn verdict_down(ctx: &mut Ctx<'_>, comp: &mut CompState, accept: bool, mut path: Vec<PortId>) {
    if let Some(p) = path.pop() {
        ctx.send(p, Message::IncomingVerdict { accept, path });
        return;
    }
    let port = Channel::In.port();
    if accept {
        comp.dbe[Channel::In.index()].active = true;
        ctx.send(port, Message::Activate);
    } else {
        ctx.send(port, Message::NotParticipating);
    }
}

fn out_answer(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState, active: bool) {
    match tree.parent {
        Some(p) => ctx.send(p, Message::OutAnswer { active }),
        None => comp.root.out_answer = Some(active),
    }
}

fn report_up(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState, msg: Message) {
    if let Some(msg) = send_or_local(ctx, tree.parent, msg) {
        match msg {
            Message::CompareResult { chan, outcome } => comp.root.results[chan.index()] = Some(outcome),
            Message::InMerge { chan } => comp.root.results[chan.index()] = Some(Outcome::Lose),
            _ => unreachable!("only results travel up"),
        }
    }
}

fn wake(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState) {
    if let Some(p) = tree.parent {
        ctx.send(p, Message::Wake);
    } else if comp.root.started && comp.root.phase == RoundPhase::Idle {
        new_round(ctx, tree, comp);
    } else {
        comp.root.dirty = true;
    }
}

fn start_compare(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState, epoch: u32, chans: [bool; 2]) {
    let ring = ring_of(tree).clone();
    let label = neighborhood_label(ctx.view(), ring.parent, &ring.children, comp.active_flags());
    let count = ring.agent_count();
    let is_root = ring.parent.is_none();
    comp.epoch = epoch;
    for ch in Channel::BOTH {
        let c = ch.index();
        comp.epoch_live[c] = chans[c];
        comp.cells[c] = if chans[c] {
            (1..=count)
                .map(|j| {
                    LfcCell::with(LfcItem {
                        label,
                        root_mark: is_root && j == 1,
                        last_mark: is_root && j == count,
                    })
                })
                .collect()
        } else {
            Vec::new()
        };
        comp.endpoints[c] = (chans[c] && comp.dbe[c].active).then(|| Endpoint::new(is_root && count == 1));
    }
    for &child in &ring.children {
        ctx.send(child, Message::StartCompare { epoch, chans });
    }
}

fn run_cycles(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState) {
    let ring = ring_of(tree).clone();
    for ch in Channel::BOTH {
        let c = ch.index();
        if !comp.epoch_live[c] {
            continue;
        }
        for j in 1..=ring.agent_count() {
            let pre = ring.pre(j);
            let out = if j == 1 && comp.endpoints[c].is_some() {
                let next_holding = visible(ctx, comp, &ring, ch, ring.next(j));
                let mut ep = comp.endpoints[c].take().unwrap();
                let step = ep.step(&mut comp.cells[c][0], next_holding);
                comp.endpoints[c] = Some(ep);
                for m in step.to_partner {
                    ctx.send(ch.port(), Message::Partner(m));
                }
                if let Some(outcome) = step.outcome {
                    endpoint_done(ctx, tree, comp, ch, outcome);
                }
                step.relay
            } else {
                let pre_holding = visible(ctx, comp, &ring, ch, pre);
                relay_step(&mut comp.cells[c][j - 1], pre_holding)
            };
            deliver(ctx, comp, ch, pre, out);
        }
    }
}

fn deliver(ctx: &mut Ctx<'_>, comp: &mut CompState, ch: Channel, to: AgentRef, out: RelayOutput) {
    let epoch = comp.epoch;
    match to.port {
        None => {
            let count = comp.cells[ch.index()].len();
            let j = match to.slot {
                AgentSlot::Index(j) => j as usize,
                AgentSlot::Last => count,
            };
            let cell = &mut comp.cells[ch.index()][j - 1];
            if let Some(item) = out.label {
                cell.held.push_back(item);
            }
            if out.term {
                cell.term = true;
            }
        }
        Some(p) => {
            if let Some(item) = out.label {
                ctx.send(p, Message::LabelTransfer { chan: ch, slot: to.slot, epoch, item });
            }
            if out.term {
                ctx.send(p, Message::TerminationMsg { chan: ch, slot: to.slot, epoch });
            }
        }
    }
}

fn endpoint_done(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState, ch: Channel, outcome: Outcome) {
    ctx.event(Event::Outcome { chan: ch, outcome });
    let d = &mut comp.dbe[ch.index()];
    match outcome {
        Outcome::Draw => {
            d.compared = true;
            d.active = false;
            report_up(ctx, tree, comp, Message::CompareResult { chan: ch, outcome });
        }
        Outcome::Win => {
            d.pending_win = true;
            report_up(ctx, tree, comp, Message::CompareResult { chan: ch, outcome });
        }
        Outcome::Lose => {
            d.pending_lose = true;
            report_up(ctx, tree, comp, Message::InMerge { chan: ch });
        }
    }
}

/// Reverse one step of the path towards the losing endpoint.
fn merge_down(ctx: &mut Ctx<'_>, tree: &mut TreeRegs, comp: &mut CompState, ch: Channel) {
    match comp.inmerge_from[ch.index()].take() {
        Some(c) => {
            tree.remove_child(c);
            tree.parent = Some(c);
            ctx.send(c, Message::MergeDown { chan: ch });
        }
        None => {
            let d = &mut comp.dbe[ch.index()];
            d.pending_lose = false;
            d.active = false;
            d.merged = true;
            tree.parent = Some(ch.port());
            ctx.send(ch.port(), Message::MergeComplete);
            ctx.event(Event::MergeEdge { chan: ch });
        }
    }
}

fn abort_down(ctx: &mut Ctx<'_>, comp: &mut CompState, ch: Channel) {
    match comp.inmerge_from[ch.index()].take() {
        Some(c) => ctx.send(c, Message::AbortMerge { chan: ch }),
        None => {
            let d = &mut comp.dbe[ch.index()];
            d.pending_lose = false;
            d.active = false;
            d.compared = false;
            ctx.send(ch.port(), Message::NotMerging);
        }
    }
}

fn rebuild_here(ctx: &mut Ctx<'_>, tree: &mut TreeRegs, comp: &mut CompState, rank: u8) {
    tree.ring = Some(RingPosition {
        parent: tree.parent,
        rank,
        children: tree.children.clone(),
    });
    for ch in Channel::BOTH {
        let d = &mut comp.dbe[ch.index()];
        d.active = false;
        if d.present && !d.merged {
            d.compared = false;
            ctx.send(ch.port(), Message::Uncompare);
        }
    }
    comp.epoch_live = [false; 2];
    comp.cells = [Vec::new(), Vec::new()];
    comp.endpoints = [None, None];
    comp.rebuild = Some(RebuildWait {
        pending: tree.children.clone(),
        max_epoch: comp.epoch,
    });
    for (i, &c) in tree.children.iter().enumerate() {
        ctx.send(c, Message::Rebuild { rank: i as u8 + 1 });
    }
    finish_rebuild(ctx, tree, comp);
}

fn finish_rebuild(ctx: &mut Ctx<'_>, tree: &TreeRegs, comp: &mut CompState) {
    let Some(wait) = comp.rebuild.as_ref() else {
        return;
    };
    if !wait.pending.is_empty() {
        return;
    }
    let epoch = wait.max_epoch;
    comp.rebuild = None;
    match tree.parent {
        Some(p) => ctx.send(p, Message::RebuildDone { epoch }),
        None => {
            comp.epoch = epoch;
            new_round(ctx, tree, comp);
        }
    }
}

fn advance_root(ctx: &mut Ctx<'_>, role: &mut Role, tree: &mut TreeRegs, comp: &mut CompState) {
    let r = &comp.root;
    match r.phase {
        RoundPhase::Walking => {
            if !r.walk_done || (r.out_chosen && r.out_answer.is_none()) {
                return;
            }
            let expected = [r.in_accepted, r.out_answer == Some(true)];
            if expected.iter().any(|&e| e) {
                let epoch = comp.epoch + 1;
                comp.root.expected = expected;
                comp.root.phase = RoundPhase::Comparing;
                start_compare(ctx, tree, comp, epoch, expected);
            } else if r.out_answer == Some(false) || r.dirty {
                new_round(ctx, tree, comp);
            } else {
                comp.root.phase = RoundPhase::Idle;
            }
        }
        RoundPhase::Comparing => {
            let done = Channel::BOTH
                .iter()
                .all(|ch| !r.expected[ch.index()] || r.results[ch.index()].is_some());
            if !done {
                return;
            }
            let results = r.results;
            let lost = |ch: Channel| results[ch.index()] == Some(Outcome::Lose);
            if lost(Channel::Out) || lost(Channel::In) {
                let (merge_ch, other) = if lost(Channel::Out) {
                    (Channel::Out, Channel::In)
                } else {
                    (Channel::In, Channel::Out)
                };
                if lost(other) {
                    abort_down(ctx, comp, other);
                }
                *role = Role::Follower;
                comp.root = RootState::default();
                comp.root.started = true;
                ctx.event(Event::Merged { chan: merge_ch });
                merge_down(ctx, tree, comp, merge_ch);
            } else if results.contains(&Some(Outcome::Win)) {
                comp.root.phase = RoundPhase::Rebuilding;
                comp.rebuild_waiting = Some(0);
                if comp.settled() {
                    comp.rebuild_waiting = None;
                    rebuild_here(ctx, tree, comp, 0);
                }
            } else {
                new_round(ctx, tree, comp);
            }
        }
        RoundPhase::Idle | RoundPhase::Rebuilding => {}
    }
}
