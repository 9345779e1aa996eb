//! Leader election on the outer boundary of every grey component.
//!
//! Each boundary agent sends one census probe per orientation. The probe
//! collects turn codes and integrates its displacement and heading, so it
//! recognises its origin without identifiers. Agents whose word starts a
//! lexicographically minimal rotation become heads; one head per
//! orientation survives by local port numbers and the two survivors run a
//! token competition that leaves one leader.

use serde::Serialize;

use crate::boundary_comm::{forward_on_boundary, sweep_from, ForwardStep, NeighborhoodView};
use crate::lattice::{PortId, DIRECTIONS};
use crate::runtime::context::{Ctx, Event, Peer};
use crate::runtime::message::{Envelope, Message};
use crate::runtime::state::Role;
use crate::topology::{minimal_rotations, turning_sum_of};

/// The two traversal orientations of a boundary, named by local sweep sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    D1,
    D2,
}

impl Direction {
    pub fn sense(self) -> i8 {
        match self {
            Direction::D1 => 1,
            Direction::D2 => -1,
        }
    }

    pub fn of_sense(sense: i8) -> Self {
        if sense > 0 {
            Direction::D1
        } else {
            Direction::D2
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HeadElection {
    pub is_head: bool,
    pub k: usize,
}

pub fn elect_heads(word: &[u8], own_offset: usize) -> HeadElection {
    let heads = minimal_rotations(word);
    HeadElection {
        is_head: heads.contains(&own_offset),
        k: heads.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeadRecord {
    pub direction: Direction,
    pub own_port: PortId,
    pub k: usize,
    pub computed_ids: Vec<PortId>,
}

impl HeadRecord {
    pub fn new(direction: Direction, own_port: PortId, k: usize) -> Self {
        let step = 6 / k as i32;
        let computed_ids = (0..k as i32).map(|i| own_port.rotate(i * step)).collect();
        Self {
            direction,
            own_port,
            k,
            computed_ids,
        }
    }
}

/// Rank of a port used as an identifier: `0 > 3 > {1,5} > {2,4}`.
pub fn id_rank(p: PortId) -> u8 {
    match p.value() {
        0 => 3,
        3 => 2,
        1 | 5 => 1,
        _ => 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Survival {
    Survive,
    Withdraw,
}

pub fn select_survivor(record: &HeadRecord) -> Survival {
    let own = id_rank(record.own_port);
    if record.computed_ids.iter().all(|&id| id_rank(id) <= own) {
        Survival::Survive
    } else {
        Survival::Withdraw
    }
}

/// What an agent learned from its own probe in one orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    /// Turn codes starting at the agent itself.
    pub word: Vec<u8>,
    pub turning_sum: i32,
}

impl Census {
    pub fn from_word(word: Vec<u8>) -> Self {
        let turning_sum = turning_sum_of(&word);
        Self { word, turning_sum }
    }

    pub fn is_outer(&self) -> bool {
        self.turning_sum < 0
    }
}

/// Outcome of the census and head election for one orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Standing {
    pub turning_sum: i32,
    pub ring_len: usize,
    pub k: usize,
    pub head: bool,
    pub survive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token {
    /// Local sweep sense the token travels in at this agent.
    pub travel: i8,
    /// Port towards the token's head.
    pub back_port: PortId,
    pub own: bool,
    /// Kept after a decision so neighbours still see it.
    pub resolved: bool,
    pub lineage: u64,
}

/// One gap of unlinked ports between the linked ports `lo` and `hi`
/// (counting upwards from `lo`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreyAgent {
    pub lo: PortId,
    pub hi: PortId,
    pub swept: u8,
    pub standing: [Option<Standing>; 2],
    pub tokens: Vec<Token>,
    pub own_travel: Option<i8>,
}

impl GreyAgent {
    pub fn entry(&self, sense: i8) -> PortId {
        if sense > 0 {
            self.lo
        } else {
            self.hi
        }
    }

    pub fn exit(&self, sense: i8) -> PortId {
        self.entry(-sense)
    }

    pub fn is_outer(&self) -> bool {
        self.standing
            .iter()
            .flatten()
            .any(|s| s.turning_sum < 0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GreyState {
    pub started: bool,
    pub agents: Vec<GreyAgent>,
    /// Survivor check done and own tokens launched.
    pub decided: bool,
}

/// Gaps of a particle in local port terms.
pub fn local_agents(view: &NeighborhoodView) -> Vec<GreyAgent> {
    let linked: Vec<PortId> = PortId::all().filter(|&p| view.linked(p)).collect();
    if linked.is_empty() || linked.len() == 6 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for &lo in &linked {
        let mut hi = lo.rotate(1);
        let mut swept = 0;
        while !view.linked(hi) {
            swept += 1;
            hi = hi.rotate(1);
        }
        if swept > 0 {
            out.push(GreyAgent {
                lo,
                hi,
                swept,
                standing: [None, None],
                tokens: Vec::new(),
                own_travel: None,
            });
        }
    }
    out
}

/// The agent and sense that handle a boundary message arriving through `z`
/// with `label`.
pub fn locate(view: &NeighborhoodView, agents: &[GreyAgent], z: PortId, label: PortId) -> Option<(usize, ForwardStep)> {
    let step = forward_on_boundary(view, z, label).ok()?;
    let idx = agents.iter().position(|a| a.entry(step.sense) == z)?;
    Some((idx, step))
}

fn add(pos: (i32, i32), heading: u8) -> (i32, i32) {
    let d = DIRECTIONS[heading as usize % 6];
    (pos.0 + d.0, pos.1 + d.1)
}

/// Whether the neighbour behind port `x` holds, or is about to receive, a
/// token travelling back towards us on the same boundary.
fn peer_holds_token_towards(peer: &Peer<'_>, y: PortId, j: PortId) -> bool {
    let agents_owned;
    let agents: &[GreyAgent] = if peer.state.grey.started {
        &peer.state.grey.agents
    } else {
        agents_owned = local_agents(peer.view);
        &agents_owned
    };
    let Some((idx, step)) = locate(peer.view, agents, y, j) else {
        return false;
    };
    let back = -step.sense;
    if agents[idx].tokens.iter().any(|t| t.travel == back) {
        return true;
    }
    peer.inbox.iter().any(|env| {
        matches!(env.msg, Message::Competition)
            && env
                .boundary_label
                .and_then(|l| locate(peer.view, agents, env.recv_port, l))
                .is_some_and(|(i, s)| i == idx && s.sense == back)
    })
}

pub(crate) fn activate(ctx: &mut Ctx<'_>, role: &mut Role, grey: &mut GreyState, inbox: &[Envelope]) {
    if !grey.started {
        grey.started = true;
        grey.agents = local_agents(ctx.view());
        if ctx.view().linked_count() == 0 {
            set_role(role, Role::Leader);
        }
        for a in 0..grey.agents.len() {
            for sense in [1i8, -1] {
                let step = sweep_from(ctx.view(), grey.agents[a].entry(sense), sense);
                let lineage = ctx.fresh_lineage();
                let probe = Message::BoundaryProbe {
                    word: vec![step.swept],
                    pos: add((0, 0), 0),
                    heading: 0,
                };
                ctx.send_boundary(step.exit, step.label, probe, lineage);
            }
        }
    }

    for env in inbox.iter().filter(|e| e.msg.is_boundary()) {
        let label = env.boundary_label.expect("boundary messages carry a label");
        let Some((a, step)) = locate(ctx.view(), &grey.agents, env.recv_port, label) else {
            ctx.event(Event::Violation(format!(
                "boundary message at port {} label {} matches no agent",
                env.recv_port, label
            )));
            continue;
        };
        match &env.msg {
            Message::BoundaryProbe { word, pos, heading } => {
                let home = (2 + 6 - word[0] as i32 % 6) as u8 % 6;
                if *pos == (0, 0) && *heading == home {
                    let census = Census::from_word(word.clone());
                    let dir = Direction::of_sense(step.sense);
                    let standing = standing_of(&census, grey.agents[a].exit(step.sense), dir);
                    ctx.event(Event::Census {
                        sense: step.sense,
                        port: grey.agents[a].lo,
                        census,
                        standing,
                    });
                    grey.agents[a].standing[dir.index()] = Some(standing);
                } else {
                    let mut word = word.clone();
                    word.push(step.swept);
                    let heading = (heading + step.swept + 4) % 6;
                    let msg = Message::BoundaryProbe {
                        word,
                        pos: add(*pos, heading),
                        heading,
                    };
                    ctx.send_boundary(step.exit, step.label, msg, env.lineage);
                }
            }
            Message::Competition => grey.agents[a].tokens.push(Token {
                travel: step.sense,
                back_port: env.recv_port,
                own: false,
                resolved: false,
                lineage: env.lineage,
            }),
            Message::LeaderMsg | Message::FollowerMsg => {
                if grey.agents[a].own_travel == Some(-step.sense) {
                    let r = if matches!(env.msg, Message::LeaderMsg) {
                        Role::Leader
                    } else {
                        Role::Follower
                    };
                    set_role(role, r);
                } else {
                    ctx.send_boundary(step.exit, step.label, env.msg.clone(), env.lineage);
                }
            }
            _ => unreachable!("filtered to boundary messages"),
        }
    }

    if !grey.decided
        && !grey.agents.is_empty()
        && grey.agents.iter().all(|a| a.standing.iter().all(Option::is_some))
    {
        grey.decided = true;
        let survives = |sense: i8| {
            grey.agents.iter().any(|a| {
                a.standing[Direction::of_sense(sense).index()].is_some_and(|s| s.survive)
            })
        };
        if survives(1) && survives(-1) {
            set_role(role, Role::Leader);
        } else {
            for agent in grey.agents.iter_mut() {
                for sense in [1i8, -1] {
                    if agent.standing[Direction::of_sense(sense).index()].is_some_and(|s| s.survive) {
                        agent.own_travel = Some(sense);
                        let lineage = ctx.fresh_lineage();
                        agent.tokens.push(Token {
                            travel: sense,
                            back_port: agent.exit(-sense),
                            own: true,
                            resolved: false,
                            lineage,
                        });
                    }
                }
            }
        }
    }

    if grey.decided {
        for a in 0..grey.agents.len() {
            run_tokens(ctx, role, &mut grey.agents[a]);
        }
    }
}

fn standing_of(census: &Census, own_port: PortId, dir: Direction) -> Standing {
    let election = elect_heads(&census.word, 0);
    let outer = census.is_outer();
    let survive = outer
        && election.is_head
        && select_survivor(&HeadRecord::new(dir, own_port, election.k)) == Survival::Survive;
    Standing {
        turning_sum: census.turning_sum,
        ring_len: census.word.len(),
        k: election.k,
        head: outer && election.is_head,
        survive,
    }
}

/// A leader never steps down.
fn set_role(role: &mut Role, new: Role) {
    if *role != Role::Leader {
        *role = new;
    }
}

fn run_tokens(ctx: &mut Ctx<'_>, role: &mut Role, agent: &mut GreyAgent) {
    let mut i = 0;
    while i < agent.tokens.len() {
        let t = agent.tokens[i];
        if t.resolved {
            i += 1;
            continue;
        }
        if let Some(j) = agent
            .tokens
            .iter()
            .position(|u| !u.resolved && u.travel == -t.travel)
        {
            let u = agent.tokens[j];
            let (winner, loser) = if t.back_port < u.back_port { (t, u) } else { (u, t) };
            deliver_result(ctx, role, agent, winner, true);
            deliver_result(ctx, role, agent, loser, false);
            agent.tokens[i].resolved = true;
            agent.tokens[j].resolved = true;
            if *role == Role::Undecided {
                set_role(role, Role::Follower);
            }
            i += 1;
            continue;
        }
        let step = sweep_from(ctx.view(), agent.entry(t.travel), t.travel);
        let facing = ctx
            .peer(step.exit)
            .is_some_and(|peer| {
                let y = ctx.view().port(step.exit).back_port.expect("linked");
                peer_holds_token_towards(&peer, y, step.label)
            });
        if facing {
            let rightmost = step.exit.is_left();
            deliver_result(ctx, role, agent, t, rightmost);
            agent.tokens[i].resolved = true;
            if *role == Role::Undecided {
                set_role(role, Role::Follower);
            }
            i += 1;
        } else {
            ctx.send_boundary(step.exit, step.label, Message::Competition, t.lineage);
            agent.tokens.remove(i);
        }
    }
}

fn deliver_result(ctx: &mut Ctx<'_>, role: &mut Role, agent: &GreyAgent, token: Token, wins: bool) {
    if token.own {
        set_role(role, if wins { Role::Leader } else { Role::Follower });
        return;
    }
    let back = -token.travel;
    let step = sweep_from(ctx.view(), agent.entry(back), back);
    debug_assert_eq!(step.exit, token.back_port);
    let msg = if wins { Message::LeaderMsg } else { Message::FollowerMsg };
    let lineage = ctx.fresh_lineage();
    ctx.send_boundary(step.exit, step.label, msg, lineage);
}
