//! Euler-tour ring over a rooted tree.
//!
//! A node with `c` children hosts `c + 1` agents; agent `j` is the `j`-th
//! visit of the node in a depth-first walk that takes children in order.

use serde::Serialize;
use thiserror::Error;

use crate::lattice::PortId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree has {0} roots")]
    RootCount(usize),
    #[error("node {0} lies on a parent cycle")]
    Cycle(usize),
    #[error("child lists disagree with parent pointers at node {0}")]
    Inconsistent(usize),
}

/// A rooted tree over nodes `0..n` with ordered child lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl Tree {
    /// Children are ordered by node index.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self, TreeError> {
        let mut children = vec![Vec::new(); parent.len()];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(i);
            }
        }
        Self::with_children(parent, children)
    }

    pub fn with_children(
        parent: Vec<Option<usize>>,
        children: Vec<Vec<usize>>,
    ) -> Result<Self, TreeError> {
        let roots: Vec<usize> = (0..parent.len()).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(TreeError::RootCount(roots.len()));
        }
        for (p, kids) in children.iter().enumerate() {
            if let Some(&bad) = kids.iter().find(|&&c| parent[c] != Some(p)) {
                return Err(TreeError::Inconsistent(bad));
            }
        }
        let listed: usize = children.iter().map(Vec::len).sum();
        if listed + 1 != parent.len() {
            return Err(TreeError::Inconsistent(roots[0]));
        }
        for start in 0..parent.len() {
            let mut cur = start;
            for _ in 0..=parent.len() {
                match parent[cur] {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            if parent[cur].is_some() {
                return Err(TreeError::Cycle(start));
            }
        }
        Ok(Self {
            parent,
            children,
            root: roots[0],
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// 1-based position of `v` among its parent's children.
    pub fn rank(&self, v: usize) -> Option<usize> {
        let p = self.parent[v]?;
        self.children[p].iter().position(|&c| c == v).map(|i| i + 1)
    }

    pub fn depth(&self, v: usize) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            cur = p;
            d += 1;
        }
        d
    }
}

/// The `visit`-th agent (1-based) of tree node `node`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RingAgent {
    pub node: usize,
    pub visit: usize,
}

/// Successor link of the virtual ring.
pub fn next_agent(tree: &Tree, a: RingAgent) -> RingAgent {
    let kids = tree.children(a.node);
    if a.visit <= kids.len() {
        return RingAgent {
            node: kids[a.visit - 1],
            visit: 1,
        };
    }
    match tree.parent(a.node) {
        None => RingAgent {
            node: a.node,
            visit: 1,
        },
        Some(p) => RingAgent {
            node: p,
            visit: tree.rank(a.node).expect("non-root has a rank") + 1,
        },
    }
}

/// Predecessor link of the virtual ring.
pub fn pre_agent(tree: &Tree, a: RingAgent) -> RingAgent {
    if a.visit > 1 {
        let child = tree.children(a.node)[a.visit - 2];
        return last_agent(tree, child);
    }
    match tree.parent(a.node) {
        None => last_agent(tree, a.node),
        Some(p) => RingAgent {
            node: p,
            visit: tree.rank(a.node).expect("non-root has a rank"),
        },
    }
}

fn last_agent(tree: &Tree, v: usize) -> RingAgent {
    RingAgent {
        node: v,
        visit: tree.children(v).len() + 1,
    }
}

/// Agents in ring order starting at the root's first agent (the root-label
/// position); the final entry is the root's last agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerRing {
    pub agents: Vec<RingAgent>,
}

impl EulerRing {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.agents.iter().map(|a| a.node).collect()
    }

    pub fn position(&self, a: RingAgent) -> Option<usize> {
        self.agents.iter().position(|x| *x == a)
    }
}

/// Follows the successor links from the root's first agent.
pub fn euler_ring(tree: &Tree) -> EulerRing {
    let start = RingAgent {
        node: tree.root(),
        visit: 1,
    };
    let mut agents = vec![start];
    let mut cur = next_agent(tree, start);
    while cur != start {
        agents.push(cur);
        cur = next_agent(tree, cur);
        assert!(agents.len() <= 2 * tree.len(), "ring links do not close");
    }
    EulerRing { agents }
}

/// Which agent of a neighbouring particle a message is meant for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AgentSlot {
    Index(u8),
    Last,
}

/// A ring neighbour as a particle sees it: a port (or itself) and a slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AgentRef {
    /// `None` when the agent lives on the same particle.
    pub port: Option<PortId>,
    pub slot: AgentSlot,
}

/// A particle's place in the tree, enough to derive its ring links.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RingPosition {
    pub parent: Option<PortId>,
    /// 1-based rank among the parent's children; unused at the root.
    pub rank: u8,
    /// Child ports in increasing order.
    pub children: Vec<PortId>,
}

impl RingPosition {
    pub fn agent_count(&self) -> usize {
        self.children.len() + 1
    }

    pub fn resolve(&self, slot: AgentSlot) -> usize {
        match slot {
            AgentSlot::Index(j) => j as usize,
            AgentSlot::Last => self.agent_count(),
        }
    }

    /// Successor of local agent `j` (1-based).
    pub fn next(&self, j: usize) -> AgentRef {
        if j <= self.children.len() {
            return AgentRef {
                port: Some(self.children[j - 1]),
                slot: AgentSlot::Index(1),
            };
        }
        match self.parent {
            None => AgentRef {
                port: None,
                slot: AgentSlot::Index(1),
            },
            Some(p) => AgentRef {
                port: Some(p),
                slot: AgentSlot::Index(self.rank + 1),
            },
        }
    }

    /// Predecessor of local agent `j` (1-based).
    pub fn pre(&self, j: usize) -> AgentRef {
        if j > 1 {
            return AgentRef {
                port: Some(self.children[j - 2]),
                slot: AgentSlot::Last,
            };
        }
        match self.parent {
            None => AgentRef {
                port: None,
                slot: AgentSlot::Last,
            },
            Some(p) => AgentRef {
                port: Some(p),
                slot: AgentSlot::Index(self.rank),
            },
        }
    }
}
