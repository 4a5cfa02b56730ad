//! River networks: agents joined by a successor relation forming an in-tree.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use crate::error::{Error, Result};

/// 1-based agent position. Lower ids sit upstream on linear networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(usize);

impl AgentId {
    /// Panics if `id` is zero.
    pub fn new(id: usize) -> Self {
        assert!(id >= 1, "agent ids start at 1");
        AgentId(id)
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Zero-based position for indexing vectors.
    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn from_index(index: usize) -> Self {
        AgentId(index + 1)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Linear,
    Tree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiverNetwork {
    successors: Vec<Option<AgentId>>,
    labels: Vec<Option<String>>,
    predecessors: Vec<Vec<AgentId>>,
    order: Vec<AgentId>,
    sink: AgentId,
    topology: Topology,
}

/// Checks the in-tree invariants and classifies the network.
pub fn validate_network(successors: &[Option<AgentId>]) -> Result<Topology> {
    let n = successors.len();
    if n < 3 {
        return Err(Error::TooFewAgents(n));
    }
    for (index, successor) in successors.iter().enumerate() {
        if let Some(next) = successor {
            if next.get() > n {
                return Err(Error::Disconnected {
                    agent: AgentId::from_index(index),
                    successor: *next,
                });
            }
        }
    }
    if let Some(agent) = first_agent_on_cycle(successors) {
        return Err(Error::Cycle(agent));
    }
    let sinks = successors.iter().filter(|s| s.is_none()).count();
    if sinks != 1 {
        return Err(Error::MultipleSinks(sinks));
    }
    let linear = successors
        .iter()
        .enumerate()
        .all(|(index, successor)| match successor {
            Some(next) => next.index() == index + 1,
            None => index == n - 1,
        });
    Ok(if linear {
        Topology::Linear
    } else {
        Topology::Tree
    })
}

/// Smallest agent lying on a cycle, if any.
fn first_agent_on_cycle(successors: &[Option<AgentId>]) -> Option<AgentId> {
    let n = successors.len();
    let mut on_cycle: Option<AgentId> = None;
    for start in 0..n {
        let mut current = start;
        let mut steps = 0;
        while let Some(next) = successors[current] {
            current = next.index();
            steps += 1;
            if steps > n {
                break;
            }
        }
        if steps > n {
            // `current` is on the cycle; walk it once to find its smallest member.
            let mut smallest = current;
            let mut walker = successors[current].map(AgentId::index);
            while let Some(w) = walker {
                if w == current {
                    break;
                }
                smallest = smallest.min(w);
                walker = successors[w].map(AgentId::index);
            }
            let candidate = AgentId::from_index(smallest);
            on_cycle = Some(on_cycle.map_or(candidate, |c| c.min(candidate)));
        }
    }
    on_cycle
}

impl RiverNetwork {
    pub fn new(successors: Vec<Option<AgentId>>) -> Result<Self> {
        let topology = validate_network(&successors)?;
        let n = successors.len();
        let mut predecessors = vec![Vec::new(); n];
        let mut sink = AgentId::from_index(0);
        for (index, successor) in successors.iter().enumerate() {
            match successor {
                Some(next) => predecessors[next.index()].push(AgentId::from_index(index)),
                None => sink = AgentId::from_index(index),
            }
        }

        // Kahn's algorithm, always releasing the smallest ready id first.
        let mut pending: Vec<usize> = predecessors.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| pending[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(AgentId::from_index(i));
            if let Some(next) = successors[i] {
                pending[next.index()] -= 1;
                if pending[next.index()] == 0 {
                    ready.push(Reverse(next.index()));
                }
            }
        }
        debug_assert_eq!(order.len(), n);

        Ok(RiverNetwork {
            labels: vec![None; n],
            successors,
            predecessors,
            order,
            sink,
            topology,
        })
    }

    /// The line 1 → 2 → … → n.
    pub fn linear(n: usize) -> Result<Self> {
        let successors = (0..n)
            .map(|i| (i + 1 < n).then(|| AgentId::from_index(i + 1)))
            .collect();
        RiverNetwork::new(successors)
    }

    pub fn with_labels<I, S>(mut self, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<Option<String>> = labels.into_iter().map(|l| Some(l.into())).collect();
        if labels.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.successors.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.n()).map(AgentId::from_index)
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        agent.get() <= self.n()
    }

    pub fn check_agent(&self, agent: AgentId) -> Result<()> {
        if self.contains(agent) {
            Ok(())
        } else {
            Err(Error::UnknownAgent(agent))
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_linear(&self) -> bool {
        self.topology == Topology::Linear
    }

    pub fn sink(&self) -> AgentId {
        self.sink
    }

    pub fn successor(&self, agent: AgentId) -> Option<AgentId> {
        self.successors[agent.index()]
    }

    pub fn successors(&self) -> &[Option<AgentId>] {
        &self.successors
    }

    /// Agents whose successor is `agent`.
    pub fn predecessors(&self, agent: AgentId) -> &[AgentId] {
        &self.predecessors[agent.index()]
    }

    /// Deterministic topological order: every agent appears after all of its
    /// predecessors, ties broken by smallest id.
    pub fn topological_order(&self) -> &[AgentId] {
        &self.order
    }

    pub fn label(&self, agent: AgentId) -> Option<&str> {
        self.labels[agent.index()].as_deref()
    }

    /// Label if present, otherwise the numeric id.
    pub fn display_name(&self, agent: AgentId) -> String {
        self.label(agent)
            .map_or_else(|| agent.to_string(), str::to_string)
    }

    /// All agents whose path to the sink passes through `agent`, including
    /// `agent` itself, sorted by id.
    pub fn upstream_closure(&self, agent: AgentId) -> Result<Vec<AgentId>> {
        self.check_agent(agent)?;
        let mut closure = vec![agent];
        let mut frontier = vec![agent];
        while let Some(current) = frontier.pop() {
            for &p in self.predecessors(current) {
                closure.push(p);
                frontier.push(p);
            }
        }
        closure.sort_unstable();
        Ok(closure)
    }

    /// The successor chain from `agent` to the sink, both inclusive.
    pub fn downstream_path(&self, agent: AgentId) -> Result<Vec<AgentId>> {
        self.check_agent(agent)?;
        let mut path = vec![agent];
        let mut current = agent;
        while let Some(next) = self.successor(current) {
            path.push(next);
            current = next;
        }
        Ok(path)
    }

    pub(crate) fn require_linear(&self) -> Result<()> {
        if self.is_linear() {
            Ok(())
        } else {
            Err(Error::NotLinear)
        }
    }
}
