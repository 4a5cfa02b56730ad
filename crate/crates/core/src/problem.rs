//! Problems (a network plus inflows) and allocations.

use std::ops::Index;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{AgentId, RiverNetwork};
use crate::quantity::Quantity;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    network: RiverNetwork,
    inflows: Vec<Quantity>,
}

impl Problem {
    pub fn new(network: RiverNetwork, inflows: Vec<Quantity>) -> Result<Self> {
        if inflows.len() != network.n() {
            return Err(Error::LengthMismatch {
                expected: network.n(),
                actual: inflows.len(),
            });
        }
        Ok(Problem { network, inflows })
    }

    /// Problem on the line 1 → … → n.
    pub fn linear(inflows: Vec<Quantity>) -> Result<Self> {
        Problem::new(RiverNetwork::linear(inflows.len())?, inflows)
    }

    /// Linear problem with a single positive inflow `amount` at `agent`.
    pub fn unit_support(n: usize, agent: AgentId, amount: Quantity) -> Result<Self> {
        let network = RiverNetwork::linear(n)?;
        network.check_agent(agent)?;
        let mut inflows = vec![Quantity::zero(); n];
        inflows[agent.index()] = amount;
        Problem::new(network, inflows)
    }

    pub fn network(&self) -> &RiverNetwork {
        &self.network
    }

    pub fn n(&self) -> usize {
        self.network.n()
    }

    pub fn inflows(&self) -> &[Quantity] {
        &self.inflows
    }

    pub fn inflow(&self, agent: AgentId) -> &Quantity {
        &self.inflows[agent.index()]
    }

    pub fn total_inflow(&self) -> Quantity {
        self.inflows.iter().sum()
    }

    /// Same network, different inflows.
    pub fn with_inflows(&self, inflows: Vec<Quantity>) -> Result<Self> {
        Problem::new(self.network.clone(), inflows)
    }

    /// Same problem with one agent's inflow replaced.
    pub fn with_inflow(&self, agent: AgentId, value: Quantity) -> Result<Self> {
        self.network.check_agent(agent)?;
        let mut inflows = self.inflows.clone();
        inflows[agent.index()] = value;
        Ok(Problem {
            network: self.network.clone(),
            inflows,
        })
    }

    pub fn scaled(&self, factor: &Quantity) -> Self {
        Problem {
            network: self.network.clone(),
            inflows: self.inflows.iter().map(|e| e * factor).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Allocation {
    amounts: Vec<Quantity>,
}

impl Allocation {
    pub fn new(amounts: Vec<Quantity>) -> Self {
        Allocation { amounts }
    }

    pub fn amounts(&self) -> &[Quantity] {
        &self.amounts
    }

    pub fn into_amounts(self) -> Vec<Quantity> {
        self.amounts
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn total(&self) -> Quantity {
        self.amounts.iter().sum()
    }

    pub fn scaled(&self, factor: &Quantity) -> Self {
        Allocation::new(self.amounts.iter().map(|x| x * factor).collect())
    }
}

impl Index<AgentId> for Allocation {
    type Output = Quantity;
    fn index(&self, agent: AgentId) -> &Quantity {
        &self.amounts[agent.index()]
    }
}

impl From<Vec<Quantity>> for Allocation {
    fn from(amounts: Vec<Quantity>) -> Self {
        Allocation::new(amounts)
    }
}

/// Sums `values` over every agent's upstream closure.
pub(crate) fn closure_sums(network: &RiverNetwork, values: &[Quantity]) -> Vec<Quantity> {
    let mut sums = values.to_vec();
    for &agent in network.topological_order() {
        if let Some(next) = network.successor(agent) {
            let carried = sums[agent.index()].clone();
            sums[next.index()] += carried;
        }
    }
    sums
}

/// Exact feasibility and non-wastefulness check.
///
/// Feasibility is tested at the upstream closure of every non-sink agent in
/// id order, so the reported agent is the smallest violating one.
pub fn validate_allocation(problem: &Problem, allocation: &Allocation) -> Result<()> {
    let network = problem.network();
    if allocation.len() != network.n() {
        return Err(Error::LengthMismatch {
            expected: network.n(),
            actual: allocation.len(),
        });
    }
    let inflow_sums = closure_sums(network, problem.inflows());
    let allocated_sums = closure_sums(network, allocation.amounts());
    for agent in network.agents().filter(|&a| a != network.sink()) {
        let (lhs, rhs) = (&allocated_sums[agent.index()], &inflow_sums[agent.index()]);
        if lhs > rhs {
            return Err(Error::FeasibilityViolation {
                agent,
                lhs: Box::new(lhs.clone()),
                rhs: Box::new(rhs.clone()),
            });
        }
    }
    let (total_x, total_e) = (allocation.total(), problem.total_inflow());
    if total_x != total_e {
        return Err(Error::WastefulnessViolation {
            total_x: Box::new(total_x),
            total_e: Box::new(total_e),
        });
    }
    Ok(())
}

/// Most upstream agent among 1..n-1 with positive inflow; lines only.
pub fn source_of(problem: &Problem) -> Result<Option<AgentId>> {
    problem.network().require_linear()?;
    Ok(problem.inflows()[..problem.n() - 1]
        .iter()
        .position(Quantity::is_positive)
        .map(AgentId::from_index))
}
