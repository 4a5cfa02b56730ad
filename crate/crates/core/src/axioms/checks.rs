use num_rational::BigRational;

use super::{AxiomId, CheckOutcome, Mismatch, Perturbation, Witness};
use crate::error::{Error, Result};
use crate::network::AgentId;
use crate::problem::{closure_sums, source_of, Allocation, Problem};
use crate::quantity::Quantity;
use crate::rules::Rule;

fn outcome(
    axiom: AxiomId,
    problem: &Problem,
    perturbation: Perturbation,
    mismatches: Vec<Mismatch>,
) -> CheckOutcome {
    if mismatches.is_empty() {
        CheckOutcome::Pass
    } else {
        CheckOutcome::Violated(Box::new(Witness {
            axiom,
            problem: problem.clone(),
            perturbation,
            mismatches,
        }))
    }
}

fn compare_at(
    agents: impl IntoIterator<Item = AgentId>,
    lhs: &Allocation,
    rhs: &Allocation,
) -> Vec<Mismatch> {
    agents
        .into_iter()
        .filter(|&a| lhs[a] != rhs[a])
        .map(|a| Mismatch::new(a, &lhs[a], &rhs[a]))
        .collect()
}

/// `R(ρe) = ρR(e)`, componentwise.
pub fn check_scale_invariance<R: Rule + ?Sized>(
    rule: &R,
    problem: &Problem,
    factor: &Quantity,
) -> Result<CheckOutcome> {
    let scaled = rule.allocate(&problem.scaled(factor))?;
    let expected = rule.allocate(problem)?.scaled(factor);
    let mismatches = compare_at(problem.network().agents(), &scaled, &expected);
    Ok(outcome(
        AxiomId::ScaleInvariance,
        problem,
        Perturbation::Scale {
            factor: factor.clone(),
        },
        mismatches,
    ))
}

/// Changing `e_i` leaves every agent strictly upstream of `i` untouched.
pub fn check_upstream_invariance<R: Rule + ?Sized>(
    rule: &R,
    problem: &Problem,
    agent: AgentId,
    value: &Quantity,
) -> Result<CheckOutcome> {
    let changed = problem.with_inflow(agent, value.clone())?;
    let upstream: Vec<AgentId> = problem
        .network()
        .upstream_closure(agent)?
        .into_iter()
        .filter(|&k| k != agent)
        .collect();
    let before = rule.allocate(problem)?;
    let after = rule.allocate(&changed)?;
    Ok(outcome(
        AxiomId::UpstreamInvariance,
        problem,
        Perturbation::Replace {
            agent,
            value: value.clone(),
        },
        compare_at(upstream, &before, &after),
    ))
}

/// Two lines whose sources carry the same inflow give those sources the same
/// amount. Skipped when a source is undefined or the inflows differ.
pub fn check_equal_sources<R: Rule + ?Sized>(
    rule: &R,
    problem: &Problem,
    other: &Problem,
) -> Result<CheckOutcome> {
    if problem.n() != other.n() {
        return Err(Error::bad_parameter(format!(
            "equal sources compares problems of equal size, got {} and {}",
            problem.n(),
            other.n()
        )));
    }
    let (Some(s), Some(t)) = (source_of(problem)?, source_of(other)?) else {
        return Ok(CheckOutcome::Skipped("a source is undefined".into()));
    };
    if problem.inflow(s) != other.inflow(t) {
        return Ok(CheckOutcome::Skipped("source inflows differ".into()));
    }
    let lhs = &rule.allocate(problem)?[s];
    let rhs = &rule.allocate(other)?[t];
    let mismatches = if lhs == rhs {
        vec![]
    } else {
        vec![Mismatch {
            paired_with: Some(t),
            ..Mismatch::new(s, lhs, rhs)
        }]
    };
    Ok(outcome(
        AxiomId::EqualSources,
        problem,
        Perturbation::Compare {
            other: other.clone(),
        },
        mismatches,
    ))
}

/// On a line whose only positive inflow is `amount` at `agent`, that agent
/// gets the average of what the agents downstream of it get.
pub fn check_neutrality<R: Rule + ?Sized>(
    rule: &R,
    n: usize,
    agent: AgentId,
    amount: &Quantity,
) -> Result<CheckOutcome> {
    if agent.get() >= n {
        return Err(Error::bad_parameter(format!(
            "neutrality needs an agent in 1..{}, got {agent}",
            n - 1
        )));
    }
    if !amount.is_positive() {
        return Err(Error::bad_parameter("neutrality needs a positive inflow"));
    }
    let problem = Problem::unit_support(n, agent, amount.clone())?;
    let x = rule.allocate(&problem)?;
    let downstream: Quantity = x.amounts()[agent.get()..].iter().sum();
    let average = &downstream / &Quantity::integer((n - agent.get()) as u64);
    let mismatches = if x[agent] == average {
        vec![]
    } else {
        vec![Mismatch::new(agent, &x[agent], &average)]
    };
    Ok(outcome(
        AxiomId::Neutrality,
        &problem,
        Perturbation::UnitSupport {
            agent,
            amount: amount.clone(),
        },
        mismatches,
    ))
}

/// Implements the rule upstream of `agent`: every agent in `U(i) \ {i}` is
/// zeroed and `agent` receives its own inflow plus all upstream water that
/// the rule did not allocate upstream.
pub fn residual_problem(
    problem: &Problem,
    allocation: &Allocation,
    agent: AgentId,
) -> Result<Problem> {
    let network = problem.network();
    let closure = network.upstream_closure(agent)?;
    let inflow_sums = closure_sums(network, problem.inflows());
    let allocated_sums = closure_sums(network, allocation.amounts());
    let upstream_allocated = &allocated_sums[agent.index()] - &allocation[agent];
    let carried = inflow_sums[agent.index()]
        .checked_sub(&upstream_allocated)
        .ok_or_else(|| Error::FeasibilityViolation {
            agent,
            lhs: Box::new(upstream_allocated.clone()),
            rhs: Box::new(inflow_sums[agent.index()].clone()),
        })?;
    let mut inflows = problem.inflows().to_vec();
    for k in closure {
        inflows[k.index()] = Quantity::zero();
    }
    inflows[agent.index()] = carried;
    problem.with_inflows(inflows)
}

/// Partial-implementation invariance at `agent`: the downstream path keeps
/// its allocation in the residual problem.
pub fn check_pii<R: Rule + ?Sized>(
    rule: &R,
    problem: &Problem,
    agent: AgentId,
) -> Result<CheckOutcome> {
    let original = rule.allocate(problem)?;
    let residual = residual_problem(problem, &original, agent)?;
    let replayed = rule.allocate(&residual)?;
    let downstream = problem.network().downstream_path(agent)?;
    Ok(outcome(
        AxiomId::PartialImplementationInvariance,
        problem,
        Perturbation::Residual { agent },
        compare_at(downstream, &original, &replayed),
    ))
}

/// Raising `e_i` by `delta` changes the allocations of any two downstream
/// agents with equal inflows by the same amount. Skipped when no such pair
/// exists.
pub fn check_downstream_impartiality<R: Rule + ?Sized>(
    rule: &R,
    problem: &Problem,
    agent: AgentId,
    delta: &Quantity,
) -> Result<CheckOutcome> {
    problem.network().require_linear()?;
    problem.network().check_agent(agent)?;
    if !delta.is_positive() {
        return Err(Error::bad_parameter(
            "downstream impartiality needs delta > 0",
        ));
    }
    let n = problem.n();
    let pairs: Vec<(AgentId, AgentId)> = (agent.get() + 1..=n)
        .flat_map(|k| (k + 1..=n).map(move |l| (AgentId::new(k), AgentId::new(l))))
        .filter(|&(k, l)| problem.inflow(k) == problem.inflow(l))
        .collect();
    if pairs.is_empty() {
        return Ok(CheckOutcome::Skipped(
            "no downstream pair with equal inflows".into(),
        ));
    }
    let raised = problem.with_inflow(agent, problem.inflow(agent) + delta)?;
    let before = rule.allocate(problem)?;
    let after = rule.allocate(&raised)?;
    let change = |a: AgentId| -> BigRational { after[a].as_ratio() - before[a].as_ratio() };
    let mismatches = pairs
        .into_iter()
        .filter_map(|(k, l)| {
            let (dk, dl) = (change(k), change(l));
            (dk != dl).then_some(Mismatch {
                agent: k,
                paired_with: Some(l),
                lhs: dk,
                rhs: dl,
            })
        })
        .collect();
    Ok(outcome(
        AxiomId::DownstreamImpartiality,
        problem,
        Perturbation::Increase {
            agent,
            delta: delta.clone(),
        },
        mismatches,
    ))
}
