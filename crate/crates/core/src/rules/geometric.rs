//! Geometric (retain-and-pass-on) rules.

use crate::error::{Error, Result};
use crate::network::AgentId;
use crate::problem::{Allocation, Problem};
use crate::quantity::Quantity;
use crate::rules::Rule;

/// Multi-parameter geometric rule by recursion over the network.
///
/// Agents are visited in topological order. Each agent's disposable inflow is
/// its own inflow plus whatever its immediate upstream neighbours did not
/// keep; it keeps `retain[i]` of that and the rest flows on. The sink keeps
/// everything that reaches it.
pub fn geometric_recursive(problem: &Problem, retain: &[Quantity]) -> Result<Allocation> {
    let network = problem.network();
    let n = network.n();
    if retain.len() != n {
        return Err(Error::bad_parameter(format!(
            "retention vector has {} entries for {n} agents",
            retain.len()
        )));
    }
    if !retain[network.sink().index()].is_one() {
        return Err(Error::bad_parameter(
            "the sink must retain its whole inflow",
        ));
    }
    if let Some((i, share)) = retain
        .iter()
        .enumerate()
        .find(|(_, r)| *r > &Quantity::one())
    {
        return Err(Error::bad_parameter(format!(
            "retention {share} for agent {} exceeds 1",
            i + 1
        )));
    }

    let mut disposable = problem.inflows().to_vec();
    let mut amounts = vec![Quantity::zero(); n];
    for &agent in network.topological_order() {
        let i = agent.index();
        let kept = &retain[i] * &disposable[i];
        if let Some(next) = network.successor(agent) {
            let passed = &disposable[i] - &kept;
            disposable[next.index()] += passed;
        }
        amounts[i] = kept;
    }
    Ok(Allocation::new(amounts))
}

/// Single-parameter geometric rule by its closed form (lines only):
/// `γ (e_i + Σ_{k<i} (1-γ)^{i-k} e_k)` and `e_n + Σ_{k<n} (1-γ)^{n-k} e_k`
/// for the sink.
pub fn geometric_closed_form(problem: &Problem, gamma: &Quantity) -> Result<Allocation> {
    problem.network().require_linear()?;
    let pass = gamma
        .complement()
        .ok_or_else(|| Error::bad_parameter(format!("gamma = {gamma} exceeds 1")))?;
    let e = problem.inflows();
    let n = e.len();
    let inherited = |i: usize| -> Quantity {
        (0..i)
            .map(|k| &pass.pow((i - k) as u32) * &e[k])
            .sum::<Quantity>()
    };
    let mut amounts: Vec<Quantity> = (0..n - 1)
        .map(|i| gamma * &(&e[i] + &inherited(i)))
        .collect();
    amounts.push(&e[n - 1] + &inherited(n - 1));
    Ok(Allocation::new(amounts))
}

/// `1/(n-i+1)` for every non-sink agent, 1 for the sink.
pub fn serial_alpha_vector(n: usize) -> Vec<Quantity> {
    (1..=n)
        .map(|i| Quantity::frac(1, (n - i + 1) as u64))
        .collect()
}

/// Retention vector of the β-family member with pivot `k`: no-transfer
/// upstream of `k`, `beta` at `k`, serial retention `1/(n-i+1)` from `k+1`
/// through `n-1`, and 1 at the sink.
pub fn beta_alpha_vector(n: usize, k: AgentId, beta: &Quantity) -> Result<Vec<Quantity>> {
    if k.get() >= n {
        return Err(Error::bad_parameter(format!(
            "beta pivot {k} must be below the sink (n = {n})"
        )));
    }
    if beta >= &Quantity::one() {
        return Err(Error::bad_parameter(format!(
            "beta = {beta} must lie in [0, 1)"
        )));
    }
    Ok((1..=n)
        .map(|i| match i.cmp(&k.get()) {
            std::cmp::Ordering::Less => Quantity::one(),
            std::cmp::Ordering::Equal => beta.clone(),
            std::cmp::Ordering::Greater => Quantity::frac(1, (n - i + 1) as u64),
        })
        .collect())
}

/// Reads off a rule's candidate retention vector from unit-support profiles:
/// `α_i = R_i(0, …, 0, 1, 0, …, 0)` with the 1 at position `i`, and `α_n = 1`.
pub fn recover_alpha<R: Rule + ?Sized>(rule: &R, n: usize) -> Result<Vec<Quantity>> {
    let mut alpha = Vec::with_capacity(n);
    for i in 1..n {
        let agent = AgentId::new(i);
        let unit = Problem::unit_support(n, agent, Quantity::one())?;
        alpha.push(rule.allocate(&unit)?[agent].clone());
    }
    alpha.push(Quantity::one());
    Ok(alpha)
}
