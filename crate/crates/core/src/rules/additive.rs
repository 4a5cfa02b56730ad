//! Additive downstream-sharing rules (lines only).

use crate::error::{Error, Result};
use crate::network::AgentId;
use crate::problem::{Allocation, Problem};
use crate::quantity::Quantity;

/// `R_i = δ_i e_i + Σ_{k<i} (1-δ_k) e_k / (n-k)`: each agent keeps a `δ`
/// share of its own inflow and splits the rest equally among everyone
/// strictly downstream.
pub fn additive_delta(problem: &Problem, delta: &[Quantity]) -> Result<Allocation> {
    problem.network().require_linear()?;
    let n = problem.n();
    if delta.len() != n {
        return Err(Error::bad_parameter(format!(
            "delta has {} entries for {n} agents",
            delta.len()
        )));
    }
    if !delta[n - 1].is_one() {
        return Err(Error::bad_parameter("last entry of delta must be 1"));
    }
    let e = problem.inflows();
    let mut amounts = Vec::with_capacity(n);
    // Running Σ_{k<i} (1-δ_k) e_k / (n-k).
    let mut received = Quantity::zero();
    for i in 0..n {
        let passed = delta[i]
            .complement()
            .ok_or_else(|| Error::bad_parameter(format!("delta_{} exceeds 1", i + 1)))?;
        amounts.push(&(&delta[i] * &e[i]) + &received);
        if i + 1 < n {
            let downstream = Quantity::integer((n - 1 - i) as u64);
            received += &(&passed * &e[i]) / &downstream;
        }
    }
    Ok(Allocation::new(amounts))
}

/// `R_i = λ e_i + (1-λ) Σ_{j<i} e_j / (n-j)` for `i < n`, and the sink gets
/// `e_n + (1-λ) Σ_{j<n} e_j / (n-j)`.
pub fn lambda_rule(problem: &Problem, lambda: &Quantity) -> Result<Allocation> {
    problem.network().require_linear()?;
    let pass = lambda
        .complement()
        .ok_or_else(|| Error::bad_parameter(format!("lambda = {lambda} exceeds 1")))?;
    let e = problem.inflows();
    let n = e.len();
    let mut amounts = Vec::with_capacity(n);
    let mut shares = Quantity::zero();
    for (i, inflow) in e.iter().enumerate() {
        let own = if i + 1 < n {
            lambda * inflow
        } else {
            inflow.clone()
        };
        amounts.push(&own + &(&pass * &shares));
        if i + 1 < n {
            shares += inflow / &Quantity::integer((n - 1 - i) as u64);
        }
    }
    Ok(Allocation::new(amounts))
}

/// The additive-form parameters `δ(β_k)` under which the β-family member with
/// pivot `k` coincides with [`additive_delta`]: 1 above `k`, `beta` at `k`,
/// `1/(n-i+1)` below it, 1 at the sink.
pub fn beta_delta_vector(n: usize, k: AgentId, beta: &Quantity) -> Result<Vec<Quantity>> {
    if k.get() >= n || beta >= &Quantity::one() {
        return Err(Error::bad_parameter(format!(
            "beta pivot {k} with beta = {beta} is out of range for n = {n}"
        )));
    }
    Ok((1..=n)
        .map(|i| {
            if i < k.get() || i == n {
                Quantity::one()
            } else if i == k.get() {
                beta.clone()
            } else {
                Quantity::frac(1, (n - i + 1) as u64)
            }
        })
        .collect())
}
