use crate::problem::{Allocation, Problem};
use crate::quantity::Quantity;

/// Splits every agent's inflow equally over its downstream path, itself
/// included. On a line this is `Σ_{j≤i} e_j / (n-j+1)`.
pub fn serial(problem: &Problem) -> Allocation {
    let network = problem.network();
    let mut amounts = vec![Quantity::zero(); network.n()];
    for agent in network.agents() {
        let inflow = problem.inflow(agent);
        if inflow.is_zero() {
            continue;
        }
        let path = network
            .downstream_path(agent)
            .expect("agents of a valid network");
        let share = inflow / &Quantity::integer(path.len() as u64);
        for member in path {
            amounts[member.index()] += &share;
        }
    }
    Allocation::new(amounts)
}
