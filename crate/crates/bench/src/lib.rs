//! Shared fixtures for the benchmarks.

use riparian_core::axioms::ProblemSampler;
use riparian_core::{evaluate, Allocation, Problem, Quantity, RuleSpec};

/// `count` seeded linear problems of `n` agents with positive inflows.
pub fn line_problems(seed: u64, n: usize, count: usize) -> Vec<Problem> {
    let mut sampler = ProblemSampler::new(seed);
    (0..count)
        .map(|_| Problem::linear(sampler.positive_inflows(n)).expect("n >= 3"))
        .collect()
}

/// `count` seeded random in-trees of `n` agents.
pub fn tree_problems(seed: u64, n: usize, count: usize) -> Vec<Problem> {
    let mut sampler = ProblemSampler::new(seed);
    (0..count)
        .map(|_| {
            let network = sampler.tree_network(n).expect("n >= 3");
            Problem::new(network, sampler.positive_inflows(n)).expect("sizes match")
        })
        .collect()
}

/// A seeded retention vector and the allocation it produces on `problem`.
pub fn geometric_observation(seed: u64, problem: &Problem) -> (Vec<Quantity>, Allocation) {
    let mut sampler = ProblemSampler::new(seed);
    let alpha = sampler.retention_vector(problem.n());
    let observed = evaluate(&RuleSpec::MultiGeometric(alpha.clone()), problem)
        .expect("valid retention vector");
    (alpha, observed)
}
