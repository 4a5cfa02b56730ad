use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{AgentId, RiverNetwork};
use crate::problem::Problem;
use crate::quantity::Quantity;

/// Largest whole part of a drawn amount.
const MAX_WHOLE: u64 = 20;

/// Seeded stream of random problems and perturbation parameters.
///
/// Amounts are rationals `p/q` with `q ≤ denominator_bound` and values up to
/// 20; inflows are zero with probability `zero_probability`. The same seed
/// and configuration always produce the same sequence.
#[derive(Debug, Clone)]
pub struct ProblemSampler {
    seed: u64,
    n_range: RangeInclusive<usize>,
    denominator_bound: u64,
    zero_probability: (u32, u32),
    trees: bool,
    rng: ChaCha8Rng,
}

impl ProblemSampler {
    pub fn new(seed: u64) -> Self {
        ProblemSampler {
            seed,
            n_range: 3..=8,
            denominator_bound: 12,
            zero_probability: (1, 4),
            trees: false,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn with_n_range(mut self, range: RangeInclusive<usize>) -> Self {
        self.n_range = range;
        self
    }

    pub fn with_denominator_bound(mut self, bound: u64) -> Self {
        assert!(bound >= 1, "denominator bound must be positive");
        self.denominator_bound = bound;
        self
    }

    /// Probability `numer/denom` that a drawn inflow is exactly zero.
    pub fn with_zero_probability(mut self, numer: u32, denom: u32) -> Self {
        assert!(
            denom > 0 && numer <= denom,
            "zero probability must lie in [0, 1]"
        );
        self.zero_probability = (numer, denom);
        self
    }

    /// Let [`ProblemSampler::problem`] draw random in-trees half of the time.
    pub fn with_trees(mut self, trees: bool) -> Self {
        self.trees = trees;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_range(&self) -> RangeInclusive<usize> {
        self.n_range.clone()
    }

    /// Uniform size in the configured range among those `accepts` allows.
    pub fn size(&mut self, accepts: impl Fn(usize) -> bool) -> Result<usize> {
        let candidates: Vec<usize> = self.n_range.clone().filter(|&n| accepts(n)).collect();
        candidates.choose(&mut self.rng).copied().ok_or_else(|| {
            Error::bad_parameter(format!(
                "rule accepts no network size in {:?}",
                self.n_range
            ))
        })
    }

    fn fraction(&mut self, max_numer: impl Fn(u64) -> u64, min_numer: u64) -> Quantity {
        let denom = self.rng.gen_range(1..=self.denominator_bound);
        let numer = self.rng.gen_range(min_numer..=max_numer(denom));
        Quantity::frac(numer, denom)
    }

    /// Nonnegative amount, zero with the configured probability.
    pub fn quantity(&mut self) -> Quantity {
        let (numer, denom) = self.zero_probability;
        if self.rng.gen_range(0..denom) < numer {
            Quantity::zero()
        } else {
            self.positive()
        }
    }

    /// Strictly positive amount.
    pub fn positive(&mut self) -> Quantity {
        self.fraction(|d| MAX_WHOLE * d, 1)
    }

    /// Share in `[0, 1]`.
    pub fn share(&mut self) -> Quantity {
        self.fraction(|d| d, 0)
    }

    /// Share in `[0, 1)`.
    pub fn share_below_one(&mut self) -> Quantity {
        let denom = self.rng.gen_range(1..=self.denominator_bound);
        Quantity::frac(self.rng.gen_range(0..denom), denom)
    }

    /// Uniform agent in `range` (1-based, inclusive).
    pub fn agent(&mut self, range: RangeInclusive<usize>) -> AgentId {
        AgentId::new(self.rng.gen_range(range))
    }

    /// Uniform index in `0..len`.
    pub fn index(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len)
    }

    pub fn inflows(&mut self, n: usize) -> Vec<Quantity> {
        (0..n).map(|_| self.quantity()).collect()
    }

    /// Same as [`ProblemSampler::inflows`] but every entry positive.
    pub fn positive_inflows(&mut self, n: usize) -> Vec<Quantity> {
        (0..n).map(|_| self.positive()).collect()
    }

    /// Retention vector: random shares for agents `1..n-1`, 1 for the sink.
    pub fn retention_vector(&mut self, n: usize) -> Vec<Quantity> {
        let mut alpha: Vec<Quantity> = (1..n).map(|_| self.share()).collect();
        alpha.push(Quantity::one());
        alpha
    }

    /// Random in-tree on `n` agents whose sink is `n`: each agent `i < n`
    /// flows into a uniformly drawn agent `j > i`.
    pub fn tree_network(&mut self, n: usize) -> Result<RiverNetwork> {
        let successors = (1..=n)
            .map(|i| (i < n).then(|| self.agent(i + 1..=n)))
            .collect();
        RiverNetwork::new(successors)
    }

    pub fn linear_problem(&mut self, n: usize) -> Result<Problem> {
        let inflows = self.inflows(n);
        Problem::linear(inflows)
    }

    /// Linear problem, or a random tree half of the time when trees are enabled.
    pub fn problem(&mut self, n: usize) -> Result<Problem> {
        if self.trees && self.rng.gen_bool(0.5) {
            let network = self.tree_network(n)?;
            let inflows = self.inflows(n);
            Problem::new(network, inflows)
        } else {
            self.linear_problem(n)
        }
    }
}
