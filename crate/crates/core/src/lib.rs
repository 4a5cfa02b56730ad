//! Exact allocation rules for sharing river water among riparian agents.
//!
//! Agents sit on an in-tree (a line in the basic model) draining to a single
//! sink. A rule maps each inflow profile to a feasible, non-wasteful
//! allocation. All arithmetic is on nonnegative rationals.

pub mod axioms;
pub mod data;
pub mod error;
pub mod network;
pub mod problem;
pub mod quantity;
pub mod rationalize;
pub mod reproduction;
pub mod rules;

pub use error::{Error, Result};
pub use network::{validate_network, AgentId, RiverNetwork, Topology};
pub use problem::{source_of, validate_allocation, Allocation, Problem};
pub use quantity::{Quantity, Rounding};
pub use rules::{evaluate, BlackBoxRule, Rule, RuleSpec};
