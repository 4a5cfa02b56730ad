use crate::network::AgentId;
use crate::quantity::Quantity;

/// Everything that can go wrong inside the engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("a river network needs at least 3 agents, got {0}")]
    TooFewAgents(usize),
    #[error("network has {0} agents without a successor; exactly one sink is required")]
    MultipleSinks(usize),
    #[error("successor relation contains a cycle through agent {0}")]
    Cycle(AgentId),
    #[error("agent {agent} points to successor {successor}, which is not part of the network")]
    Disconnected { agent: AgentId, successor: AgentId },
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("operation requires a linear network")]
    NotLinear,
    #[error("vector has length {actual}, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("allocation infeasible at agent {agent}: upstream allocation {lhs} exceeds upstream inflow {rhs}")]
    FeasibilityViolation {
        agent: AgentId,
        lhs: Box<Quantity>,
        rhs: Box<Quantity>,
    },
    #[error(
        "allocation is wasteful: total allocated {total_x} differs from total inflow {total_e}"
    )]
    WastefulnessViolation {
        total_x: Box<Quantity>,
        total_e: Box<Quantity>,
    },
    #[error("observed allocation is infeasible: {0}")]
    InfeasibleObservation(Box<Error>),
    #[error("observed allocation cannot be rationalized at agent {agent}: {reason}")]
    NotRationalizable { agent: AgentId, reason: String },
    #[error("cannot rescale a vector whose total is zero")]
    ZeroTotal,
    #[error("table columns are defined over different networks")]
    MixedNetworks,
    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },
    #[error("invalid quantity {0:?}: expected a nonnegative decimal or p/q fraction")]
    InvalidQuantity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(location: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn bad_parameter(reason: impl Into<String>) -> Self {
        Error::BadParameter(reason.into())
    }
}
