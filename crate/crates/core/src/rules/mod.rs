//! Allocation rules.
//!
//! [`RuleSpec`] enumerates every rule family the engine knows, and the
//! [`Rule`] trait is the evaluation interface the axiom checkers work against,
//! so that arbitrary evaluators ([`BlackBoxRule`]) can be tested the same way.

mod additive;
mod geometric;
mod serial;

use std::fmt;
use std::str::FromStr;

pub use additive::{additive_delta, beta_delta_vector, lambda_rule};
pub use geometric::{
    beta_alpha_vector, geometric_closed_form, geometric_recursive, recover_alpha,
    serial_alpha_vector,
};
pub use serial::serial;

use crate::error::{Error, Result};
use crate::network::AgentId;
use crate::problem::{Allocation, Problem};
use crate::quantity::Quantity;

/// Something that maps problems to allocations.
pub trait Rule {
    fn allocate(&self, problem: &Problem) -> Result<Allocation>;

    /// Whether the rule is defined for networks of `n` agents. Families with
    /// a parameter vector only accept the vector's length.
    fn accepts_size(&self, _n: usize) -> bool {
        true
    }
}

impl<R: Rule + ?Sized> Rule for &R {
    fn allocate(&self, problem: &Problem) -> Result<Allocation> {
        (**self).allocate(problem)
    }

    fn accepts_size(&self, n: usize) -> bool {
        (**self).accepts_size(n)
    }
}

/// Adapter turning a closure into a [`Rule`]. The closure must be deterministic.
pub struct BlackBoxRule<F> {
    evaluator: F,
    size: Option<usize>,
}

impl<F> BlackBoxRule<F>
where
    F: Fn(&Problem) -> Result<Allocation>,
{
    pub fn new(evaluator: F) -> Self {
        BlackBoxRule {
            evaluator,
            size: None,
        }
    }

    /// Restrict the rule to networks of exactly `n` agents.
    pub fn with_size(mut self, n: usize) -> Self {
        self.size = Some(n);
        self
    }
}

impl<F> Rule for BlackBoxRule<F>
where
    F: Fn(&Problem) -> Result<Allocation>,
{
    fn allocate(&self, problem: &Problem) -> Result<Allocation> {
        (self.evaluator)(problem)
    }

    fn accepts_size(&self, n: usize) -> bool {
        self.size.map_or(true, |size| size == n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleSpec {
    NoTransfer,
    FullTransfer,
    /// Every non-sink agent retains the same share of its disposable inflow.
    Geometric(Quantity),
    /// Agent-specific retention shares; the sink's entry is 1.
    MultiGeometric(Vec<Quantity>),
    Serial,
    /// No-transfer above pivot `k`, retention `beta` at `k`, serial-type
    /// retention below. Lines only.
    Beta {
        k: AgentId,
        beta: Quantity,
    },
    /// Additive downstream sharing; the last entry is 1. Lines only.
    AdditiveDelta(Vec<Quantity>),
    /// Convex mix of no-transfer and equal downstream sharing. Lines only.
    Lambda(Quantity),
}

fn check_share(name: &str, value: &Quantity) -> Result<()> {
    if value > &Quantity::one() {
        return Err(Error::bad_parameter(format!(
            "{name} = {value} is outside [0, 1]"
        )));
    }
    Ok(())
}

fn check_share_vector(name: &str, values: &[Quantity]) -> Result<()> {
    let Some((last, interior)) = values.split_last() else {
        return Err(Error::bad_parameter(format!("{name} vector is empty")));
    };
    for (i, v) in interior.iter().enumerate() {
        check_share(&format!("{name}_{}", i + 1), v)?;
    }
    if !last.is_one() {
        return Err(Error::bad_parameter(format!(
            "last entry of {name} must be 1, got {last}"
        )));
    }
    Ok(())
}

fn check_len(name: &str, values: &[Quantity], n: usize) -> Result<()> {
    if values.len() != n {
        return Err(Error::bad_parameter(format!(
            "{name} has {} entries but the network has {n} agents",
            values.len()
        )));
    }
    Ok(())
}

impl RuleSpec {
    /// Checks parameter ranges that do not depend on the network.
    pub fn validate(&self) -> Result<()> {
        match self {
            RuleSpec::NoTransfer | RuleSpec::FullTransfer | RuleSpec::Serial => Ok(()),
            RuleSpec::Geometric(gamma) => check_share("gamma", gamma),
            RuleSpec::Lambda(lambda) => check_share("lambda", lambda),
            RuleSpec::MultiGeometric(alpha) => check_share_vector("alpha", alpha),
            RuleSpec::AdditiveDelta(delta) => check_share_vector("delta", delta),
            RuleSpec::Beta { beta, .. } => {
                if beta >= &Quantity::one() {
                    return Err(Error::bad_parameter(format!(
                        "beta = {beta} must lie in [0, 1)"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Short column label, e.g. `FT`, `γ=1/4`, `S`.
    pub fn label(&self) -> String {
        fn list(values: &[Quantity]) -> String {
            values
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
        match self {
            RuleSpec::NoTransfer => "NT".into(),
            RuleSpec::FullTransfer => "FT".into(),
            RuleSpec::Geometric(g) => format!("γ={g}"),
            RuleSpec::MultiGeometric(a) => format!("α=({})", list(a)),
            RuleSpec::Serial => "S".into(),
            RuleSpec::Beta { k, beta } => format!("β{k}={beta}"),
            RuleSpec::AdditiveDelta(d) => format!("δ=({})", list(d)),
            RuleSpec::Lambda(l) => format!("λ={l}"),
        }
    }
}

/// Evaluates `spec` on `problem`.
pub fn evaluate(spec: &RuleSpec, problem: &Problem) -> Result<Allocation> {
    spec.validate()?;
    let n = problem.n();
    let network = problem.network();
    match spec {
        RuleSpec::NoTransfer => Ok(Allocation::new(problem.inflows().to_vec())),
        RuleSpec::FullTransfer => {
            let mut amounts = vec![Quantity::zero(); n];
            amounts[network.sink().index()] = problem.total_inflow();
            Ok(Allocation::new(amounts))
        }
        RuleSpec::Geometric(gamma) => {
            let retain = network
                .agents()
                .map(|a| {
                    if a == network.sink() {
                        Quantity::one()
                    } else {
                        gamma.clone()
                    }
                })
                .collect::<Vec<_>>();
            geometric_recursive(problem, &retain)
        }
        RuleSpec::MultiGeometric(alpha) => {
            check_len("alpha", alpha, n)?;
            geometric_recursive(problem, alpha)
        }
        RuleSpec::Serial => Ok(serial(problem)),
        RuleSpec::Beta { k, beta } => {
            network.require_linear()?;
            let alpha = beta_alpha_vector(n, *k, beta)?;
            geometric_recursive(problem, &alpha)
        }
        RuleSpec::AdditiveDelta(delta) => additive_delta(problem, delta),
        RuleSpec::Lambda(lambda) => lambda_rule(problem, lambda),
    }
}

impl Rule for RuleSpec {
    fn allocate(&self, problem: &Problem) -> Result<Allocation> {
        evaluate(self, problem)
    }

    fn accepts_size(&self, n: usize) -> bool {
        match self {
            RuleSpec::MultiGeometric(v) | RuleSpec::AdditiveDelta(v) => v.len() == n,
            RuleSpec::Beta { k, .. } => k.get() < n,
            _ => true,
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<Quantity>> {
    text.split(',').map(str::parse).collect()
}

impl FromStr for RuleSpec {
    type Err = Error;

    /// Grammar: `no-transfer`, `full-transfer`, `geometric:<q>`,
    /// `multi:<q,...,q>`, `serial`, `beta:<k>:<q>`, `delta:<q,...,q>`,
    /// `lambda:<q>`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (family, args) = text.split_once(':').unwrap_or((text, ""));
        let missing = || Error::parse("rule", format!("{family} needs an argument"));
        let spec = match family {
            "no-transfer" | "nt" => RuleSpec::NoTransfer,
            "full-transfer" | "ft" => RuleSpec::FullTransfer,
            "serial" | "s" => RuleSpec::Serial,
            "geometric" if !args.is_empty() => RuleSpec::Geometric(args.parse()?),
            "lambda" if !args.is_empty() => RuleSpec::Lambda(args.parse()?),
            "multi" if !args.is_empty() => RuleSpec::MultiGeometric(parse_list(args)?),
            "delta" if !args.is_empty() => RuleSpec::AdditiveDelta(parse_list(args)?),
            "beta" => {
                let (k, beta) = args.split_once(':').ok_or_else(missing)?;
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse("rule", format!("bad pivot agent {k:?}")))?;
                if k == 0 {
                    return Err(Error::bad_parameter("beta pivot must be at least 1"));
                }
                RuleSpec::Beta {
                    k: AgentId::new(k),
                    beta: beta.parse()?,
                }
            }
            "geometric" | "lambda" | "multi" | "delta" => return Err(missing()),
            other => {
                return Err(Error::parse(
                    "rule",
                    format!("unknown rule family {other:?}"),
                ))
            }
        };
        if matches!(
            family,
            "no-transfer" | "nt" | "full-transfer" | "ft" | "serial" | "s"
        ) && !args.is_empty()
        {
            return Err(Error::parse("rule", format!("{family} takes no argument")));
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for RuleSpec {
    /// Writes the command-line grammar accepted by [`FromStr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(values: &[Quantity]) -> String {
            values
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
        match self {
            RuleSpec::NoTransfer => write!(f, "no-transfer"),
            RuleSpec::FullTransfer => write!(f, "full-transfer"),
            RuleSpec::Geometric(g) => write!(f, "geometric:{g}"),
            RuleSpec::MultiGeometric(a) => write!(f, "multi:{}", list(a)),
            RuleSpec::Serial => write!(f, "serial"),
            RuleSpec::Beta { k, beta } => write!(f, "beta:{k}:{beta}"),
            RuleSpec::AdditiveDelta(d) => write!(f, "delta:{}", list(d)),
            RuleSpec::Lambda(l) => write!(f, "lambda:{l}"),
        }
    }
}
