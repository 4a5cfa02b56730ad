//! Axiom checks on explicit instances, seeded counterexample search and
//! empirical membership tests for the geometric family.
//!
//! Every check compares rule outputs with exact equality. A failing check
//! returns a [`Witness`] holding the instance, the perturbation that was
//! applied, and every agent at which the two sides differ;
//! [`Witness::recheck`] replays it against a rule.

mod checks;
mod sampler;
mod search;

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

pub use checks::{
    check_downstream_impartiality, check_equal_sources, check_neutrality, check_pii,
    check_scale_invariance, check_upstream_invariance, residual_problem,
};
pub use sampler::ProblemSampler;
pub use search::{
    characterize_geometric, draw_and_check, search_counterexamples, Membership, MembershipWitness,
    SearchReport,
};

use crate::error::{Error, Result};
use crate::network::AgentId;
use crate::problem::Problem;
use crate::quantity::Quantity;
use crate::rules::Rule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    ScaleInvariance,
    UpstreamInvariance,
    EqualSources,
    Neutrality,
    PartialImplementationInvariance,
    DownstreamImpartiality,
}

impl AxiomId {
    pub const ALL: [AxiomId; 6] = [
        AxiomId::ScaleInvariance,
        AxiomId::UpstreamInvariance,
        AxiomId::EqualSources,
        AxiomId::Neutrality,
        AxiomId::PartialImplementationInvariance,
        AxiomId::DownstreamImpartiality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::ScaleInvariance => "scale-invariance",
            AxiomId::UpstreamInvariance => "upstream-invariance",
            AxiomId::EqualSources => "equal-sources",
            AxiomId::Neutrality => "neutrality",
            AxiomId::PartialImplementationInvariance => "partial-implementation-invariance",
            AxiomId::DownstreamImpartiality => "downstream-impartiality",
        }
    }

    /// Axioms stated only for linear rivers.
    pub fn linear_only(self) -> bool {
        matches!(
            self,
            AxiomId::EqualSources | AxiomId::Neutrality | AxiomId::DownstreamImpartiality
        )
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let id = match text.trim().to_ascii_lowercase().as_str() {
            "scale-invariance" | "si" => AxiomId::ScaleInvariance,
            "upstream-invariance" | "ui" => AxiomId::UpstreamInvariance,
            "equal-sources" | "es" => AxiomId::EqualSources,
            "neutrality" | "n" => AxiomId::Neutrality,
            "partial-implementation-invariance" | "pii" => AxiomId::PartialImplementationInvariance,
            "downstream-impartiality" | "di" => AxiomId::DownstreamImpartiality,
            other => return Err(Error::parse("axiom", format!("unknown axiom {other:?}"))),
        };
        Ok(id)
    }
}

/// The concrete instance an axiom check was run on, beyond the base problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Perturbation {
    /// All inflows multiplied by `factor`.
    Scale { factor: Quantity },
    /// One inflow replaced by `value`.
    Replace { agent: AgentId, value: Quantity },
    /// Compared against a second problem.
    Compare { other: Problem },
    /// Single positive inflow `amount` at `agent`, zero elsewhere.
    UnitSupport { agent: AgentId, amount: Quantity },
    /// Upstream of `agent` implemented and removed.
    Residual { agent: AgentId },
    /// One inflow raised by `delta`.
    Increase { agent: AgentId, delta: Quantity },
}

/// One point of disagreement. Values are signed because downstream
/// impartiality compares allocation changes, which may be negative for an
/// arbitrary rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub agent: AgentId,
    /// The second agent of a compared pair, for checks that compare agents.
    pub paired_with: Option<AgentId>,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl Mismatch {
    pub(crate) fn new(agent: AgentId, lhs: &Quantity, rhs: &Quantity) -> Self {
        Mismatch {
            agent,
            paired_with: None,
            lhs: lhs.as_ratio().clone(),
            rhs: rhs.as_ratio().clone(),
        }
    }
}

/// A concrete axiom violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub axiom: AxiomId,
    /// The base problem.
    pub problem: Problem,
    pub perturbation: Perturbation,
    pub mismatches: Vec<Mismatch>,
}

impl Witness {
    /// Re-runs the check this witness came from and confirms that `rule`
    /// reproduces exactly the same mismatches.
    pub fn recheck<R: Rule + ?Sized>(&self, rule: &R) -> Result<bool> {
        let outcome = match (&self.axiom, &self.perturbation) {
            (AxiomId::ScaleInvariance, Perturbation::Scale { factor }) => {
                check_scale_invariance(rule, &self.problem, factor)?
            }
            (AxiomId::UpstreamInvariance, Perturbation::Replace { agent, value }) => {
                check_upstream_invariance(rule, &self.problem, *agent, value)?
            }
            (AxiomId::EqualSources, Perturbation::Compare { other }) => {
                check_equal_sources(rule, &self.problem, other)?
            }
            (AxiomId::Neutrality, Perturbation::UnitSupport { agent, amount }) => {
                check_neutrality(rule, self.problem.n(), *agent, amount)?
            }
            (AxiomId::PartialImplementationInvariance, Perturbation::Residual { agent }) => {
                check_pii(rule, &self.problem, *agent)?
            }
            (AxiomId::DownstreamImpartiality, Perturbation::Increase { agent, delta }) => {
                check_downstream_impartiality(rule, &self.problem, *agent, delta)?
            }
            _ => return Ok(false),
        };
        Ok(matches!(outcome, CheckOutcome::Violated(w) if w.mismatches == self.mismatches))
    }

    /// The problem the base problem is compared against, when there is one.
    pub fn derived_problem(&self) -> Result<Option<Problem>> {
        Ok(match &self.perturbation {
            Perturbation::Scale { factor } => Some(self.problem.scaled(factor)),
            Perturbation::Replace { agent, value } => {
                Some(self.problem.with_inflow(*agent, value.clone())?)
            }
            Perturbation::Compare { other } => Some(other.clone()),
            Perturbation::UnitSupport { .. } => None,
            Perturbation::Residual { .. } => None,
            Perturbation::Increase { agent, delta } => {
                let raised = self.problem.inflow(*agent) + delta;
                Some(self.problem.with_inflow(*agent, raised)?)
            }
        })
    }
}

fn fmt_inflows(problem: &Problem) -> String {
    let parts: Vec<String> = problem.inflows().iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated on e = {}",
            self.axiom,
            fmt_inflows(&self.problem)
        )?;
        match &self.perturbation {
            Perturbation::Scale { factor } => write!(f, " scaled by {factor}")?,
            Perturbation::Replace { agent, value } => {
                write!(f, " with e_{agent} replaced by {value}")?
            }
            Perturbation::Compare { other } => write!(f, " against e' = {}", fmt_inflows(other))?,
            Perturbation::UnitSupport { agent, amount } => {
                write!(f, " (inflow {amount} at agent {agent} only)")?
            }
            Perturbation::Residual { agent } => {
                write!(f, " after implementing upstream of agent {agent}")?
            }
            Perturbation::Increase { agent, delta } => {
                write!(f, " with e_{agent} raised by {delta}")?
            }
        }
        for m in &self.mismatches {
            match m.paired_with {
                Some(other) => write!(
                    f,
                    "; agents {} and {}: {} vs {}",
                    m.agent, other, m.lhs, m.rhs
                )?,
                None => write!(f, "; agent {}: {} vs {}", m.agent, m.lhs, m.rhs)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    /// The axiom's hypothesis does not apply to this instance.
    Skipped(String),
    Violated(Box<Witness>),
}

impl CheckOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            CheckOutcome::Violated(w) => Some(w),
            _ => None,
        }
    }
}
