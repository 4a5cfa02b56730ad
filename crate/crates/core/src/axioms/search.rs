use super::checks::{
    check_downstream_impartiality, check_equal_sources, check_neutrality, check_pii,
    check_scale_invariance, check_upstream_invariance,
};
use super::{AxiomId, CheckOutcome, Mismatch, ProblemSampler, Witness};
use crate::error::{Error, Result};
use crate::problem::{source_of, Problem};
use crate::quantity::Quantity;
use crate::rules::{evaluate, recover_alpha, Rule, RuleSpec};

/// Draws one instance for `axiom` from `sampler` and checks it.
///
/// Instances are shaped so the axiom's hypothesis usually applies: the second
/// problem of an equal-sources pair gets its source inflow aligned with the
/// first, and downstream-impartiality draws force one tied downstream pair.
pub fn draw_and_check<R: Rule + ?Sized>(
    rule: &R,
    axiom: AxiomId,
    sampler: &mut ProblemSampler,
) -> Result<CheckOutcome> {
    let n = sampler.size(|n| rule.accepts_size(n))?;
    match axiom {
        AxiomId::ScaleInvariance => {
            let problem = sampler.problem(n)?;
            let factor = sampler.quantity();
            check_scale_invariance(rule, &problem, &factor)
        }
        AxiomId::UpstreamInvariance => {
            let problem = sampler.problem(n)?;
            let agent = sampler.agent(1..=n);
            let value = sampler.quantity();
            check_upstream_invariance(rule, &problem, agent, &value)
        }
        AxiomId::PartialImplementationInvariance => {
            let problem = sampler.problem(n)?;
            let agent = sampler.agent(1..=n);
            check_pii(rule, &problem, agent)
        }
        AxiomId::EqualSources => {
            let problem = sampler.linear_problem(n)?;
            let mut other = sampler.linear_problem(n)?;
            if let (Some(s), Some(t)) = (source_of(&problem)?, source_of(&other)?) {
                other = other.with_inflow(t, problem.inflow(s).clone())?;
            }
            check_equal_sources(rule, &problem, &other)
        }
        AxiomId::Neutrality => {
            let agent = sampler.agent(1..=n - 1);
            let amount = sampler.positive();
            check_neutrality(rule, n, agent, &amount)
        }
        AxiomId::DownstreamImpartiality => {
            let problem = sampler.linear_problem(n)?;
            let agent = sampler.agent(1..=n - 2);
            let k = sampler.agent(agent.get() + 1..=n - 1);
            let l = sampler.agent(k.get() + 1..=n);
            let tied = problem.with_inflow(l, problem.inflow(k).clone())?;
            let delta = sampler.positive();
            check_downstream_impartiality(rule, &tied, agent, &delta)
        }
    }
}

/// Summary of a seeded counterexample search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub axiom: AxiomId,
    pub seed: u64,
    /// Instances drawn, including the one that produced the witness.
    pub drawn: usize,
    pub passed: usize,
    pub skipped: usize,
    /// First violation found, if any.
    pub witness: Option<Witness>,
}

/// Draws up to `budget` instances and stops at the first violation.
pub fn search_counterexamples<R: Rule + ?Sized>(
    rule: &R,
    axiom: AxiomId,
    sampler: &mut ProblemSampler,
    budget: usize,
) -> Result<SearchReport> {
    if budget == 0 {
        return Err(Error::bad_parameter("search budget must be positive"));
    }
    let mut report = SearchReport {
        axiom,
        seed: sampler.seed(),
        drawn: 0,
        passed: 0,
        skipped: 0,
        witness: None,
    };
    while report.drawn < budget {
        report.drawn += 1;
        match draw_and_check(rule, axiom, sampler)? {
            CheckOutcome::Pass => report.passed += 1,
            CheckOutcome::Skipped(_) => report.skipped += 1,
            CheckOutcome::Violated(witness) => {
                report.witness = Some(*witness);
                break;
            }
        }
    }
    Ok(report)
}

/// A problem on which a rule departs from the geometric rule built from its
/// own recovered parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipWitness {
    pub problem: Problem,
    pub alpha: Vec<Quantity>,
    /// `lhs` is the geometric rule's amount, `rhs` the tested rule's.
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(Vec<Quantity>),
    NonMember(MembershipWitness),
}

/// Empirical test of whether `rule` is a multi-parameter geometric rule on
/// lines of `n` agents: recover its candidate retention vector from
/// unit-support profiles, then compare against that geometric rule on
/// `budget` sampled problems.
pub fn characterize_geometric<R: Rule + ?Sized>(
    rule: &R,
    n: usize,
    sampler: &mut ProblemSampler,
    budget: usize,
) -> Result<Membership> {
    let alpha = recover_alpha(rule, n)?;
    let candidate = RuleSpec::MultiGeometric(alpha.clone());
    candidate.validate()?;
    for _ in 0..budget {
        let problem = sampler.linear_problem(n)?;
        let expected = evaluate(&candidate, &problem)?;
        let actual = rule.allocate(&problem)?;
        let mismatches: Vec<Mismatch> = problem
            .network()
            .agents()
            .filter(|&a| expected[a] != actual[a])
            .map(|a| Mismatch::new(a, &expected[a], &actual[a]))
            .collect();
        if !mismatches.is_empty() {
            return Ok(Membership::NonMember(MembershipWitness {
                problem,
                alpha,
                mismatches,
            }));
        }
    }
    Ok(Membership::Member(alpha))
}
