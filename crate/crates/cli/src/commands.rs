use std::fs;

use riparian_core::axioms::{
    characterize_geometric, check_downstream_impartiality, check_equal_sources, check_neutrality,
    check_pii, check_scale_invariance, check_upstream_invariance, search_counterexamples, AxiomId,
    CheckOutcome, ProblemSampler,
};
use riparian_core::data::{
    emit_problem, emit_table, nile_dataset, parse_observed, parse_problem, BasinDataset, Column,
    DocumentFormat,
};
use riparian_core::rationalize::{fit_gamma, rationalize_alpha, scale_withdrawals};
use riparian_core::reproduction::{reproduce_example, reproduce_nile};
use riparian_core::{evaluate, source_of, AgentId, Allocation, Problem, Quantity, RuleSpec};

use crate::report::{self, AxiomResult};
use crate::{CliError, Command, Format};

pub(crate) enum Failure {
    /// `--fail-on-witness` tripped; the document is still printed.
    Witness(String),
    Error(CliError),
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.into())
    }
}

pub(crate) fn execute(command: Command) -> Result<String, Failure> {
    match command {
        Command::Allocate {
            rule,
            problem,
            output,
        } => {
            let dataset = load_problem(&problem)?;
            let p = dataset.problem();
            let columns = [
                Column::new("e", p.inflows().to_vec()),
                Column::new(rule.label(), evaluate(&rule, &p)?.into_amounts()),
            ];
            Ok(emit_table(
                &dataset.network,
                &columns,
                output.format.into(),
                output.decimals,
            )?)
        }
        Command::Compare {
            rule,
            problem,
            observed,
            output,
        } => {
            let dataset = load_problem(&problem)?;
            let p = dataset.problem();
            let rules = if rule.is_empty() {
                default_rules()
            } else {
                rule
            };
            let mut columns = vec![Column::new("e", p.inflows().to_vec())];
            if let Some(observed) = observed {
                let z = load_observed(&observed, &dataset)?;
                columns.push(Column::new("z", z.into_amounts()));
            }
            for rule in &rules {
                columns.push(Column::new(
                    rule.label(),
                    evaluate(rule, &p)?.into_amounts(),
                ));
            }
            Ok(emit_table(
                &dataset.network,
                &columns,
                output.format.into(),
                output.decimals,
            )?)
        }
        Command::Rationalize {
            problem,
            observed,
            output,
        } => {
            let dataset = load_problem(&problem)?;
            let p = dataset.problem();
            let z = load_observed(&observed, &dataset)?;
            let result = rationalize_alpha(&p, &z)?;
            let fit = fit_gamma(&p, &z)?;
            Ok(report::rationalization(
                &dataset,
                &z,
                &result,
                &fit,
                output.format,
                output.decimals,
            ))
        }
        Command::AxiomsCheck {
            rule,
            problem,
            axiom,
            fail_on_witness,
            output,
        } => {
            let dataset = load_problem(&problem)?;
            let p = dataset.problem();
            let results = axioms(axiom)
                .into_iter()
                .map(|a| Ok(AxiomResult::new(a, check_instance(&rule, &p, a)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let violated = results.iter().any(AxiomResult::is_violated);
            let document = report::axiom_checks(&rule, &results, output.format);
            finish(document, violated && fail_on_witness)
        }
        Command::AxiomsSearch {
            rule,
            axiom,
            seed,
            budget,
            n,
            fail_on_witness,
            output,
        } => {
            if budget == 0 {
                return Err(CliError::Usage("--budget must be positive".into()).into());
            }
            let mut reports = Vec::new();
            for axiom in axioms(axiom) {
                let mut sampler = ProblemSampler::new(seed);
                if let Some(n) = n {
                    sampler = sampler.with_n_range(n..=n);
                }
                reports.push(search_counterexamples(&rule, axiom, &mut sampler, budget)?);
            }
            let found = reports.iter().any(|r| r.witness.is_some());
            let document = report::searches(&rule, &reports, output.format);
            finish(document, found && fail_on_witness)
        }
        Command::Characterize {
            rule,
            n,
            seed,
            budget,
            output,
        } => {
            let n = n.unwrap_or_else(|| default_size(&rule));
            let mut sampler = ProblemSampler::new(seed);
            let membership = characterize_geometric(&rule, n, &mut sampler, budget)?;
            Ok(report::characterization(
                &rule,
                n,
                budget,
                &membership,
                output.format,
            ))
        }
        Command::ReproduceNile { output } => {
            let nile = reproduce_nile()?;
            let example = reproduce_example()?;
            Ok(report::reproduction(
                &nile,
                &example,
                output.format,
                output.decimals,
            ))
        }
        Command::Generate { n, seed, format } => {
            let mut sampler = ProblemSampler::new(seed);
            let n = match n {
                Some(n) => n,
                None => sampler.size(|_| true)?,
            };
            let problem = sampler.linear_problem(n)?;
            let dataset = BasinDataset {
                ids: (1..=n).map(|i| i.to_string()).collect(),
                network: problem.network().clone(),
                inflows: problem.inflows().to_vec(),
                raw_withdrawals: None,
                provenance: vec![format!("random linear problem, n = {n}, seed = {seed}")],
            };
            let format = match format {
                Format::Json => DocumentFormat::Json,
                Format::Text | Format::Csv => DocumentFormat::Csv,
            };
            Ok(emit_problem(&dataset, format))
        }
    }
}

fn finish(document: String, fail: bool) -> Result<String, Failure> {
    if fail {
        Err(Failure::Witness(document))
    } else {
        Ok(document)
    }
}

fn default_rules() -> Vec<RuleSpec> {
    vec![
        RuleSpec::FullTransfer,
        RuleSpec::Geometric(Quantity::frac(1, 4)),
        RuleSpec::Geometric(Quantity::frac(1, 2)),
        RuleSpec::Geometric(Quantity::frac(3, 4)),
        RuleSpec::NoTransfer,
        RuleSpec::Serial,
    ]
}

fn default_size(rule: &RuleSpec) -> usize {
    match rule {
        RuleSpec::MultiGeometric(v) | RuleSpec::AdditiveDelta(v) => v.len(),
        RuleSpec::Beta { k, .. } => (k.get() + 1).max(5),
        _ => 5,
    }
}

fn axioms(selected: Option<AxiomId>) -> Vec<AxiomId> {
    selected.map_or_else(|| AxiomId::ALL.to_vec(), |a| vec![a])
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

fn load_problem(arg: &str) -> Result<BasinDataset, CliError> {
    if arg == "nile" {
        return Ok(nile_dataset());
    }
    Ok(parse_problem(&read(arg)?, DocumentFormat::from_path(arg))?)
}

fn load_observed(arg: &str, dataset: &BasinDataset) -> Result<Allocation, CliError> {
    let raw = || {
        dataset.raw_withdrawals.clone().ok_or_else(|| {
            CliError::Usage(format!(
                "--observed {arg} needs a problem with a withdrawal column"
            ))
        })
    };
    match arg {
        "raw" => Ok(Allocation::new(raw()?)),
        "scaled" => {
            let total = dataset.problem().total_inflow();
            Ok(Allocation::new(scale_withdrawals(&raw()?, &total)?))
        }
        path => Ok(parse_observed(
            &read(path)?,
            DocumentFormat::from_path(path),
            dataset,
        )?),
    }
}

/// Combined outcome over a list of instance checks: the first violation, a
/// pass if anything passed, otherwise the first skip reason.
fn combine(outcomes: Vec<CheckOutcome>) -> (CheckOutcome, usize) {
    let checked = outcomes
        .iter()
        .filter(|o| !matches!(o, CheckOutcome::Skipped(_)))
        .count();
    if let Some(v) = outcomes.iter().find(|o| o.witness().is_some()) {
        return (v.clone(), checked);
    }
    if checked > 0 {
        return (CheckOutcome::Pass, checked);
    }
    let reason = outcomes.into_iter().find_map(|o| match o {
        CheckOutcome::Skipped(r) => Some(r),
        _ => None,
    });
    (
        CheckOutcome::Skipped(reason.unwrap_or_else(|| "no instance".into())),
        0,
    )
}

/// Deterministic perturbations of `p` for one axiom.
fn check_instance(
    rule: &RuleSpec,
    p: &Problem,
    axiom: AxiomId,
) -> Result<Option<(CheckOutcome, usize)>, CliError> {
    if axiom.linear_only() && !p.network().is_linear() {
        return Ok(None);
    }
    let n = p.n();
    let agents: Vec<AgentId> = p.network().agents().collect();
    let one = Quantity::one();
    let mut outcomes = Vec::new();
    match axiom {
        AxiomId::ScaleInvariance => {
            for factor in [Quantity::integer(2), Quantity::frac(1, 3)] {
                outcomes.push(check_scale_invariance(rule, p, &factor)?);
            }
        }
        AxiomId::UpstreamInvariance => {
            for &a in &agents {
                outcomes.push(check_upstream_invariance(rule, p, a, &Quantity::zero())?);
                outcomes.push(check_upstream_invariance(
                    rule,
                    p,
                    a,
                    &(p.inflow(a) + &one),
                )?);
            }
        }
        AxiomId::EqualSources => match source_of(p)? {
            Some(s) => {
                let raised = agents
                    .iter()
                    .map(|&a| {
                        if a == s {
                            p.inflow(a).clone()
                        } else {
                            p.inflow(a) + &one
                        }
                    })
                    .collect();
                let other = p.with_inflows(raised)?;
                outcomes.push(check_equal_sources(rule, p, &other)?);
            }
            None => outcomes.push(CheckOutcome::Skipped(
                "no agent above the sink has inflow".into(),
            )),
        },
        AxiomId::Neutrality => {
            let total = p.total_inflow();
            let amount = if total.is_positive() { total } else { one };
            for &a in &agents[..n - 1] {
                outcomes.push(check_neutrality(rule, n, a, &amount)?);
            }
        }
        AxiomId::PartialImplementationInvariance => {
            for &a in &agents {
                outcomes.push(check_pii(rule, p, a)?);
            }
        }
        AxiomId::DownstreamImpartiality => {
            for &a in &agents[..n.saturating_sub(2)] {
                outcomes.push(check_downstream_impartiality(rule, p, a, &one)?);
            }
        }
    }
    Ok(Some(combine(outcomes)))
}
