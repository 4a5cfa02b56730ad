//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use riparian_core::axioms::{
    characterize_geometric, check_pii, draw_and_check, search_counterexamples, AxiomId,
    CheckOutcome, Membership, ProblemSampler,
};
use riparian_core::rationalize::{fit_gamma, rationalize_alpha};
use riparian_core::reproduction::{reproduce_example, reproduce_nile, CellStatus};
use riparian_core::rules::{
    beta_delta_vector, geometric_closed_form, geometric_recursive, serial_alpha_vector,
};
use riparian_core::{evaluate, AgentId, Allocation, Problem, Quantity, RuleSpec};

type Outcome = Result<String, String>;

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn q(text: &str) -> Quantity {
    text.parse().expect("literal")
}

fn qs(values: &[&str]) -> Vec<Quantity> {
    values.iter().map(|v| q(v)).collect()
}

fn example_table() -> Outcome {
    let report = reproduce_example().map_err(|e| e.to_string())?;
    let mut cells = 0;
    for (column, valid) in report.columns.iter().zip(&report.printed_valid) {
        for agent in 1..=4 {
            let status = column.status_of(AgentId::new(agent));
            let flagged = column.name == "γ=2/3 e1" && agent == 4;
            if flagged {
                let i = agent - 1;
                ensure(status == CellStatus::Mismatch, || {
                    "typo cell not flagged".into()
                })?;
                ensure(
                    column.derived[i] == q("4") && column.printed[i] == q("2"),
                    || {
                        format!(
                            "flagged cell holds {} vs {}",
                            column.derived[i], column.printed[i]
                        )
                    },
                )?;
                ensure(!valid, || {
                    "printed column with the typo passed validation".into()
                })?;
            } else {
                ensure(status == CellStatus::Match, || {
                    format!("{} agent {agent} differs", column.name)
                })?;
                cells += 1;
            }
        }
    }
    ensure(report.discrepancies().len() == 1, || {
        "extra discrepancies".into()
    })?;
    Ok(format!(
        "{cells} cells equal, R^(2/3)_4(e1) = 4 flagged against printed 2"
    ))
}

fn nile_table() -> Outcome {
    let report = reproduce_nile().map_err(|e| e.to_string())?;
    let mut exact = 0;
    let mut truncated = 0;
    for name in ["FT", "γ=1/4", "γ=1/2", "γ=3/4", "NT"] {
        let column = report
            .column(name)
            .ok_or(format!("missing column {name}"))?;
        for status in &column.status {
            ensure(status.agrees(), || format!("column {name} has a mismatch"))?;
            match status {
                CellStatus::Match => exact += 1,
                _ => truncated += 1,
            }
        }
    }
    for (name, agent, rounded) in [("S", 3usize, "17.53"), ("z", 4, "23.00")] {
        let column = report
            .column(name)
            .ok_or(format!("missing column {name}"))?;
        ensure(
            column.mismatched_agents() == [AgentId::from_index(agent)],
            || {
                format!(
                    "column {name} mismatches at {:?}",
                    column.mismatched_agents()
                )
            },
        )?;
        for (i, status) in column.status.iter().enumerate() {
            if i != agent {
                ensure(status.agrees(), || {
                    format!("column {name} row {i} disagrees")
                })?;
            }
        }
        ensure(column.derived[agent].round_half_up(2) == rounded, || {
            format!("{name} derived {}", column.derived[agent])
        })?;
    }
    Ok(format!(
        "{exact} cells equal at half-up rounding, {truncated} equal to the truncated neighbour; S Ethiopia 17.53 and z Sudan 23.00 flagged"
    ))
}

fn g_star() -> Outcome {
    let report = reproduce_nile().map_err(|e| e.to_string())?;
    let alpha = &report.rationalization.alpha;
    let rounded: Vec<String> = alpha[..5].iter().map(|a| a.round_half_up(2)).collect();
    ensure(rounded == ["0.26", "0.02", "0.01", "0.17", "0.26"], || {
        format!("rounded alpha {rounded:?}")
    })?;
    let problem = report.dataset.problem();
    let replay =
        evaluate(&RuleSpec::MultiGeometric(alpha.clone()), &problem).map_err(|e| e.to_string())?;
    ensure(replay == report.observed, || {
        "round trip differs from z".into()
    })?;
    Ok(format!(
        "alpha rounds to ({}), exact round trip",
        rounded.join(", ")
    ))
}

const FORWARD_INSTANCES: usize = 500;

/// Draws a rule from `params` for each instance and checks one seeded
/// instance of `axiom`; the rule draw fixes the network size.
fn forward_suite(
    family: &str,
    axiom: AxiomId,
    seed: u64,
    trees: bool,
    mut draw_rule: impl FnMut(&mut ProblemSampler, usize) -> RuleSpec,
) -> Result<(usize, usize), String> {
    let mut params = ProblemSampler::new(seed ^ 0x5eed);
    let mut sampler = ProblemSampler::new(seed).with_trees(trees);
    let (mut passed, mut skipped) = (0, 0);
    for instance in 0..FORWARD_INSTANCES {
        let n = params.size(|_| true).map_err(|e| e.to_string())?;
        let rule = draw_rule(&mut params, n);
        match draw_and_check(&rule, axiom, &mut sampler).map_err(|e| e.to_string())? {
            CheckOutcome::Pass => passed += 1,
            CheckOutcome::Skipped(_) => skipped += 1,
            CheckOutcome::Violated(w) => {
                return Err(format!("{family} instance {instance}, rule {rule}: {w}"))
            }
        }
    }
    ensure(passed * 2 >= FORWARD_INSTANCES, || {
        format!("{family} {axiom}: only {passed} instances applied")
    })?;
    Ok((passed, skipped))
}

fn forward_suites() -> Outcome {
    use AxiomId::*;
    let base = [
        ScaleInvariance,
        UpstreamInvariance,
        PartialImplementationInvariance,
    ];
    let mut checked = 0;
    let mut suites = 0;
    let mut run = |family: &str,
                   axioms: &[AxiomId],
                   trees: bool,
                   draw: &dyn Fn(&mut ProblemSampler, usize) -> RuleSpec|
     -> Result<(), String> {
        for (j, &axiom) in axioms.iter().enumerate() {
            let seed = 1000 * (suites as u64 + 1) + j as u64;
            let (passed, _) = forward_suite(family, axiom, seed, trees, draw)?;
            checked += passed;
        }
        suites += 1;
        Ok(())
    };
    run("multi-geometric", &base, true, &|s, n| {
        RuleSpec::MultiGeometric(s.retention_vector(n))
    })?;
    run(
        "geometric",
        &[
            ScaleInvariance,
            UpstreamInvariance,
            PartialImplementationInvariance,
            EqualSources,
        ],
        true,
        &|s, _| RuleSpec::Geometric(s.share()),
    )?;
    run(
        "serial",
        &[
            ScaleInvariance,
            UpstreamInvariance,
            PartialImplementationInvariance,
            Neutrality,
        ],
        true,
        &|_, _| RuleSpec::Serial,
    )?;
    run(
        "beta",
        &[
            ScaleInvariance,
            UpstreamInvariance,
            PartialImplementationInvariance,
            DownstreamImpartiality,
        ],
        false,
        &|s, n| RuleSpec::Beta {
            k: s.agent(1..=n - 1),
            beta: s.share_below_one(),
        },
    )?;
    run(
        "additive-delta",
        &[ScaleInvariance, UpstreamInvariance, DownstreamImpartiality],
        false,
        &|s, n| {
            let mut delta: Vec<Quantity> = (1..n).map(|_| s.share()).collect();
            delta.push(Quantity::one());
            RuleSpec::AdditiveDelta(delta)
        },
    )?;
    Ok(format!(
        "17 suites of {FORWARD_INSTANCES}, {checked} applicable instances, no witness"
    ))
}

fn converse_suites() -> Outcome {
    let cases = [
        (RuleSpec::Serial, AxiomId::EqualSources),
        (RuleSpec::NoTransfer, AxiomId::Neutrality),
        (
            RuleSpec::AdditiveDelta(qs(&["1/2", "1/2", "1/2", "1"])),
            AxiomId::PartialImplementationInvariance,
        ),
        (
            RuleSpec::MultiGeometric(qs(&["1", "1/2", "1/4", "1"])),
            AxiomId::DownstreamImpartiality,
        ),
    ];
    let mut found = Vec::new();
    for (rule, axiom) in cases {
        let mut sampler = ProblemSampler::new(2024);
        let report =
            search_counterexamples(&rule, axiom, &mut sampler, 1000).map_err(|e| e.to_string())?;
        let witness = report
            .witness
            .ok_or_else(|| format!("no witness for {rule} against {axiom}"))?;
        ensure(witness.recheck(&rule).map_err(|e| e.to_string())?, || {
            format!("witness for {rule} does not replay")
        })?;
        found.push(format!("{} after {}", rule.label(), report.drawn));
    }

    let delta = RuleSpec::AdditiveDelta(qs(&["1/2", "1/2", "1/2", "1"]));
    let e = Problem::linear(qs(&["1", "0", "0", "0"])).map_err(|e| e.to_string())?;
    let outcome = check_pii(&delta, &e, AgentId::new(2)).map_err(|e| e.to_string())?;
    let witness = outcome.witness().ok_or("hand-derived instance passed")?;
    let downstream: Vec<(String, String)> = witness
        .mismatches
        .iter()
        .filter(|m| m.agent.get() > 2)
        .map(|m| (m.lhs.to_string(), m.rhs.to_string()))
        .collect();
    let sixth_vs_eighth = ("1/6".to_string(), "1/8".to_string());
    ensure(
        downstream == [sixth_vs_eighth.clone(), sixth_vs_eighth],
        || format!("hand witness downstream {downstream:?}"),
    )?;
    Ok(format!(
        "witnesses: {}; hand witness e=(1,0,0,0), i=2 gives (1/6,1/6) vs (1/8,1/8)",
        found.join(", ")
    ))
}

const EQUIVALENCE_INSTANCES: usize = 500;

fn equivalences() -> Outcome {
    let mut sampler = ProblemSampler::new(77).with_trees(true);
    let err = |e: riparian_core::Error| e.to_string();
    for instance in 0..EQUIVALENCE_INSTANCES {
        let n = sampler.size(|_| true).map_err(err)?;
        let line = sampler.linear_problem(n).map_err(err)?;
        let any = sampler.problem(n).map_err(err)?;

        let gamma = sampler.share();
        let mut retain = vec![gamma.clone(); n - 1];
        retain.push(Quantity::one());
        ensure(
            geometric_recursive(&line, &retain).map_err(err)?
                == geometric_closed_form(&line, &gamma).map_err(err)?,
            || format!("closed form differs at instance {instance}"),
        )?;

        ensure(
            evaluate(&RuleSpec::Serial, &line).map_err(err)?
                == evaluate(&RuleSpec::MultiGeometric(serial_alpha_vector(n)), &line)
                    .map_err(err)?,
            || format!("serial differs from its geometric form at instance {instance}"),
        )?;
        let network = any.network();
        let path_alpha: Vec<Quantity> = network
            .agents()
            .map(|a| Quantity::frac(1, network.downstream_path(a).unwrap().len() as u64))
            .collect();
        ensure(
            evaluate(&RuleSpec::Serial, &any).map_err(err)?
                == evaluate(&RuleSpec::MultiGeometric(path_alpha), &any).map_err(err)?,
            || format!("serial differs from its geometric form on a tree at instance {instance}"),
        )?;

        let k = sampler.agent(1..=n - 1);
        let beta = sampler.share_below_one();
        let delta = beta_delta_vector(n, k, &beta).map_err(err)?;
        ensure(
            evaluate(&RuleSpec::Beta { k, beta }, &line).map_err(err)?
                == evaluate(&RuleSpec::AdditiveDelta(delta), &line).map_err(err)?,
            || format!("beta differs from its additive form at instance {instance}"),
        )?;

        let lambda = sampler.share();
        let mut delta = vec![lambda.clone(); n - 1];
        delta.push(Quantity::one());
        ensure(
            evaluate(&RuleSpec::Lambda(lambda), &line).map_err(err)?
                == evaluate(&RuleSpec::AdditiveDelta(delta), &line).map_err(err)?,
            || format!("lambda differs from its additive form at instance {instance}"),
        )?;
    }
    Ok(format!(
        "{EQUIVALENCE_INSTANCES} instances for each of 4 identities (serial also on trees)"
    ))
}

fn characterization() -> Outcome {
    let mut sampler = ProblemSampler::new(31);
    let budget = 100;
    let err = |e: riparian_core::Error| e.to_string();
    let mut members = 0;
    for n in 3..=8 {
        let mut ones = vec![Quantity::one(); n];
        let mut zeros = vec![Quantity::zero(); n - 1];
        zeros.push(Quantity::one());
        for (rule, alpha) in [
            (RuleSpec::Serial, serial_alpha_vector(n)),
            (RuleSpec::NoTransfer, std::mem::take(&mut ones)),
            (RuleSpec::FullTransfer, zeros),
        ] {
            let verdict = characterize_geometric(&rule, n, &mut sampler, budget).map_err(err)?;
            ensure(verdict == Membership::Member(alpha), || {
                format!("{rule} on n = {n}: {verdict:?}")
            })?;
            members += 1;
        }
    }
    for _ in 0..50 {
        let n = sampler.size(|_| true).map_err(err)?;
        let alpha = sampler.retention_vector(n);
        let rule = RuleSpec::MultiGeometric(alpha.clone());
        let verdict = characterize_geometric(&rule, n, &mut sampler, budget).map_err(err)?;
        ensure(verdict == Membership::Member(alpha), || {
            format!("{rule}: {verdict:?}")
        })?;
        members += 1;
    }
    let outsiders = [
        (RuleSpec::Lambda(q("1/2")), 4),
        (RuleSpec::Lambda(q("1/2")), 7),
        (RuleSpec::AdditiveDelta(qs(&["1/3", "2/5", "1/2", "1"])), 4),
        (
            RuleSpec::AdditiveDelta(qs(&["3/4", "1/5", "2/3", "1/7", "1"])),
            5,
        ),
        (RuleSpec::AdditiveDelta(qs(&["1/3", "1/4", "1"])), 3),
    ];
    for (rule, n) in &outsiders {
        let verdict = characterize_geometric(rule, *n, &mut sampler, budget).map_err(err)?;
        ensure(matches!(verdict, Membership::NonMember(_)), || {
            format!("{rule} classified as member")
        })?;
    }
    Ok(format!(
        "{members} members recovered exactly, {} non-members rejected",
        outsiders.len()
    ))
}

fn rationalization_round_trip() -> Outcome {
    let mut sampler = ProblemSampler::new(8).with_trees(true);
    let err = |e: riparian_core::Error| e.to_string();
    let mut trees = 0;
    for pair in 0..200 {
        let n = sampler.size(|_| true).map_err(err)?;
        let shape = sampler.problem(n).map_err(err)?;
        let problem = shape
            .with_inflows(sampler.positive_inflows(n))
            .map_err(err)?;
        if !problem.network().is_linear() {
            trees += 1;
        }
        let alpha = sampler.retention_vector(n);
        let z = evaluate(&RuleSpec::MultiGeometric(alpha.clone()), &problem).map_err(err)?;
        let result = rationalize_alpha(&problem, &z).map_err(err)?;
        ensure(result.alpha == alpha && result.is_exact(), || {
            format!("pair {pair}: recovered {:?}", result.alpha)
        })?;
    }
    Ok(format!("200 pairs recovered exactly ({trees} on trees)"))
}

fn gamma_fit() -> Outcome {
    let mut sampler = ProblemSampler::new(9);
    let err = |e: riparian_core::Error| e.to_string();
    let mut worst_gap: f64 = 0.0;
    let mut worst_loss: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for instance in 0..50 {
        let n = sampler.size(|_| true).map_err(err)?;
        let problem = Problem::linear(sampler.positive_inflows(n)).map_err(err)?;
        let gamma = sampler.share();
        let z: Allocation = evaluate(&RuleSpec::Geometric(gamma.clone()), &problem).map_err(err)?;
        let start = Instant::now();
        let fit = fit_gamma(&problem, &z).map_err(err)?;
        let elapsed = start.elapsed();
        let gap = (fit.gamma - gamma.to_f64()).abs();
        ensure(
            gap <= 1e-6 && fit.loss <= 1e-12 && elapsed < Duration::from_millis(100),
            || format!("instance {instance}: gamma {gamma}, fit {fit:?}, {elapsed:?}"),
        )?;
        worst_gap = worst_gap.max(gap);
        worst_loss = worst_loss.max(fit.loss);
        slowest = slowest.max(elapsed);
    }
    Ok(format!(
        "50 instances, max |Δγ| = {worst_gap:.1e}, max loss = {worst_loss:.1e}, slowest {slowest:?}"
    ))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("example table reproduction", example_table),
        ("Nile table reproduction", nile_table),
        ("g* rationalization", g_star),
        ("forward axiom suites", forward_suites),
        ("converse counterexample searches", converse_suites),
        ("equivalence oracles", equivalences),
        ("geometric characterization", characterization),
        ("rationalization round trip", rationalization_round_trip),
        ("single-share fit", gamma_fit),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({elapsed:.2}s): {detail}", i + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {}: FAIL {name} ({elapsed:.2}s): {reason}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
