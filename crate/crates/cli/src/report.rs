//! Text, CSV and JSON renderings of command results.

use riparian_core::axioms::{AxiomId, CheckOutcome, Membership, Mismatch, SearchReport, Witness};
use riparian_core::data::{render_text, BasinDataset};
use riparian_core::rationalize::{AlphaFlag, FitResult, RationalizationResult};
use riparian_core::reproduction::{
    ColumnComparison, Discrepancy, ExampleReproduction, NileReproduction,
};
use riparian_core::{Allocation, Problem, RuleSpec};
use serde_json::{json, Value};

use crate::Format;

fn json_document(value: Value) -> String {
    let mut text = serde_json::to_string_pretty(&value).expect("json values serialize");
    text.push('\n');
    text
}

fn csv_document(rows: &[Vec<String>]) -> String {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|cell| {
                    if cell.contains([',', '"', '\n']) {
                        format!("\"{}\"", cell.replace('"', "\"\""))
                    } else {
                        cell.clone()
                    }
                })
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect()
}

fn inflows(problem: &Problem) -> Vec<String> {
    problem.inflows().iter().map(ToString::to_string).collect()
}

fn mismatch_json(m: &Mismatch) -> Value {
    json!({
        "agent": m.agent.get(),
        "paired_with": m.paired_with.map(|a| a.get()),
        "lhs": m.lhs.to_string(),
        "rhs": m.rhs.to_string(),
    })
}

fn witness_json(w: &Witness) -> Value {
    let derived = w
        .derived_problem()
        .ok()
        .flatten()
        .map(|p| json!(inflows(&p)));
    json!({
        "axiom": w.axiom.name(),
        "inflows": inflows(&w.problem),
        "successors": w.problem.network().successors().iter().map(|s| s.map(|a| a.get())).collect::<Vec<_>>(),
        "perturbation": format!("{:?}", w.perturbation),
        "perturbed_inflows": derived,
        "mismatches": w.mismatches.iter().map(mismatch_json).collect::<Vec<_>>(),
        "summary": w.to_string(),
    })
}

pub(crate) fn rationalization(
    dataset: &BasinDataset,
    observed: &Allocation,
    result: &RationalizationResult,
    fit: &FitResult,
    format: Format,
    decimals: u32,
) -> String {
    let names = dataset.names();
    let problem = dataset.problem();
    let flag = |f: &AlphaFlag| match f {
        AlphaFlag::Exact => "exact",
        AlphaFlag::Indeterminate => "indeterminate",
    };
    match format {
        Format::Json => json_document(json!({
            "agents": names,
            "inflows": inflows(&problem),
            "observed": observed.amounts().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "disposable": result.disposable.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "alpha": result.alpha.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "alpha_rounded": result.alpha.iter().map(|a| a.round_half_up(decimals)).collect::<Vec<_>>(),
            "flags": result.flags.iter().map(flag).collect::<Vec<_>>(),
            "fit": {
                "gamma": fit.gamma,
                "loss": fit.loss,
                "iterations": fit.iterations,
            },
        })),
        Format::Text | Format::Csv => {
            let mut rows = vec![["agent", "e", "z", "d", "alpha", "flag"]
                .map(String::from)
                .to_vec()];
            for (i, name) in names.iter().enumerate() {
                rows.push(vec![
                    name.clone(),
                    problem.inflows()[i].round_half_up(decimals),
                    observed.amounts()[i].round_half_up(decimals),
                    result.disposable[i].round_half_up(decimals),
                    result.alpha[i].round_half_up(decimals),
                    flag(&result.flags[i]).to_string(),
                ]);
            }
            if matches!(format, Format::Csv) {
                return csv_document(&rows);
            }
            let mut text = render_text(&rows);
            text.push_str(&format!(
                "\nbest single share: gamma = {:.6} (squared error {:.6e}, {} refinement steps)\n",
                fit.gamma, fit.loss, fit.iterations
            ));
            text
        }
    }
}

pub(crate) struct AxiomResult {
    axiom: AxiomId,
    /// `None` when the axiom does not apply to the network.
    outcome: Option<(CheckOutcome, usize)>,
}

impl AxiomResult {
    pub(crate) fn new(axiom: AxiomId, outcome: Option<(CheckOutcome, usize)>) -> Self {
        AxiomResult { axiom, outcome }
    }

    pub(crate) fn is_violated(&self) -> bool {
        matches!(&self.outcome, Some((CheckOutcome::Violated(_), _)))
    }

    fn status(&self) -> (&'static str, String) {
        match &self.outcome {
            None => ("n/a", "stated for linear networks only".into()),
            Some((CheckOutcome::Pass, k)) => ("pass", format!("{k} instances")),
            Some((CheckOutcome::Skipped(reason), _)) => ("skipped", reason.clone()),
            Some((CheckOutcome::Violated(w), _)) => ("violated", w.to_string()),
        }
    }
}

pub(crate) fn axiom_checks(rule: &RuleSpec, results: &[AxiomResult], format: Format) -> String {
    match format {
        Format::Json => json_document(json!({
            "rule": rule.to_string(),
            "results": results.iter().map(|r| {
                let (status, detail) = r.status();
                let checked = r.outcome.as_ref().map_or(0, |(_, k)| *k);
                json!({
                    "axiom": r.axiom.name(),
                    "status": status,
                    "instances": checked,
                    "detail": detail,
                    "witness": r.outcome.as_ref().and_then(|(o, _)| o.witness()).map(witness_json),
                })
            }).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut rows = vec![vec!["axiom".to_string(), "status".into(), "detail".into()]];
            for r in results {
                let (status, detail) = r.status();
                rows.push(vec![r.axiom.name().into(), status.into(), detail]);
            }
            csv_document(&rows)
        }
        Format::Text => {
            let mut text = format!("rule {rule}\n");
            for r in results {
                let (status, detail) = r.status();
                text.push_str(&format!(
                    "{:<34} {:<8} {}\n",
                    r.axiom.name(),
                    status,
                    detail
                ));
            }
            text
        }
    }
}

pub(crate) fn searches(rule: &RuleSpec, reports: &[SearchReport], format: Format) -> String {
    let status = |r: &SearchReport| {
        if r.witness.is_some() {
            "witness"
        } else {
            "none"
        }
    };
    match format {
        Format::Json => json_document(json!({
            "rule": rule.to_string(),
            "searches": reports.iter().map(|r| json!({
                "axiom": r.axiom.name(),
                "seed": r.seed,
                "drawn": r.drawn,
                "passed": r.passed,
                "skipped": r.skipped,
                "witness": r.witness.as_ref().map(witness_json),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut rows = vec![[
                "axiom", "seed", "drawn", "passed", "skipped", "result", "witness",
            ]
            .map(String::from)
            .to_vec()];
            for r in reports {
                rows.push(vec![
                    r.axiom.name().into(),
                    r.seed.to_string(),
                    r.drawn.to_string(),
                    r.passed.to_string(),
                    r.skipped.to_string(),
                    status(r).into(),
                    r.witness
                        .as_ref()
                        .map(ToString::to_string)
                        .unwrap_or_default(),
                ]);
            }
            csv_document(&rows)
        }
        Format::Text => {
            let mut text = format!("rule {rule}\n");
            for r in reports {
                text.push_str(&format!(
                    "{}: seed {}, {} drawn, {} passed, {} skipped\n",
                    r.axiom, r.seed, r.drawn, r.passed, r.skipped
                ));
                match &r.witness {
                    Some(w) => text.push_str(&format!("  witness: {w}\n")),
                    None => text.push_str("  no violation found\n"),
                }
            }
            text
        }
    }
}

pub(crate) fn characterization(
    rule: &RuleSpec,
    n: usize,
    budget: usize,
    membership: &Membership,
    format: Format,
) -> String {
    let (verdict, alpha, witness) = match membership {
        Membership::Member(alpha) => ("member", alpha, None),
        Membership::NonMember(w) => ("non-member", &w.alpha, Some(w)),
    };
    match format {
        Format::Json => json_document(json!({
            "rule": rule.to_string(),
            "n": n,
            "budget": budget,
            "verdict": verdict,
            "alpha": alpha.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "witness": witness.map(|w| json!({
                "inflows": inflows(&w.problem),
                "mismatches": w.mismatches.iter().map(mismatch_json).collect::<Vec<_>>(),
            })),
        })),
        Format::Csv => {
            let mut rows = vec![vec!["agent".to_string(), "alpha".into()]];
            for (i, a) in alpha.iter().enumerate() {
                rows.push(vec![(i + 1).to_string(), a.to_string()]);
            }
            rows.push(vec!["verdict".into(), verdict.into()]);
            csv_document(&rows)
        }
        Format::Text => {
            let shown: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
            let mut text = format!(
                "rule {rule} on lines of {n} agents: {verdict}\nrecovered alpha = ({})\n",
                shown.join(", ")
            );
            if let Some(w) = witness {
                text.push_str(&format!(
                    "differs from that geometric rule on e = ({}):\n",
                    inflows(&w.problem).join(", ")
                ));
                for m in &w.mismatches {
                    text.push_str(&format!(
                        "  agent {}: geometric {} vs rule {}\n",
                        m.agent, m.lhs, m.rhs
                    ));
                }
            } else {
                text.push_str(&format!("agreed on {budget} sampled problems\n"));
            }
            text
        }
    }
}

fn status_mark(status: riparian_core::reproduction::CellStatus) -> &'static str {
    use riparian_core::reproduction::CellStatus;
    match status {
        CellStatus::Match => "",
        CellStatus::WithinLastDigit => "~",
        CellStatus::Mismatch => "!",
    }
}

fn comparison_json(c: &ColumnComparison, decimals: u32) -> Value {
    json!({
        "name": c.name,
        "printed": c.printed.iter().map(|v| v.to_text()).collect::<Vec<_>>(),
        "derived": c.derived.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "derived_rounded": c.derived.iter().map(|v| v.round_half_up(decimals)).collect::<Vec<_>>(),
        "status": c.status.iter().map(|s| s.label()).collect::<Vec<_>>(),
    })
}

fn discrepancy_json(d: &Discrepancy) -> Value {
    json!({
        "table": d.table,
        "column": d.column,
        "agent": d.agent,
        "printed": d.printed.to_text(),
        "derived": d.derived.to_string(),
        "note": d.note,
    })
}

fn marked_rows(
    names: &[String],
    columns: &[&ColumnComparison],
    cell: impl Fn(&riparian_core::Quantity) -> String,
) -> Vec<Vec<String>> {
    let mut header = vec![String::new()];
    header.extend(columns.iter().map(|c| c.name.clone()));
    let mut rows = vec![header];
    for (i, name) in names.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(
            columns
                .iter()
                .map(|c| format!("{}{}", cell(&c.derived[i]), status_mark(c.status[i]))),
        );
        rows.push(row);
    }
    rows
}

pub(crate) fn reproduction(
    nile: &NileReproduction,
    example: &ExampleReproduction,
    format: Format,
    decimals: u32,
) -> String {
    let names = nile.dataset.names();
    let mut discrepancies = example.discrepancies();
    discrepancies.extend(nile.discrepancies());
    match format {
        Format::Json => json_document(json!({
            "nile": {
                "agents": names,
                "columns": nile.columns.iter().map(|c| comparison_json(c, decimals)).collect::<Vec<_>>(),
                "g_star": comparison_json(&nile.g_star, decimals),
                "rounding_notes": nile.rounding_notes().iter().map(|(column, agent, printed, derived)| json!({
                    "column": column,
                    "agent": agent,
                    "printed": printed.to_text(),
                    "derived": derived.to_string(),
                })).collect::<Vec<_>>(),
            },
            "example": {
                "inflows": example.problems.iter().map(inflows).collect::<Vec<_>>(),
                "columns": example.columns.iter().map(|c| comparison_json(c, decimals)).collect::<Vec<_>>(),
                "printed_column_valid": example.printed_valid,
            },
            "discrepancies": discrepancies.iter().map(discrepancy_json).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut rows = vec![[
                "table", "column", "agent", "printed", "derived", "exact", "status",
            ]
            .map(String::from)
            .to_vec()];
            let mut push = |table: &str, agents: &[String], c: &ColumnComparison| {
                for (i, agent) in agents.iter().enumerate() {
                    rows.push(vec![
                        table.into(),
                        c.name.clone(),
                        agent.clone(),
                        c.printed[i].to_text(),
                        c.derived[i].round_half_up(decimals),
                        c.derived[i].to_string(),
                        c.status[i].label().into(),
                    ]);
                }
            };
            for c in nile.columns.iter().chain([&nile.g_star]) {
                push("Nile", &names, c);
            }
            let example_agents: Vec<String> = (1..=4).map(|i| i.to_string()).collect();
            for c in &example.columns {
                push("Example", &example_agents, c);
            }
            csv_document(&rows)
        }
        Format::Text => {
            let mut text = format!(
                "Nile water rights, derived values rounded half-up to {decimals} decimals\n\
                 (~ printed value is the truncated neighbour, ! printed value disagrees)\n\n"
            );
            let columns: Vec<&ColumnComparison> = nile.columns.iter().collect();
            text.push_str(&render_text(&marked_rows(&names, &columns, |v| {
                v.round_half_up(decimals)
            })));
            let shares: Vec<String> = nile
                .g_star
                .derived
                .iter()
                .zip(&nile.g_star.status)
                .map(|(v, s)| format!("{}{}", v.round_half_up(decimals), status_mark(*s)))
                .collect();
            text.push_str(&format!("\nrecovered g* = ({})\n", shares.join(", ")));

            text.push_str("\nFour-agent example, exact values\n\n");
            let example_agents: Vec<String> = (1..=4).map(|i| i.to_string()).collect();
            let columns: Vec<&ColumnComparison> = example.columns.iter().collect();
            text.push_str(&render_text(&marked_rows(&example_agents, &columns, |v| {
                v.to_string()
            })));

            text.push_str("\nDiscrepancies\n");
            for d in &discrepancies {
                text.push_str(&format!("  {d}\n"));
            }
            let notes = nile.rounding_notes();
            if !notes.is_empty() {
                text.push_str("\nPrinted values truncated rather than rounded\n");
                for (column, agent, printed, derived) in notes {
                    text.push_str(&format!(
                        "  Nile {column} {agent}: printed {}, derived {derived}\n",
                        printed.to_text()
                    ));
                }
            }
            text
        }
    }
}
