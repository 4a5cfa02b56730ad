//! Problem files, observed allocations, the embedded Nile dataset and table
//! emission.
//!
//! Problem CSV has the header `id,name,successor,inflow[,withdrawal]`, with an
//! empty `successor` for the sink. Problem JSON is an object with an `agents`
//! array of `{id, name, successor|null, inflow, withdrawal?}`. Amounts in
//! both are decimals or `p/q` fractions and are read exactly. Lines starting
//! with `#` at the top of a CSV file, and the optional `provenance` array in
//! JSON, carry free-text notes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::network::{AgentId, RiverNetwork};
use crate::problem::{Allocation, Problem};
use crate::quantity::Quantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentFormat {
    Csv,
    Json,
}

impl DocumentFormat {
    /// Guess from a file name: `.json` is JSON, anything else CSV.
    pub fn from_path(path: &str) -> Self {
        if path.to_ascii_lowercase().ends_with(".json") {
            DocumentFormat::Json
        } else {
            DocumentFormat::Csv
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasinDataset {
    pub ids: Vec<String>,
    pub network: RiverNetwork,
    pub inflows: Vec<Quantity>,
    pub raw_withdrawals: Option<Vec<Quantity>>,
    pub provenance: Vec<String>,
}

impl BasinDataset {
    pub fn problem(&self) -> Problem {
        Problem::new(self.network.clone(), self.inflows.clone())
            .expect("dataset vectors match the network")
    }

    pub fn names(&self) -> Vec<String> {
        self.network
            .agents()
            .map(|a| self.network.display_name(a))
            .collect()
    }

    fn position(&self, id: &str) -> Option<AgentId> {
        self.ids
            .iter()
            .position(|x| x == id)
            .map(AgentId::from_index)
    }
}

/// One agent row before the network is assembled.
struct AgentRow {
    id: String,
    name: String,
    successor: Option<String>,
    inflow: Quantity,
    withdrawal: Option<Quantity>,
}

fn parse_amount(text: &str, location: &str, field: &str) -> Result<Quantity> {
    text.parse().map_err(|_| {
        Error::parse(
            location,
            format!("{field} {text:?} is not a nonnegative amount"),
        )
    })
}

fn assemble(rows: Vec<AgentRow>, provenance: Vec<String>) -> Result<BasinDataset> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        if row.id.is_empty() {
            return Err(Error::parse(format!("agent {}", i + 1), "empty id"));
        }
        if index.insert(row.id.as_str(), i).is_some() {
            return Err(Error::parse(
                format!("agent {}", i + 1),
                format!("duplicate id {:?}", row.id),
            ));
        }
    }
    let successors = rows
        .iter()
        .map(|row| {
            row.successor
                .as_deref()
                .map(|s| {
                    index
                        .get(s)
                        .map(|&j| AgentId::from_index(j))
                        .ok_or_else(|| {
                            Error::parse(
                                format!("agent {:?}", row.id),
                                format!("successor {s:?} is not a listed agent"),
                            )
                        })
                })
                .transpose()
        })
        .collect::<Result<Vec<_>>>()?;
    let with_withdrawals = rows.iter().filter(|r| r.withdrawal.is_some()).count();
    if with_withdrawals != 0 && with_withdrawals != rows.len() {
        return Err(Error::parse(
            "withdrawal",
            "withdrawal must be given for every agent or none",
        ));
    }
    let network =
        RiverNetwork::new(successors)?.with_labels(rows.iter().map(|r| r.name.clone()))?;
    let raw_withdrawals = (with_withdrawals != 0)
        .then(|| rows.iter().map(|r| r.withdrawal.clone().unwrap()).collect());
    Ok(BasinDataset {
        ids: rows.iter().map(|r| r.id.clone()).collect(),
        inflows: rows.into_iter().map(|r| r.inflow).collect(),
        network,
        raw_withdrawals,
        provenance,
    })
}

fn split_comments(text: &str) -> (Vec<String>, String) {
    let mut notes = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix('#') {
            Some(note) => notes.push(note.trim().to_string()),
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    (notes, body)
}

fn parse_csv(text: &str) -> Result<BasinDataset> {
    let (provenance, body) = split_comments(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .clone();
    let header: Vec<&str> = headers.iter().collect();
    let has_withdrawal = match header.as_slice() {
        ["id", "name", "successor", "inflow"] => false,
        ["id", "name", "successor", "inflow", "withdrawal"] => true,
        [] | [""] => return Err(Error::TooFewAgents(0)),
        _ => {
            return Err(Error::parse(
                "header",
                format!(
                    "expected id,name,successor,inflow[,withdrawal], got {}",
                    header.join(",")
                ),
            ))
        }
    };
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let location = format!("line {}", i + 2);
        let record = record.map_err(|e| Error::parse(&location, e.to_string()))?;
        let field = |k: usize| record.get(k).unwrap_or_default();
        rows.push(AgentRow {
            id: field(0).to_string(),
            name: field(1).to_string(),
            successor: (!field(2).is_empty()).then(|| field(2).to_string()),
            inflow: parse_amount(field(3), &location, "inflow")?,
            withdrawal: if has_withdrawal {
                Some(parse_amount(field(4), &location, "withdrawal")?)
            } else {
                None
            },
        });
    }
    assemble(rows, provenance)
}

/// A JSON string or number, read through its text form.
#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Text(String),
    Number(serde_json::Number),
}

impl Scalar {
    fn into_text(self) -> String {
        match self {
            Scalar::Text(s) => s,
            Scalar::Number(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonAgent {
    id: Scalar,
    #[serde(default)]
    name: Option<String>,
    successor: Option<Scalar>,
    inflow: Scalar,
    #[serde(default)]
    withdrawal: Option<Scalar>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDocument {
    agents: Vec<JsonAgent>,
    #[serde(default)]
    provenance: Vec<String>,
}

fn parse_json(text: &str) -> Result<BasinDataset> {
    let doc: JsonDocument = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let rows = doc
        .agents
        .into_iter()
        .enumerate()
        .map(|(i, agent)| {
            let location = format!("agents[{i}]");
            let id = agent.id.into_text();
            Ok(AgentRow {
                name: agent.name.unwrap_or_else(|| id.clone()),
                id,
                successor: agent.successor.map(Scalar::into_text),
                inflow: parse_amount(&agent.inflow.into_text(), &location, "inflow")?,
                withdrawal: agent
                    .withdrawal
                    .map(|w| parse_amount(&w.into_text(), &location, "withdrawal"))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(rows, doc.provenance)
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str, format: DocumentFormat) -> Result<BasinDataset> {
    match format {
        DocumentFormat::Csv => parse_csv(text),
        DocumentFormat::Json => parse_json(text),
    }
}

fn successor_id(dataset: &BasinDataset, agent: AgentId) -> Option<&str> {
    dataset
        .network
        .successor(agent)
        .map(|s| dataset.ids[s.index()].as_str())
}

/// Writes a problem document that [`parse_problem`] reads back unchanged.
pub fn emit_problem(dataset: &BasinDataset, format: DocumentFormat) -> String {
    match format {
        DocumentFormat::Csv => {
            let mut out = String::new();
            for note in &dataset.provenance {
                let _ = writeln!(out, "# {note}");
            }
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let mut header = vec!["id", "name", "successor", "inflow"];
            if dataset.raw_withdrawals.is_some() {
                header.push("withdrawal");
            }
            writer.write_record(&header).expect("in-memory write");
            for agent in dataset.network.agents() {
                let i = agent.index();
                let mut record = vec![
                    dataset.ids[i].clone(),
                    dataset.network.display_name(agent),
                    successor_id(dataset, agent).unwrap_or_default().to_string(),
                    dataset.inflows[i].to_text(),
                ];
                if let Some(w) = &dataset.raw_withdrawals {
                    record.push(w[i].to_text());
                }
                writer.write_record(&record).expect("in-memory write");
            }
            let bytes = writer.into_inner().expect("in-memory write");
            out.push_str(&String::from_utf8(bytes).expect("utf-8 input"));
            out
        }
        DocumentFormat::Json => {
            let agents: Vec<serde_json::Value> = dataset
                .network
                .agents()
                .map(|agent| {
                    let i = agent.index();
                    let mut value = json!({
                        "id": dataset.ids[i],
                        "name": dataset.network.display_name(agent),
                        "successor": successor_id(dataset, agent),
                        "inflow": dataset.inflows[i].to_text(),
                    });
                    if let Some(w) = &dataset.raw_withdrawals {
                        value["withdrawal"] = json!(w[i].to_text());
                    }
                    value
                })
                .collect();
            let mut doc = json!({ "agents": agents });
            if !dataset.provenance.is_empty() {
                doc["provenance"] = json!(dataset.provenance);
            }
            let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
            text.push('\n');
            text
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonObserved {
    allocation: Vec<JsonObservedEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonObservedEntry {
    id: Scalar,
    amount: Scalar,
}

/// Reads an observed allocation (`id,amount` CSV or
/// `{"allocation": [{id, amount}]}` JSON) against the ids of `dataset`.
/// Every agent must appear exactly once.
pub fn parse_observed(
    text: &str,
    format: DocumentFormat,
    dataset: &BasinDataset,
) -> Result<Allocation> {
    let entries: Vec<(String, String, String)> = match format {
        DocumentFormat::Csv => {
            let (_, body) = split_comments(text);
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_reader(body.as_bytes());
            let headers = reader
                .headers()
                .map_err(|e| Error::parse("header", e.to_string()))?
                .clone();
            if headers.iter().collect::<Vec<_>>() != ["id", "amount"] {
                return Err(Error::parse("header", "expected id,amount"));
            }
            reader
                .records()
                .enumerate()
                .map(|(i, r)| {
                    let location = format!("line {}", i + 2);
                    let r = r.map_err(|e| Error::parse(&location, e.to_string()))?;
                    Ok((
                        location,
                        r.get(0).unwrap_or_default().to_string(),
                        r.get(1).unwrap_or_default().to_string(),
                    ))
                })
                .collect::<Result<_>>()?
        }
        DocumentFormat::Json => {
            let doc: JsonObserved = serde_json::from_str(text)
                .map_err(|e| Error::parse(format!("line {}", e.line()), e.to_string()))?;
            doc.allocation
                .into_iter()
                .enumerate()
                .map(|(i, e)| {
                    (
                        format!("allocation[{i}]"),
                        e.id.into_text(),
                        e.amount.into_text(),
                    )
                })
                .collect()
        }
    };
    let mut amounts: Vec<Option<Quantity>> = vec![None; dataset.ids.len()];
    for (location, id, amount) in entries {
        let agent = dataset
            .position(&id)
            .ok_or_else(|| Error::parse(&location, format!("unknown agent id {id:?}")))?;
        let slot = &mut amounts[agent.index()];
        if slot.is_some() {
            return Err(Error::parse(
                &location,
                format!("agent {id:?} listed twice"),
            ));
        }
        *slot = Some(parse_amount(&amount, &location, "amount")?);
    }
    let amounts = amounts
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            a.ok_or_else(|| {
                Error::parse("allocation", format!("missing agent {:?}", dataset.ids[i]))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Allocation::new(amounts))
}

/// Inflows and withdrawals for Tanzania, Uganda, South Sudan, Ethiopia, Sudan
/// and Egypt, in km³/year. The White Nile runs Tanzania → Uganda → South
/// Sudan → Sudan, the Blue Nile Ethiopia → Sudan, and Sudan drains to Egypt.
pub fn nile_dataset() -> BasinDataset {
    let agents = [
        ("TZA", "Tanzania", Some("UGA"), "16.8", "5.18"),
        ("UGA", "Uganda", Some("SSD"), "16.2", "0.64"),
        ("SSD", "South Sudan", Some("SDN"), "17.6", "0.66"),
        ("ETH", "Ethiopia", Some("SDN"), "52.6", "10.55"),
        ("SDN", "Sudan", Some("EGY"), "0.7", "26.93"),
        ("EGY", "Egypt", None, "0", "77.7"),
    ];
    let rows = agents
        .iter()
        .map(|&(id, name, successor, inflow, withdrawal)| AgentRow {
            id: id.into(),
            name: name.into(),
            successor: successor.map(Into::into),
            inflow: inflow.parse().expect("literal"),
            withdrawal: Some(withdrawal.parse().expect("literal")),
        })
        .collect();
    let provenance = [
        "Lake Victoria contributes 33 km3/year; Tanzania holds 51% of its surface (0.51 x 33 = 16.83, stored as the published 16.8).",
        "Uganda: 43% of Lake Victoria's 33 km3/year plus about 2 km3/year from Lake Albert (16.19); the published 16.2 is used.",
        "South Sudan: Bahr al Ghazal 1.5 + Pibor 3.1 + Baro 13 = 17.6 km3/year.",
        "Ethiopia: Blue Nile from Lake Tana, 52.6 km3/year.",
        "Sudan: Atbara River, 0.7 km3/year. Egypt contributes no inflow.",
        "Withdrawals: AQUASTAT total freshwater withdrawal per country; they sum to 121.66 km3/year against 103.9 km3/year of inflow.",
    ]
    .map(String::from)
    .to_vec();
    assemble(rows, provenance).expect("embedded dataset is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(TableFormat::Text),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::parse("format", format!("unknown format {other:?}"))),
        }
    }
}

/// A named allocation column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<Quantity>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: impl Into<Vec<Quantity>>) -> Self {
        Column {
            name: name.into(),
            values: values.into(),
        }
    }
}

/// Lays out columns side by side, one row per agent. Text and CSV show
/// half-up rounded values; JSON carries both the exact `p/q` form and the
/// rounded text.
pub fn emit_table(
    network: &RiverNetwork,
    columns: &[Column],
    format: TableFormat,
    decimals: u32,
) -> Result<String> {
    if columns.iter().any(|c| c.values.len() != network.n()) {
        return Err(Error::MixedNetworks);
    }
    let names: Vec<String> = network.agents().map(|a| network.display_name(a)).collect();
    let rounded: Vec<Vec<String>> = columns
        .iter()
        .map(|c| c.values.iter().map(|v| v.round_half_up(decimals)).collect())
        .collect();
    Ok(match format {
        TableFormat::Text => {
            let mut header = vec!["Agent".to_string()];
            header.extend(columns.iter().map(|c| c.name.clone()));
            let mut rows = vec![header];
            for (i, name) in names.iter().enumerate() {
                let mut row = vec![name.clone()];
                row.extend(rounded.iter().map(|col| col[i].clone()));
                rows.push(row);
            }
            render_text(&rows)
        }
        TableFormat::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let mut header = vec!["agent".to_string()];
            header.extend(columns.iter().map(|c| c.name.clone()));
            writer.write_record(&header).expect("in-memory write");
            for (i, name) in names.iter().enumerate() {
                let mut row = vec![name.clone()];
                row.extend(rounded.iter().map(|col| col[i].clone()));
                writer.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(writer.into_inner().expect("in-memory write")).expect("utf-8")
        }
        TableFormat::Json => {
            let cols: Vec<serde_json::Value> = columns
                .iter()
                .zip(&rounded)
                .map(|(c, r)| {
                    json!({
                        "name": c.name,
                        "exact": c.values.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "rounded": r,
                    })
                })
                .collect();
            let doc = json!({ "agents": names, "decimals": decimals, "columns": cols });
            let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
            text.push('\n');
            text
        }
    })
}

/// Left-aligned first column, right-aligned others.
pub fn render_text(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..width)
        .map(|j| {
            rows.iter()
                .filter_map(|r| r.get(j))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (j, cell) in row.iter().enumerate() {
            let pad = widths[j] - cell.chars().count();
            if j == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
