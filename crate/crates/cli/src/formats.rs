//! File formats: JSON-lines ledgers, CSV partitions and ground truth,
//! edge-list exports and the report/alluvial serializations.
//!
//! Ledger files carry one JSON object per line, in ledger order:
//!
//! ```text
//! {"t": <int>, "coinbase": <bool>, "in": [{"a": "<addr>", "v": <int>}...],
//!  "out": [{"a": "<addr>", "v": <int>}...], "fee": <int>}
//! ```
//!
//! Inputs may alternatively reference a previous output as
//! `{"tx": <index>, "i": <output slot>}`; references are resolved at load
//! time and always written back in resolved form. All writers emit bytes
//! deterministically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use reident_core::alluvial::AlluvialSpec;
use reident_core::community::Dendrogram;
use reident_core::evaluation::{EvalRow, GroundTruth, GroundTruthError};
use reident_core::hints::HintGraph;
use reident_core::ledger::{Address, Ledger, Transaction, TxInput, TxOutput};
use reident_core::partition::{Partition, PartitionError};

#[derive(Debug, thiserror::Error)]
pub enum LedgerParseError {
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error(
        "tx {index}: conservation violated: inputs {input_sum} != outputs {output_sum} + fee {fee}"
    )]
    ConservationViolation {
        index: usize,
        input_sum: u128,
        output_sum: u128,
        fee: u64,
    },
    #[error("tx {index}: input address {address} never emitted by an earlier transaction")]
    DanglingInput { index: usize, address: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct TxRecord {
    t: i64,
    coinbase: bool,
    #[serde(rename = "in")]
    inputs: Vec<InputRecord>,
    out: Vec<OutputRecord>,
    fee: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum InputRecord {
    Resolved(ResolvedInput),
    Reference(InputReference),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResolvedInput {
    a: String,
    v: u64,
}

/// Reference form: output slot `i` of the transaction at ledger index `tx`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputReference {
    tx: usize,
    i: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputRecord {
    a: String,
    v: u64,
}

pub fn read_ledger(path: &Path) -> Result<Ledger, LedgerParseError> {
    let reader = BufReader::new(File::open(path)?);
    let mut transactions: Vec<Transaction> = Vec::new();
    let mut emitted: std::collections::HashSet<String> = std::collections::HashSet::new();

    for (line_index, line) in reader.lines().enumerate() {
        let line_number = line_index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| LedgerParseError::MalformedRecord {
            line: line_number,
            message,
        };
        let record: TxRecord = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        let index = transactions.len();

        if record.out.is_empty() {
            return Err(malformed("transaction has no outputs".into()));
        }
        if record.coinbase && !record.inputs.is_empty() {
            return Err(malformed("coinbase transaction has inputs".into()));
        }
        if !record.coinbase && record.inputs.is_empty() {
            return Err(malformed("non-coinbase transaction has no inputs".into()));
        }
        for output in &record.out {
            if output.a.is_empty() {
                return Err(malformed("empty output address".into()));
            }
        }

        let mut inputs = Vec::with_capacity(record.inputs.len());
        for input in record.inputs {
            let (address, amount) = match input {
                InputRecord::Resolved(r) => {
                    if r.a.is_empty() {
                        return Err(malformed("empty input address".into()));
                    }
                    (r.a, r.v)
                }
                InputRecord::Reference(r) => {
                    let target = transactions.get(r.tx).ok_or_else(|| {
                        malformed(format!(
                            "input references tx {} at or past index {index}",
                            r.tx
                        ))
                    })?;
                    let output = target.outputs.get(r.i).ok_or_else(|| {
                        malformed(format!(
                            "input references missing output {} of tx {}",
                            r.i, r.tx
                        ))
                    })?;
                    (output.address.as_str().to_owned(), output.amount)
                }
            };
            if !emitted.contains(&address) {
                return Err(LedgerParseError::DanglingInput { index, address });
            }
            inputs.push(TxInput {
                address: Address::new(address),
                amount,
            });
        }

        let outputs: Vec<TxOutput> = record
            .out
            .into_iter()
            .map(|o| TxOutput {
                address: Address::new(o.a),
                amount: o.v,
            })
            .collect();

        if !record.coinbase {
            let input_sum: u128 = inputs.iter().map(|i| i.amount as u128).sum();
            let output_sum: u128 = outputs.iter().map(|o| o.amount as u128).sum();
            if input_sum != output_sum + record.fee as u128 {
                return Err(LedgerParseError::ConservationViolation {
                    index,
                    input_sum,
                    output_sum,
                    fee: record.fee,
                });
            }
        }

        for output in &outputs {
            emitted.insert(output.address.as_str().to_owned());
        }
        transactions.push(Transaction {
            index,
            timestamp: record.t,
            inputs,
            outputs,
            is_coinbase: record.coinbase,
            fee: record.fee,
        });
    }
    Ok(Ledger::new(transactions))
}

pub fn write_ledger(ledger: &Ledger, path: &Path) -> std::io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    for tx in ledger.transactions() {
        let record = TxRecord {
            t: tx.timestamp,
            coinbase: tx.is_coinbase,
            inputs: tx
                .inputs
                .iter()
                .map(|i| {
                    InputRecord::Resolved(ResolvedInput {
                        a: i.address.as_str().to_owned(),
                        v: i.amount,
                    })
                })
                .collect(),
            out: tx
                .outputs
                .iter()
                .map(|o| OutputRecord {
                    a: o.address.as_str().to_owned(),
                    v: o.amount,
                })
                .collect(),
            fee: tx.fee,
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// Splits one CSV line into two fields, honoring quotes.
fn csv_two_fields(line: &str, line_number: usize) -> Result<(String, String), String> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        if quoted {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    current.push('"');
                }
                '"' => quoted = false,
                other => current.push(other),
            }
        } else {
            match c {
                '"' if current.is_empty() => quoted = true,
                ',' => fields.push(std::mem::take(&mut current)),
                other => current.push(other),
            }
        }
    }
    fields.push(current);
    if fields.len() != 2 {
        return Err(format!(
            "line {line_number}: expected 2 fields, got {}",
            fields.len()
        ));
    }
    let mut it = fields.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

pub fn write_partition_csv(partition: &Partition, path: &Path) -> std::io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(b"address,cluster\n")?;
    for (address, cluster) in partition.iter() {
        writeln!(writer, "{},{}", csv_escape(address.as_str()), cluster.0)?;
    }
    writer.flush()
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {source}")]
    Partition {
        path: String,
        source: PartitionError,
    },
    #[error("{path}: {source}")]
    GroundTruth {
        path: String,
        source: GroundTruthError,
    },
}

fn read_two_column_csv(
    path: &Path,
    expected_header: &str,
) -> Result<Vec<(String, String)>, CsvError> {
    let display = path.display().to_string();
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header.trim() == expected_header => {}
        Some((_, Ok(header))) => {
            return Err(CsvError::Malformed {
                path: display,
                message: format!("expected header '{expected_header}', got '{header}'"),
            })
        }
        Some((_, Err(e))) => return Err(e.into()),
        None => {
            return Err(CsvError::Malformed {
                path: display,
                message: "empty file".into(),
            })
        }
    }
    for (index, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = csv_two_fields(&line, index + 1).map_err(|message| CsvError::Malformed {
            path: display.clone(),
            message,
        })?;
        rows.push((a, b));
    }
    Ok(rows)
}

pub fn read_partition_csv(path: &Path) -> Result<Partition, CsvError> {
    let rows = read_two_column_csv(path, "address,cluster")?;
    let pairs = rows
        .into_iter()
        .map(|(a, c)| (Address::new(a), c))
        .collect();
    Partition::from_labels(pairs).map_err(|source| CsvError::Partition {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_ground_truth_csv(gt: &GroundTruth, path: &Path) -> std::io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(b"address,user\n")?;
    for (address, label) in gt.iter() {
        writeln!(
            writer,
            "{},{}",
            csv_escape(address.as_str()),
            csv_escape(label)
        )?;
    }
    writer.flush()
}

pub fn read_ground_truth_csv(path: &Path) -> Result<GroundTruth, CsvError> {
    let rows = read_two_column_csv(path, "address,user")?;
    let entries = rows
        .into_iter()
        .map(|(a, l)| (Address::new(a), l))
        .collect();
    GroundTruth::new(entries).map_err(|source| CsvError::GroundTruth {
        path: path.display().to_string(),
        source,
    })
}

/// Edge list `u v w` (one edge per line, `u < v`), with isolated users in a
/// sibling `.isolates` file, one id per line.
pub fn write_hint_graph(
    graph: &HintGraph,
    edges_path: &Path,
    isolates_path: &Path,
) -> std::io::Result<()> {
    let mut writer = BufWriter::new(File::create(edges_path)?);
    for (u, v, w) in graph.edges() {
        writeln!(writer, "{u} {v} {w}")?;
    }
    writer.flush()?;
    let mut writer = BufWriter::new(File::create(isolates_path)?);
    for user in graph.isolates() {
        writeln!(writer, "{user}")?;
    }
    writer.flush()
}

/// Per-level `user,community` CSV.
pub fn write_user_level_csv(assignment: &[u32], path: &Path) -> std::io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(b"user,community\n")?;
    for (user, community) in assignment.iter().enumerate() {
        writeln!(writer, "{user},{community}")?;
    }
    writer.flush()
}

#[derive(Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub communities: usize,
    pub modularity: f64,
}

pub fn write_dendrogram_summary(dendrogram: &Dendrogram, path: &Path) -> std::io::Result<()> {
    let summaries: Vec<LevelSummary> = dendrogram
        .levels()
        .iter()
        .enumerate()
        .map(|(i, level)| LevelSummary {
            level: i + 1,
            communities: level.community_count(),
            modularity: level.modularity,
        })
        .collect();
    let mut writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut writer, &summaries)?;
    writer.write_all(b"\n")?;
    writer.flush()
}

pub fn write_eval_csv(rows: &[EvalRow], path: &Path) -> std::io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(b"heuristic,precision,recall,f1,nmi,anmi\n")?;
    for row in rows {
        writeln!(
            writer,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            csv_escape(&row.name),
            row.precision,
            row.recall,
            row.f1,
            row.nmi,
            row.anmi
        )?;
    }
    writer.flush()
}

/// Plain-text table with two decimals per metric column.
pub fn format_eval_table(rows: &[EvalRow]) -> String {
    let name_width = rows
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(0)
        .max("Heur.".len());
    let mut out = format!(
        "{:<name_width$}  Precision  Recall  F1    NMI   aNMI\n",
        "Heur.",
        name_width = name_width
    );
    for row in rows {
        out.push_str(&format!(
            "{:<name_width$}  {:>9.2}  {:>6.2}  {:>4.2}  {:>4.2}  {:>4.2}\n",
            row.name,
            row.precision,
            row.recall,
            row.f1,
            row.nmi,
            row.anmi,
            name_width = name_width
        ));
    }
    out
}

#[derive(Serialize, Deserialize)]
pub struct AlluvialJson {
    pub universe: u64,
    pub axes: Vec<AxisJson>,
    pub flows: Vec<FlowJson>,
}

#[derive(Serialize, Deserialize)]
pub struct AxisJson {
    pub name: String,
    pub clusters: Vec<ClusterJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ClusterJson {
    pub id: u32,
    pub label: String,
    pub size: u64,
}

#[derive(Serialize, Deserialize)]
pub struct FlowJson {
    pub axis: usize,
    pub left: u32,
    pub right: u32,
    pub count: u64,
}

pub fn alluvial_to_json(spec: &AlluvialSpec) -> AlluvialJson {
    AlluvialJson {
        universe: spec.universe,
        axes: spec
            .axes
            .iter()
            .map(|axis| AxisJson {
                name: axis.name.clone(),
                clusters: axis
                    .clusters
                    .iter()
                    .map(|c| ClusterJson {
                        id: c.id.0,
                        label: c.label.clone(),
                        size: c.size,
                    })
                    .collect(),
            })
            .collect(),
        flows: spec
            .flows
            .iter()
            .map(|f| FlowJson {
                axis: f.axis,
                left: f.left.0,
                right: f.right.0,
                count: f.count,
            })
            .collect(),
    }
}

pub fn write_alluvial_json(spec: &AlluvialSpec, path: &Path) -> std::io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut writer, &alluvial_to_json(spec))?;
    writer.write_all(b"\n")?;
    writer.flush()
}
