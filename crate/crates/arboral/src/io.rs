//! Serialization: the instance text format, content hashing, and the JSON
//! and CSV report builders.
//!
//! Builders return strings and never touch the filesystem, so every format
//! is testable byte for byte. All output is deterministic: struct fields
//! serialize in declaration order and collections are emitted in their
//! stored (sorted) order.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{LemmaCheck, LemmaReport};
use crate::geometry::{Instance, InstanceError, Point};
use crate::greedy::GreedyTrace;
use crate::oracle::{OracleResult, OracleStatus, RatioReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected a key, found {text:?}")]
    BadInteger { line: usize, text: String },
    #[error("line {line}: key {key} is out of range 1..={n}")]
    KeyOutOfRange { line: usize, key: u32, n: u32 },
    #[error("line {line}: key {key} accessed twice (first on line {first_line})")]
    RepeatedKey { line: usize, first_line: usize, key: u32 },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Parse the instance text format: one key per line, in access order.
/// Blank lines and lines starting with '#' are skipped. Validation errors
/// name the offending source line, comments and blanks included.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut access = Vec::new();
    let mut line_of = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let key: u32 = line
            .parse()
            .map_err(|_| ParseError::BadInteger { line: i + 1, text: line.to_string() })?;
        access.push(key);
        line_of.push(i + 1);
    }
    Instance::new(access).map_err(|err| match err {
        InstanceError::KeyOutOfRange { time, key, n } => {
            ParseError::KeyOutOfRange { line: line_of[time as usize - 1], key, n }
        }
        InstanceError::RepeatedKey { key, first, second } => ParseError::RepeatedKey {
            line: line_of[second as usize - 1],
            first_line: line_of[first as usize - 1],
            key,
        },
        other => ParseError::Instance(other),
    })
}

/// The canonical text encoding: each key on its own line, trailing newline.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    for &key in instance.accesses() {
        out.push_str(&key.to_string());
        out.push('\n');
    }
    out
}

/// SHA-256 of the canonical text encoding, as lowercase hex. This is the
/// identity every report carries so outputs can be matched to inputs.
pub fn instance_hash(instance: &Instance) -> String {
    let digest = Sha256::digest(write_instance(instance).as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{:02x}", byte));
    }
    out
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct TraceStepRecord {
    t: u32,
    added_x: Vec<u32>,
}

/// Trace file shape. Added points on line t are recorded by x alone.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TraceFile {
    n: u32,
    access: Vec<u32>,
    steps: Vec<TraceStepRecord>,
    instance_hash: String,
}

impl TraceFile {
    pub fn from_trace(trace: &GreedyTrace) -> Self {
        TraceFile {
            n: trace.n(),
            access: trace.instance().accesses().to_vec(),
            steps: trace
                .steps()
                .iter()
                .map(|s| TraceStepRecord {
                    t: s.access.y,
                    added_x: s.added.iter().map(|p| p.x).collect(),
                })
                .collect(),
            instance_hash: instance_hash(trace.instance()),
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

/// Per-step CSV: one row per access with the added count and running total.
/// The first line pins the instance identity as a comment.
pub fn stats_csv(trace: &GreedyTrace) -> String {
    let mut out = String::new();
    out.push_str(&format!("# instance_hash={}\n", instance_hash(trace.instance())));
    out.push_str("t,access_key,num_added,cumulative_added\n");
    let mut total = 0usize;
    for step in trace.steps() {
        total += step.added.len();
        out.push_str(&format!(
            "{},{},{},{}\n",
            step.access.y,
            step.access.x,
            step.added.len(),
            total
        ));
    }
    out
}

/// Oracle result file shape. `size` and `points` are null when the search
/// gave up before finding a solution.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OracleFile {
    n: u32,
    status: String,
    size: Option<usize>,
    points: Option<Vec<[u32; 2]>>,
    nodes_expanded: u64,
}

impl OracleFile {
    pub fn from_result(n: u32, result: &OracleResult) -> Self {
        OracleFile {
            n,
            status: match result.status {
                OracleStatus::Exact => "exact".to_string(),
                OracleStatus::BudgetExhausted => "budget_exhausted".to_string(),
            },
            size: result.added.as_ref().map(|pts| pts.len()),
            points: result
                .added
                .as_ref()
                .map(|pts| pts.iter().map(|p| [p.x, p.y]).collect()),
            nodes_expanded: result.nodes_expanded,
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

#[derive(Debug, Serialize)]
struct CheckRecord {
    lemma: &'static str,
    holds: bool,
    soft: bool,
    measured: i64,
    bound: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

impl CheckRecord {
    fn from_check(check: &LemmaCheck) -> Self {
        CheckRecord {
            lemma: check.lemma.as_str(),
            holds: check.holds,
            soft: check.soft,
            measured: check.measured,
            bound: check.bound,
            witness: check.witness.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct PartitionRecord {
    /// [p_lo, p_hi, q_lo, q_hi]
    partition: [u32; 4],
    checks: Vec<CheckRecord>,
}

/// Verification report file shape: the global bound plus every checked
/// partition.
#[derive(Debug, Serialize)]
pub struct VerifyFile {
    n: u32,
    instance_hash: String,
    added: usize,
    all_hard_hold: bool,
    global: CheckRecord,
    partitions: Vec<PartitionRecord>,
}

impl VerifyFile {
    pub fn new(trace: &GreedyTrace, global: &LemmaCheck, reports: &[LemmaReport]) -> Self {
        let all_hard_hold = global.holds && reports.iter().all(|r| r.all_hard_hold());
        VerifyFile {
            n: trace.n(),
            instance_hash: instance_hash(trace.instance()),
            added: trace.added_count(),
            all_hard_hold,
            global: CheckRecord::from_check(global),
            partitions: reports
                .iter()
                .map(|r| PartitionRecord {
                    partition: [
                        r.partition.p_block().lo(),
                        r.partition.p_block().hi(),
                        r.partition.q_block().lo(),
                        r.partition.q_block().hi(),
                    ],
                    checks: r.checks.iter().map(CheckRecord::from_check).collect(),
                })
                .collect(),
        }
    }

    pub fn all_hard_hold(&self) -> bool {
        self.all_hard_hold
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

/// One row of the growth-curve CSV.
pub struct ScaleRow {
    pub n: u32,
    pub seed: u64,
    pub added: usize,
    pub bound: u64,
    pub instance_hash: String,
}

/// Growth-curve CSV: added points against the proven bound, one row per
/// (n, seed). `ratio` is added / (n ceil(log2 n)), 0 when n = 1.
pub fn scale_csv(rows: &[ScaleRow]) -> String {
    let mut out = String::from("n,seed,added,bound,ratio,instance_hash\n");
    for row in rows {
        let denom = row.n as f64 * crate::oracle::ceil_log2(row.n) as f64;
        let ratio = if denom == 0.0 { 0.0 } else { row.added as f64 / denom };
        out.push_str(&format!(
            "{},{},{},{},{:.6},{}\n",
            row.n, row.seed, row.added, row.bound, ratio, row.instance_hash
        ));
    }
    out
}

/// Competitive-ratio report file shape: per-instance rows plus aggregates
/// over the rows the oracle solved exactly.
pub fn ratio_json(report: &RatioReport) -> String {
    #[derive(Serialize)]
    struct RowRecord {
        index: usize,
        n: u32,
        greedy: u64,
        opt: Option<u64>,
        ratio: Option<f64>,
        status: &'static str,
    }
    #[derive(Serialize)]
    struct FileRecord {
        rows: Vec<RowRecord>,
        exact_rows: usize,
        max_ratio: Option<f64>,
        mean_ratio: Option<f64>,
    }
    let rows: Vec<RowRecord> = report
        .rows
        .iter()
        .map(|r| RowRecord {
            index: r.index,
            n: r.n,
            greedy: r.greedy_total,
            opt: r.opt_total,
            ratio: r.ratio,
            status: match r.status {
                OracleStatus::Exact => "exact",
                OracleStatus::BudgetExhausted => "budget_exhausted",
            },
        })
        .collect();
    let exact_rows = report.rows.iter().filter(|r| r.opt_total.is_some()).count();
    to_pretty_json(&FileRecord {
        rows,
        exact_rows,
        max_ratio: report.max_ratio,
        mean_ratio: report.mean_ratio,
    })
}

/// Point-set JSON: a sorted list of [x, y] pairs.
pub fn points_json(points: &[Point]) -> String {
    let pairs: Vec<[u32; 2]> = points.iter().map(|p| [p.x, p.y]).collect();
    to_pretty_json(&pairs)
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types always serialize");
    out.push('\n');
    out
}
