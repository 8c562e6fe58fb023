//! Simulation traces and their JSON-lines form.
//!
//! The server log is what a curious server sees (the apparent profiles); the
//! truth log records who really issued each query (the real profiles).

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque query identifier. Copies of a repeated query share an id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QueryId(pub u64);

impl fmt::Display for QueryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Upir1,
    Upir2,
}

impl ProtocolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Upir1 => "upir1",
            ProtocolKind::Upir2 => "upir2",
        }
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upir1" => Ok(ProtocolKind::Upir1),
            "upir2" => Ok(ProtocolKind::Upir2),
            other => Err(Error::Parameter(format!("unknown protocol {other:?} (upir1|upir2)"))),
        }
    }
}

/// A query forwarded to the server by `proxy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerRecord {
    pub step: u64,
    pub proxy: usize,
    pub query_id: QueryId,
}

/// A query written to a communication space by its owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub step: u64,
    pub owner: usize,
    pub query_id: QueryId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum Action {
    /// The user opened the line's queue.
    Scan,
    Forward { query_id: QueryId },
    Collect { query_id: QueryId },
    Post { query_id: QueryId, addressee: usize },
}

/// One thing a user did to a communication space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityEvent {
    pub step: u64,
    pub user: usize,
    pub line: usize,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    pub protocol: Option<ProtocolKind>,
    pub self_submission: Option<f64>,
    pub steps: u64,
    pub seed: u64,
    pub point_count: usize,
    pub line_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub params: TraceParams,
    pub server_log: Vec<ServerRecord>,
    pub truth_log: Vec<TruthRecord>,
    /// Community-side events. Not part of the JSON-lines form.
    pub events: Vec<CommunityEvent>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum JsonlRecord {
    Params {
        version: String,
        #[serde(flatten)]
        params: TraceParams,
    },
    Truth(TruthRecord),
    Server(ServerRecord),
}

impl SimulationTrace {
    pub fn new(params: TraceParams) -> Self {
        Self { params, server_log: Vec::new(), truth_log: Vec::new(), events: Vec::new() }
    }

    /// Owner of a query id according to the truth log.
    pub fn owner_of(&self, query_id: QueryId) -> Option<usize> {
        self.truth_log.iter().find(|t| t.query_id == query_id).map(|t| t.owner)
    }

    pub fn owners(&self) -> HashMap<QueryId, usize> {
        let mut map = HashMap::new();
        for t in &self.truth_log {
            map.entry(t.query_id).or_insert(t.owner);
        }
        map
    }

    pub fn issued_count(&self) -> usize {
        self.truth_log.len()
    }

    pub fn forwarded_count(&self) -> usize {
        self.server_log.len()
    }

    /// Writes the params header, then truth and server records merged by
    /// step (truth first within a step).
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let header = JsonlRecord::Params {
            version: crate::VERSION.to_owned(),
            params: self.params.clone(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        let (mut t, mut s) = (0, 0);
        while t < self.truth_log.len() || s < self.server_log.len() {
            let take_truth = match (self.truth_log.get(t), self.server_log.get(s)) {
                (Some(tr), Some(sr)) => tr.step <= sr.step,
                (Some(_), None) => true,
                _ => false,
            };
            let record = if take_truth {
                t += 1;
                JsonlRecord::Truth(self.truth_log[t - 1])
            } else {
                s += 1;
                JsonlRecord::Server(self.server_log[s - 1])
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Reads a trace written by [`SimulationTrace::write_jsonl`]. Events are
    /// not stored in that form and come back empty.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut params = None;
        let mut server_log = Vec::new();
        let mut truth_log = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: JsonlRecord = serde_json::from_str(line).map_err(|e| Error::TraceParse {
                line: i + 1,
                message: e.to_string(),
            })?;
            match record {
                JsonlRecord::Params { params: p, .. } => {
                    if params.replace(p).is_some() {
                        return Err(Error::TraceParse { line: i + 1, message: "second params record".into() });
                    }
                }
                JsonlRecord::Truth(t) => truth_log.push(t),
                JsonlRecord::Server(s) => server_log.push(s),
            }
        }
        let params = params.ok_or(Error::TraceParse { line: 1, message: "missing params record".into() })?;
        Ok(Self { params, server_log, truth_log, events: Vec::new() })
    }
}
