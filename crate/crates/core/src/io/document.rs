//! The JSON document format for instances.
//!
//! A document looks like:
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "n": 3,
//!   "agents": [
//!     { "id": 1, "ranks": [1, 0, 2, 2] },
//!     { "id": 2, "ranks": [1, 0, 2, 2], "accept": [3] },
//!     { "id": 3, "ranks": [0, 1, 1, 1], "reject": [1] }
//!   ]
//! }
//! ```
//!
//! Agent ids are 1-based and must form a permutation of `1..=n`; file order
//! is free. `ranks` assigns each outcome a rank with lower meaning better;
//! index 0 is the outside option and no other outcome may tie with it.
//! `accept` and `reject` (optional, default empty) list 1-based ids of
//! agents whose presence the agent requires or forbids.
//!
//! A top-level `"slots": m` turns the document into a multi-slot instance:
//! `ranks` then has `m*n + 1` entries — the outside option followed by the
//! `n` sizes of slot 1, then slot 2, and so on — and `accept`/`reject` must
//! stay empty.

use serde::{Deserialize, Serialize};

use crate::asip::{MultiSlotError, MultiSlotInstance};
use crate::instance::{GsipInstance, InstanceError};
use crate::prefs::{PreferenceError, PreferenceOrder};

/// The only schema version this build reads and writes.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Doc {
    schema_version: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slots: Option<usize>,
    agents: Vec<DocAgent>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DocAgent {
    id: usize,
    ranks: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    accept: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reject: Vec<usize>,
}

/// What a document describes. Ids in all errors are 1-based to match the
/// file; the returned instances index agents from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedDocument {
    Single(GsipInstance),
    MultiSlot(MultiSlotInstance),
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("document is not valid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported schema_version {found:?}, expected {SCHEMA_VERSION:?}")]
    SchemaVersion { found: String },
    #[error("n must be at least 1")]
    NoAgents,
    #[error("n = {expected} but the document lists {found} agents")]
    AgentCount { expected: usize, found: usize },
    #[error("agent id {id} is outside 1..={n}")]
    IdOutOfRange { id: usize, n: usize },
    #[error("agent id {id} appears more than once")]
    DuplicateId { id: usize },
    #[error("agent {id}: ranks has {found} entries, expected {expected}")]
    RankLength {
        id: usize,
        expected: usize,
        found: usize,
    },
    #[error("agent {id}: {source}")]
    Preference {
        id: usize,
        source: PreferenceError,
    },
    #[error("agent {id}: {field} references id {referenced}, outside 1..={n}")]
    BadReference {
        id: usize,
        field: &'static str,
        referenced: usize,
        n: usize,
    },
    #[error("agent {id}: {field} lists the agent itself")]
    SelfReference { id: usize, field: &'static str },
    #[error("agent {id}: accept/reject sets are not supported with slots")]
    ConstrainedMultiSlot { id: usize },
    #[error("agent {id}, slot {slot}: size {size} ties with the outside option")]
    SlotTie { id: usize, slot: usize, size: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    MultiSlot(#[from] MultiSlotError),
}

/// Parses and validates a document.
pub fn parse_instance(text: &str) -> Result<ParsedDocument, ParseError> {
    let doc: Doc = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ParseError::SchemaVersion {
            found: doc.schema_version,
        });
    }
    let n = doc.n;
    if n == 0 {
        return Err(ParseError::NoAgents);
    }
    if doc.agents.len() != n {
        return Err(ParseError::AgentCount {
            expected: n,
            found: doc.agents.len(),
        });
    }
    let mut by_id: Vec<Option<DocAgent>> = vec![None; n];
    for agent in doc.agents {
        if agent.id == 0 || agent.id > n {
            return Err(ParseError::IdOutOfRange { id: agent.id, n });
        }
        let cell = &mut by_id[agent.id - 1];
        if cell.is_some() {
            return Err(ParseError::DuplicateId { id: agent.id });
        }
        *cell = Some(agent);
    }
    let agents: Vec<DocAgent> = by_id
        .into_iter()
        .map(|a| a.expect("n distinct in-range ids fill every cell"))
        .collect();

    if let Some(slots) = doc.slots {
        if slots == 0 {
            return Err(ParseError::MultiSlot(MultiSlotError::NoSlots));
        }
        let expected = slots * n + 1;
        for agent in &agents {
            if !agent.accept.is_empty() || !agent.reject.is_empty() {
                return Err(ParseError::ConstrainedMultiSlot { id: agent.id });
            }
            if agent.ranks.len() != expected {
                return Err(ParseError::RankLength {
                    id: agent.id,
                    expected,
                    found: agent.ranks.len(),
                });
            }
        }
        let ranks = agents.into_iter().map(|a| a.ranks).collect();
        let instance = MultiSlotInstance::new(n, slots, ranks).map_err(|e| match e {
            MultiSlotError::TiesWithOutside { agent, slot, size } => ParseError::SlotTie {
                id: agent + 1,
                slot,
                size,
            },
            other => ParseError::MultiSlot(other),
        })?;
        return Ok(ParsedDocument::MultiSlot(instance));
    }

    let mut prefs = Vec::with_capacity(n);
    let mut accept = Vec::with_capacity(n);
    let mut reject = Vec::with_capacity(n);
    for agent in agents {
        if agent.ranks.len() != n + 1 {
            return Err(ParseError::RankLength {
                id: agent.id,
                expected: n + 1,
                found: agent.ranks.len(),
            });
        }
        let id = agent.id;
        let map_refs = |list: &[usize], field: &'static str| {
            list.iter()
                .map(|&referenced| {
                    if referenced == 0 || referenced > n {
                        Err(ParseError::BadReference {
                            id,
                            field,
                            referenced,
                            n,
                        })
                    } else if referenced == id {
                        Err(ParseError::SelfReference { id, field })
                    } else {
                        Ok(referenced - 1)
                    }
                })
                .collect::<Result<Vec<usize>, ParseError>>()
        };
        accept.push(map_refs(&agent.accept, "accept")?);
        reject.push(map_refs(&agent.reject, "reject")?);
        prefs.push(
            PreferenceOrder::from_ranks(agent.ranks)
                .map_err(|source| ParseError::Preference { id, source })?,
        );
    }
    Ok(ParsedDocument::Single(GsipInstance::new(
        prefs, accept, reject,
    )?))
}

/// Serializes an instance as a pretty-printed document.
pub fn serialize_instance(inst: &GsipInstance) -> String {
    let n = inst.n();
    let agents = (0..n)
        .map(|i| DocAgent {
            id: i + 1,
            ranks: inst.preference(i).ranks().to_vec(),
            accept: inst.accept_set(i).iter().map(|&j| j + 1).collect(),
            reject: inst.reject_set(i).iter().map(|&j| j + 1).collect(),
        })
        .collect();
    render(Doc {
        schema_version: SCHEMA_VERSION.to_string(),
        n,
        slots: None,
        agents,
    })
}

/// Serializes a multi-slot instance as a pretty-printed document.
pub fn serialize_multislot(inst: &MultiSlotInstance) -> String {
    let agents = inst
        .ranks()
        .iter()
        .enumerate()
        .map(|(i, ranks)| DocAgent {
            id: i + 1,
            ranks: ranks.clone(),
            accept: vec![],
            reject: vec![],
        })
        .collect();
    render(Doc {
        schema_version: SCHEMA_VERSION.to_string(),
        n: inst.n(),
        slots: Some(inst.slots()),
        agents,
    })
}

fn render(doc: Doc) -> String {
    let mut out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    out.push('\n');
    out
}
