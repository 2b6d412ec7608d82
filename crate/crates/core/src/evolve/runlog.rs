use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphfeat::BoxKey;

use super::archive::{Archive, BoxStats};

/// Outcome of offering an evaluated instance to the archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// The box was empty; the instance was stored unconditionally.
    FirstHit,
    /// The box was covered and the instance was not worse than its elite.
    Update,
    /// The box was covered and the instance was worse; only `hits` grew.
    Hit,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::FirstHit => "first_hit",
            EventKind::Update => "update",
            EventKind::Hit => "hit",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first_hit" => Ok(EventKind::FirstHit),
            "update" => Ok(EventKind::Update),
            "hit" => Ok(EventKind::Hit),
            _ => Err(Error::InvalidParameter(format!("unknown event kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub iteration: u64,
    pub kind: EventKind,
    pub key: BoxKey,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iteration: u64,
    pub covered: u64,
}

/// Every archive offer of a run (iteration 0 holds the initialization),
/// plus coverage snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub run_id: String,
    pub events: Vec<Event>,
    pub snapshots: Vec<Snapshot>,
}

#[derive(Serialize, Deserialize)]
struct EventRow {
    iteration: u64,
    kind: String,
    key: String,
    objective: f64,
}

impl RunLog {
    pub fn new(run_id: impl Into<String>) -> Self {
        Self {
            run_id: run_id.into(),
            events: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub fn push(&mut self, iteration: u64, kind: EventKind, key: BoxKey, objective: f64) {
        debug_assert!(self.events.last().is_none_or(|e| e.iteration <= iteration));
        self.events.push(Event {
            iteration,
            kind,
            key,
            objective,
        });
    }

    pub fn first_hits(&self) -> u64 {
        self.count(EventKind::FirstHit)
    }

    pub fn count(&self, kind: EventKind) -> u64 {
        self.events.iter().filter(|e| e.kind == kind).count() as u64
    }

    /// Records the current coverage, computed from the first hits so far.
    pub fn snapshot(&mut self, iteration: u64) {
        let covered = self.first_hits();
        if self.snapshots.last().is_some_and(|s| s.iteration == iteration) {
            return;
        }
        self.snapshots.push(Snapshot { iteration, covered });
    }

    /// Rebuilds per-box statistics by re-applying every event.
    pub fn replay(&self) -> Result<IndexMap<BoxKey, BoxStats>> {
        let mut boxes: IndexMap<BoxKey, BoxStats> = IndexMap::new();
        for e in &self.events {
            match (e.kind, boxes.get_mut(&e.key)) {
                (EventKind::FirstHit, None) => {
                    boxes.insert(
                        e.key.clone(),
                        BoxStats {
                            objective: e.objective,
                            hits: 1,
                            updates: 0,
                            first_hit_iter: e.iteration,
                            last_update_iter: e.iteration,
                        },
                    );
                }
                (EventKind::Update, Some(s)) if e.objective <= s.objective => {
                    s.hits += 1;
                    s.updates += 1;
                    s.objective = e.objective;
                    s.last_update_iter = e.iteration;
                }
                (EventKind::Hit, Some(s)) if e.objective > s.objective => {
                    s.hits += 1;
                }
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "inconsistent {} event for box {} at iteration {}",
                        e.kind, e.key, e.iteration
                    )))
                }
            }
        }
        Ok(boxes)
    }

    /// Whether replaying the log reproduces the archive's statistics exactly.
    pub fn reproduces(&self, archive: &Archive) -> Result<bool> {
        Ok(self.replay()? == archive.stats())
    }

    pub fn write_events_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for e in &self.events {
            wtr.serialize(EventRow {
                iteration: e.iteration,
                kind: e.kind.to_string(),
                key: e.key.to_string(),
                objective: e.objective,
            })?;
        }
        if self.events.is_empty() {
            wtr.write_record(["iteration", "kind", "key", "objective"])?;
        }
        wtr.flush().map_err(|e| Error::io("<runlog>", e))?;
        Ok(())
    }

    pub fn write_snapshots_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for s in &self.snapshots {
            wtr.serialize(s)?;
        }
        if self.snapshots.is_empty() {
            wtr.write_record(["iteration", "covered"])?;
        }
        wtr.flush().map_err(|e| Error::io("<coverage>", e))?;
        Ok(())
    }

    pub fn read_csv<R1: Read, R2: Read>(run_id: &str, events: R1, snapshots: R2) -> Result<Self> {
        let mut log = RunLog::new(run_id);
        for row in csv::Reader::from_reader(events).deserialize() {
            let row: EventRow = row?;
            log.events.push(Event {
                iteration: row.iteration,
                kind: row.kind.parse()?,
                key: row.key.parse()?,
                objective: row.objective,
            });
        }
        for row in csv::Reader::from_reader(snapshots).deserialize() {
            log.snapshots.push(row?);
        }
        if log.events.windows(2).any(|w| w[0].iteration > w[1].iteration) {
            return Err(Error::InvalidParameter("event iterations are not sorted".into()));
        }
        Ok(log)
    }
}
