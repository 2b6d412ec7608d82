use indexmap::IndexMap;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphfeat::BoxKey;
use crate::instance::Instance;

use super::runlog::EventKind;

/// Best instance found so far for one box, with its visit statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Elite {
    pub instance: Instance,
    pub objective: f64,
    /// Times an evaluated instance mapped to this box, the first hit included.
    pub hits: u64,
    /// Accepted replacements after the first hit.
    pub updates: u64,
    pub first_hit_iter: u64,
    pub last_update_iter: u64,
}

/// Bookkeeping part of an [`Elite`], without the instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub objective: f64,
    pub hits: u64,
    pub updates: u64,
    pub first_hit_iter: u64,
    pub last_update_iter: u64,
}

impl From<&Elite> for BoxStats {
    fn from(e: &Elite) -> Self {
        Self {
            objective: e.objective,
            hits: e.hits,
            updates: e.updates,
            first_hit_iter: e.first_hit_iter,
            last_update_iter: e.last_update_iter,
        }
    }
}

/// Whether the archive drives the search (Map-Elites, archived EAs) or only
/// records what a classic EA evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchiveKind {
    Elites,
    Footprint,
}

/// Map from box key to elite, in first-hit order.
#[derive(Debug, Clone)]
pub struct Archive {
    run_id: String,
    feature_set_id: String,
    kind: ArchiveKind,
    boxes: IndexMap<BoxKey, Elite>,
}

impl Archive {
    pub fn new(run_id: impl Into<String>, feature_set_id: impl Into<String>, kind: ArchiveKind) -> Self {
        Self {
            run_id: run_id.into(),
            feature_set_id: feature_set_id.into(),
            kind,
            boxes: IndexMap::new(),
        }
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }

    pub fn feature_set_id(&self) -> &str {
        &self.feature_set_id
    }

    pub fn kind(&self) -> ArchiveKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn get(&self, key: &BoxKey) -> Option<&Elite> {
        self.boxes.get(key)
    }

    pub fn contains(&self, key: &BoxKey) -> bool {
        self.boxes.contains_key(key)
    }

    /// Boxes in first-hit order.
    pub fn iter(&self) -> impl Iterator<Item = (&BoxKey, &Elite)> {
        self.boxes.iter()
    }

    pub fn stats(&self) -> IndexMap<BoxKey, BoxStats> {
        self.boxes.iter().map(|(k, e)| (k.clone(), e.into())).collect()
    }

    /// Stores `instance` if its box is empty, replaces the elite if the
    /// instance is not worse (`<=`), and otherwise only counts the hit.
    pub fn offer(&mut self, key: BoxKey, instance: &Instance, objective: f64, iteration: u64) -> EventKind {
        match self.boxes.get_mut(&key) {
            None => {
                self.boxes.insert(
                    key,
                    Elite {
                        instance: instance.clone(),
                        objective,
                        hits: 1,
                        updates: 0,
                        first_hit_iter: iteration,
                        last_update_iter: iteration,
                    },
                );
                EventKind::FirstHit
            }
            Some(elite) => {
                elite.hits += 1;
                if objective <= elite.objective {
                    elite.instance = instance.clone();
                    elite.objective = objective;
                    elite.updates += 1;
                    elite.last_update_iter = iteration;
                    EventKind::Update
                } else {
                    EventKind::Hit
                }
            }
        }
    }

    /// Uniformly random covered box.
    pub fn sample_key(&self, rng: &mut dyn RngCore) -> Result<&BoxKey> {
        match self.boxes.len() {
            0 => Err(Error::EmptyArchive),
            1 => Ok(self.boxes.get_index(0).unwrap().0),
            m => Ok(self.boxes.get_index(rng.random_range(0..m)).unwrap().0),
        }
    }

    /// Best (smallest) objective over all boxes.
    pub fn best(&self) -> Option<(&BoxKey, &Elite)> {
        self.boxes
            .iter()
            .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective))
    }
}

/// Uniformly random covered box key.
pub fn sample_covered_box(archive: &Archive, rng: &mut dyn RngCore) -> Result<BoxKey> {
    archive.sample_key(rng).cloned()
}
