//! The evolvers: Map-Elites, the (mu+1) EA with and without archive, and the
//! diversity-optimizing EAs. All of them share the archive protocol, the
//! objective, the feature map and the mutation suite.

mod archive;
mod config;
pub mod indicator;
mod run;
mod runlog;

use std::sync::Arc;

use rand::RngCore;

use crate::error::Result;
use crate::graphfeat::{BoxKey, FeatureSet};
use crate::instance::Instance;
use crate::mutation::OperatorSuite;
use crate::solvers::TourRatio;

pub use archive::{sample_covered_box, Archive, ArchiveKind, BoxStats, Elite};
pub use config::{
    EdoParams, EvolverConfig, EvolverKind, FeatureSetConfig, SuiteConfig, SCHEMA_VERSION,
};
pub use run::{
    evolve_ea, evolve_edo, evolve_qd, run, run_ea, run_ea_archive, run_edo, run_qd, Individual,
    RunOutput, RunParams,
};
pub use runlog::{Event, EventKind, RunLog, Snapshot};

/// Minimized objective of an instance. Stochastic objectives draw from `rng`.
pub trait Objective: Send + Sync {
    fn evaluate(&self, instance: &Instance, rng: &mut dyn RngCore) -> f64;
}

impl Objective for TourRatio {
    fn evaluate(&self, instance: &Instance, rng: &mut dyn RngCore) -> f64 {
        self.evaluate_detailed(instance, rng).ratio
    }
}

/// Maps instances to archive boxes.
pub trait FeatureMap: Send + Sync {
    fn id(&self) -> &str;

    fn key(&self, instance: &Instance) -> Result<BoxKey>;

    /// Key coordinates scaled into `[0, 1]` for an `n`-city instance.
    fn normalize(&self, key: &BoxKey, n: usize) -> Result<Vec<f64>>;
}

impl FeatureMap for FeatureSet {
    fn id(&self) -> &str {
        &self.id
    }

    fn key(&self, instance: &Instance) -> Result<BoxKey> {
        self.evaluate(instance)
    }

    fn normalize(&self, key: &BoxKey, n: usize) -> Result<Vec<f64>> {
        self.normalize_key(key, n)
    }
}

/// Everything an evolver needs to know about the search space.
#[derive(Clone)]
pub struct Problem {
    pub n: usize,
    pub objective: Arc<dyn Objective>,
    pub features: Arc<dyn FeatureMap>,
    pub suite: OperatorSuite,
}

impl Problem {
    pub fn from_config(config: &EvolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            n: config.n,
            objective: Arc::new(TourRatio::from_spec(&config.objective)?),
            features: Arc::new(config.feature_set.build()?),
            suite: config.suite.build()?,
        })
    }
}
