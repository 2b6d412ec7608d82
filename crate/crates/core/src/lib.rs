//! Quality-diversity evolution of Euclidean TSP instances.
//!
//! Instances are mapped to discrete feature vectors (k-NNG component
//! statistics, MST depth); each feature combination is a box of the archive
//! that keeps the instance with the smallest tour-length ratio between two
//! construction heuristics. Besides the Map-Elites evolver the crate ships
//! the (mu+1) EA baselines, with and without archive, and two
//! diversity-optimizing EAs, plus the analytics used to compare them.

pub mod analytics;
pub mod campaign;
pub mod error;
pub mod evolve;
pub mod graphfeat;
pub mod instance;
pub mod mutation;
pub mod solvers;

pub use error::{Error, Result};
pub use evolve::{
    Archive, Elite, EvolverConfig, EvolverKind, EventKind, RunLog, RunOutput,
};
pub use graphfeat::{BoxKey, FeatureSet, FeatureVector, HalfInt};
pub use instance::{load_instance, rue_instance, save_instance, Instance, Point, Provenance};
pub use mutation::{mutate, Operator, OperatorSuite};
pub use solvers::{ObjectiveSpec, Tour, TourRatio};
