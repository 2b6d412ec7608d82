//! Discrete instance features computed on k-nearest-neighbor graphs and
//! minimum spanning trees.

mod components;
mod feature;
mod knn;
mod mst;

pub use components::{
    strong_component_stats, strong_components, weak_component_count, weak_components,
};
pub use feature::{
    feature_vector, normalize_feature, BoxKey, FeatureKind, FeatureSet, FeatureSpec,
    FeatureVector, HalfInt,
};
pub use knn::{knn_graph, KnnGraph};
pub use mst::{mst, mst_depth_median, MstTree};
