use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

use super::components::{strong_component_stats, weak_component_count};
use super::knn::{knn_graph, KnnGraph};
use super::mst::{mst, mst_depth_median};

/// Exact half-integer, stored doubled (`HalfInt::from_doubled(3)` is 1.5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_int(v: i64) -> Self {
        Self(2 * v)
    }

    pub const fn from_doubled(v: i64) -> Self {
        Self(v)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0.div_euclid(2);
        if self.0.rem_euclid(2) == 0 {
            write!(f, "{whole}")
        } else if self.0 < 0 && whole == -1 {
            write!(f, "-0.5")
        } else if self.0 < 0 {
            write!(f, "{}.5", whole + 1)
        } else {
            write!(f, "{whole}.5")
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a half-integer: {s:?}"));
        let v: f64 = s.trim().parse().map_err(|_| bad())?;
        let doubled = v * 2.0;
        if doubled.fract() != 0.0 || !doubled.is_finite() {
            return Err(bad());
        }
        Ok(Self(doubled as i64))
    }
}

/// Archive key: the discrete feature values of an instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoxKey(Vec<HalfInt>);

impl BoxKey {
    pub fn new(values: Vec<HalfInt>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[HalfInt] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for BoxKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for BoxKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(';')
            .map(HalfInt::from_str)
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl Serialize for BoxKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoxKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// Size of the largest strongly connected component of the k-NNG.
    NngStrongComponentsMax,
    /// Number of weakly connected components of the k-NNG.
    NngNWeak,
    /// Number of strongly connected components of the k-NNG.
    NngNStrong,
    /// Median node depth in the MST rooted at node 0.
    MstDepthMedian,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::NngStrongComponentsMax => "nng_strong_components_max",
            FeatureKind::NngNWeak => "nng_n_weak",
            FeatureKind::NngNStrong => "nng_n_strong",
            FeatureKind::MstDepthMedian => "mst_depth_median",
        }
    }

    fn uses_knn(self) -> bool {
        !matches!(self, FeatureKind::MstDepthMedian)
    }
}

/// One feature of a set, e.g. `nng_n_weak` on the 3-NNG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub feature: FeatureKind,
    /// Neighborhood size; ignored by MST features.
    #[serde(default)]
    pub k: usize,
}

impl FeatureSpec {
    pub const fn new(feature: FeatureKind, k: usize) -> Self {
        Self { feature, k }
    }

    pub fn label(&self) -> String {
        if self.feature.uses_knn() {
            let rest = self.feature.name().trim_start_matches("nng_");
            format!("nng_{}_{rest}", self.k)
        } else {
            self.feature.name().to_string()
        }
    }

    /// Closed range of values the feature can take on an `n`-city instance.
    pub fn bounds(&self, n: usize) -> (f64, f64) {
        let n = n as f64;
        match self.feature {
            FeatureKind::NngStrongComponentsMax | FeatureKind::NngNStrong => (1.0, n),
            FeatureKind::NngNWeak => (1.0, n - self.k as f64),
            FeatureKind::MstDepthMedian => (0.0, n - 1.0),
        }
    }

    /// Affine map of [`FeatureSpec::bounds`] onto `[0, 1]`.
    pub fn normalize(&self, value: f64, n: usize) -> Result<f64> {
        let (lo, hi) = self.bounds(n);
        if !(lo..=hi).contains(&value) {
            return Err(Error::FeatureOutOfBounds {
                feature: self.label(),
                value,
                lower: lo,
                upper: hi,
            });
        }
        if hi == lo {
            return Ok(0.0);
        }
        Ok((value - lo) / (hi - lo))
    }
}

/// See [`FeatureSpec::normalize`].
pub fn normalize_feature(value: f64, feature: &FeatureSpec, n: usize) -> Result<f64> {
    feature.normalize(value, n)
}

/// Named, ordered list of features that spans the archive's box grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub id: String,
    pub features: Vec<FeatureSpec>,
}

impl FeatureSet {
    /// Max SCC size and weak-component count of the 3-NNG.
    pub fn fc1() -> Self {
        Self {
            id: "FC1".into(),
            features: vec![
                FeatureSpec::new(FeatureKind::NngStrongComponentsMax, 3),
                FeatureSpec::new(FeatureKind::NngNWeak, 3),
            ],
        }
    }

    /// SCC count of the 5-NNG and median MST depth.
    pub fn fc2() -> Self {
        Self {
            id: "FC2".into(),
            features: vec![
                FeatureSpec::new(FeatureKind::NngNStrong, 5),
                FeatureSpec::new(FeatureKind::MstDepthMedian, 0),
            ],
        }
    }

    pub fn builtin(id: &str) -> Result<Self> {
        match id {
            "FC1" => Ok(Self::fc1()),
            "FC2" => Ok(Self::fc2()),
            _ => Err(Error::UnknownId {
                kind: "feature set",
                id: id.into(),
            }),
        }
    }

    pub fn custom(id: impl Into<String>, features: Vec<FeatureSpec>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidParameter("feature set must not be empty".into()));
        }
        if let Some(f) = features.iter().find(|f| f.feature.uses_knn() && f.k == 0) {
            return Err(Error::InvalidParameter(format!("{} needs k >= 1", f.feature.name())));
        }
        Ok(Self {
            id: id.into(),
            features,
        })
    }

    pub fn arity(&self) -> usize {
        self.features.len()
    }

    /// Smallest city count for which every feature is defined.
    pub fn min_cities(&self) -> usize {
        self.features
            .iter()
            .map(|f| if f.feature.uses_knn() { f.k + 1 } else { 2 })
            .max()
            .unwrap_or(2)
    }

    pub fn labels(&self) -> Vec<String> {
        self.features.iter().map(FeatureSpec::label).collect()
    }

    /// Computes the box key of `instance`. Pure and deterministic.
    pub fn evaluate(&self, instance: &Instance) -> Result<BoxKey> {
        let points = instance.points();
        if points.len() < self.min_cities() {
            return Err(Error::InvalidParameter(format!(
                "feature set {} needs n >= {}, got {}",
                self.id,
                self.min_cities(),
                points.len()
            )));
        }
        let mut graphs: Vec<(usize, KnnGraph)> = Vec::new();
        let mut values = Vec::with_capacity(self.features.len());
        for spec in &self.features {
            let value = match spec.feature {
                FeatureKind::MstDepthMedian => mst_depth_median(&mst(points)?),
                kind => {
                    let g = match graphs.iter().position(|(k, _)| *k == spec.k) {
                        Some(i) => &graphs[i].1,
                        None => {
                            graphs.push((spec.k, knn_graph(points, spec.k)?));
                            &graphs.last().unwrap().1
                        }
                    };
                    let v = match kind {
                        FeatureKind::NngNWeak => weak_component_count(g),
                        FeatureKind::NngNStrong => strong_component_stats(g).0,
                        FeatureKind::NngStrongComponentsMax => strong_component_stats(g).1,
                        FeatureKind::MstDepthMedian => unreachable!(),
                    };
                    HalfInt::from_int(v as i64)
                }
            };
            values.push(value);
        }
        Ok(BoxKey(values))
    }

    /// Normalized coordinates of a key, for plotting.
    pub fn normalize_key(&self, key: &BoxKey, n: usize) -> Result<Vec<f64>> {
        self.features
            .iter()
            .zip(key.values())
            .map(|(f, v)| f.normalize(v.to_f64(), n))
            .collect()
    }
}

/// Feature vector of an instance under a feature set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector {
    pub feature_set_id: String,
    pub values: BoxKey,
}

/// Computes the feature vector of `instance` under a registered set id.
pub fn feature_vector(instance: &Instance, feature_set_id: &str) -> Result<FeatureVector> {
    let set = FeatureSet::builtin(feature_set_id)?;
    Ok(FeatureVector {
        feature_set_id: set.id.clone(),
        values: set.evaluate(instance)?,
    })
}
