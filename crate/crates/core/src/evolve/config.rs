use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graphfeat::{FeatureSet, FeatureSpec};
use crate::mutation::{OperatorConfig, OperatorSuite};
use crate::solvers::ObjectiveSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolverKind {
    /// Classic (mu+1) EA; the archive is a passive footprint.
    Ea,
    /// (mu+1) EA that also maintains an elite archive.
    EaArchive,
    /// Map-Elites.
    Qd,
    /// Diversity-optimizing EA with inverted generational distance.
    EdoIgd,
    /// Diversity-optimizing EA with dimension-doubled hypervolume.
    EdoHv,
}

impl EvolverKind {
    pub fn id(self) -> &'static str {
        match self {
            EvolverKind::Ea => "ea",
            EvolverKind::EaArchive => "ea_archive",
            EvolverKind::Qd => "qd",
            EvolverKind::EdoIgd => "edo_igd",
            EvolverKind::EdoHv => "edo_hv",
        }
    }

    pub fn is_edo(self) -> bool {
        matches!(self, EvolverKind::EdoIgd | EvolverKind::EdoHv)
    }
}

impl fmt::Display for EvolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `"simple"`, `"all"`, or an explicit operator list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SuiteConfig {
    Named(String),
    Custom {
        id: String,
        operators: Vec<OperatorConfig>,
    },
}

impl SuiteConfig {
    pub fn id(&self) -> &str {
        match self {
            SuiteConfig::Named(id) | SuiteConfig::Custom { id, .. } => id,
        }
    }

    pub fn build(&self) -> Result<OperatorSuite> {
        match self {
            SuiteConfig::Named(id) => OperatorSuite::builtin(id),
            SuiteConfig::Custom { id, operators } => OperatorSuite::custom(id.clone(), operators.clone()),
        }
    }
}

/// `"FC1"`, `"FC2"`, or an explicit list of (feature, k) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureSetConfig {
    Named(String),
    Custom { id: String, features: Vec<FeatureSpec> },
}

impl FeatureSetConfig {
    pub fn id(&self) -> &str {
        match self {
            FeatureSetConfig::Named(id) | FeatureSetConfig::Custom { id, .. } => id,
        }
    }

    pub fn build(&self) -> Result<FeatureSet> {
        match self {
            FeatureSetConfig::Named(id) => FeatureSet::builtin(id),
            FeatureSetConfig::Custom { id, features } => FeatureSet::custom(id.clone(), features.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdoParams {
    /// Mutants are eligible for the population iff their objective is at
    /// most `(1 + alpha)` times the best known one.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Iterations of the (1+1) EA that produces the initial champion. Not
    /// counted against the budget.
    #[serde(default = "default_warmup")]
    pub warmup: u64,
}

fn default_alpha() -> f64 {
    0.1
}

fn default_warmup() -> u64 {
    10_000
}

impl Default for EdoParams {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            warmup: default_warmup(),
        }
    }
}

/// Complete description of one evolver run. Serialized as the run config
/// file (`schema: 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolverConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub evolver: EvolverKind,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Objective evaluations in the main loop.
    pub budget: u64,
    #[serde(default = "default_mu")]
    pub mu: usize,
    #[serde(default = "default_suite")]
    pub suite: SuiteConfig,
    #[serde(default = "default_feature_set")]
    pub feature_set: FeatureSetConfig,
    #[serde(default = "ObjectiveSpec::fi_vs_ni")]
    pub objective: ObjectiveSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: u64,
    #[serde(default)]
    pub edo: EdoParams,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_n() -> usize {
    100
}

fn default_mu() -> usize {
    1
}

fn default_suite() -> SuiteConfig {
    SuiteConfig::Named("all".into())
}

fn default_feature_set() -> FeatureSetConfig {
    FeatureSetConfig::Named("FC1".into())
}

fn default_snapshot_every() -> u64 {
    1000
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "schema",
    "evolver",
    "n",
    "budget",
    "mu",
    "suite",
    "feature_set",
    "objective",
    "seed",
    "snapshot_every",
    "edo",
];
const OBJECTIVE_KEYS: &[&str] = &["numerator", "denominator", "repetitions", "shared_starts"];
const EDO_KEYS: &[&str] = &["alpha", "warmup"];

impl EvolverConfig {
    pub fn new(evolver: EvolverKind, budget: u64, seed: u64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            evolver,
            n: default_n(),
            budget,
            mu: default_mu(),
            suite: default_suite(),
            feature_set: default_feature_set(),
            objective: ObjectiveSpec::fi_vs_ni(),
            seed,
            snapshot_every: default_snapshot_every(),
            edo: EdoParams::default(),
        }
    }

    pub fn qd(budget: u64, seed: u64) -> Self {
        Self::new(EvolverKind::Qd, budget, seed)
    }

    pub fn with_mu(mut self, mu: usize) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_suite(mut self, id: &str) -> Self {
        self.suite = SuiteConfig::Named(id.into());
        self
    }

    pub fn with_feature_set(mut self, id: &str) -> Self {
        self.feature_set = FeatureSetConfig::Named(id.into());
        self
    }

    pub fn with_objective(mut self, objective: ObjectiveSpec) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// Parses a JSON config, reporting every unknown key at once before
    /// checking types and values.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}: {e}", e.line())))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(map) = &value else {
            return Err(Error::Config("config must be a JSON object".into()));
        };
        let mut unknown: Vec<String> = map
            .keys()
            .filter(|k| !TOP_LEVEL_KEYS.contains(&k.as_str()))
            .cloned()
            .collect();
        let mut nested = |section: &str, allowed: &[&str]| {
            if let Some(Value::Object(inner)) = map.get(section) {
                unknown.extend(
                    inner
                        .keys()
                        .filter(|k| !allowed.contains(&k.as_str()))
                        .map(|k| format!("{section}.{k}")),
                );
            }
        };
        nested("objective", OBJECTIVE_KEYS);
        nested("edo", EDO_KEYS);
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
        }
        let cfg: EvolverConfig =
            serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.schema != SCHEMA_VERSION {
            problems.push(format!("schema: expected {SCHEMA_VERSION}, got {}", self.schema));
        }
        if self.mu == 0 {
            problems.push("mu: must be >= 1".to_string());
        }
        if self.snapshot_every == 0 {
            problems.push("snapshot_every: must be >= 1".to_string());
        }
        if let Err(e) = self.objective.validate() {
            problems.push(format!("objective: {e}"));
        }
        if let Err(e) = self.suite.build() {
            problems.push(format!("suite: {e}"));
        }
        match self.feature_set.build() {
            Ok(fs) => {
                if self.n < fs.min_cities().max(crate::instance::Instance::MIN_CITIES) {
                    problems.push(format!(
                        "n: feature set {} needs at least {} cities",
                        fs.id,
                        fs.min_cities().max(4)
                    ));
                }
                if self.evolver.is_edo() && !(1..=3).contains(&fs.arity()) {
                    problems.push("feature_set: diversity indicators support 1 to 3 features".into());
                }
            }
            Err(e) => problems.push(format!("feature_set: {e}")),
        }
        if self.evolver.is_edo() && !(self.edo.alpha > 0.0) {
            problems.push(format!("edo.alpha: must be > 0, got {}", self.edo.alpha));
        }
        if self.n < crate::instance::Instance::MIN_CITIES {
            problems.push(format!("n: must be >= {}", crate::instance::Instance::MIN_CITIES));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// File-name friendly label, e.g. `qd_all` or `ea_archive_mu50_simple`.
    pub fn label(&self) -> String {
        match self.evolver {
            EvolverKind::Qd => format!("qd_{}", self.suite.id()),
            kind => format!("{}_mu{}_{}", kind.id(), self.mu, self.suite.id()),
        }
    }

    /// Human-readable name, e.g. `QD [all]` or `(50+1) EA-IGD [simple]`.
    pub fn display_name(&self) -> String {
        let suite = self.suite.id();
        match self.evolver {
            EvolverKind::Qd => format!("QD [{suite}]"),
            EvolverKind::Ea => format!("({}+1) EA-footprint [{suite}]", self.mu),
            EvolverKind::EaArchive => format!("({}+1) EA [{suite}]", self.mu),
            EvolverKind::EdoIgd => format!("({}+1) EA-IGD [{suite}]", self.mu),
            EvolverKind::EdoHv => format!("({}+1) EA-HV [{suite}]", self.mu),
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config is always serializable");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Stable identifier linking archive and log of this run.
    pub fn run_id(&self) -> String {
        format!("{}-{}", self.label(), &self.hash()[..12])
    }
}
