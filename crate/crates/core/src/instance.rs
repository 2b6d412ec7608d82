//! Euclidean TSP instances in the unit square.
//!
//! Two on-disk formats are supported: the native JSON document
//! `{"n": .., "points": [[x, y], ..], "meta": {..}}` and a TSPLIB subset
//! (`EDGE_WEIGHT_TYPE : EUC_2D` with a `NODE_COORD_SECTION`).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn clamped(self) -> Self {
        Self {
            x: self.x.clamp(0.0, 1.0),
            y: self.y.clamp(0.0, 1.0),
        }
    }

    fn in_unit_square(&self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Where an instance came from. Never part of equality or features.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of mutations separating this instance from its random ancestor.
    #[serde(default)]
    pub generation: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration: Option<u64>,
}

/// An immutable set of `n >= 4` cities with coordinates in `[0, 1]^2`.
#[derive(Debug, Clone)]
pub struct Instance {
    points: Vec<Point>,
    meta: Option<Provenance>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Instance {
    pub const MIN_CITIES: usize = 4;

    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < Self::MIN_CITIES {
            return Err(Error::InvalidInstance(format!(
                "need at least {} cities, got {}",
                Self::MIN_CITIES,
                points.len()
            )));
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| !p.in_unit_square()) {
            return Err(Error::InvalidInstance(format!(
                "city {i} at ({}, {}) lies outside [0,1]^2",
                p.x, p.y
            )));
        }
        Ok(Self { points, meta: None })
    }

    /// Builds an instance from points that are clamped into the unit square.
    /// Used by mutation operators, which never change the city count.
    pub(crate) fn from_clamped(points: Vec<Point>, meta: Option<Provenance>) -> Self {
        debug_assert!(points.len() >= Self::MIN_CITIES);
        let points = points.into_iter().map(Point::clamped).collect();
        Self { points, meta }
    }

    pub fn with_meta(mut self, meta: Provenance) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn meta(&self) -> Option<&Provenance> {
        self.meta.as_ref()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = InstanceFile {
            n: self.n(),
            points: self.points.clone(),
            meta: self.meta.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_at(text, Path::new("<memory>"))
    }

    fn from_json_at(text: &str, path: &Path) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            msg: e.to_string(),
        })?;
        if file.n != file.points.len() {
            return Err(Error::InvalidInstance(format!(
                "declared n = {} but {} points given",
                file.n,
                file.points.len()
            )));
        }
        let mut inst = Self::new(file.points)?;
        inst.meta = file.meta;
        Ok(inst)
    }

    /// Renders a TSPLIB `EUC_2D` document with coordinates multiplied by
    /// `scale`. The factor is recorded in the `COMMENT` line so that
    /// [`Instance::from_tsplib`] can undo it.
    pub fn to_tsplib(&self, name: &str, scale: f64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME : {name}");
        let _ = writeln!(out, "COMMENT : scale={scale}");
        let _ = writeln!(out, "TYPE : TSP");
        let _ = writeln!(out, "DIMENSION : {}", self.n());
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
        let _ = writeln!(out, "NODE_COORD_SECTION");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(out, "{} {} {}", i + 1, p.x * scale, p.y * scale);
        }
        out.push_str("EOF\n");
        out
    }

    /// Parses a TSPLIB `EUC_2D` document. Coordinates are divided by
    /// `scale`, or by the `scale=` factor found in the comment when `scale`
    /// is `None` (default 1).
    pub fn from_tsplib(text: &str, scale: Option<f64>) -> Result<Self> {
        Self::from_tsplib_at(text, scale, Path::new("<memory>"))
    }

    fn from_tsplib_at(text: &str, scale: Option<f64>, path: &Path) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut declared_scale = None;
        let mut dimension = None;
        let mut coords: Vec<(usize, Point)> = Vec::new();
        let mut in_coords = false;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line == "EOF" {
                break;
            }
            if in_coords {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(parse_err(lineno, format!("expected `id x y`, got {line:?}")));
                }
                let id: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad node id {:?}", fields[0])))?;
                let x: f64 = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad coordinate {:?}", fields[1])))?;
                let y: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad coordinate {:?}", fields[2])))?;
                coords.push((id, Point::new(x, y)));
                continue;
            }
            if line.starts_with("NODE_COORD_SECTION") {
                in_coords = true;
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                return Err(parse_err(lineno, format!("expected `KEY : VALUE`, got {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "EDGE_WEIGHT_TYPE" if value != "EUC_2D" => {
                    return Err(parse_err(
                        lineno,
                        format!("unsupported EDGE_WEIGHT_TYPE {value}"),
                    ));
                }
                "TYPE" if value != "TSP" => {
                    return Err(parse_err(lineno, format!("unsupported TYPE {value}")));
                }
                "DIMENSION" => {
                    dimension = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| parse_err(lineno, format!("bad DIMENSION {value:?}")))?,
                    );
                }
                "COMMENT" => {
                    if let Some(s) = value.strip_prefix("scale=") {
                        declared_scale = s.trim().parse::<f64>().ok();
                    }
                }
                _ => {}
            }
        }

        if let Some(d) = dimension {
            if d != coords.len() {
                return Err(Error::InvalidInstance(format!(
                    "DIMENSION {d} but {} coordinates",
                    coords.len()
                )));
            }
        }
        coords.sort_by_key(|(id, _)| *id);
        let scale = scale.or(declared_scale).unwrap_or(1.0);
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        let points = coords
            .into_iter()
            .map(|(_, p)| Point::new(p.x / scale, p.y / scale))
            .collect();
        Self::new(points)
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Provenance>,
}

/// Random uniform Euclidean instance: every coordinate i.i.d. `U[0, 1)`.
pub fn rue_instance<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Instance> {
    if n < Instance::MIN_CITIES {
        return Err(Error::InvalidInstance(format!(
            "need at least {} cities, got {n}",
            Instance::MIN_CITIES
        )));
    }
    let points = (0..n)
        .map(|_| {
            let x = rng.random::<f64>();
            let y = rng.random::<f64>();
            Point::new(x, y)
        })
        .collect();
    Instance::new(points)
}

/// Loads an instance; `.tsp` files are read as TSPLIB, everything else as JSON.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if is_tsplib(path) {
        Instance::from_tsplib_at(&text, None, path)
    } else {
        Instance::from_json_at(&text, path)
    }
}

/// Writes an instance; `.tsp` paths get TSPLIB with scale 1, others JSON.
pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = if is_tsplib(path) {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("instance");
        instance.to_tsplib(name, 1.0)
    } else {
        instance.to_json()?
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn is_tsplib(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsp"))
}
