//! Point-cloud mutation operators.
//!
//! "Simple" operators move individual cities (uniform re-location, Gaussian
//! noise). The disruptive ones move whole regions: implosion, explosion,
//! cluster and axis projection. Every operator returns a fresh instance with
//! all coordinates clamped into the unit square; the parent is untouched.

use rand::seq::index::sample;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Point, Provenance};

/// Closed interval a parameter is drawn from uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub const fn fixed(v: f64) -> Self {
        Self { min: v, max: v }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            rng.random_range(self.min..=self.max)
        }
    }

    fn check(&self, name: &str, lo: f64, hi: f64) -> Result<()> {
        if !(lo <= self.min && self.min <= self.max && self.max <= hi) {
            return Err(Error::InvalidParameter(format!(
                "{name} range [{}, {}] must satisfy {lo} <= min <= max <= {hi}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

/// A mutation operator and its parameter distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Operator {
    /// Each city is resampled uniformly with probability `rate`.
    Relocate { rate: f64 },
    /// Each city gets `N(0, sigma^2 I)` noise with probability `rate`;
    /// `sigma` is drawn once per application.
    Gaussian { rate: f64, sigma: Range },
    /// Cities within `radius` of a uniform center move to
    /// `c + contraction * (q - c)`.
    Implosion { radius: Range, contraction: Range },
    /// Cities at distance `d < radius` from a uniform center move along their
    /// ray to distance `radius + strength * (radius - d)`.
    Explosion { radius: Range, strength: Range },
    /// A random `fraction` of the cities is redrawn from `N(c, sigma^2 I)`
    /// around a uniform center.
    Cluster { fraction: Range, sigma: f64 },
    /// A random `fraction` of the cities is projected onto a uniformly placed
    /// horizontal or vertical line.
    AxisProjection { fraction: Range },
}

impl Operator {
    pub fn relocate() -> Self {
        Operator::Relocate { rate: 0.1 }
    }

    pub fn gaussian() -> Self {
        Operator::Gaussian {
            rate: 0.1,
            sigma: Range::new(0.01, 0.1),
        }
    }

    pub fn implosion() -> Self {
        Operator::Implosion {
            radius: Range::new(0.1, 0.4),
            contraction: Range::new(0.1, 0.9),
        }
    }

    pub fn explosion() -> Self {
        Operator::Explosion {
            radius: Range::new(0.1, 0.4),
            strength: Range::new(0.1, 0.9),
        }
    }

    pub fn cluster() -> Self {
        Operator::Cluster {
            fraction: Range::new(0.1, 0.5),
            sigma: 0.02,
        }
    }

    pub fn axis_projection() -> Self {
        Operator::AxisProjection {
            fraction: Range::new(0.2, 0.8),
        }
    }

    /// Operator with default parameters by registry id.
    pub fn by_id(id: &str) -> Result<Self> {
        Ok(match id {
            "relocate" => Self::relocate(),
            "gaussian" => Self::gaussian(),
            "implosion" => Self::implosion(),
            "explosion" => Self::explosion(),
            "cluster" => Self::cluster(),
            "axis_projection" => Self::axis_projection(),
            _ => {
                return Err(Error::UnknownId {
                    kind: "mutation operator",
                    id: id.into(),
                })
            }
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            Operator::Relocate { .. } => "relocate",
            Operator::Gaussian { .. } => "gaussian",
            Operator::Implosion { .. } => "implosion",
            Operator::Explosion { .. } => "explosion",
            Operator::Cluster { .. } => "cluster",
            Operator::AxisProjection { .. } => "axis_projection",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rate_ok = |r: f64| {
            if (0.0..=1.0).contains(&r) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("rate {r} not in [0, 1]")))
            }
        };
        match self {
            Operator::Relocate { rate } => rate_ok(*rate),
            Operator::Gaussian { rate, sigma } => {
                rate_ok(*rate)?;
                sigma.check("sigma", 0.0, f64::INFINITY)
            }
            Operator::Implosion {
                radius,
                contraction,
            } => {
                radius.check("radius", 0.0, f64::INFINITY)?;
                contraction.check("contraction", 0.0, 1.0)
            }
            Operator::Explosion { radius, strength } => {
                radius.check("radius", 0.0, f64::INFINITY)?;
                strength.check("strength", 0.0, f64::INFINITY)
            }
            Operator::Cluster { fraction, sigma } => {
                fraction.check("fraction", 0.0, 1.0)?;
                if *sigma < 0.0 {
                    return Err(Error::InvalidParameter(format!("sigma {sigma} < 0")));
                }
                Ok(())
            }
            Operator::AxisProjection { fraction } => fraction.check("fraction", 0.0, 1.0),
        }
    }

    /// Applies the operator, drawing its parameters from `rng`.
    pub fn apply(&self, instance: &Instance, rng: &mut dyn RngCore) -> Instance {
        let pts = instance.points();
        let moved = match *self {
            Operator::Relocate { rate } => relocate(pts, rate, rng),
            Operator::Gaussian { rate, sigma } => {
                let sigma = sigma.sample(rng);
                gaussian(pts, rate, sigma, rng)
            }
            Operator::Implosion {
                radius,
                contraction,
            } => {
                let c = uniform_point(rng);
                let r = radius.sample(rng);
                let lambda = contraction.sample(rng);
                implode(pts, c, r, lambda)
            }
            Operator::Explosion { radius, strength } => {
                let c = uniform_point(rng);
                let r = radius.sample(rng);
                let s = strength.sample(rng);
                explode(pts, c, r, s, rng)
            }
            Operator::Cluster { fraction, sigma } => {
                let c = uniform_point(rng);
                let f = fraction.sample(rng);
                let chosen = choose_subset(pts.len(), f, rng);
                cluster(pts, &chosen, c, sigma, rng)
            }
            Operator::AxisProjection { fraction } => {
                let axis = if rng.random_bool(0.5) { Axis::X } else { Axis::Y };
                let at = rng.random::<f64>();
                let f = fraction.sample(rng);
                let chosen = choose_subset(pts.len(), f, rng);
                project_onto_axis_line(pts, &chosen, axis, at)
            }
        };
        Instance::from_clamped(moved, instance.meta().cloned())
    }
}

fn uniform_point(rng: &mut dyn RngCore) -> Point {
    let x = rng.random::<f64>();
    let y = rng.random::<f64>();
    Point::new(x, y)
}

fn choose_subset(n: usize, fraction: f64, rng: &mut dyn RngCore) -> Vec<usize> {
    let m = ((fraction * n as f64).round() as usize).min(n);
    let mut idx = sample(rng, n, m).into_vec();
    idx.sort_unstable();
    idx
}

/// Independently resamples each city with probability `rate`.
pub fn relocate(points: &[Point], rate: f64, rng: &mut dyn RngCore) -> Vec<Point> {
    points
        .iter()
        .map(|&p| {
            if rate > 0.0 && rng.random_bool(rate) {
                uniform_point(rng)
            } else {
                p
            }
        })
        .collect()
}

/// Adds isotropic Gaussian noise to each city with probability `rate`,
/// clamping to the unit square.
pub fn gaussian(points: &[Point], rate: f64, sigma: f64, rng: &mut dyn RngCore) -> Vec<Point> {
    let noise = Normal::new(0.0, sigma).expect("sigma validated as finite and >= 0");
    points
        .iter()
        .map(|&p| {
            if rate > 0.0 && rng.random_bool(rate) {
                let dx = noise.sample(rng);
                let dy = noise.sample(rng);
                Point::new(p.x + dx, p.y + dy).clamped()
            } else {
                p
            }
        })
        .collect()
}

/// Contracts every city within `radius` of `center` towards it by factor
/// `lambda`.
pub fn implode(points: &[Point], center: Point, radius: f64, lambda: f64) -> Vec<Point> {
    let r2 = radius * radius;
    points
        .iter()
        .map(|&q| {
            if q.dist2(&center) <= r2 {
                Point::new(
                    center.x + lambda * (q.x - center.x),
                    center.y + lambda * (q.y - center.y),
                )
                .clamped()
            } else {
                q
            }
        })
        .collect()
}

/// Unclamped positions after an explosion; exposed so callers can check
/// the outward displacement before clamping.
pub fn explode_unclamped(
    points: &[Point],
    center: Point,
    radius: f64,
    strength: f64,
    rng: &mut dyn RngCore,
) -> Vec<Point> {
    points
        .iter()
        .map(|&q| {
            let d = q.dist(&center);
            if d >= radius {
                return q;
            }
            let (ux, uy) = if d > 0.0 {
                ((q.x - center.x) / d, (q.y - center.y) / d)
            } else {
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                (angle.cos(), angle.sin())
            };
            let target = radius + strength * (radius - d);
            Point::new(center.x + target * ux, center.y + target * uy)
        })
        .collect()
}

/// Pushes every city closer than `radius` to `center` outward along its ray
/// to distance `radius + strength * (radius - d)`. Cities sitting exactly on
/// the center get a random direction.
pub fn explode(
    points: &[Point],
    center: Point,
    radius: f64,
    strength: f64,
    rng: &mut dyn RngCore,
) -> Vec<Point> {
    explode_unclamped(points, center, radius, strength, rng)
        .into_iter()
        .map(Point::clamped)
        .collect()
}

/// Redraws the cities in `chosen` from `N(center, sigma^2 I)`.
pub fn cluster(
    points: &[Point],
    chosen: &[usize],
    center: Point,
    sigma: f64,
    rng: &mut dyn RngCore,
) -> Vec<Point> {
    let noise = Normal::new(0.0, sigma).expect("sigma validated as finite and >= 0");
    let mut out = points.to_vec();
    for &i in chosen {
        let dx = noise.sample(rng);
        let dy = noise.sample(rng);
        out[i] = Point::new(center.x + dx, center.y + dy).clamped();
    }
    out
}

/// Projects the cities in `chosen` onto the line `x = at` (axis `X`) or
/// `y = at` (axis `Y`).
pub fn project_onto_axis_line(points: &[Point], chosen: &[usize], axis: Axis, at: f64) -> Vec<Point> {
    let mut out = points.to_vec();
    for &i in chosen {
        match axis {
            Axis::X => out[i].x = at,
            Axis::Y => out[i].y = at,
        }
    }
    out
}

/// An operator together with its on/off switch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    #[serde(flatten)]
    pub operator: Operator,
    #[serde(default = "enabled_default")]
    pub enabled: bool,
}

fn enabled_default() -> bool {
    true
}

impl From<Operator> for OperatorConfig {
    fn from(operator: Operator) -> Self {
        Self {
            operator,
            enabled: true,
        }
    }
}

/// The operators a mutation step picks from, uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSuite {
    id: String,
    operators: Vec<Operator>,
}

impl OperatorSuite {
    /// Re-location and Gaussian noise.
    pub fn simple() -> Self {
        Self {
            id: "simple".into(),
            operators: vec![Operator::relocate(), Operator::gaussian()],
        }
    }

    /// The simple operators plus implosion, explosion, cluster and axis
    /// projection.
    pub fn all() -> Self {
        Self {
            id: "all".into(),
            operators: vec![
                Operator::relocate(),
                Operator::gaussian(),
                Operator::implosion(),
                Operator::explosion(),
                Operator::cluster(),
                Operator::axis_projection(),
            ],
        }
    }

    pub fn builtin(id: &str) -> Result<Self> {
        match id {
            "simple" => Ok(Self::simple()),
            "all" => Ok(Self::all()),
            _ => Err(Error::UnknownId {
                kind: "mutation suite",
                id: id.into(),
            }),
        }
    }

    /// Suite from explicit configs; disabled entries are dropped.
    pub fn custom(id: impl Into<String>, configs: Vec<OperatorConfig>) -> Result<Self> {
        let operators: Vec<Operator> = configs
            .into_iter()
            .filter(|c| c.enabled)
            .map(|c| c.operator)
            .collect();
        if operators.is_empty() {
            return Err(Error::InvalidParameter("mutation suite has no enabled operator".into()));
        }
        for op in &operators {
            op.validate()?;
        }
        Ok(Self {
            id: id.into(),
            operators,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    /// Index of the operator the next mutation will use.
    pub fn pick(&self, rng: &mut dyn RngCore) -> usize {
        if self.operators.len() == 1 {
            0
        } else {
            rng.random_range(0..self.operators.len())
        }
    }
}

/// Mutates `instance` with one operator chosen uniformly from `suite`.
pub fn mutate(instance: &Instance, suite: &OperatorSuite, rng: &mut dyn RngCore) -> Instance {
    let op = &suite.operators[suite.pick(rng)];
    let child = op.apply(instance, rng);
    let parent_meta = instance.meta().cloned().unwrap_or_default();
    child.with_meta(Provenance {
        generation: parent_meta.generation + 1,
        operator: Some(op.id().to_string()),
        ..parent_meta
    })
}
