//! Insertion heuristics, tour evaluation and the tour-length-ratio objective.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Point};

/// Dense symmetric Euclidean distance matrix.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(points: &[Point]) -> Self {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = points[i].dist(&points[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self { n, d }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

/// A closed tour; `length` includes the edge back to the first city.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

/// Length of the closed tour `order` over `points`.
pub fn tour_length(points: &[Point], order: &[usize]) -> Result<f64> {
    check_permutation(order, points.len())?;
    Ok(cycle_length(order, |a, b| points[a].dist(&points[b])))
}

fn cycle_length(order: &[usize], d: impl Fn(usize, usize) -> f64) -> f64 {
    match order.len() {
        0 | 1 => 0.0,
        m => (0..m).map(|i| d(order[i], order[(i + 1) % m])).sum(),
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidParameter(format!(
            "tour visits {} cities, instance has {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidParameter(format!("tour is not a permutation (city {v})")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionRule {
    /// Insert the city farthest from the partial tour next.
    Farthest,
    /// Insert the city nearest to the partial tour next.
    Nearest,
}

/// Generic insertion heuristic. The tour starts as `[start]`; each step
/// picks the next city by `rule` on its distance to the partial tour
/// (ties: lowest index) and inserts it where `d(a,v) + d(v,b) - d(a,b)` is
/// smallest (ties: earliest position).
pub fn insertion_tour(dist: &DistanceMatrix, start: usize, rule: InsertionRule) -> Tour {
    let n = dist.n();
    assert!(start < n, "start node {start} out of range for n = {n}");
    // Cities already in the tour get a sentinel that never wins selection.
    let taken = match rule {
        InsertionRule::Farthest => f64::NEG_INFINITY,
        InsertionRule::Nearest => f64::INFINITY,
    };
    let mut to_tour: Vec<f64> = dist.row(start).to_vec();
    to_tour[start] = taken;
    let mut order = Vec::with_capacity(n);
    // edge[i] = d(order[i], order[i + 1]), the last entry closes the cycle
    let mut edge: Vec<f64> = Vec::with_capacity(n);
    order.push(start);
    edge.push(0.0);

    let mut pick = select(&to_tour, rule);
    for _ in 1..n {
        let v = pick;
        let row = dist.row(v);
        let m = order.len();
        let mut best_pos = 0;
        let mut best_cost = f64::INFINITY;
        for (i, (w, e)) in order.windows(2).zip(&edge).enumerate() {
            let cost = row[w[0]] + row[w[1]] - e;
            if cost < best_cost {
                best_cost = cost;
                best_pos = i;
            }
        }
        let closing = row[order[m - 1]] + row[order[0]] - edge[m - 1];
        if closing < best_cost {
            best_pos = m - 1;
        }
        let a = order[best_pos];
        let b = order[(best_pos + 1) % m];
        edge[best_pos] = row[a];
        edge.insert(best_pos + 1, row[b]);
        order.insert(best_pos + 1, v);

        to_tour[v] = taken;
        // Update distances to the tour and select the next city in one pass.
        let mut next = usize::MAX;
        let mut next_d = taken;
        for (w, (t, &d)) in to_tour.iter_mut().zip(row).enumerate() {
            if *t == taken {
                continue;
            }
            if d < *t {
                *t = d;
            }
            let better = match rule {
                InsertionRule::Farthest => *t > next_d,
                InsertionRule::Nearest => *t < next_d,
            } || next == usize::MAX;
            if better {
                next = w;
                next_d = *t;
            }
        }
        pick = next;
    }

    let length = cycle_length(&order, |a, b| dist.get(a, b));
    Tour { order, length }
}

/// Index of the farthest (or nearest) city by distance to the tour, lowest
/// index on ties.
fn select(to_tour: &[f64], rule: InsertionRule) -> usize {
    let mut pick = 0;
    let mut pick_d = to_tour[0];
    for (v, &d) in to_tour.iter().enumerate().skip(1) {
        let better = match rule {
            InsertionRule::Farthest => d > pick_d,
            InsertionRule::Nearest => d < pick_d,
        };
        if better {
            pick = v;
            pick_d = d;
        }
    }
    pick
}

pub fn farthest_insertion(instance: &Instance, start: usize) -> Tour {
    insertion_tour(&DistanceMatrix::new(instance.points()), start, InsertionRule::Farthest)
}

pub fn nearest_insertion(instance: &Instance, start: usize) -> Tour {
    insertion_tour(&DistanceMatrix::new(instance.points()), start, InsertionRule::Nearest)
}

/// A tour construction method addressable by id.
pub trait TourSolver: Send + Sync {
    fn id(&self) -> &str;

    fn solve(&self, instance: &Instance, dist: &DistanceMatrix, start: usize) -> Tour;
}

#[derive(Debug, Clone, Copy)]
pub struct Insertion(pub InsertionRule);

impl TourSolver for Insertion {
    fn id(&self) -> &str {
        match self.0 {
            InsertionRule::Farthest => "FI",
            InsertionRule::Nearest => "NI",
        }
    }

    fn solve(&self, _instance: &Instance, dist: &DistanceMatrix, start: usize) -> Tour {
        insertion_tour(dist, start, self.0)
    }
}

/// Looks up a registered solver ("FI" or "NI").
pub fn solver_by_id(id: &str) -> Result<Arc<dyn TourSolver>> {
    match id {
        "FI" => Ok(Arc::new(Insertion(InsertionRule::Farthest))),
        "NI" => Ok(Arc::new(Insertion(InsertionRule::Nearest))),
        _ => Err(Error::UnknownId {
            kind: "solver",
            id: id.into(),
        }),
    }
}

/// Which solver goes on top of the ratio and how many runs each gets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    pub numerator: String,
    pub denominator: String,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Reuse the same start nodes for both solvers within one evaluation.
    #[serde(default)]
    pub shared_starts: bool,
}

fn default_repetitions() -> usize {
    5
}

impl ObjectiveSpec {
    pub fn new(numerator: &str, denominator: &str) -> Self {
        Self {
            numerator: numerator.into(),
            denominator: denominator.into(),
            repetitions: default_repetitions(),
            shared_starts: false,
        }
    }

    pub fn fi_vs_ni() -> Self {
        Self::new("FI", "NI")
    }

    pub fn ni_vs_fi() -> Self {
        Self::new("NI", "FI")
    }

    /// Label such as `FI-vs-NI`.
    pub fn direction(&self) -> String {
        format!("{}-vs-{}", self.numerator, self.denominator)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
        }
        if self.numerator == self.denominator {
            return Err(Error::InvalidParameter(format!(
                "numerator and denominator are both {}",
                self.numerator
            )));
        }
        solver_by_id(&self.numerator)?;
        solver_by_id(&self.denominator)?;
        Ok(())
    }
}

impl fmt::Display for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.direction())
    }
}

/// Result of one ratio evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioOutcome {
    pub ratio: f64,
    pub numerator_mean: f64,
    pub denominator_mean: f64,
    /// Both means were zero (all cities coincide); `ratio` is then 1.
    pub degenerate: bool,
}

/// Combines per-solver mean tour lengths into the objective value.
pub fn ratio_from_means(numerator_mean: f64, denominator_mean: f64) -> RatioOutcome {
    let degenerate = denominator_mean <= 0.0 || numerator_mean <= 0.0;
    let ratio = if degenerate {
        1.0
    } else {
        numerator_mean / denominator_mean
    };
    RatioOutcome {
        ratio,
        numerator_mean,
        denominator_mean,
        degenerate,
    }
}

/// Tour-length-ratio objective between two solvers (minimized).
#[derive(Clone)]
pub struct TourRatio {
    numerator: Arc<dyn TourSolver>,
    denominator: Arc<dyn TourSolver>,
    repetitions: usize,
    shared_starts: bool,
}

impl fmt::Debug for TourRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TourRatio")
            .field("numerator", &self.numerator.id())
            .field("denominator", &self.denominator.id())
            .field("repetitions", &self.repetitions)
            .field("shared_starts", &self.shared_starts)
            .finish()
    }
}

impl TourRatio {
    pub fn from_spec(spec: &ObjectiveSpec) -> Result<Self> {
        if spec.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
        }
        Ok(Self {
            numerator: solver_by_id(&spec.numerator)?,
            denominator: solver_by_id(&spec.denominator)?,
            repetitions: spec.repetitions,
            shared_starts: spec.shared_starts,
        })
    }

    pub fn with_solvers(
        numerator: Arc<dyn TourSolver>,
        denominator: Arc<dyn TourSolver>,
        repetitions: usize,
        shared_starts: bool,
    ) -> Self {
        assert!(repetitions >= 1);
        Self {
            numerator,
            denominator,
            repetitions,
            shared_starts,
        }
    }

    /// Draws start nodes uniformly, averages each solver's tour length over
    /// its runs and returns mean(numerator) / mean(denominator).
    pub fn evaluate_detailed(&self, instance: &Instance, rng: &mut dyn RngCore) -> RatioOutcome {
        let n = instance.n();
        let dist = DistanceMatrix::new(instance.points());
        let num_starts: Vec<usize> = (0..self.repetitions).map(|_| rng.random_range(0..n)).collect();
        let den_starts: Vec<usize> = if self.shared_starts {
            num_starts.clone()
        } else {
            (0..self.repetitions).map(|_| rng.random_range(0..n)).collect()
        };
        let mean = |solver: &dyn TourSolver, starts: &[usize]| {
            starts
                .iter()
                .map(|&s| solver.solve(instance, &dist, s).length)
                .sum::<f64>()
                / starts.len() as f64
        };
        ratio_from_means(
            mean(self.numerator.as_ref(), &num_starts),
            mean(self.denominator.as_ref(), &den_starts),
        )
    }
}

/// Convenience wrapper: builds the objective from `spec` and evaluates once.
pub fn objective_ratio(
    instance: &Instance,
    spec: &ObjectiveSpec,
    rng: &mut dyn RngCore,
) -> Result<RatioOutcome> {
    Ok(TourRatio::from_spec(spec)?.evaluate_detailed(instance, rng))
}
