//! Feature-space diversity indicators used by the EDO evolvers.
//!
//! Both work on feature vectors normalized to the unit cube. The IGD
//! reference set is the cube's corners plus a cell-centered lattice with 32
//! points per axis. The hypervolume variant maps every point `f` to
//! `(f, 1 - f)` and measures the volume it dominates (maximization) with
//! respect to the origin, which rewards spread in both directions of every
//! feature.

/// Points per axis of the IGD reference lattice.
pub const IGD_LATTICE: usize = 32;

pub trait DiversityIndicator: Send + Sync {
    /// A loss score per point; removing the point with the smallest score
    /// degrades the indicator least.
    fn removal_losses(&self, points: &[Vec<f64>]) -> Vec<f64>;
}

/// Inverted generational distance to a fixed reference set (lower is more
/// diverse).
#[derive(Debug, Clone)]
pub struct Igd {
    reference: Vec<Vec<f64>>,
}

impl Igd {
    pub fn new(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "IGD reference set supports 1 to 3 dimensions");
        let mut reference = Vec::new();
        for mask in 0..(1usize << dim) {
            reference.push((0..dim).map(|d| ((mask >> d) & 1) as f64).collect());
        }
        let cells = IGD_LATTICE.pow(dim as u32);
        for c in 0..cells {
            let mut rest = c;
            let mut p = Vec::with_capacity(dim);
            for _ in 0..dim {
                p.push(((rest % IGD_LATTICE) as f64 + 0.5) / IGD_LATTICE as f64);
                rest /= IGD_LATTICE;
            }
            reference.push(p);
        }
        Self { reference }
    }

    pub fn reference(&self) -> &[Vec<f64>] {
        &self.reference
    }

    pub fn value(&self, points: &[Vec<f64>]) -> f64 {
        if points.is_empty() {
            return f64::INFINITY;
        }
        let total: f64 = self
            .reference
            .iter()
            .map(|r| points.iter().map(|p| euclid(r, p)).fold(f64::INFINITY, f64::min))
            .sum();
        total / self.reference.len() as f64
    }
}

impl DiversityIndicator for Igd {
    /// IGD of the set without each point, computed from the nearest and
    /// second-nearest point of every reference point in one pass.
    fn removal_losses(&self, points: &[Vec<f64>]) -> Vec<f64> {
        let m = points.len();
        let mut base = 0.0;
        let mut extra = vec![0.0; m];
        for r in &self.reference {
            let (mut d1, mut i1, mut d2) = (f64::INFINITY, usize::MAX, f64::INFINITY);
            for (i, p) in points.iter().enumerate() {
                let d = euclid(r, p);
                if d < d1 {
                    d2 = d1;
                    d1 = d;
                    i1 = i;
                } else if d < d2 {
                    d2 = d;
                }
            }
            base += d1;
            if i1 != usize::MAX {
                extra[i1] += d2 - d1;
            }
        }
        let k = self.reference.len() as f64;
        extra.iter().map(|e| (base + e) / k).collect()
    }
}

/// Dimension-doubled hypervolume (higher is more diverse).
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubledHypervolume;

impl DoubledHypervolume {
    pub fn transform(p: &[f64]) -> Vec<f64> {
        p.iter().copied().chain(p.iter().map(|v| 1.0 - v)).collect()
    }

    pub fn value(&self, points: &[Vec<f64>]) -> f64 {
        let mapped: Vec<Vec<f64>> = points.iter().map(|p| Self::transform(p)).collect();
        hypervolume(&mapped)
    }
}

impl DiversityIndicator for DoubledHypervolume {
    /// Exclusive hypervolume contribution of each point.
    fn removal_losses(&self, points: &[Vec<f64>]) -> Vec<f64> {
        let mapped: Vec<Vec<f64>> = points.iter().map(|p| Self::transform(p)).collect();
        exclusive_contributions(&mapped)
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Volume dominated by `points` with respect to the origin (maximization).
pub fn hypervolume(points: &[Vec<f64>]) -> f64 {
    let mut pts = nondominated(points.to_vec());
    if pts.is_empty() {
        return 0.0;
    }
    let d = pts[0].len();
    match d {
        0 => 0.0,
        1 => pts.iter().map(|p| p[0]).fold(0.0, f64::max),
        2 => {
            // x descending, so y ascends along the front
            pts.sort_by(|a, b| b[0].total_cmp(&a[0]));
            let mut area = 0.0;
            let mut y_prev = 0.0;
            for p in &pts {
                if p[1] > y_prev {
                    area += p[0] * (p[1] - y_prev);
                    y_prev = p[1];
                }
            }
            area
        }
        _ => {
            // WFG: sum of exclusive volumes against the points sorted after.
            pts.sort_by(|a, b| b[d - 1].total_cmp(&a[d - 1]));
            (0..pts.len())
                .map(|i| {
                    let p = &pts[i];
                    let limited: Vec<Vec<f64>> = pts[i + 1..].iter().map(|q| limit(q, p)).collect();
                    box_volume(p) - hypervolume(&limited)
                })
                .sum()
        }
    }
}

/// Exclusive hypervolume contribution of each point.
pub fn exclusive_contributions(points: &[Vec<f64>]) -> Vec<f64> {
    (0..points.len())
        .map(|i| {
            let p = &points[i];
            let duplicate = points.iter().enumerate().any(|(j, q)| j != i && q == p);
            if duplicate {
                return 0.0;
            }
            let limited: Vec<Vec<f64>> = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| limit(q, p))
                .collect();
            (box_volume(p) - hypervolume(&limited)).max(0.0)
        })
        .collect()
}

fn limit(q: &[f64], p: &[f64]) -> Vec<f64> {
    q.iter().zip(p).map(|(a, b)| a.min(*b)).collect()
}

fn box_volume(p: &[f64]) -> f64 {
    p.iter().map(|v| v.max(0.0)).product()
}

fn dominates_weakly(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

fn nondominated(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.retain(|p| box_volume(p) > 0.0);
    let mut keep: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        if keep.iter().any(|k| dominates_weakly(k, &p)) {
            continue;
        }
        keep.retain(|k| !dominates_weakly(&p, k));
        keep.push(p);
    }
    keep
}
