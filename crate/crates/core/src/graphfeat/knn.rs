use crate::error::{Error, Result};
use crate::instance::Point;

/// Directed k-nearest-neighbor graph. Node `v` has an edge to each of its
/// `k` nearest other nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnnGraph {
    n: usize,
    k: usize,
    out: Vec<usize>,
}

impl KnnGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Out-neighbors of `v`, nearest first.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v * self.k..(v + 1) * self.k]
    }

    /// Builds a graph from explicit adjacency lists. Every list must have
    /// the same length `k < n` and contain no self-loops.
    pub fn from_adjacency(adj: &[Vec<usize>]) -> Result<Self> {
        let n = adj.len();
        let k = adj.first().map_or(0, Vec::len);
        if k >= n {
            return Err(Error::InvalidParameter(format!("k = {k} must be < n = {n}")));
        }
        let mut out = Vec::with_capacity(n * k);
        for (v, list) in adj.iter().enumerate() {
            if list.len() != k || list.iter().any(|&w| w == v || w >= n) {
                return Err(Error::InvalidParameter(format!("bad adjacency for node {v}")));
            }
            out.extend_from_slice(list);
        }
        Ok(Self { n, k, out })
    }
}

/// Computes the k-NNG of `points`. Distance ties go to the lower index.
pub fn knn_graph(points: &[Point], k: usize) -> Result<KnnGraph> {
    let n = points.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "k-NNG needs 0 < k < n, got k = {k}, n = {n}"
        )));
    }
    let mut out = Vec::with_capacity(n * k);
    // Sorted by (squared distance, index); candidates arrive in index order
    // so a strict comparison keeps the lower index on ties.
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (v, p) in points.iter().enumerate() {
        best.clear();
        for (w, q) in points.iter().enumerate() {
            if w == v {
                continue;
            }
            let d = p.dist2(q);
            if best.len() == k && d >= best[k - 1].0 {
                continue;
            }
            let pos = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(pos, (d, w));
            best.truncate(k);
        }
        out.extend(best.iter().map(|&(_, w)| w));
    }
    Ok(KnnGraph { n, k, out })
}
